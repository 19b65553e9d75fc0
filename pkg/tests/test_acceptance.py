"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]`` or ``[FAIL]`` line with the
statistics behind the verdict and the wall time against its budget.
"""

import pytest

from rffso import validation

SEED = 0


@pytest.mark.parametrize("number", range(1, len(validation.CRITERIA) + 1))
def test_criterion(number, capsys):
    result = validation.CRITERIA[number - 1](seed=SEED)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
    assert result.in_budget, f"over time budget: {result.seconds:.1f}s > {result.budget:.0f}s"
