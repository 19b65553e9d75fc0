import warnings

import pytest

from rffso.errors import RegularizationWarning, TruncationWarning


@pytest.fixture(autouse=True)
def _quiet_expected_warnings():
    # K=80 truncation and residue splitting are reported through flags too
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        warnings.simplefilter("ignore", RegularizationWarning)
        yield


def db(x):
    return 10.0 ** (x / 10.0)
