import math
from importlib import resources

import numpy as np
import pytest
from scipy import special

from rffso.errors import DegenerateParameterError, DomainError, RegularizationWarning
from rffso.specfun import (MeijerGSpec, bessel_i, clgamma, ln_gamma, log_lower_incomplete_gamma,
                           lower_incomplete_gamma, meijer_g, meijer_g_batch, meijer_g_residue_tail,
                           meijer_g_scaled, regularized_lower_gamma)
from rffso.validation import load_meijer_fixtures


def scalar_fixtures():
    text = resources.files("rffso").joinpath("data/scalar_fixtures.txt").read_text()
    out = {}
    for line in text.splitlines():
        if line.startswith("#") or not line.strip():
            continue
        name, v, tol = (x.strip() for x in line.split("|"))
        out[name] = (float(v), float(tol))
    return out


def test_ln_gamma_matches_factorials():
    assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)
    with pytest.raises(DomainError):
        ln_gamma(0.0)


def test_clgamma_reflection():
    z = np.array([0.3 + 2j, -2.5 + 0.1j, 7.0 - 3j])
    lhs = np.exp(clgamma(z) + clgamma(1 - z))
    assert np.allclose(lhs, np.pi / np.sin(np.pi * z), rtol=1e-13)


def test_lower_incomplete_gamma_fixture():
    v, tol = scalar_fixtures()["lower_incomplete_gamma(2.5,1.3)"]
    assert abs(lower_incomplete_gamma(2.5, 1.3) / v - 1) <= tol


@pytest.mark.parametrize("a", [0.5, 1.0, 3.7, 40.0, 350.0])
@pytest.mark.parametrize("x", [1e-3, 0.9, 5.0, 60.0, 420.0])
def test_regularized_gamma_against_scipy(a, x):
    assert regularized_lower_gamma(a, x) == pytest.approx(special.gammainc(a, x), rel=1e-12, abs=1e-300)


def test_log_incomplete_gamma_large_order_stays_finite():
    v = log_lower_incomplete_gamma(400.5, 3.0)
    assert np.isfinite(v)
    # leading series term dominates for x << a
    assert v == pytest.approx(400.5 * math.log(3.0) - 3.0 - math.log(400.5), rel=1e-3)


def test_lower_incomplete_gamma_domain():
    assert lower_incomplete_gamma(2.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        lower_incomplete_gamma(-1.0, 1.0)
    with pytest.raises(DomainError):
        lower_incomplete_gamma(1.0, -1.0)


def test_bessel_fixture_and_scipy():
    v, tol = scalar_fixtures()["bessel_i(1.5,2.0)"]
    assert abs(bessel_i(1.5, 2.0) / v - 1) <= tol
    for nu, x in [(0.0, 0.3), (2.0, 15.0), (7.5, 100.0)]:
        assert bessel_i(nu, x) == pytest.approx(special.iv(nu, x), rel=1e-12)


def test_bessel_overflow_and_domain():
    with pytest.raises(OverflowError):
        bessel_i(0.0, 1000.0)
    with pytest.raises(DomainError):
        bessel_i(-1.0, 1.0)
    assert bessel_i(0.0, 0.0) == 1.0


def test_spec_validation():
    with pytest.raises(DomainError):
        MeijerGSpec(1, 1, 1, 2, (1.0,), (0.5,))
    with pytest.raises(DomainError):
        MeijerGSpec(3, 0, 1, 3, (1.0,), (0.5, 0.2, 0.1)).__class__(0, 0, 1, 3, (1.0,), (0.5, 0.2, 0.1))
    s = MeijerGSpec.from_groups([0.2], [0.7], [0.1, 0.4], [0.3])
    assert s.shape() == (2, 1, 2, 3)


@pytest.mark.parametrize("row", load_meijer_fixtures(), ids=lambda r: f"{r[0]}-{r[1].shape()}")
def test_fixture(row):
    tag, spec, z, v, tol = row
    assert abs(meijer_g(spec, z) / v - 1) <= tol


def test_exponential_reduction():
    assert meijer_g(MeijerGSpec(1, 0, 0, 1, (), (1.5,)), 2.0) == pytest.approx(2.0 ** 1.5 * math.exp(-2.0))


def test_batch_matches_scalar_contour():
    specs = [MeijerGSpec(1, 1, 1, 2, (1.0,), (a, 0.0)) for a in (0.5, 2.5, 7.0)]
    zs = np.array([0.2, 1.3, 9.0])
    mant, sc = meijer_g_batch(specs, zs)
    ref = special.gammainc([0.5, 2.5, 7.0], zs) * special.gamma([0.5, 2.5, 7.0])
    assert np.allclose(mant * np.exp(sc), ref, rtol=1e-10)


def test_reflection_identity():
    spec = MeijerGSpec(1, 3, 3, 2, (1.0, -1.5, -1.0), (0.5, 0.0))
    assert meijer_g(spec, 0.3) == pytest.approx(meijer_g(spec.reflected(), 1 / 0.3), rel=1e-12)


def test_scaled_value_beyond_double_range():
    spec = MeijerGSpec(1, 1, 1, 2, (1.0,), (300.0, 0.0))
    mant, sc = meijer_g_scaled(spec, 1e4)
    assert sc > 700 and mant > 0
    assert mant * 1.0 == pytest.approx(1.0)
    assert sc == pytest.approx(special.gammaln(300.0), rel=1e-12)


def test_interleaved_poles_use_residue_corrections():
    # left poles a - 1 - l start at 0.7, right of the first right pole b = 0.25
    spec = MeijerGSpec(1, 1, 1, 2, (1.7,), (0.25, -0.3))
    z = 0.4
    # sum of residues at the poles of Gamma(b - s)
    total = 0.0
    for k in range(60):
        total += ((-1) ** k / math.factorial(k) * special.gamma(1 - 1.7 + 0.25 + k)
                  / special.gamma(1 + 0.3 + 0.25 + k) * z ** (0.25 + k))
    assert meijer_g(spec, z) == pytest.approx(total, rel=1e-9)


def test_integer_spaced_collision_is_degenerate():
    # a pole of Gamma(b - s) coincides with a pole of Gamma(1 - a + s)
    spec = MeijerGSpec(1, 1, 1, 2, (2.0,), (0.0, 0.5))
    with pytest.raises(DegenerateParameterError):
        meijer_g(spec, 0.5)


def test_residue_tail_small_argument():
    spec = MeijerGSpec(2, 4, 4, 4, (0.5, 1.0, -1.5, -1.0), (0.5, 1.0, 0.0, 0.5))
    with pytest.warns(RegularizationWarning):
        tail = meijer_g_residue_tail(spec, 1e-8)
    assert tail.regularized
    assert tail.value == pytest.approx(meijer_g(spec, 1e-8), rel=1e-6)
    clean = MeijerGSpec(2, 4, 4, 4, (0.5, 1.0, -1.5, -1.0), (0.25, 0.75, 0.0, 0.5))
    t2 = meijer_g_residue_tail(clean, 1e-10)
    assert not t2.regularized
    assert t2.value == pytest.approx(meijer_g(clean, 1e-10), rel=1e-4)
