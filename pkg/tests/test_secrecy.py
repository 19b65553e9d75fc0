import math

import numpy as np
import pytest
from scipy import integrate

from rffso.errors import DomainError
from rffso.fso import FsoLink, fso_snr_cdf
from rffso.rf import RfLink
from rffso.secrecy import (ATAS, OTAS, TASE, TASR, SystemModel, analyze, atas_select,
                           equivalent_snr_cdf, est, series_table, sop_asymptotic, sop_bound,
                           sop_bound_atas, sop_bound_detail, sop_exact_numeric, sop_floor)

from conftest import db


def model(rd_db=0.0, sr_db=-1.0, se_db=-5.0, r=2, N_S=5, rho=0.7, Rs=0.01, K=80):
    return SystemModel(N_S, RfLink(2, 2, db(sr_db), rho), RfLink(2, 2, db(se_db), rho),
                       FsoLink(rho_fso=0.5, detection=r, mean_electrical_snr=db(rd_db)), Rs, K)


@pytest.fixture(scope="module")
def m0():
    return model()


def direct_bound(m, scheme):
    """1 - int S_eq(Theta x) f_E(x) dx by quadrature of the same ingredients."""
    from rffso.secrecy import _eve_pdf, _rf_survival

    th = m.Theta
    t = series_table(m)

    def f(x):
        y = th * x
        return (_rf_survival(m, scheme, y)[0] * (1 - fso_snr_cdf(t, None, y))
                * float(np.atleast_1d(_eve_pdf(m, scheme, x))[0]))

    s = m.rf_se.tau / m.rf_se.lam
    total = sum(integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-11, limit=200)[0]
                for a, b in zip([0, s, 4 * s, 16 * s], [s, 4 * s, 16 * s, np.inf]))
    return 1 - total


@pytest.mark.parametrize("scheme", [TASR, TASE])
@pytest.mark.parametrize("r", [1, 2])
def test_closed_form_equals_direct_quadrature(scheme, r):
    m = model(r=r)
    assert sop_bound(m, scheme) == pytest.approx(direct_bound(m, scheme), abs=1e-9)


@pytest.mark.parametrize("scheme", [TASR, TASE])
def test_bound_below_exact(m0, scheme):
    b = sop_bound(m0, scheme)
    e = sop_exact_numeric(m0, scheme)
    assert 0 <= b <= e <= 1


def test_single_antenna_schemes_coincide():
    m = model(N_S=1)
    assert sop_bound(m, TASR) == pytest.approx(sop_bound(m, TASE), abs=1e-11)


def test_floor_independent_of_rd_snr():
    f = [sop_floor(model(rd), s) for rd in (-10.0, 20.0, 60.0) for s in (TASR,)]
    assert max(f) - min(f) <= 1e-12


def test_floor_limits_bound():
    m = model(40.0)
    for s in (TASR, TASE):
        fl = sop_floor(m, s)
        assert fl <= sop_bound(m, s) <= fl + 0.01
        assert sop_asymptotic(m, s) == pytest.approx(sop_bound(m, s), rel=1e-3)


def test_bound_non_increasing_in_rd_snr():
    vals = [sop_bound(model(rd), TASE) for rd in (-10.0, -3.0, 4.0, 11.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_bound_non_decreasing_in_se_snr():
    vals = [sop_bound(model(0.0, se_db=se), TASR) for se in (-12.0, -6.0, 0.0)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_equivalent_cdf_limits(m0):
    F = equivalent_snr_cdf(m0, TASR, np.array([0.0, 1.0, 1e4]))
    t = series_table(m0)
    assert F[0] == pytest.approx(1 - t.Z0, abs=1e-12)
    assert F[2] == pytest.approx(1.0, abs=1e-9)


def test_detail_reports_truncation(m0):
    val, raw, diag = sop_bound_detail(m0, TASR)
    assert val == raw
    assert any("truncated" in d for d in diag)


def test_atas_dispatch():
    assert atas_select(model(10.0, sr_db=0.0, se_db=-5.0)) == TASR
    assert atas_select(model(10.0, sr_db=-6.0, se_db=-5.0)) == TASE
    assert atas_select(model(0.0, sr_db=0.0, se_db=-5.0)) == TASE  # tie goes to TASE
    m = model(10.0, sr_db=0.0)
    assert sop_bound_atas(m) == sop_bound(m, TASR)


def test_otas_has_no_closed_form(m0):
    with pytest.raises(DomainError):
        sop_bound(m0, OTAS)


def test_est_range(m0):
    assert est(m0, 0.25) == pytest.approx(0.0075)
    with pytest.raises(DomainError):
        est(m0, 1.5)


def test_analyze_atas(m0):
    res = analyze(m0, ATAS, exact=False)
    assert res.scheme == ATAS
    assert res.sop_bound == sop_bound(m0, atas_select(m0))
    assert res.sop_asymptotic is not None and res.sop_exact is None
    assert 0 <= res.est <= m0.Rs


def test_tight_at_small_rate():
    m = model(5.0, Rs=1e-4)
    assert 0 <= sop_exact_numeric(m, TASE) - sop_bound(m, TASE) <= 1e-4


def test_model_validation():
    with pytest.raises(DomainError):
        SystemModel(N_S=0)
    with pytest.raises(DomainError):
        SystemModel(Rs=0.0)
    assert SystemModel(Rs=1.0).Theta == 2.0
