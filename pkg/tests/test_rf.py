import math

import numpy as np
import pytest
from scipy import integrate, stats

from rffso.errors import CapacityError, DomainError
from rffso.montecarlo import kolmogorov_smirnov
from rffso.rf import (MAX, MIN, RfLink, enumerate_selection_table, mrc_cdf, mrc_pdf,
                      sample_selection_pair, selected_snr_cdf, selected_snr_pdf)

from test_specfun import scalar_fixtures


def test_link_validation():
    with pytest.raises(DomainError):
        RfLink(m=1.5)
    with pytest.raises(DomainError):
        RfLink(rho=1.0)
    with pytest.raises(DomainError):
        RfLink(mean_snr=0.0)
    link = RfLink(2, 3, 4.0, 0.5)
    assert link.tau == 6 and link.lam == 0.5


def test_mrc_fixture():
    v, tol = scalar_fixtures()["mrc_cdf(m=2,n_rx=2,snr=2,x=3)"]
    assert abs(mrc_cdf(RfLink(2, 2, 2.0), 3.0) / v - 1) <= tol


def test_mrc_pdf_is_gamma():
    link = RfLink(3, 2, 1.7)
    x = np.array([0.1, 1.0, 4.0])
    assert np.allclose(mrc_pdf(link, x), stats.gamma(6, scale=1.7 / 3).pdf(x), rtol=1e-13)


def test_term_counts():
    link = RfLink(2, 2, 1.0, 0.85)
    assert len(enumerate_selection_table(link, 5, MAX).terms) == 70
    assert len(enumerate_selection_table(link, 5, MIN).terms) == 35
    with pytest.raises(CapacityError):
        enumerate_selection_table(link, 30, MAX, cap=1000)
    with pytest.raises(DomainError):
        enumerate_selection_table(link, 0, MAX)


@pytest.mark.parametrize("mode", [MAX, MIN])
@pytest.mark.parametrize("N_S,m,n_rx,rho,snr", [(5, 2, 2, 0.85, 1.0), (3, 1, 3, 0.5, 2.0), (2, 3, 1, 0.95, 0.5)])
def test_selected_density_normalised(mode, N_S, m, n_rx, rho, snr):
    table = enumerate_selection_table(RfLink(m, n_rx, snr, rho), N_S, mode)
    mass, _ = integrate.quad(lambda g: selected_snr_pdf(table, g), 0, np.inf, limit=200)
    assert mass == pytest.approx(1.0, abs=1e-9)
    assert selected_snr_cdf(table, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert selected_snr_cdf(table, 200.0 * snr) == pytest.approx(1.0, abs=1e-9)


def test_single_antenna_is_unselected_gamma():
    link = RfLink(2, 2, 1.5, 0.6)
    x = np.array([0.3, 2.0, 5.0])
    for mode in (MAX, MIN):
        t = enumerate_selection_table(link, 1, mode)
        assert np.allclose(selected_snr_cdf(t, x), mrc_cdf(link, x), atol=1e-13)


def test_max_beats_min_stochastically():
    link = RfLink(2, 2, 1.0, 0.7)
    hi = enumerate_selection_table(link, 4, MAX)
    lo = enumerate_selection_table(link, 4, MIN)
    x = np.linspace(0.2, 6, 12)
    assert np.all(selected_snr_cdf(hi, x) <= selected_snr_cdf(lo, x))


def test_rates_are_stable_near_full_correlation():
    t = enumerate_selection_table(RfLink(1, 1, 1.0, 0.999999), 3, MAX)
    assert np.all(np.isfinite([term.upsilon for term in t.terms]))
    assert t.upsilon == pytest.approx((1.0, 2.0, 3.0), rel=1e-5)


@pytest.mark.parametrize("mode", [MAX, MIN])
def test_sampler_matches_closed_form(mode):
    link = RfLink(2, 2, 1.0, 0.85)
    table = enumerate_selection_table(link, 5, mode)
    rng = np.random.default_rng(5)
    idx, chosen, sel, tx = sample_selection_pair(link, 5, mode, rng, 100_000)
    assert kolmogorov_smirnov(chosen, lambda g: selected_snr_cdf(table, g), 500) < 0.01
    r = np.corrcoef(sel.ravel(), tx.ravel())[0, 1]
    assert r == pytest.approx(0.85 ** 2, abs=0.01)
    assert sel.mean() == pytest.approx(link.n_rx * link.mean_snr, rel=0.01)


def test_sampler_scalar_form():
    rng = np.random.default_rng(0)
    idx, chosen, sel, tx = sample_selection_pair(RfLink(), 3, MAX, rng)
    assert idx == int(np.argmax(sel)) and chosen == tx[idx]
