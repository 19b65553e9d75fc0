import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from rffso.errors import DegenerateParameterError, DomainError, TruncationWarning
from rffso.fso import (FsoLink, MalagaParams, build_series_table, derive_malaga, exact_gain_cdf,
                       exact_gain_pdf, fso_atom, fso_snr_cdf, fso_snr_conditional_cdf, fso_snr_pdf,
                       sample_fso_gain, sample_fso_snr)
from rffso.montecarlo import kolmogorov_smirnov, split_atom

from test_specfun import scalar_fixtures


@pytest.fixture(scope="module")
def table():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return build_series_table(FsoLink(rho_fso=0.5, detection=2), 80)


def test_derived_malaga_parameters():
    g, om1 = derive_malaga(1.3265, 0.1079, 0.596, math.pi / 2)
    assert g == pytest.approx(2 * 0.1079 * (1 - 0.596))
    assert om1 == pytest.approx(1.3265 + 2 * 0.596 * 0.1079)
    with pytest.raises(DegenerateParameterError):
        derive_malaga(1.3265, 0.1079, 1.0, 0.0)


def test_beta_must_be_integer():
    with pytest.raises(DomainError):
        MalagaParams(beta=2.5)


def test_cdf_limits(table):
    assert fso_snr_cdf(table, None, 0.0) == pytest.approx(1 - table.Z0, abs=1e-15)
    assert fso_atom(table) == pytest.approx(1 - table.Z0)
    assert fso_snr_cdf(table, None, 1e6) == pytest.approx(1.0, abs=1e-12)
    g = np.logspace(-4, 3, 50)
    F = fso_snr_cdf(table, None, g)
    assert np.all(np.diff(F) >= -1e-15)
    with pytest.raises(DomainError):
        fso_snr_cdf(table, None, -1.0)


def test_pdf_integrates_to_positive_mass(table):
    mass, _ = integrate.quad(lambda g: fso_snr_pdf(table, None, g), 0, np.inf, limit=200)
    assert mass == pytest.approx(table.Z0, rel=1e-7)


def test_pdf_fixture(table):
    v, tol = scalar_fixtures()["fso_snr_pdf(rho=0.5,r=2,snr=1,gamma=1,K=80)"]
    assert abs(fso_snr_pdf(table, None, 1.0) / v - 1) <= tol


def test_pdf_is_cdf_derivative(table):
    g, h = 0.7, 1e-5
    num = (fso_snr_cdf(table, None, g + h) - fso_snr_cdf(table, None, g - h)) / (2 * h)
    assert fso_snr_pdf(table, None, g) == pytest.approx(num, rel=1e-7)


def test_mean_snr_rescaling(table):
    link = FsoLink(rho_fso=0.5, detection=2, mean_electrical_snr=10.0)
    t10 = table.with_mean_snr(10.0)
    # the SNR scales with the mean: F_10(10 g) = F_1(g)
    assert fso_snr_cdf(t10, None, 5.0) == pytest.approx(fso_snr_cdf(table, None, 0.5), rel=1e-13)
    assert fso_snr_cdf(table, link, 5.0) == pytest.approx(fso_snr_cdf(t10, None, 5.0), rel=1e-13)


def test_series_coefficient_views(table):
    assert table.G_k.shape == (2, 81)
    assert np.all(table.G_k > 0)
    assert table.phi1_lemma.shape == (2, 81)
    assert "Z0 = " in table.dump()


def test_truncation_warning_at_strong_correlation():
    with pytest.warns(TruncationWarning):
        t = build_series_table(FsoLink(rho_fso=0.8), 80)
    assert t.truncation_warning
    assert t.z0_drift > 1e-6


def test_weak_correlation_converges_fast():
    t = build_series_table(FsoLink(rho_fso=0.3), 200)
    assert t.z0_drift < 1e-7
    assert t.last_term_ratio < 1e-8


def test_exact_gain_pdf_matches_cdf():
    link = FsoLink()
    x = np.array([0.2, 0.6, 1.2])
    h = 1e-5
    num = (exact_gain_cdf(link, x + h) - exact_gain_cdf(link, x - h)) / (2 * h)
    assert np.allclose(exact_gain_pdf(link, x), num, rtol=1e-6)
    assert exact_gain_cdf(link, np.array([50.0]))[0] == pytest.approx(1.0, abs=1e-6)


def test_gain_sampler_matches_exact_law():
    link = FsoLink()
    rng = np.random.default_rng(11)
    h = sample_fso_gain(link, rng, 100_000, estimation_error=False)
    assert kolmogorov_smirnov(h, lambda x: exact_gain_cdf(link, x), 500) < 0.01


def test_snr_sampler_matches_series():
    link = FsoLink(rho_fso=0.3, detection=1, mean_electrical_snr=2.0)
    table = build_series_table(link, 200)
    rng = np.random.default_rng(12)
    pos, freq = split_atom(sample_fso_snr(link, rng, 100_000))
    p = table.atom
    assert abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / 1e5)
    d = kolmogorov_smirnov(pos, lambda g: fso_snr_conditional_cdf(table, None, g), 500)
    assert d < 0.01


def test_sampler_scalar_and_clamp():
    rng = np.random.default_rng(0)
    v = sample_fso_gain(FsoLink(), rng)
    assert isinstance(v, float) and v >= 0
    h = sample_fso_gain(FsoLink(rho_fso=0.1), rng, 10_000)
    assert h.min() == 0.0
