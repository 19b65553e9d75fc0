"""Secrecy outage probability and effective secrecy throughput.

Both schemes reduce the lower bound on the SOP to

    P_L = 1 - int_0^inf S_RF(Theta x) S_RD(Theta x) f_E(x) dx

where S_RF and f_E are finite sums of ``w x**j exp(-u x)`` terms (which
link is the selected one depends on the scheme) and S_RD is the FSO
survival function.  Each monomial integrates against S_RD in closed form
through a G^{r,r+2}_{r+2,2r} kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalFailure
from .fso import DEFAULT_K, FsoLink, FsoSeriesTable, build_series_table, fso_snr_cdf
from .rf import MAX, MIN, RfLink, enumerate_selection_table, mrc_cdf, mrc_pdf, _mixture_sum
from .specfun import MeijerGSpec, meijer_g_batch, meijer_g_scaled, residue_tail_scaled

__all__ = [
    "TASR",
    "TASE",
    "ATAS",
    "OTAS",
    "SystemModel",
    "SopKernelTerm",
    "SecrecyResult",
    "series_table",
    "equivalent_snr_cdf",
    "sop_bound",
    "sop_bound_detail",
    "sop_asymptotic",
    "sop_floor",
    "sop_exact_numeric",
    "est",
    "atas_select",
    "sop_bound_atas",
    "analyze",
]

TASR = "TASR"
TASE = "TASE"
ATAS = "ATAS"
OTAS = "OTAS"
CLOSED_FORM_SCHEMES = (TASR, TASE)


@dataclass(frozen=True)
class SystemModel:
    N_S: int = 5
    rf_sr: RfLink = field(default_factory=RfLink)
    rf_se: RfLink = field(default_factory=RfLink)
    fso: FsoLink = field(default_factory=FsoLink)
    Rs: float = 0.01
    K: int = DEFAULT_K

    def __post_init__(self):
        if int(self.N_S) != self.N_S or self.N_S < 1:
            raise DomainError(f"N_S must be a positive integer, got {self.N_S!r}")
        if not self.Rs > 0:
            raise DomainError(f"Rs must be positive, got {self.Rs!r}")
        if int(self.K) != self.K or self.K < 1:
            raise DomainError(f"K must be a positive integer, got {self.K!r}")

    @property
    def Theta(self) -> float:
        return 2.0 ** self.Rs


@lru_cache(maxsize=32)
def _unit_table(link: FsoLink, K: int) -> FsoSeriesTable:
    return build_series_table(link.with_mean_snr(1.0), K)


def series_table(model: SystemModel) -> FsoSeriesTable:
    """FSO series table of ``model``; coefficients are cached across SNRs."""
    return _unit_table(model.fso, model.K).with_mean_snr(model.fso.mean_electrical_snr)


@lru_cache(maxsize=64)
def _selection(link: RfLink, N_S: int, mode: str):
    return enumerate_selection_table(link, N_S, mode)


def _gamma_survival_monomials(link: RfLink, scale: float = 1.0):
    # 1 - F(scale x) for Gamma(tau, lambda): sum_i (lam scale x)^i / i! e^{-lam scale x}
    i = np.arange(link.tau, dtype=float)
    u = link.lam * scale
    w = np.exp(i * math.log(u) - np.array([math.lgamma(v + 1) for v in i]))
    return w, i, np.full(link.tau, u)


def _merge(w, nu, phi):
    # equal (nu, phi) pairs share one kernel
    acc = {}
    for wi, n, p in zip(w, nu, phi):
        acc.setdefault((n, p), []).append(wi)
    keys = sorted(acc)
    return (np.array([math.fsum(acc[k]) for k in keys]),
            np.array([k[0] for k in keys]), np.array([k[1] for k in keys]))


def _integrand_terms(model: SystemModel, scheme: str):
    """Monomials ``w x**(nu-1) exp(-phi x)`` of S_RF(Theta x) f_E(x)."""
    return _merge(*_raw_integrand_terms(model, scheme))


def _raw_integrand_terms(model: SystemModel, scheme: str):
    th = model.Theta
    if scheme == TASR:
        sel = _selection(model.rf_sr, model.N_S, MAX)
        ws, ts, us = sel.survival_monomials()
        e = model.rf_se
        log_fe = e.tau * math.log(e.lam) - math.lgamma(e.tau)
        w = ws * th ** ts * math.exp(log_fe)
        nu = ts + e.tau
        phi = us * th + e.lam
        return w, nu, phi
    if scheme == TASE:
        sel = _selection(model.rf_se, model.N_S, MIN)
        wf, pf, uf = sel.pdf_monomials()
        ws, ts, us = _gamma_survival_monomials(model.rf_sr, th)
        w = (ws[:, None] * wf[None, :]).ravel()
        nu = (ts[:, None] + pf[None, :] + 1.0).ravel()
        phi = (us[:, None] + uf[None, :]).ravel()
        return w, nu, phi
    raise DomainError(f"no closed form for scheme {scheme!r}")


@dataclass(frozen=True)
class SopKernelTerm:
    """One G^{r,r+2}_{r+2,2r} kernel of the SOP sum.

    ``Xi`` multiplies the bracket, ``phi_shift`` is the exponential rate of
    the monomial, ``phi_G`` the Meijer prefactor, ``upsilon_arg`` the
    Meijer argument and ``Phi`` the leading-residue value of the kernel.
    """

    k: int
    nu: float
    Xi: float
    phi_shift: float
    phi_G: float
    upsilon_arg: float
    K_upper: tuple
    K_lower: tuple
    Phi: float = float("nan")


def _delta(k: int, a: float) -> list:
    return [(a + i) / k for i in range(k)]


def kernel_spec(r: int, k: int, nu: float) -> MeijerGSpec:
    upper = _delta(r, 1.0) + _delta(2, 1.0 - nu)
    lower = _delta(r, (1.0 + k) / 2.0) + _delta(r, 0.0)
    return MeijerGSpec(r, r + 2, r + 2, 2 * r, upper, lower)


def kernel_terms(model: SystemModel, scheme: str, k: int) -> list:
    """The kernels for one power index ``k``, for inspection."""
    table = series_table(model)
    w, nu, phi = _integrand_terms(model, scheme)
    r, th = table.r, model.Theta
    out = []
    for wi, n, p in zip(w, nu, phi):
        spec = kernel_spec(r, k, n)
        pref = r ** (k / 2) * 2.0 ** (n - 0.5) / (2 * math.pi) ** (r / 2)
        z = 4.0 * table.psi1 ** r * th ** 2 / (r ** r * p ** 2)
        mant, sc, _ = residue_tail_scaled(spec, z)
        out.append(SopKernelTerm(k, float(n), float(wi / p ** n), float(p), pref, z,
                                 spec.a, spec.b, mant * math.exp(sc)))
    return out


def _log_kernel_prefactor(r, ks, nu, phi):
    return ((ks / 2.0) * math.log(r) + (nu - 0.5) * math.log(2.0)
            - (r / 2.0) * math.log(2 * math.pi) - nu * np.log(phi))


def _rd_parts(model: SystemModel, nu, phi, mode: str):
    """For each monomial, return (Z0 Gamma(nu)/phi^nu, sum_k c_k J_k).

    ``mode`` selects the kernel: 'exact' (contour G), 'residue' (leading
    residues) or 'floor' (kernel dropped).
    """
    table = series_table(model)
    r, th = table.r, model.Theta
    base = table.Z0 * np.exp(np.array([math.lgamma(v) for v in nu]) - nu * np.log(phi))
    if mode == "floor":
        return base, np.zeros(len(nu))
    log_c = np.logaddexp.reduce(table.log_coef, axis=0)
    ks = np.arange(table.K + 1)
    # kernels depend on (k, nu) through parameters and on phi through z
    K_, M = np.meshgrid(ks, np.arange(len(nu)), indexing="ij")
    K_, M = K_.ravel(), M.ravel()
    specs = [kernel_spec(r, int(k), float(nu[m])) for k, m in zip(K_, M)]
    z = 4.0 * table.psi1 ** r * th ** 2 / (r ** r * phi[M] ** 2)
    if mode == "exact":
        try:
            mant, sc = meijer_g_batch(specs, z)
        except NumericalFailure:
            for spec, zz, k, m in zip(specs, z, K_, M):
                try:
                    meijer_g_scaled(spec, zz)
                except NumericalFailure as exc:
                    raise NumericalFailure(
                        f"SOP kernel failed at k={k}, nu={nu[m]:g}, phi={phi[m]:g}: {exc}",
                        exc.error_estimate,
                    ) from exc
            raise
    else:
        out = [residue_tail_scaled(s, zz) for s, zz in zip(specs, z)]
        mant = np.array([o[0] for o in out])
        sc = np.array([o[1] for o in out])
    pos = mant > 0
    logs = np.full(len(specs), -np.inf)
    logs[pos] = (np.log(mant[pos]) + sc[pos] + log_c[K_[pos]]
                 + _log_kernel_prefactor(r, K_[pos], nu[M[pos]], phi[M[pos]]))
    neg = mant < 0
    logs_neg = np.full(len(specs), -np.inf)
    logs_neg[neg] = (np.log(-mant[neg]) + sc[neg] + log_c[K_[neg]]
                     + _log_kernel_prefactor(r, K_[neg], nu[M[neg]], phi[M[neg]]))
    series = np.zeros(len(nu))
    np.add.at(series, M, np.exp(logs) - np.exp(logs_neg))
    return base, series


def _combine(w, base, series) -> float:
    return 1.0 - math.fsum(w * (base - series))


@dataclass
class SecrecyResult:
    scheme: str
    sop_bound: float
    sop_exact: float | None = None
    sop_asymptotic: float | None = None
    est: float = 0.0
    diagnostics: list = field(default_factory=list)


def _check_scheme(scheme: str) -> str:
    s = scheme.upper()
    if s not in CLOSED_FORM_SCHEMES:
        raise DomainError(f"closed forms exist for TASR and TASE only, got {scheme!r}")
    return s


def _clamp(raw: float, what: str) -> tuple:
    diag = []
    if raw < -1e-6 or raw > 1 + 1e-6:
        diag.append(f"{what} raw value {raw:.6g} outside [0, 1], clamped")
    return min(max(raw, 0.0), 1.0), diag


def sop_bound_detail(model: SystemModel, scheme: str) -> tuple:
    """``(clamped, raw, diagnostics)`` for the closed-form SOP lower bound."""
    scheme = _check_scheme(scheme)
    w, nu, phi = _integrand_terms(model, scheme)
    base, series = _rd_parts(model, nu, phi, "exact")
    raw = _combine(w, base, series)
    val, diag = _clamp(raw, "sop_bound")
    if series_table(model).truncation_warning:
        diag.append(f"FSO series truncated at K={model.K} "
                    f"(Z0 drift {series_table(model).z0_drift:.2g} for K+40)")
    return val, raw, diag


def sop_bound(model: SystemModel, scheme: str) -> float:
    """Closed-form lower bound on the SOP, clamped to [0, 1]."""
    return sop_bound_detail(model, scheme)[0]


def sop_asymptotic(model: SystemModel, scheme: str) -> float:
    """High-SNR FSO approximation: every kernel replaced by its leading residues."""
    scheme = _check_scheme(scheme)
    w, nu, phi = _integrand_terms(model, scheme)
    base, series = _rd_parts(model, nu, phi, "residue")
    return _clamp(_combine(w, base, series), "sop_asymptotic")[0]


def sop_floor(model: SystemModel, scheme: str) -> float:
    """Limit of the SOP bound as the FSO average SNR grows without bound."""
    scheme = _check_scheme(scheme)
    w, nu, phi = _integrand_terms(model, scheme)
    base, _ = _rd_parts(model, nu, phi, "floor")
    return _clamp(_combine(w, base, 0.0), "sop_floor")[0]


def _rd_survival(model: SystemModel, x):
    return 1.0 - fso_snr_cdf(series_table(model), None, x)


def _rf_survival(model: SystemModel, scheme: str, x):
    if scheme == TASR:
        w, p, u = _selection(model.rf_sr, model.N_S, MAX).survival_monomials()
        return np.clip(_mixture_sum(w, p, u, x)[0], 0.0, 1.0)
    return 1.0 - mrc_cdf(model.rf_sr, np.atleast_1d(x))


def _eve_pdf(model: SystemModel, scheme: str, x):
    if scheme == TASR:
        return mrc_pdf(model.rf_se, x)
    w, p, u = _selection(model.rf_se, model.N_S, MIN).pdf_monomials()
    return np.maximum(_mixture_sum(w, p, u, x)[0], 0.0)


def equivalent_snr_cdf(model: SystemModel, scheme: str, gamma):
    """CDF of min(first-hop SNR, FSO SNR) for TASR or TASE."""
    scheme = _check_scheme(scheme)
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    out = 1.0 - _rf_survival(model, scheme, g) * _rd_survival(model, g)
    return float(out[0]) if np.ndim(gamma) == 0 else out


def sop_exact_numeric(model: SystemModel, scheme: str, epsabs: float = 1e-9) -> float:
    """SOP by adaptive quadrature of the exact outage event.

    Integrates F_eq(Theta x + Theta - 1) against the eavesdropper density.
    """
    scheme = _check_scheme(scheme)
    th = model.Theta

    def f(x):
        y = th * x + th - 1.0
        s = _rf_survival(model, scheme, y)[0] * _rd_survival(model, y)
        return s * float(np.atleast_1d(_eve_pdf(model, scheme, x))[0])

    eve = model.rf_se
    scale = eve.tau / eve.lam
    pieces = [0.0, scale, 4 * scale, 16 * scale, np.inf]
    total, err = 0.0, 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        v, e = integrate.quad(f, a, b, epsabs=epsabs, epsrel=1e-10, limit=200)
        total += v
        err += e
    if err > 1e-5:
        raise NumericalFailure("exact SOP quadrature did not reach 1e-5", err)
    return min(max(1.0 - total, 0.0), 1.0)


def est(model: SystemModel, sop: float) -> float:
    """Effective secrecy throughput Rs * (1 - sop)."""
    if not 0 <= sop <= 1:
        raise DomainError(f"sop must lie in [0, 1], got {sop!r}")
    return model.Rs * (1.0 - sop)


def atas_select(model: SystemModel) -> str:
    """TASR when mean SNRs satisfy S-E < S-R < R-D strictly, else TASE."""
    se, sr, rd = model.rf_se.mean_snr, model.rf_sr.mean_snr, model.fso.mean_electrical_snr
    return TASR if se < sr < rd else TASE


def sop_bound_atas(model: SystemModel) -> float:
    return sop_bound(model, atas_select(model))


def analyze(model: SystemModel, scheme: str, exact: bool = True,
            asymptotic: bool = True) -> SecrecyResult:
    """All closed-form metrics for one scheme (ATAS is dispatched)."""
    s = scheme.upper()
    target = atas_select(model) if s == ATAS else _check_scheme(s)
    val, _, diag = sop_bound_detail(model, target)
    res = SecrecyResult(s, val, diagnostics=list(diag))
    if exact:
        res.sop_exact = sop_exact_numeric(model, target)
    if asymptotic:
        res.sop_asymptotic = sop_asymptotic(model, target)
    res.est = est(model, res.sop_exact if res.sop_exact is not None else val)
    return res
