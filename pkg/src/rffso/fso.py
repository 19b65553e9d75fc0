"""FSO hop: Malaga turbulence with pointing error and imprecise CSI.

The estimated gain is ``h_est = rho * h + sqrt(1 - rho**2) * eps`` with
``eps`` standard normal, clamped at zero, and the electrical SNR is
``gamma = mean_snr * h_est**r``.  The clamp leaves an atom of mass
``1 - Z0`` at zero; the continuous part is a double series over the
mixture index h = 1..beta and a power index k = 0..K.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateParameterError, DomainError, TruncationWarning
from .specfun import MeijerGSpec, log_lower_incomplete_gamma, meijer_g_batch

__all__ = [
    "MalagaParams",
    "PointingParams",
    "FsoLink",
    "FsoSeriesTable",
    "derive_malaga",
    "build_series_table",
    "fso_snr_pdf",
    "fso_snr_cdf",
    "fso_snr_conditional_cdf",
    "fso_atom",
    "exact_gain_pdf",
    "exact_gain_cdf",
    "sample_fso_gain",
    "sample_fso_snr",
]

DEFAULT_K = 80


def derive_malaga(Omega: float, b0: float, rho0: float, phase_diff: float) -> tuple:
    """Return ``(g, Omega1)`` for the given scatter and LOS parameters."""
    if not b0 > 0:
        raise DomainError(f"b0 must be positive, got {b0!r}")
    if not 0 <= rho0 <= 1:
        raise DomainError(f"rho0 must lie in [0, 1], got {rho0!r}")
    if rho0 == 1:
        raise DegenerateParameterError("rho0 = 1 leaves no off-axis scatter (g = 0)")
    if Omega < 0:
        raise DomainError(f"Omega must be non-negative, got {Omega!r}")
    g = 2.0 * b0 * (1.0 - rho0)
    omega1 = Omega + 2.0 * b0 * rho0 + 2.0 * math.sqrt(2.0 * b0 * rho0 * Omega) * math.cos(phase_diff)
    return g, omega1


@dataclass(frozen=True)
class MalagaParams:
    alpha: float = 2.296
    beta: int = 2
    Omega: float = 1.3265
    b0: float = 0.1079
    rho0: float = 0.596
    phase_diff: float = math.pi / 2

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if isinstance(self.beta, bool) or int(self.beta) != self.beta or self.beta < 1:
            raise DomainError(f"beta must be a positive integer, got {self.beta!r}")
        object.__setattr__(self, "beta", int(self.beta))
        _, omega1 = derive_malaga(self.Omega, self.b0, self.rho0, self.phase_diff)
        if omega1 < 0:
            raise DomainError(f"Omega1 must be non-negative, got {omega1}")

    @property
    def g(self) -> float:
        return derive_malaga(self.Omega, self.b0, self.rho0, self.phase_diff)[0]

    @property
    def Omega1(self) -> float:
        return derive_malaga(self.Omega, self.b0, self.rho0, self.phase_diff)[1]


@dataclass(frozen=True)
class PointingParams:
    xi: float = 6.7
    A0: float = 1.0

    def __post_init__(self):
        if not self.xi > 0:
            raise DomainError(f"xi must be positive, got {self.xi!r}")
        if not 0 < self.A0 <= 1:
            raise DomainError(f"A0 must lie in (0, 1], got {self.A0!r}")


@dataclass(frozen=True)
class FsoLink:
    malaga: MalagaParams = field(default_factory=MalagaParams)
    pointing: PointingParams = field(default_factory=PointingParams)
    path_loss: float = 0.9
    rho_fso: float = 0.5
    detection: int = 2
    mean_electrical_snr: float = 1.0

    def __post_init__(self):
        if not self.path_loss > 0:
            raise DomainError(f"path_loss must be positive, got {self.path_loss!r}")
        if not 0 < self.rho_fso < 1:
            raise DomainError(f"rho_fso must lie strictly inside (0, 1), got {self.rho_fso!r}")
        if self.detection not in (1, 2):
            raise DomainError(f"detection must be 1 or 2, got {self.detection!r}")
        if not self.mean_electrical_snr > 0:
            raise DomainError("mean_electrical_snr must be positive")

    @property
    def sigma2(self) -> float:
        return 1.0 - self.rho_fso ** 2

    def with_mean_snr(self, snr: float) -> "FsoLink":
        return replace(self, mean_electrical_snr=snr)


def _log_AD(mal: MalagaParams) -> float:
    a, b, g, om1 = mal.alpha, mal.beta, mal.g, mal.Omega1
    return (math.log(2.0) + 0.5 * a * math.log(a) - (1 + 0.5 * a) * math.log(g)
            - math.lgamma(a) + (b + 0.5 * a) * math.log(g * b / (g * b + om1)))


def _b_h(mal: MalagaParams) -> np.ndarray:
    a, b, g, om1 = mal.alpha, mal.beta, mal.g, mal.Omega1
    out = np.empty(b)
    for h in range(1, b + 1):
        lg = (math.lgamma(b) + (1 - 0.5 * h) * math.log(g * b + om1) + 0.5 * h * math.log(a)
              - 2 * math.lgamma(h) - math.lgamma(b - h + 1) - 0.5 * h * math.log(b)
              - (h - 1) * math.log(g) - 0.5 * (a + h) * math.log(a * b / (g * b + om1)))
        # Omega1 ** (h - 1) with 0 ** 0 = 1
        out[h - 1] = math.exp(lg) * om1 ** (h - 1)
    return out


def _g_k_specs(link: FsoLink, ks) -> tuple:
    mal, xi2 = link.malaga, link.pointing.xi ** 2
    delta = mal.alpha * mal.beta / ((mal.g * mal.beta + mal.Omega1) * link.path_loss
                                    * link.pointing.A0 * link.rho_fso)
    z = 8.0 / (delta ** 2 * link.sigma2)
    specs = []
    for h in range(1, mal.beta + 1):
        a = ((1 - xi2) / 2, (2 - xi2) / 2, (1 - mal.alpha) / 2, (2 - mal.alpha) / 2,
             (1 - h) / 2, (2 - h) / 2)
        for k in ks:
            specs.append(MeijerGSpec(1, 6, 6, 3, a, (k / 2, -xi2 / 2, (1 - xi2) / 2)))
    return specs, z, delta


def _log_g_k(link: FsoLink, ks) -> tuple:
    specs, z, delta = _g_k_specs(link, ks)
    mant, scale = meijer_g_batch(specs, np.full(len(specs), z))
    if np.any(mant <= 0) or not np.all(np.isfinite(mant)):
        raise DomainError("non-positive or non-finite G_k coefficient")
    shape = (link.malaga.beta, len(ks))
    return (np.log(mant) + scale).reshape(shape), delta


def _log_coefficients(link: FsoLink, log_G: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """log of B_D * H1 for every (h, k)."""
    mal, xi = link.malaga, link.pointing.xi
    log_BD = 2 * math.log(xi) + _log_AD(mal) + (mal.alpha - 4.5) * math.log(2.0) - 1.5 * math.log(math.pi)
    h = np.arange(1, mal.beta + 1)[:, None]
    log_k_fact = np.array([math.lgamma(k + 1.0) for k in ks])[None, :]
    log_H1 = (np.log(_b_h(mal))[:, None] + (ks[None, :] + h - 0.5) * math.log(2.0)
              + log_G - log_k_fact)
    return log_BD + log_H1


def _log_gamma_half(ks) -> np.ndarray:
    return np.array([math.lgamma((k + 1) / 2.0) for k in ks])


@dataclass(frozen=True)
class FsoSeriesTable:
    """Coefficients of the truncated FSO SNR series at truncation K.

    ``log_coef[h-1, k]`` holds log(B_D * H1) so that for gamma > 0

        F(gamma) = 1 - Z0 + sum_{h,k} exp(log_coef) * lowergamma((k+1)/2, psi1 * gamma**(2/r)).
    """

    K: int
    r: int
    mean_snr: float
    sigma2: float
    A_D: float
    B_D: float
    delta: float
    psi1: float
    b_h: np.ndarray
    log_G: np.ndarray
    log_coef: np.ndarray
    Z0: float
    Z0_check: float
    last_term_ratio: float
    truncation_warning: bool

    @property
    def G_k(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_G)

    @property
    def H1(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_coef) / self.B_D

    @property
    def phi1_lemma(self) -> np.ndarray:
        ks = np.arange(self.K + 1)
        log_fact = np.array([math.lgamma(k + 1.0) for k in ks])
        h = np.arange(1, len(self.b_h) + 1)[:, None]
        lg = ((0.5 * ks + h) * math.log(2.0) + self.log_G - math.log(self.r) - log_fact
              - (1 + ks) / self.r * math.log(self.mean_snr) - 0.5 * (ks + 1) * math.log(self.sigma2))
        with np.errstate(over="ignore"):
            return np.exp(lg)

    @property
    def atom(self) -> float:
        """Probability mass at gamma = 0."""
        return 1.0 - self.Z0

    @property
    def z0_drift(self) -> float:
        """Relative change of Z0 when 40 more terms are kept."""
        return abs(self.Z0_check - self.Z0) / self.Z0_check

    def with_mean_snr(self, mean_snr: float) -> "FsoSeriesTable":
        """Same coefficients at another average SNR (only psi1 moves)."""
        psi1 = 1.0 / (2.0 * mean_snr ** (2.0 / self.r) * self.sigma2)
        return replace(self, mean_snr=mean_snr, psi1=psi1)

    def dump(self) -> str:
        """Plain-text ``key = value`` listing for fixture diffs."""
        lines = [
            f"K = {self.K}",
            f"r = {self.r}",
            f"mean_snr = {self.mean_snr!r}",
            f"A_D = {self.A_D!r}",
            f"B_D = {self.B_D!r}",
            f"delta = {self.delta!r}",
            f"psi1 = {self.psi1!r}",
            f"Z0 = {self.Z0!r}",
            f"Z0_check = {self.Z0_check!r}",
            f"last_term_ratio = {self.last_term_ratio!r}",
        ]
        for h, v in enumerate(self.b_h, start=1):
            lines.append(f"b_h[{h}] = {v!r}")
        for h in range(self.log_G.shape[0]):
            for k in range(self.log_G.shape[1]):
                lines.append(f"log_G[{h + 1},{k}] = {self.log_G[h, k]!r}")
        return "\n".join(lines) + "\n"


def build_series_table(link: FsoLink, K: int = DEFAULT_K) -> FsoSeriesTable:
    """Compute every series coefficient for ``link`` at truncation ``K``.

    A second pass with K + 40 terms gives the convergence certificate.  A
    TruncationWarning is issued when the last kept term exceeds 1e-9 of
    the partial sum of Z0.
    """
    if int(K) != K or K < 1:
        raise DomainError(f"K must be a positive integer, got {K!r}")
    K = int(K)
    ks_all = np.arange(K + 41)
    log_G_all, delta = _log_g_k(link, ks_all)
    log_coef_all = _log_coefficients(link, log_G_all, ks_all)
    z0_terms = np.exp(log_coef_all + _log_gamma_half(ks_all)[None, :]).sum(axis=0)
    Z0 = math.fsum(z0_terms[: K + 1])
    Z0_check = math.fsum(z0_terms)
    ratio = z0_terms[K] / Z0
    flag = ratio > 1e-9
    if flag:
        warnings.warn(
            f"FSO series not converged at K={K}: last term / partial sum = {ratio:.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    mal, xi = link.malaga, link.pointing.xi
    log_AD = _log_AD(mal)
    r = link.detection
    return FsoSeriesTable(
        K=K,
        r=r,
        mean_snr=link.mean_electrical_snr,
        sigma2=link.sigma2,
        A_D=math.exp(log_AD),
        B_D=xi ** 2 * math.exp(log_AD) * 2.0 ** (mal.alpha - 4.5) / math.pi ** 1.5,
        delta=delta,
        psi1=1.0 / (2.0 * link.mean_electrical_snr ** (2.0 / r) * link.sigma2),
        b_h=_b_h(mal),
        log_G=log_G_all[:, : K + 1],
        log_coef=log_coef_all[:, : K + 1],
        Z0=Z0,
        Z0_check=Z0_check,
        last_term_ratio=float(ratio),
        truncation_warning=bool(flag),
    )


def _table_for(table: FsoSeriesTable, link: FsoLink) -> FsoSeriesTable:
    if link is not None and link.mean_electrical_snr != table.mean_snr:
        return table.with_mean_snr(link.mean_electrical_snr)
    return table


def fso_atom(table: FsoSeriesTable) -> float:
    """Mass 1 - Z0 of the SNR at exactly zero."""
    return table.atom


def _series_sum(table, x):
    # sum_{h,k} coef * lowergamma((k+1)/2, x) for an array x >= 0
    ks = np.arange(table.K + 1)
    a = (ks + 1) / 2.0
    lc = np.logaddexp.reduce(table.log_coef, axis=0)  # merge the h mixture per k
    out = np.zeros(x.shape)
    pos = x > 0
    if pos.any():
        lg = log_lower_incomplete_gamma(a[None, :], x[pos][:, None]) + lc[None, :]
        top = lg.max(axis=1, keepdims=True)
        out[pos] = np.exp(top[:, 0]) * np.exp(lg - top).sum(axis=1)
    return out


def fso_snr_cdf(table: FsoSeriesTable, link: FsoLink | None, gamma):
    """CDF of the FSO SNR, including the atom 1 - Z0 at zero."""
    t = _table_for(table, link)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma must be non-negative")
    x = t.psi1 * g ** (2.0 / t.r)
    out = (1.0 - t.Z0) + _series_sum(t, np.atleast_1d(x))
    out = np.minimum(out, 1.0)
    return float(out[0]) if g.ndim == 0 else out.reshape(g.shape)


def fso_snr_conditional_cdf(table: FsoSeriesTable, link: FsoLink | None, gamma):
    """CDF of the FSO SNR given that it is positive."""
    t = _table_for(table, link)
    g = np.asarray(gamma, dtype=float)
    x = t.psi1 * np.atleast_1d(g) ** (2.0 / t.r)
    out = np.minimum(_series_sum(t, x) / t.Z0, 1.0)
    return float(out[0]) if g.ndim == 0 else out.reshape(g.shape)


def fso_snr_pdf(table: FsoSeriesTable, link: FsoLink | None, gamma):
    """Density of the FSO SNR on (0, inf); the atom at zero is excluded."""
    t = _table_for(table, link)
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(g <= 0):
        raise DomainError("gamma must be positive")
    ks = np.arange(t.K + 1)
    lc = np.logaddexp.reduce(t.log_coef, axis=0)
    a = (ks + 1) / 2.0
    x = t.psi1 * g ** (2.0 / t.r)
    # d/dgamma lowergamma(a, x(gamma)) = x^(a-1) e^-x * x'(gamma)
    lx = np.log(x)[:, None]
    lg = lc[None, :] + (a[None, :] - 1.0) * lx - x[:, None]
    top = lg.max(axis=1, keepdims=True)
    s = np.exp(top[:, 0]) * np.exp(lg - top).sum(axis=1)
    out = s * t.psi1 * (2.0 / t.r) * g ** (2.0 / t.r - 1.0)
    return float(out[0]) if np.ndim(gamma) == 0 else out


# ---------------------------------------------------------------------------
# Exact gain law without estimation error
# ---------------------------------------------------------------------------

def _delta0(link: FsoLink) -> float:
    mal = link.malaga
    return mal.alpha * mal.beta / ((mal.g * mal.beta + mal.Omega1) * link.path_loss * link.pointing.A0)


def exact_gain_pdf(link: FsoLink, x):
    """Density of the true gain h (no estimation error), Meijer G form."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    mal, xi2 = link.malaga, link.pointing.xi ** 2
    d0 = _delta0(link)
    b = _b_h(mal)
    total = np.zeros(len(x))
    for h in range(1, mal.beta + 1):
        spec = MeijerGSpec(3, 0, 1, 3, (xi2 + 1,), (xi2, mal.alpha, h))
        mant, sc = meijer_g_batch([spec] * len(x), d0 * x)
        total += b[h - 1] * mant * np.exp(sc)
    return xi2 * math.exp(_log_AD(mal)) / (2.0 * x) * total


def exact_gain_cdf(link: FsoLink, x):
    """CDF of the true gain h (no estimation error), Meijer G form."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    mal, xi2 = link.malaga, link.pointing.xi ** 2
    d0 = _delta0(link)
    b = _b_h(mal)
    total = np.zeros(len(x))
    pos = x > 0
    for h in range(1, mal.beta + 1):
        spec = MeijerGSpec(3, 1, 2, 4, (1.0, xi2 + 1), (xi2, mal.alpha, h, 0.0))
        mant, sc = meijer_g_batch([spec] * int(pos.sum()), d0 * x[pos])
        total[pos] += b[h - 1] * mant * np.exp(sc)
    return np.clip(xi2 * math.exp(_log_AD(mal)) / 2.0 * total, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def sample_fso_gain(link: FsoLink, rng: np.random.Generator, size=None,
                    estimation_error: bool = True):
    """Draw the (estimated, clamped) FSO gain.

    Gamma large-scale fading times shadowed-Rician small-scale fading, times
    path loss and pointing gain.  With ``estimation_error`` the Gaussian
    estimation noise is added and negative values are clamped to zero.
    """
    mal, pt = link.malaga, link.pointing
    n = 1 if size is None else size
    X = rng.gamma(mal.alpha, 1.0 / mal.alpha, n)
    zeta = rng.gamma(mal.beta, 1.0 / mal.beta, n)
    w = rng.normal(0.0, math.sqrt(mal.g / 2.0), (2,) + np.shape(X))
    Y = (np.sqrt(zeta * mal.Omega1) + w[0]) ** 2 + w[1] ** 2
    Ip = pt.A0 * rng.random(n) ** (1.0 / pt.xi ** 2)
    h = link.path_loss * X * Y * Ip
    if estimation_error:
        eps = rng.standard_normal(n)
        h = np.maximum(link.rho_fso * h + math.sqrt(link.sigma2) * eps, 0.0)
    return float(h[0]) if size is None else h


def sample_fso_snr(link: FsoLink, rng: np.random.Generator, size=None):
    """Draw the FSO electrical SNR mean_snr * h_est**r."""
    h = sample_fso_gain(link, rng, size)
    return link.mean_electrical_snr * np.power(h, link.detection)
