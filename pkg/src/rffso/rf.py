"""RF hops: Nakagami-m MRC links with outdated CSI and antenna selection.

Each transmit antenna sees an MRC sum of ``tau = m * n_rx`` unit-power
complex Gaussian components.  The antenna is chosen on the selection-time
gains ``g``; data goes out over ``g_hat = rho * g + sqrt(1 - rho**2) * e``.
The law of the transmission-time SNR of the chosen antenna is a finite
mixture of ``x**j * exp(-u * x)`` terms built from a multinomial expansion
of the order-statistic density.
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, PrecisionLossWarning
from .specfun import regularized_lower_gamma

__all__ = [
    "RfLink",
    "MultinomialTerm",
    "SelectionTable",
    "MAX",
    "MIN",
    "mrc_pdf",
    "mrc_cdf",
    "enumerate_selection_table",
    "selected_snr_pdf",
    "selected_snr_cdf",
    "sample_selection_pair",
]

MAX = "max"
MIN = "min"
DEFAULT_TERM_CAP = 10 ** 6


@dataclass(frozen=True)
class RfLink:
    m: int = 2
    n_rx: int = 2
    mean_snr: float = 1.0
    rho: float = 0.85

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise DomainError(f"Nakagami m must be a positive integer, got {self.m!r}")
        if int(self.n_rx) != self.n_rx or self.n_rx < 1:
            raise DomainError(f"n_rx must be a positive integer, got {self.n_rx!r}")
        if not self.mean_snr > 0:
            raise DomainError(f"mean_snr must be positive, got {self.mean_snr!r}")
        if not 0 < self.rho < 1:
            raise DomainError(f"rho must lie strictly inside (0, 1), got {self.rho!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n_rx", int(self.n_rx))

    @property
    def lam(self) -> float:
        return self.m / self.mean_snr

    @property
    def tau(self) -> int:
        return self.m * self.n_rx


def mrc_pdf(link: RfLink, x):
    """Gamma(tau, rate lambda) density of one antenna's MRC SNR."""
    x = np.asarray(x, dtype=float)
    lam, tau = link.lam, link.tau
    with np.errstate(divide="ignore"):
        lg = tau * math.log(lam) + (tau - 1) * np.log(x) - lam * x - math.lgamma(tau)
    out = np.where(x > 0, np.exp(lg), 1.0 * lam if tau == 1 else 0.0)
    out = np.where(x < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def mrc_cdf(link: RfLink, x):
    """Gamma(tau, rate lambda) CDF of one antenna's MRC SNR."""
    x = np.asarray(x, dtype=float)
    out = regularized_lower_gamma(float(link.tau), np.maximum(x, 0.0) * link.lam)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MultinomialTerm:
    """One index tuple of the multinomial expansion and its coefficients.

    ``A`` is the signed coefficient, ``B`` the extra power of x and ``C``
    the number of non-constant factors, so the order-statistic density
    carries ``A * x**(B + tau - 1) * exp(-lambda * (C + 1) * x)``.
    ``Lambda[q]`` (q = 0..B) are the mixture weights after conditioning on
    the outdated gain; ``upsilon`` is the common exponential rate.
    """

    n_tuple: tuple
    A: float
    B: int
    C: int
    alpha: float
    upsilon: float
    Lambda: tuple


def _stars_and_bars(total: int, parts: int):
    for combo in itertools.combinations_with_replacement(range(parts), total):
        counts = [0] * parts
        for c in combo:
            counts[c] += 1
        yield tuple(counts)


@dataclass(frozen=True)
class SelectionTable:
    """Closed-form law of the selected antenna's transmission-time SNR.

    pdf(x) = phi * sum_terms sum_q Lambda_q x**(q + tau - 1) exp(-upsilon x)
    """

    link: RfLink
    N_S: int
    mode: str
    terms: tuple
    phi: float

    @property
    def upsilon(self):
        """Exponential rates, one per distinct C (a single value in min mode)."""
        rates = sorted({t.upsilon for t in self.terms})
        return rates[0] if len(rates) == 1 else tuple(rates)

    def pdf_monomials(self):
        """Density as arrays ``(w, power, rate)``: sum w x**power exp(-rate x)."""
        acc = defaultdict(float)
        tau = self.link.tau
        for term in self.terms:
            for q, lam_q in enumerate(term.Lambda):
                acc[(term.C, q + tau - 1)] += self.phi * lam_q
        return _pack(acc, self.terms)

    def survival_monomials(self):
        """1 - CDF as arrays ``(w, power, rate)``."""
        acc = defaultdict(float)
        tau = self.link.tau
        for term in self.terms:
            u = term.upsilon
            for q, lam_q in enumerate(term.Lambda):
                n = q + tau - 1
                for t in range(n + 1):
                    # Lambda (q+tau-1)! u^(t-q-tau) / t!
                    c = lam_q * math.exp(math.lgamma(n + 1) + (t - n - 1) * math.log(u)
                                         - math.lgamma(t + 1))
                    acc[(term.C, t)] += self.phi * c
        return _pack(acc, self.terms)


def _pack(acc, terms):
    rate_of = {t.C: t.upsilon for t in terms}
    keys = sorted(acc)
    w = np.array([acc[k] for k in keys])
    power = np.array([k[1] for k in keys], dtype=float)
    rate = np.array([rate_of[k[0]] for k in keys])
    return w, power, rate


def enumerate_selection_table(link: RfLink, N_S: int, mode: str = MAX,
                              cap: int = DEFAULT_TERM_CAP) -> SelectionTable:
    """Enumerate the multinomial index sets for max or min selection."""
    if int(N_S) != N_S or N_S < 1:
        raise DomainError(f"N_S must be a positive integer, got {N_S!r}")
    if mode not in (MAX, MIN):
        raise DomainError(f"mode must be {MAX!r} or {MIN!r}, got {mode!r}")
    N_S = int(N_S)
    tau, lam, rho = link.tau, link.lam, link.rho
    parts = tau + 1 if mode == MAX else tau
    count = math.comb(N_S - 1 + parts - 1, parts - 1)
    if count > cap:
        raise CapacityError(f"{count} multinomial terms exceed the cap of {cap}")

    s2 = 1.0 - rho ** 2
    lb = lam * rho / s2
    log_fact_nm1 = math.lgamma(N_S)
    terms = []
    for n in _stars_and_bars(N_S - 1, parts):
        log_a = log_fact_nm1 - sum(math.lgamma(v + 1) for v in n)
        if mode == MAX:
            # factors -(lam x)^(p-2)/(p-2)! e^{-lam x}, p = 2..tau+1
            B = sum(v * (p - 2) for p, v in enumerate(n, start=1) if p >= 2)
            C = sum(n[1:])
            sign = -1.0 if C % 2 else 1.0
            for p, v in enumerate(n, start=1):
                if p >= 2 and v:
                    log_a += v * ((p - 2) * math.log(lam) - math.lgamma(p - 1))
        else:
            # factors (lam x)^(p-1)/(p-1)! e^{-lam x}, p = 1..tau
            B = sum(v * (p - 1) for p, v in enumerate(n, start=1))
            C = sum(n)
            sign = 1.0
            for p, v in enumerate(n, start=1):
                if v:
                    log_a += v * ((p - 1) * math.log(lam) - math.lgamma(p))
        alpha = lam * (rho ** 2 / s2 + C + 1)
        upsilon = lam * (C + 1) / (rho ** 2 + (C + 1) * s2)
        lams = []
        for q in range(B + 1):
            lg = (log_a + math.lgamma(B + 1) + (2 * q + tau - 1) * math.log(lb)
                  + math.lgamma(B + tau) - math.lgamma(q + 1)
                  - (B + tau + q) * math.log(alpha) - math.lgamma(B - q + 1)
                  - math.lgamma(tau + q))
            lams.append(sign * math.exp(lg))
        terms.append(MultinomialTerm(n, sign * math.exp(log_a), B, C, alpha, upsilon, tuple(lams)))

    phi = N_S * lam ** (tau + 1) * rho ** (1 - tau) / (s2 * math.gamma(tau))
    return SelectionTable(link, N_S, mode, tuple(terms), phi)


def _mixture_sum(w, power, rate, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(len(x))
    lost = False
    for i, xi in enumerate(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            parts = w * np.where(power == 0, 1.0, xi ** power) * np.exp(-rate * xi)
        parts = parts[np.argsort(-np.abs(parts))]
        total = math.fsum(parts)
        big = np.abs(parts).max() if parts.size else 0.0
        if big > 0 and abs(total) < 1e-10 * big:
            lost = True
        out[i] = total
    return out, lost


def selected_snr_pdf(table: SelectionTable, gamma):
    """Density of the selected antenna's transmission-time SNR."""
    w, power, rate = table.pdf_monomials()
    out, lost = _mixture_sum(w, power, rate, gamma)
    if lost:
        warnings.warn("alternating selection sum lost precision", PrecisionLossWarning, stacklevel=2)
    out = np.maximum(out, 0.0)
    return float(out[0]) if np.ndim(gamma) == 0 else out


def selected_snr_cdf(table: SelectionTable, gamma):
    """CDF of the selected antenna's transmission-time SNR."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma must be non-negative")
    w, power, rate = table.survival_monomials()
    surv, lost = _mixture_sum(w, power, rate, g)
    if lost and np.any(np.abs(1.0 - surv) > 0):
        warnings.warn("alternating selection sum lost precision", PrecisionLossWarning, stacklevel=2)
    out = np.clip(1.0 - surv, 0.0, 1.0)
    return float(out[0]) if g.ndim == 0 else out


def sample_selection_pair(link: RfLink, N_S: int, mode: str, rng: np.random.Generator,
                          size=None):
    """Draw selection-time and transmission-time MRC SNRs for all antennas.

    Returns ``(index, selected_tx_snr, selection_snrs, transmission_snrs)``;
    with ``size`` every output gains a leading trial axis.
    """
    if mode not in (MAX, MIN):
        raise DomainError(f"mode must be {MAX!r} or {MIN!r}, got {mode!r}")
    n = 1 if size is None else size
    tau, rho = link.tau, link.rho
    shape = (n, N_S, tau)
    # unit-power complex Gaussians: real and imaginary parts of variance 1/2
    s = math.sqrt(0.5)
    g_re = rng.normal(0.0, s, shape)
    g_im = rng.normal(0.0, s, shape)
    c = math.sqrt(1.0 - rho ** 2)
    h_re = rho * g_re + c * rng.normal(0.0, s, shape)
    h_im = rho * g_im + c * rng.normal(0.0, s, shape)
    scale = link.mean_snr / link.m
    sel = scale * (g_re ** 2 + g_im ** 2).sum(axis=2)
    tx = scale * (h_re ** 2 + h_im ** 2).sum(axis=2)
    idx = np.argmax(sel, axis=1) if mode == MAX else np.argmin(sel, axis=1)
    chosen = tx[np.arange(n), idx]
    if size is None:
        return int(idx[0]), float(chosen[0]), sel[0], tx[0]
    return idx, chosen, sel, tx
