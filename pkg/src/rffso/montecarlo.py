"""Monte-Carlo simulation of the four antenna-selection schemes.

Every batch draws one set of channels and evaluates all schemes on it
(common random numbers), so scheme comparisons share their noise.

Conventions
-----------
* TASR picks the antenna with the largest selection-time S-R sum and sends
  over its transmission-time gains; the eavesdropper sees the current
  (transmission-time) gain of that antenna, whose law is unaffected by the
  selection.  TASE mirrors this with the smallest S-E sum.
* OTAS ranks antennas by (1 + min(g_SR, g_RD)) / (1 + g_SE) on
  selection-time RF SNRs and the estimated FSO SNR, then both RF links use
  transmission-time SNRs.  ``otas_selection="transmission"`` ranks on the
  transmission-time SNRs instead.
* With a single transmit antenna nothing is selected, so there is no
  outdating: transmission-time gains equal selection-time gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fso import sample_fso_snr
from .rf import MAX, sample_selection_pair
from .secrecy import ATAS, OTAS, TASE, TASR, SystemModel, atas_select

__all__ = [
    "McEstimate",
    "SimulationPlan",
    "SCHEMES",
    "simulate_trial",
    "simulate_batch",
    "estimate_sop",
    "estimate_schemes",
    "kolmogorov_smirnov",
    "split_atom",
]

SCHEMES = (OTAS, TASR, TASE, ATAS)
CHUNK = 1 << 15


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    n: int

    @classmethod
    def from_count(cls, hits: int, n: int) -> "McEstimate":
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n)


@dataclass(frozen=True)
class SimulationPlan:
    model: SystemModel
    scheme: str = TASR
    n_samples: int = 10 ** 6
    seed: int = 0
    stream_count: int = 8
    otas_selection: str = "selection"

    def __post_init__(self):
        if self.scheme.upper() not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if self.n_samples < 1000:
            raise DomainError("n_samples must be at least 1000")
        if self.stream_count < 1:
            raise DomainError("stream_count must be positive")
        if self.otas_selection not in ("selection", "transmission"):
            raise DomainError("otas_selection must be 'selection' or 'transmission'")


def _draw(model: SystemModel, rng: np.random.Generator, n: int):
    _, _, sel_r, tx_r = sample_selection_pair(model.rf_sr, model.N_S, MAX, rng, n)
    _, _, sel_e, tx_e = sample_selection_pair(model.rf_se, model.N_S, MAX, rng, n)
    if model.N_S == 1:
        tx_r, tx_e = sel_r, sel_e
    g_rd = sample_fso_snr(model.fso, rng, n)
    return sel_r, tx_r, sel_e, tx_e, g_rd


def _indicators(model: SystemModel, g_sr, g_rd, g_e):
    th = model.Theta
    g_eq = np.minimum(g_sr, g_rd)
    exact = g_eq <= th * g_e + th - 1.0
    bound = g_eq <= th * g_e
    return exact, bound


def simulate_batch(model: SystemModel, rng: np.random.Generator, n: int,
                   schemes=SCHEMES, otas_selection: str = "selection") -> dict:
    """Outage indicators for ``n`` trials: {scheme: (exact, bound)} boolean arrays."""
    sel_r, tx_r, sel_e, tx_e, g_rd = _draw(model, rng, n)
    rows = np.arange(n)
    out = {}
    for s in schemes:
        s = s.upper()
        target = atas_select(model) if s == ATAS else s
        if target == TASR:
            b = np.argmax(sel_r, axis=1)
        elif target == TASE:
            b = np.argmin(sel_e, axis=1)
        elif target == OTAS:
            rr, ee = (sel_r, sel_e) if otas_selection == "selection" else (tx_r, tx_e)
            metric = (1.0 + np.minimum(rr, g_rd[:, None])) / (1.0 + ee)
            b = np.argmax(metric, axis=1)
        else:
            raise DomainError(f"unknown scheme {s!r}")
        g_sr, g_e = tx_r[rows, b], tx_e[rows, b]
        out[s] = _indicators(model, g_sr, g_rd, g_e)
    return out


def simulate_trial(model: SystemModel, scheme: str, rng: np.random.Generator) -> tuple:
    """One trial: (exact-outage indicator, bound-outage indicator)."""
    exact, bound = simulate_batch(model, rng, 1, (scheme,))[scheme.upper()]
    return bool(exact[0]), bool(bound[0])


def _stream_sizes(n: int, streams: int):
    base, extra = divmod(n, streams)
    return [base + (i < extra) for i in range(streams)]


def estimate_schemes(model: SystemModel, schemes=SCHEMES, n_samples: int = 10 ** 6,
                     seed: int = 0, stream_count: int = 8,
                     otas_selection: str = "selection") -> dict:
    """Exact, bound and EST estimates for several schemes on shared draws.

    Returns {scheme: (exact McEstimate, bound McEstimate, est McEstimate)}.
    """
    schemes = tuple(s.upper() for s in schemes)
    hits = {s: [0, 0] for s in schemes}
    children = np.random.SeedSequence(seed).spawn(stream_count)
    for child, size in zip(children, _stream_sizes(n_samples, stream_count)):
        rng = np.random.default_rng(child)
        done = 0
        while done < size:
            n = min(CHUNK, size - done)
            res = simulate_batch(model, rng, n, schemes, otas_selection)
            for s in schemes:
                hits[s][0] += int(res[s][0].sum())
                hits[s][1] += int(res[s][1].sum())
            done += n
    out = {}
    for s in schemes:
        exact = McEstimate.from_count(hits[s][0], n_samples)
        bound = McEstimate.from_count(hits[s][1], n_samples)
        est = McEstimate(model.Rs * (1.0 - exact.value), model.Rs * exact.stderr, n_samples)
        out[s] = (exact, bound, est)
    return out


def estimate_sop(plan: SimulationPlan) -> tuple:
    """(exact SOP, bound-event probability, EST) estimates for one plan."""
    res = estimate_schemes(plan.model, (plan.scheme,), plan.n_samples, plan.seed,
                           plan.stream_count, plan.otas_selection)
    return res[plan.scheme.upper()]


def split_atom(samples) -> tuple:
    """Return (positive samples, frequency of exact zeros)."""
    s = np.asarray(samples, dtype=float)
    pos = s[s > 0]
    return pos, 1.0 - len(pos) / len(s)


def kolmogorov_smirnov(samples, cdf, grid_points: int | None = None) -> float:
    """One-sample KS distance between ``samples`` and a vectorised ``cdf``.

    With ``grid_points`` the CDF is only evaluated at that many sample
    quantiles and the result is a rigorous upper bound on the distance
    (both functions are monotone between grid points).
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n < 10 ** 4:
        raise DomainError("kolmogorov_smirnov needs at least 1e4 samples")
    if grid_points is None or grid_points >= n:
        F = np.asarray(cdf(x), dtype=float)
        i = np.arange(1, n + 1)
        return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))
    idx = np.unique(np.linspace(0, n - 1, grid_points).astype(int))
    q = x[idx]
    F = np.asarray(cdf(q), dtype=float)
    right = np.searchsorted(x, q, side="right") / n   # ECDF at q
    left = np.searchsorted(x, q, side="left") / n     # ECDF just below q
    d = np.maximum(np.abs(right - F), np.abs(F - left))
    # between consecutive grid points
    gap = np.maximum(F[1:] - right[:-1], left[1:] - F[:-1])
    return float(max(d.max(), gap.max(initial=0.0)))
