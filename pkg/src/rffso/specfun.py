"""Special functions for the RF-FSO analysis.

Log-gamma (real and complex), the lower incomplete gamma function, the
modified Bessel function of the first kind, and a real-argument Meijer G
evaluator built on Mellin-Barnes contour quadrature.

The Meijer G convention is the usual one::

    G^{m,n}_{p,q}[z | a; b] = 1/(2 pi i) \\int_L Phi(s) z^s ds

    Phi(s) = prod_{j<m} Gamma(b_j - s) prod_{j<n} Gamma(1 - a_j + s)
             / (prod_{j>=m} Gamma(1 - b_j + s) prod_{j>=n} Gamma(a_j - s))

with ``L`` separating the right pole family ``b_j + l`` (j < m) from the
left family ``a_j - 1 - l`` (j < n).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import loggamma as _sp_loggamma

from .errors import (
    DegenerateParameterError,
    DomainError,
    NumericalFailure,
    RegularizationWarning,
)

__all__ = [
    "ln_gamma",
    "clgamma",
    "lower_incomplete_gamma",
    "log_lower_incomplete_gamma",
    "regularized_lower_gamma",
    "bessel_i",
    "MeijerGSpec",
    "meijer_g",
    "meijer_g_scaled",
    "meijer_g_batch",
    "ResidueTail",
    "meijer_g_residue_tail",
    "residue_tail_scaled",
]

_LOG_MAX = math.log(np.finfo(float).max)


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

def ln_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def clgamma(z):
    """Complex log-gamma (principal branch), vectorised.

    Poles return a real part of ``+inf``.
    """
    return _sp_loggamma(np.asarray(z, dtype=complex))


def _lgamma_real(x):
    return clgamma(np.asarray(x, dtype=float) + 0j).real


def _gamma_sign(x: float) -> float:
    if x > 0:
        return 1.0
    return -1.0 if math.floor(x) % 2 else 1.0


def _is_nonpositive_int(x: float, tol: float = 1e-12) -> bool:
    return x <= tol and abs(x - round(x)) <= tol


# ---------------------------------------------------------------------------
# Incomplete gamma
# ---------------------------------------------------------------------------

_TINY = 1e-300


def _log_p_series(a, x):
    term = np.ones_like(a)
    total = np.ones_like(a)
    ap = a.copy()
    for _ in range(5000):
        ap = ap + 1.0
        term = term * x / ap
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    else:
        raise NumericalFailure("incomplete gamma series did not converge")
    return a * np.log(x) - x - _lgamma_real(a + 1.0) + np.log(total)


def _log_q_cf(a, x):
    # Modified Lentz evaluation of the continued fraction for Q(a, x).
    b = x + 1.0 - a
    c = np.full_like(a, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(a.shape, dtype=bool)
    for i in range(1, 5000):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < 4e-16
        if done.all():
            break
    else:
        raise NumericalFailure("incomplete gamma continued fraction did not converge")
    return -x + a * np.log(x) - _lgamma_real(a) + np.log(h)


def _log_regularized_p(a, x):
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    out = np.full(a.shape, -np.inf)
    pos = x > 0
    ser = pos & (x < a + 1.0)
    frac = pos & ~ser
    if ser.any():
        out[ser] = _log_p_series(a[ser], x[ser])
    if frac.any():
        out[frac] = np.log1p(-np.exp(_log_q_cf(a[frac], x[frac])))
    return out


def regularized_lower_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x), vectorised."""
    return np.exp(_log_regularized_p(a, x))


def log_lower_incomplete_gamma(a, x):
    """log of gamma(a, x), vectorised; ``-inf`` at x = 0.

    Working in logs keeps large-order terms (a of a few hundred) finite.
    """
    a = np.asarray(a, dtype=float)
    return _log_regularized_p(a, x) + _lgamma_real(a)


def lower_incomplete_gamma(a: float, z: float) -> float:
    """gamma(a, z) = int_0^z t^(a-1) e^-t dt for a > 0, z >= 0."""
    if not a > 0:
        raise DomainError(f"lower_incomplete_gamma requires a > 0, got {a!r}")
    if not z >= 0:
        raise DomainError(f"lower_incomplete_gamma requires z >= 0, got {z!r}")
    if z == 0:
        return 0.0
    return float(np.exp(log_lower_incomplete_gamma(a, z)))


# ---------------------------------------------------------------------------
# Modified Bessel function of the first kind
# ---------------------------------------------------------------------------

def bessel_i(nu: float, x: float) -> float:
    """I_nu(x) for nu >= 0, x >= 0 by the (scaled) power series.

    Raises OverflowError when the result is not representable.
    """
    if nu < 0 or x < 0:
        raise DomainError(f"bessel_i requires nu >= 0 and x >= 0, got ({nu!r}, {x!r})")
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    jmax = int(half + 12.0 * math.sqrt(half + 1.0) + 40)
    j = np.arange(jmax + 1, dtype=float)
    logt = (2.0 * j + nu) * math.log(half) - _lgamma_real(j + 1.0) - _lgamma_real(j + nu + 1.0)
    peak = logt.max()
    logval = peak + math.log(np.exp(logt - peak).sum())
    if logval > _LOG_MAX:
        raise OverflowError(f"I_{nu}({x}) overflows double precision")
    return math.exp(logval)


# ---------------------------------------------------------------------------
# Meijer G
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeijerGSpec:
    """Orders and parameters of one G^{m,n}_{p,q}[z | a; b]."""

    m: int
    n: int
    p: int
    q: int
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise DomainError("parameter vector lengths must equal p and q")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise DomainError("orders must satisfy 0 <= m <= q, 0 <= n <= p")
        if self.margin <= 0:
            raise DomainError(
                f"convergence margin m+n-(p+q)/2 = {self.margin} must be positive"
            )

    @classmethod
    def from_groups(cls, an: Sequence[float], ap: Sequence[float],
                    bm: Sequence[float], bq: Sequence[float]) -> "MeijerGSpec":
        a = tuple(an) + tuple(ap)
        b = tuple(bm) + tuple(bq)
        return cls(len(bm), len(an), len(a), len(b), a, b)

    @property
    def margin(self) -> float:
        return self.m + self.n - 0.5 * (self.p + self.q)

    def reflected(self) -> "MeijerGSpec":
        """Spec of G^{n,m}_{q,p}(1/z | 1-b; 1-a), equal to G(z)."""
        return MeijerGSpec(self.n, self.m, self.q, self.p,
                           tuple(1.0 - v for v in self.b),
                           tuple(1.0 - v for v in self.a))

    def shape(self) -> tuple:
        return (self.m, self.n, self.p, self.q)


# Gauss-Kronrod 7/15 on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG7 = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG = np.zeros(15)
_WG[[1, 3, 5]] = _WG7[:3]
_WG[[13, 11, 9]] = _WG7[:3]
_WG[7] = _WG7[3]

_RTOL = 1e-11
_ATOL_ABS = 1e-15
_MAX_ROUNDS = 60
_DECAY = 42.0          # ln(1e16) plus margin: truncation depth of the line
_LADDER = 0.25 * 2.0 ** np.arange(16)
_BATCH = 256          # specs per vectorised pass, bounds memory


def _log_phi(s, A, B, m, n, logz):
    """log(Phi(s) z^s) for s of shape (N, K) and parameters (N, p), (N, q)."""
    parts = []
    signs = []
    if m:
        parts.append(B[:, None, :m] - s[..., None])
        signs.append(np.ones(m))
    if n:
        parts.append(1.0 - A[:, None, :n] + s[..., None])
        signs.append(np.ones(n))
    if B.shape[1] > m:
        parts.append(1.0 - B[:, None, m:] + s[..., None])
        signs.append(-np.ones(B.shape[1] - m))
    if A.shape[1] > n:
        parts.append(A[:, None, n:] - s[..., None])
        signs.append(-np.ones(A.shape[1] - n))
    args = np.concatenate(parts, axis=-1)
    sg = np.concatenate(signs)
    with np.errstate(all="ignore"):
        lg = clgamma(args)
        # Reciprocal-gamma zeros give -inf; never inf - inf.
        lg = np.where(np.isinf(lg.real) & (sg < 0), np.inf + 0j, lg)
        out = (lg * sg).sum(axis=-1) + s * logz[:, None]
    return out


def _pole_edges(A, B, m, n):
    left = A[:, :n].max(axis=1) - 1.0 if n else np.full(A.shape[0], -np.inf)
    right = B[:, :m].min(axis=1) if m else np.full(B.shape[0], np.inf)
    return left, right


def _check_separable(a, b, m, n):
    for bi in b[:m]:
        for aj in a[:n]:
            d = aj - 1.0 - bi
            if d >= -1e-12 and abs(d - round(d)) <= 1e-12:
                raise DegenerateParameterError(
                    f"pole families collide: a={aj} and b={bi} differ by an integer"
                )


def _score(c, A, B, m, n, logz):
    # Peak log-magnitude of the integrand on the line Re s = c; a few
    # ordinates guard against a reciprocal-gamma zero sitting on the axis.
    ys = np.array([0.0, 0.3, 1.0, 3.0])
    s = c[..., None] + 1j * ys
    N, K = c.shape
    s2 = s.reshape(N, K * len(ys))
    val = _log_phi(s2, A, B, m, n, logz).real.reshape(N, K, len(ys))
    val = np.where(np.isnan(val), np.inf, val)
    return val.max(axis=-1)


def _search_extent(A, B, m, n, logz):
    # Width of the search window on an unbounded side: the saddle of
    # Gamma(-s)^k z^s sits near |s| ~ z^(1/k).
    k = max(1, m + n - min(A.shape[1] - n, B.shape[1] - m))
    return 8.0 + 3.0 * np.exp(np.abs(logz) / k)


def _choose_abscissa(A, B, m, n, logz):
    left, right = _pole_edges(A, B, m, n)
    ext = _search_extent(A, B, m, n, logz)
    lo = np.where(np.isfinite(left), left, right - ext)
    hi = np.where(np.isfinite(right), right, left + ext)
    rows = np.arange(len(lo))
    # coarse scan, then two zoom passes around the best point
    u = np.linspace(0.003, 0.997, 17)
    step = u[1] - u[0]
    best = u[np.argmin(_score(lo[:, None] + (hi - lo)[:, None] * u, A, B, m, n, logz), axis=1)]
    for _ in range(2):
        cand = np.clip(best[:, None] + step * np.linspace(-0.75, 0.75, 7), 0.002, 0.998)
        sc = _score(lo[:, None] + (hi - lo)[:, None] * cand, A, B, m, n, logz)
        best = cand[rows, np.argmin(sc, axis=1)]
        step /= 4.0
    return lo + (hi - lo) * best


def _distance_to_poles(c, A, B, m, n):
    left, right = _pole_edges(A, B, m, n)
    return np.minimum(c - left, right - c)


def _circle_residue(center, radius, a_row, b_row, m, n, logz):
    th = 2.0 * np.pi * (np.arange(64) + 0.5) / 64
    pts = center + radius * np.exp(1j * th)
    L = _log_phi(pts[None, :], a_row[None, :], b_row[None, :], m, n, np.array([logz]))[0]
    scale = L.real.max()
    vals = np.exp(L - scale) * radius * np.exp(1j * th)
    return vals.mean(), scale


def _indented_setup(a_row, b_row, m, n, logz):
    """Contour and residue corrections when the pole families interleave."""
    left = max(a_row[:n]) - 1.0
    right = min(b_row[:m])
    lo, hi = right - 1.0, left + 1.0
    rpoles = []
    for bi in b_row[:m]:
        rpoles.extend(bi + l for l in range(0, int(math.ceil(hi - bi)) + 2) if bi + l <= hi + 1)
    lpoles = []
    for aj in a_row[:n]:
        lpoles.extend(aj - 1.0 - l for l in range(0, int(math.ceil(aj - 1.0 - lo)) + 2)
                      if aj - 1.0 - l >= lo - 1)
    allp = np.array(rpoles + lpoles)
    grid = np.linspace(lo, hi, 401)
    ok = np.min(np.abs(grid[:, None] - allp[None, :]), axis=1) > 0.05
    grid = grid[ok]
    sc = _score(grid[None, :], a_row[None, :], b_row[None, :], m, n, np.array([logz]))[0]
    c = float(grid[np.argmin(sc)])
    wrong = [(p, -1.0) for p in rpoles if p < c] + [(p, 1.0) for p in lpoles if p > c]
    corrections = []
    done = []
    for p, sign in wrong:
        if any(abs(p - d) < 1e-9 for d in done):
            continue
        done.append(p)
        others = [abs(p - o) for o in allp if abs(p - o) > 1e-9]
        radius = 0.45 * min([abs(p - c)] + others + [1.0])
        res, sc_r = _circle_residue(p, radius, a_row, b_row, m, n, logz)
        corrections.append((sign * res.real, sc_r))
    dist = min(abs(c - x) for x in allp)
    return c, dist, corrections


def _truncation(c, A, B, m, n, logz):
    s = c[:, None] + 1j * _LADDER[None, :]
    val = _log_phi(s, A, B, m, n, logz).real
    s0 = _log_phi(c[:, None] + 0j, A, B, m, n, logz).real[:, 0]
    peak = np.maximum(np.nanmax(np.where(np.isfinite(val), val, -np.inf), axis=1),
                      np.where(np.isfinite(s0), s0, -np.inf))
    Y = np.empty(len(c))
    for i in range(len(c)):
        below = np.nonzero((val[i, :-1] < peak[i] - _DECAY) & (val[i, 1:] < val[i, :-1]))[0]
        if below.size == 0:
            raise NumericalFailure("Meijer G integrand does not decay along the contour")
        Y[i] = _LADDER[below[0]]
    return peak, Y


def _initial_panels(dist, Y, logz):
    pid, lo, hi = [], [], []
    for i, (d, y, lz) in enumerate(zip(dist, Y, logz)):
        d = max(min(d, 1.0), 1e-6)
        edges = [0.0]
        e = d / 8.0
        while e < min(y, 2.0):
            edges.append(e)
            e *= 2.0
        step = min(1.0, 6.0 / (abs(lz) + 1e-300))
        e = edges[-1] + step
        while e < y:
            edges.append(e)
            e += step
        edges.append(y)
        edges = np.array(edges)
        pid.append(np.full(len(edges) - 1, i))
        lo.append(edges[:-1])
        hi.append(edges[1:])
    return np.concatenate(pid), np.concatenate(lo), np.concatenate(hi)


def _contour_batch(A, B, m, n, logz):
    """Line integrals for a batch of same-shape G functions.

    Returns (mantissa, log_scale, relative_error_estimate).
    """
    N = len(logz)
    left, right = _pole_edges(A, B, m, n)
    normal = left < right
    c = np.empty(N)
    dist = np.empty(N)
    corrections = [[] for _ in range(N)]
    if normal.any():
        idx = np.nonzero(normal)[0]
        c[idx] = _choose_abscissa(A[idx], B[idx], m, n, logz[idx])
        dist[idx] = _distance_to_poles(c[idx], A[idx], B[idx], m, n)
    for i in np.nonzero(~normal)[0]:
        _check_separable(A[i], B[i], m, n)
        c[i], dist[i], corrections[i] = _indented_setup(A[i], B[i], m, n, logz[i])

    scale, Y = _truncation(c, A, B, m, n, logz)
    pid, lo, hi = _initial_panels(dist, Y, logz)

    acc_val = np.zeros(N)
    acc_err = np.zeros(N)
    acc_abs = np.zeros(N)
    for _ in range(_MAX_ROUNDS):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        y = mid[:, None] + half[:, None] * _NODES[None, :]
        s = c[pid][:, None] + 1j * y
        L = _log_phi(s, A[pid], B[pid], m, n, logz[pid]) - scale[pid][:, None]
        if np.any(L.real > _LOG_MAX):
            raise NumericalFailure("Meijer G integrand overflowed after scaling")
        with np.errstate(under="ignore"):
            f = np.exp(L).real
        f = np.where(np.isfinite(f), f, 0.0)
        kval = half * (f @ _WK)
        gval = half * (f @ _WG)
        err = np.abs(kval - gval)
        absv = half * (np.abs(f) @ _WK)

        tot_val = acc_val + np.bincount(pid, kval, N)
        tot_err = acc_err + np.bincount(pid, err, N)
        tot_abs = acc_abs + np.bincount(pid, absv, N)
        tol = np.maximum(_RTOL * np.abs(tot_val), _ATOL_ABS * tot_abs)
        done = tot_err <= tol
        local = tol[pid] * (hi - lo) / Y[pid]
        split = (~done[pid]) & (err > local)
        # Integrals that are not done but have no panel over its local
        # share split their worst panel.
        stuck = (~done) & (np.bincount(pid, split, N) == 0)
        if stuck.any():
            for i in np.nonzero(stuck)[0]:
                mine = np.nonzero(pid == i)[0]
                split[mine[np.argmax(err[mine])]] = True
        keep = ~split
        acc_val += np.bincount(pid[keep], kval[keep], N)
        acc_err += np.bincount(pid[keep], err[keep], N)
        acc_abs += np.bincount(pid[keep], absv[keep], N)
        if not split.any():
            break
        pid, lo, hi = (
            np.repeat(pid[split], 2),
            np.column_stack([lo[split], mid[split]]).ravel(),
            np.column_stack([mid[split], hi[split]]).ravel(),
        )
    else:
        worst = float(np.max(acc_err / np.maximum(np.abs(acc_val), 1e-300)))
        raise NumericalFailure("Meijer G contour quadrature did not converge", worst)

    value = acc_val / math.pi
    for i, corr in enumerate(corrections):
        for res, sc in corr:
            value[i] += res * math.exp(sc - scale[i]) if sc - scale[i] < _LOG_MAX else math.inf
    rel = acc_err / np.maximum(np.abs(acc_val), 1e-300)
    return value, scale, rel


def _prepare(spec: MeijerGSpec, z: float):
    if spec.p > spec.q:
        return spec.reflected(), -math.log(z)
    return spec, math.log(z)


def _reduction(spec: MeijerGSpec, z: float):
    """Closed forms for recognised shapes, as (mantissa, log_scale)."""
    if spec.shape() == (1, 1, 1, 2) and spec.a[0] == 1.0 and spec.b[1] == 0.0 and spec.b[0] > 0:
        return 1.0, float(log_lower_incomplete_gamma(spec.b[0], z))
    if spec.shape() == (1, 0, 0, 1):
        return 1.0, spec.b[0] * math.log(z) - z
    return None


def meijer_g_scaled(spec: MeijerGSpec, z: float) -> tuple:
    """G(z) as ``(mantissa, log_scale)`` with G = mantissa * exp(log_scale)."""
    if not z > 0:
        raise DomainError(f"meijer_g requires z > 0, got {z!r}")
    red = _reduction(spec, z)
    if red is not None:
        return red
    spec2, logz = _prepare(spec, z)
    A = np.array([spec2.a], dtype=float).reshape(1, spec2.p)
    B = np.array([spec2.b], dtype=float).reshape(1, spec2.q)
    val, scale, _ = _contour_batch(A, B, spec2.m, spec2.n, np.array([logz]))
    return float(val[0]), float(scale[0])


def meijer_g(spec: MeijerGSpec, z: float) -> float:
    """Value of G^{m,n}_{p,q}[z | a; b] for real z > 0.

    Recognised closed forms are used directly; ``p > q`` is mapped to
    ``q > p`` by z -> 1/z; everything else goes through the contour
    integral on the line that best separates the two pole families.
    """
    mant, scale = meijer_g_scaled(spec, z)
    if mant == 0.0:
        return 0.0
    logabs = scale + math.log(abs(mant))
    if logabs > _LOG_MAX:
        raise OverflowError("Meijer G value overflows double precision")
    return math.copysign(math.exp(logabs), mant)


def meijer_g_batch(specs: Sequence[MeijerGSpec], zs) -> tuple:
    """Scaled values for many same-shape specs in one vectorised pass.

    Returns ``(mantissa, log_scale)`` arrays.  No closed-form shortcuts.
    """
    zs = np.asarray(zs, dtype=float)
    if len(specs) != len(zs):
        raise ValueError("specs and zs must have equal length")
    if len(specs) == 0:
        return np.zeros(0), np.zeros(0)
    shape = specs[0].shape()
    if any(s.shape() != shape for s in specs):
        raise ValueError("meijer_g_batch needs specs of one (m, n, p, q) shape")
    if np.any(zs <= 0):
        raise DomainError("meijer_g requires z > 0")
    logz = np.log(zs)
    if shape[2] > shape[3]:
        specs = [s.reflected() for s in specs]
        logz = -logz
    s0 = specs[0]
    A = np.array([s.a for s in specs], dtype=float).reshape(len(specs), s0.p)
    B = np.array([s.b for s in specs], dtype=float).reshape(len(specs), s0.q)
    val = np.empty(len(specs))
    scale = np.empty(len(specs))
    for lo in range(0, len(specs), _BATCH):
        sl = slice(lo, lo + _BATCH)
        val[sl], scale[sl], _ = _contour_batch(A[sl], B[sl], s0.m, s0.n, logz[sl])
    return val, scale


# ---------------------------------------------------------------------------
# Leading residues (small-argument expansion)
# ---------------------------------------------------------------------------

class ResidueTail(NamedTuple):
    value: float
    regularized: bool


def _tail_terms(a, b, m, n, logz):
    sgn_total = []
    log_total = []
    for l in range(m):
        bl = b[l]
        sgn, lg = 1.0, bl * logz
        zero = False
        for j in range(m):
            if j != l:
                x = b[j] - bl
                sgn *= _gamma_sign(x)
                lg += math.lgamma(x)
        for j in range(n):
            x = 1.0 + bl - a[j]
            sgn *= _gamma_sign(x)
            lg += math.lgamma(x)
        for j in range(m, len(b)):
            x = 1.0 + bl - b[j]
            if _is_nonpositive_int(x):
                zero = True
                break
            sgn *= _gamma_sign(x)
            lg -= math.lgamma(x)
        if not zero:
            for j in range(n, len(a)):
                x = a[j] - bl
                if _is_nonpositive_int(x):
                    zero = True
                    break
                sgn *= _gamma_sign(x)
                lg -= math.lgamma(x)
        if not zero:
            sgn_total.append(sgn)
            log_total.append(lg)
    return sgn_total, log_total


def _collisions(a, b, m, n, tol=1e-9):
    hit = set()
    for l in range(m):
        for j in range(len(b)):
            if j == l:
                continue
            d = b[j] - b[l]
            if j < m and abs(d - round(d)) < tol:
                hit.update((l, j))
            elif j >= m and abs(d) < tol:
                hit.add(l)
        for j in range(n):
            if _is_nonpositive_int(1.0 + b[l] - a[j], tol):
                hit.add(l)
    return sorted(hit)


def _sum_scaled(signs, logs):
    if not logs:
        return 0.0, 0.0
    top = max(logs)
    return math.fsum(s * math.exp(v - top) for s, v in zip(signs, logs)), top


def residue_tail_scaled(spec: MeijerGSpec, z: float, eps: float = 1e-6) -> tuple:
    """Leading-residue sum as ``(mantissa, log_scale, regularized)``.

    Sums the first residue of each Gamma(b_l - s), l < m.  Coincident lower
    parameters are split by +-eps and the two evaluations averaged.
    """
    if not z > 0:
        raise DomainError(f"residue tail requires z > 0, got {z!r}")
    a, b, m, n = list(spec.a), list(spec.b), spec.m, spec.n
    logz = math.log(z)
    hit = _collisions(a, b, m, n)
    if not hit:
        mant, sc = _sum_scaled(*_tail_terms(a, b, m, n, logz))
        return mant, sc, False
    warnings.warn(
        f"coincident Meijer G lower parameters {[b[i] for i in hit]} split by +-{eps}",
        RegularizationWarning,
        stacklevel=2,
    )
    parts = []
    for sign in (1.0, -1.0):
        bb = list(b)
        for rank, l in enumerate(hit):
            bb[l] = b[l] + sign * eps * (1.0 + 0.5 * rank)
        parts.append(_sum_scaled(*_tail_terms(a, bb, m, n, logz)))
    top = max(p[1] for p in parts)
    mant = 0.5 * sum(p[0] * math.exp(p[1] - top) for p in parts)
    return mant, top, True


def meijer_g_residue_tail(spec: MeijerGSpec, z: float, eps: float = 1e-6) -> ResidueTail:
    """Small-argument expansion of G: the leading residue of each right pole family."""
    mant, sc, reg = residue_tail_scaled(spec, z, eps)
    return ResidueTail(mant * math.exp(sc) if mant else 0.0, reg)
