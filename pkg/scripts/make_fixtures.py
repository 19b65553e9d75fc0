"""Generate the committed high-precision fixtures with mpmath.

Run once from the repository root:

    python3 scripts/make_fixtures.py

Writes src/rffso/data/meijer_fixtures.txt and src/rffso/data/scalar_fixtures.txt.
The package itself never imports mpmath.
"""

import math
import os
import sys

import mpmath as mp

mp.mp.dps = 60

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, os.pardir, "src", "rffso", "data")

# default link (same numbers as the package defaults)
ALPHA, BETA = mp.mpf("2.296"), 2
OMEGA, B0, RHO0, DPHI = mp.mpf("1.3265"), mp.mpf("0.1079"), mp.mpf("0.596"), mp.pi / 2
XI, A0, IL = mp.mpf("6.7"), mp.mpf(1), mp.mpf("0.9")


def malaga_g_omega1():
    g = 2 * B0 * (1 - RHO0)
    om1 = OMEGA + 2 * RHO0 * B0 + 2 * mp.sqrt(2 * RHO0 * B0 * OMEGA) * mp.cos(DPHI)
    return g, om1


def mb_integral(m, n, a, b, z):
    """G by direct quadrature of the Mellin-Barnes line integral."""
    lo = max([mp.mpf(v) - 1 for v in a[:n]] or [-mp.inf])
    hi = min([mp.mpf(v) for v in b[:m]] or [mp.inf])
    if not lo < hi:
        raise ValueError("pole families not separable")
    if lo == -mp.inf:
        c = hi - 1
    elif hi == mp.inf:
        c = lo + 1
    else:
        c = (lo + hi) / 2

    def phi(s):
        num = mp.mpf(1)
        for v in b[:m]:
            num *= mp.gamma(v - s)
        for v in a[:n]:
            num *= mp.gamma(1 - v + s)
        den = mp.mpf(1)
        for v in b[m:]:
            den *= mp.gamma(1 - v + s)
        for v in a[n:]:
            den *= mp.gamma(v - s)
        return num / den * mp.power(z, s)

    f = lambda y: mp.re(phi(c + 1j * y))
    return mp.quad(f, [0, 1, 4, 16, 64, mp.inf]) / mp.pi


def _series(m, n, a, b, z):
    try:
        return mp.re(mp.meijerg([a[:n], a[n:]], [b[:m], b[m:]], z))
    except (mp.NoConvergence, ZeroDivisionError, ValueError):
        return None


def meijer(m, n, a, b, z):
    """G at 60 digits, accepted only when a 90-digit rerun agrees."""
    a = [mp.mpf(v) for v in a]
    b = [mp.mpf(v) for v in b]
    z = mp.mpf(z)
    results = []
    for dps in (60, 90):
        with mp.workdps(dps):
            v, how = _series(m, n, a, b, z), "series"
            if v is None:
                v, how = mb_integral(m, n, a, b, z), "contour"
            results.append((v, how))
    (v1, how), (v2, _) = results
    if abs(v1 - v2) > mp.mpf("1e-30") * abs(v2):
        raise RuntimeError(f"precision check failed for G^{m},{n} {a} {b} {z}: {v1} vs {v2}")
    return v2, how


def gk_cases():
    g, om1 = malaga_g_omega1()
    xi2 = XI ** 2
    out = []
    for rho in (mp.mpf("0.5"), mp.mpf("0.8")):
        delta = ALPHA * BETA / ((g * BETA + om1) * IL * A0 * rho)
        z = 8 / (delta ** 2 * (1 - rho ** 2))
        for h in (1, 2):
            a = [(1 - xi2) / 2, (2 - xi2) / 2, (1 - ALPHA) / 2, (2 - ALPHA) / 2,
                 mp.mpf(1 - h) / 2, mp.mpf(2 - h) / 2]
            for k in ((0, 1, 7, 40) if h == 1 else (2, 80)):
                out.append((1, 6, 6, 3, a, [mp.mpf(k) / 2, -xi2 / 2, (1 - xi2) / 2], z))
    return out


def kernel(r, k, nu, z):
    up = [(1 + mp.mpf(i)) / r for i in range(r)] + [(1 - mp.mpf(nu) + i) / 2 for i in range(2)]
    lo = [((1 + mp.mpf(k)) / 2 + i) / r for i in range(r)] + [mp.mpf(i) / r for i in range(r)]
    return (r, r + 2, r + 2, 2 * r, up, lo, mp.mpf(z))


def sop_kernel_cases():
    out = []
    for k, nu, z in ((0, 4, "0.3"), (1, 5, "2.5"), (3, 7, "0.05"), (10, 6, "1.7"), (25, 9, "12")):
        out.append(kernel(1, k, nu, z))
    for k, nu, z in ((0, 4, "0.8"), (1, 5, "0.02"), (2, 8, "3.0"), (7, 6, "0.4"), (30, 10, "25")):
        out.append(kernel(2, k, nu, z))
    return out


def misc_cases():
    g, om1 = malaga_g_omega1()
    xi2 = XI ** 2
    d0 = ALPHA * BETA / ((g * BETA + om1) * IL * A0)
    out = []
    for a_, z in (("0.5", "0.7"), ("2.5", "1.3"), ("7", "3")):
        out.append((1, 1, 1, 2, [1], [mp.mpf(a_), 0], mp.mpf(z)))
    for h in (1, 2):
        out.append((3, 0, 1, 3, [xi2 + 1], [xi2, ALPHA, h], d0 * mp.mpf("0.6")))
        out.append((3, 1, 2, 4, [1, xi2 + 1], [xi2, ALPHA, h, 0], d0 * mp.mpf("1.1")))
    out.append((2, 1, 2, 3, [mp.mpf("0.3"), mp.mpf("1.7")],
                [mp.mpf("0.25"), mp.mpf("0.9"), mp.mpf("-0.4")], mp.mpf("2.2")))
    return out


def fmt(x):
    return mp.nstr(x, 20, min_fixed=-3, max_fixed=3, strip_zeros=False)


def write_meijer():
    rows = []
    for tag, cases in (("gk", gk_cases()), ("sop", sop_kernel_cases()), ("misc", misc_cases())):
        for m, n, p, q, a, b, z in cases:
            v, how = meijer(m, n, a, b, z)
            rows.append(f"{tag} | {m} {n} {p} {q} | {' '.join(fmt(x) for x in a)} | "
                        f"{' '.join(fmt(x) for x in b)} | {fmt(z)} | {fmt(v)} | 1e-6")
            print(rows[-1], f"  [{how}]")
    with open(os.path.join(OUT, "meijer_fixtures.txt"), "w") as fh:
        fh.write("# tag | m n p q | a | b | z | value | rel_tol\n")
        fh.write("\n".join(rows) + "\n")


def fso_pdf_at(gamma, K=80, rho=mp.mpf("0.5"), r=2, snr=mp.mpf(1)):
    """Truncated FSO SNR density, every coefficient recomputed in mpmath."""
    g, om1 = malaga_g_omega1()
    xi2 = XI ** 2
    s2 = 1 - rho ** 2
    AD = (2 * ALPHA ** (ALPHA / 2) / (g ** (1 + ALPHA / 2) * mp.gamma(ALPHA))
          * (g * BETA / (g * BETA + om1)) ** (BETA + ALPHA / 2))
    BD = xi2 * AD * mp.power(2, ALPHA - mp.mpf("4.5")) / mp.pi ** mp.mpf("1.5")
    delta = ALPHA * BETA / ((g * BETA + om1) * IL * A0 * rho)
    z = 8 / (delta ** 2 * s2)
    psi1 = 1 / (2 * snr ** (mp.mpf(2) / r) * s2)
    x = psi1 * gamma ** (mp.mpf(2) / r)
    total = mp.mpf(0)
    for h in range(1, BETA + 1):
        bh = (mp.binomial(BETA - 1, h - 1) * (g * BETA + om1) ** (1 - mp.mpf(h) / 2)
              / mp.gamma(h) * (om1 / g) ** (h - 1) * (ALPHA / BETA) ** (mp.mpf(h) / 2)
              * (ALPHA * BETA / (g * BETA + om1)) ** (-(ALPHA + h) / 2))
        a = [(1 - xi2) / 2, (2 - xi2) / 2, (1 - ALPHA) / 2, (2 - ALPHA) / 2,
             mp.mpf(1 - h) / 2, mp.mpf(2 - h) / 2]
        for k in range(K + 1):
            G = mp.meijerg([a, []], [[mp.mpf(k) / 2], [-xi2 / 2, (1 - xi2) / 2]], z)
            H1 = bh * mp.power(2, k + h - mp.mpf("0.5")) * mp.re(G) / mp.factorial(k)
            ak = mp.mpf(k + 1) / 2
            total += BD * H1 * x ** (ak - 1) * mp.exp(-x)
    return total * psi1 * (mp.mpf(2) / r) * gamma ** (mp.mpf(2) / r - 1)


def _checked_pdf():
    with mp.workdps(80):
        v2 = fso_pdf_at(mp.mpf(1))
    v1 = fso_pdf_at(mp.mpf(1))
    if abs(v1 - v2) > mp.mpf("1e-25") * v2:
        raise RuntimeError(f"precision check failed for the FSO density: {v1} vs {v2}")
    return v2


def write_scalars():
    rows = [
        ("lower_incomplete_gamma(2.5,1.3)", mp.gammainc(mp.mpf("2.5"), 0, mp.mpf("1.3")), "1e-12"),
        # Gamma(tau=4, lambda=m/snr=1) CDF at 3
        ("mrc_cdf(m=2,n_rx=2,snr=2,x=3)", mp.gammainc(4, 0, 3, regularized=True), "1e-12"),
        ("bessel_i(1.5,2.0)", mp.besseli(mp.mpf("1.5"), 2), "1e-12"),
        ("fso_snr_pdf(rho=0.5,r=2,snr=1,gamma=1,K=80)", _checked_pdf(), "1e-8"),
    ]
    with open(os.path.join(OUT, "scalar_fixtures.txt"), "w") as fh:
        fh.write("# name | value | rel_tol\n")
        for name, v, tol in rows:
            fh.write(f"{name} | {fmt(v)} | {tol}\n")
            print(name, fmt(v))


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    write_meijer()
    write_scalars()
