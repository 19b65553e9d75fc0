"""Parameter sweeps: closed forms and simulation side by side, as CSV rows."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

from .config import ScenarioConfig
from .errors import NumericalFailure, RfFsoError
from .montecarlo import estimate_schemes
from .secrecy import (ATAS, OTAS, atas_select, est, sop_asymptotic, sop_bound_detail,
                      sop_exact_numeric)

__all__ = ["SweepRow", "CSV_HEADER", "run_sweep", "rows_to_csv", "write_csv", "SweepFailure"]


@dataclass(frozen=True)
class SweepRow:
    """One (sweep point, scheme) result; NaN marks a quantity not computed.

    ``sweep_value_dB`` holds the swept SNR in dB, or the raw target rate
    when the sweep variable is ``rs``.
    """

    sweep_value_dB: float
    scheme: str
    sop_bound: float
    sop_exact: float
    sop_asymptotic: float
    sop_mc: float
    sop_mc_stderr: float
    est_closed: float
    est_mc: float
    flags: str


CSV_HEADER = tuple(f.name for f in fields(SweepRow))
NAN = float("nan")


class SweepFailure(RfFsoError):
    """A sweep point failed; ``row`` names the sweep value and scheme."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


def _closed(model, scheme, epsabs):
    bound, _, diag = sop_bound_detail(model, scheme)
    exact = sop_exact_numeric(model, scheme, epsabs)
    return bound, exact, sop_asymptotic(model, scheme), list(diag)


def _point(args):
    config, index, value, closed, simulate = args
    model = config.model_at(value)
    schemes = config.schemes
    mc = {}
    if simulate:
        # one stream family per sweep point, shared by all schemes
        mc = estimate_schemes(model, schemes, config.mc_samples, [config.seed, index],
                              config.stream_count, config.otas_selection)
    cache = {}
    rows = []
    for s in schemes:
        bound = exact = asym = est_closed = NAN
        flags = []
        if closed and s != OTAS:
            target = atas_select(model) if s == ATAS else s
            try:
                if target not in cache:
                    cache[target] = _closed(model, target, config.quad_epsabs)
            except NumericalFailure as exc:
                raise SweepFailure(f"sweep value {value:g}, scheme {s}: {exc}",
                                   (index, value, s)) from exc
            bound, exact, asym, flags = cache[target]
            flags = list(flags) + ([f"dispatch={target}"] if s == ATAS else [])
            est_closed = est(model, bound)
        elif closed:
            flags.append("no closed form")
        sop_mc = stderr = est_mc = NAN
        if s in mc:
            exact_mc, _, est_est = mc[s]
            sop_mc, stderr, est_mc = exact_mc.value, exact_mc.stderr, est_est.value
        rows.append(SweepRow(float(value), s, bound, exact, asym, sop_mc, stderr,
                             est_closed, est_mc, ";".join(flags)))
    return rows


def run_sweep(config: ScenarioConfig, closed: bool = True, simulate: bool = True,
              workers: int | None = None) -> list:
    """Evaluate every sweep point for every configured scheme.

    Rows come back ordered by sweep index, then by scheme order in the
    config, whatever order the workers finish in.
    """
    workers = config.workers if workers is None else workers
    points = config.sweep_points()
    jobs = [(config, i, float(v), closed, simulate) for i, v in enumerate(points)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            parts = list(pool.map(_point, jobs))
    else:
        parts = [_point(j) for j in jobs]
    return [row for part in parts for row in part]


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, float) and math.isnan(v):
        return ""
    return repr(float(v))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def write_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))
