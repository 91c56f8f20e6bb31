"""Pattern-matching metrics between a reference pattern and shot estimates.

All patterns are peak-normalized and share one display order.  For run
``r`` the mismatch is ``sum_m |P_m - p_m^(r)| / sum_m P_m``; ``gamma`` is its
mean over runs.  The mainlobe part sums the display indices strictly between
the two first nulls, the sidelobe part sums the rest, and both keep the full
denominator.

``scale="db"`` applies the same sums to ``10 log10`` values instead.
Reference samples are clamped at :data:`~qftarray.reference.DB_FLOOR`; an
estimate's empty bins are clamped at that run's resolution ``1 / V_MAX``
(``floors``), the smallest level the run can represent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from os import PathLike
from typing import IO, NamedTuple, Sequence

import numpy as np

from .errors import ComparisonError, ParameterError
from .qsim import ShotHistogram
from .reference import DB_FLOOR, PatternSamples, find_mainlobe_nulls, to_db

__all__ = [
    "RunMetrics",
    "MatchReport",
    "resolution_threshold",
    "gamma",
    "gamma_split",
    "delta_statistics",
    "match",
    "write_report_csv",
]

SCALES = ("linear", "db")


class RunMetrics(NamedTuple):
    gamma: float
    gamma_ml: float
    gamma_sl: float
    delta_db: float


@dataclass(frozen=True)
class MatchReport:
    """Headline metrics (means over ``per_run``) and the nulls used.

    ``gamma`` is stored as ``gamma_ml + gamma_sl`` so the split is exact.
    ``delta_db`` is ``-inf`` for the infinite-shot pathway.
    """

    gamma: float
    gamma_ml: float
    gamma_sl: float
    delta_db: float
    per_run: tuple[RunMetrics, ...]
    chi1: int
    chi2: int
    scale: str = "linear"
    delta_min_db: float = field(default=float("-inf"))
    delta_max_db: float = field(default=float("-inf"))

    @property
    def repetitions(self) -> int:
        return len(self.per_run)


def resolution_threshold(hist: ShotHistogram) -> tuple[float, float]:
    """``delta = 1 / V_MAX``, returned as ``(linear, dB)``."""
    v_max = hist.v_max
    if v_max < 1:
        raise ParameterError("histogram has no counts")
    delta = 1.0 / v_max
    return delta, 10.0 * math.log10(delta)


def delta_statistics(histograms: Sequence[ShotHistogram]) -> tuple[float, float, float]:
    """Mean, min and max of the per-run resolution threshold, in dB.

    The mean is taken over the dB values.
    """
    if len(histograms) < 1:
        raise ParameterError("need at least one histogram")
    db = [resolution_threshold(h)[1] for h in histograms]
    return math.fsum(db) / len(db), min(db), max(db)


def _check(reference: PatternSamples, runs: Sequence[PatternSamples], scale: str):
    if scale not in SCALES:
        raise ParameterError(f"scale must be one of {SCALES}, got {scale!r}")
    if len(runs) < 1:
        raise ParameterError("need at least one estimated run")
    if not reference.is_normalized:
        reference = reference.normalized()
    out = []
    for r in runs:
        if not reference.same_layout(r):
            raise ComparisonError("patterns differ in length or display order")
        out.append(r if r.is_normalized else r.normalized())
    return reference, out


def _terms(reference, runs, scale, floors):
    """Per-run arrays ``|P_m - p_m|`` and the shared denominator."""
    if scale == "linear":
        ref = reference.values
        den = math.fsum(ref)
        return [np.abs(ref - r.values) for r in runs], den
    ref = to_db(reference.values, DB_FLOOR)
    den = math.fsum(np.abs(ref))
    if floors is None:
        floors = [10.0 ** (DB_FLOOR / 10.0)] * len(runs)
    if len(floors) != len(runs):
        raise ParameterError("one floor per run is required")
    diffs = []
    for r, floor in zip(runs, floors):
        est = to_db(np.maximum(r.values, floor), DB_FLOOR)
        diffs.append(np.abs(ref - est))
    return diffs, den


def gamma(reference: PatternSamples, runs: Sequence[PatternSamples], scale: str = "linear",
          floors: Sequence[float] | None = None) -> float:
    """Mean normalized L1 mismatch over all samples."""
    reference, runs = _check(reference, runs, scale)
    diffs, den = _terms(reference, runs, scale, floors)
    return math.fsum(math.fsum(d) / den for d in diffs) / len(diffs)


def _split_runs(diffs, den, chi1, chi2):
    per_run = []
    for d in diffs:
        ml = math.fsum(d[chi1 + 1 : chi2]) / den
        sl = (math.fsum(d[: chi1 + 1]) + math.fsum(d[chi2:])) / den
        per_run.append((ml, sl))
    return per_run


def _validate_nulls(chi1, chi2, m):
    # (-1, m) is allowed: no nulls, every sample counts as mainlobe
    if not (-1 <= chi1 < chi2 <= m) or (chi1 == -1) != (chi2 == m):
        raise ParameterError(f"invalid null indices ({chi1}, {chi2}) for M={m}")


def gamma_split(reference: PatternSamples, runs: Sequence[PatternSamples], chi1: int, chi2: int,
                scale: str = "linear", floors: Sequence[float] | None = None) -> tuple[float, float]:
    """``(gamma_ml, gamma_sl)``: mainlobe is ``chi1 < i < chi2``."""
    reference, runs = _check(reference, runs, scale)
    _validate_nulls(chi1, chi2, len(reference))
    diffs, den = _terms(reference, runs, scale, floors)
    per_run = _split_runs(diffs, den, chi1, chi2)
    r = len(per_run)
    return math.fsum(p[0] for p in per_run) / r, math.fsum(p[1] for p in per_run) / r


def match(reference: PatternSamples, runs: Sequence[PatternSamples],
          histograms: Sequence[ShotHistogram] | None = None,
          nulls: tuple[int, int] | None = None, scale: str = "linear") -> MatchReport:
    """Full report.  Without ``histograms`` the runs are taken as exact
    (infinite-shot) patterns and every delta is ``-inf``.

    Nulls default to those of the reference pattern.  ``nulls=(-1, M)``
    marks a pattern without mainlobe nulls (a flat one, say): every sample
    is then mainlobe and ``gamma_sl`` is zero.
    """
    reference, runs = _check(reference, runs, scale)
    chi1, chi2 = find_mainlobe_nulls(reference) if nulls is None else nulls
    _validate_nulls(chi1, chi2, len(reference))
    if histograms is not None:
        if len(histograms) != len(runs):
            raise ParameterError("one histogram per run is required")
        deltas = [resolution_threshold(h) for h in histograms]
        floors = [d[0] for d in deltas]
        delta_db = [d[1] for d in deltas]
    else:
        floors = None
        delta_db = [float("-inf")] * len(runs)
    diffs, den = _terms(reference, runs, scale, floors)
    parts = _split_runs(diffs, den, chi1, chi2)
    per_run = tuple(RunMetrics(ml + sl, ml, sl, dd) for (ml, sl), dd in zip(parts, delta_db))
    r = len(per_run)
    g_ml = math.fsum(p.gamma_ml for p in per_run) / r
    g_sl = math.fsum(p.gamma_sl for p in per_run) / r
    finite = [d for d in delta_db if math.isfinite(d)]
    if finite:
        d_mean, d_min, d_max = math.fsum(finite) / len(finite), min(finite), max(finite)
    else:
        d_mean = d_min = d_max = float("-inf")
    return MatchReport(
        gamma=g_ml + g_sl,
        gamma_ml=g_ml,
        gamma_sl=g_sl,
        delta_db=d_mean,
        per_run=per_run,
        chi1=int(chi1),
        chi2=int(chi2),
        scale=scale,
        delta_min_db=d_min,
        delta_max_db=d_max,
    )


def write_report_csv(report: MatchReport, dest: str | PathLike | IO[str]):
    """``run,gamma,gamma_ml,gamma_sl,delta_db`` per run, then a ``mean`` row."""

    def _write(fh):
        fh.write("run,gamma,gamma_ml,gamma_sl,delta_db\n")
        for i, p in enumerate(report.per_run, start=1):
            fh.write(f"{i},{p.gamma!r},{p.gamma_ml!r},{p.gamma_sl!r},{p.delta_db!r}\n")
        fh.write(
            f"mean,{report.gamma!r},{report.gamma_ml!r},{report.gamma_sl!r},{report.delta_db!r}\n"
        )

    if hasattr(dest, "write"):
        _write(dest)
    else:
        with open(dest, "w", newline="") as fh:
            _write(fh)
