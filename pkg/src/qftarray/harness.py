"""Experiment runner: single analyses, shot sweeps and the Γ_SL threshold search.

Seeds
-----
Run ``r`` of sweep point ``t`` draws with
``derive_seed(master, t, r) = int.from_bytes(SeedSequence(master,
spawn_key=(t, r)).generate_state(2, uint64))``, which the sampler then splits
into per-chunk Philox streams.  Identical config and master seed therefore
give identical histograms and byte-identical output files.

Config files
------------
Flat ``key = value`` lines; ``#`` starts a comment, blank lines are ignored,
keys are :class:`ExperimentConfig` field names (``-`` and ``_`` are
interchangeable).  List values (``shots``) are comma separated.  Shot counts
may be written relative to the sample count: ``M*1000``, ``Mx80`` or
``M*1.8e3``.  Command-line flags override file values.
"""
from __future__ import annotations

import logging
import math
import os
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import NullNotFoundError, ParameterError, ParseError
from .excitations import ExcitationSet, dolph_chebyshev, normalize, read_excitations, taylor
from .metrics import MatchReport, match, write_report_csv
from .qsim import (
    AliasTable,
    QuantumState,
    apply_qft,
    encode,
    estimate_pattern,
    exact_probabilities,
    register_size,
    sample_shots,
)
from .reference import (
    GridSpec,
    PatternSamples,
    dft_array_factor,
    find_mainlobe_nulls,
    power_pattern,
    write_pattern_csv,
)

__all__ = [
    "ExperimentConfig",
    "RunResult",
    "SweepRow",
    "SearchResult",
    "Experiment",
    "derive_seed",
    "parse_shots",
    "load_config",
    "search_schedule",
    "run_single",
    "sweep_shots",
    "search_shots",
    "emit_plotdata",
]

log = logging.getLogger(__name__)

GENERATORS = ("dolph", "taylor", "file")


@dataclass(frozen=True)
class ExperimentConfig:
    generator: str = "dolph"
    sll_db: float = -15.0
    n_bar: int = 4
    excitation_file: str | None = None
    n_elements: int = 16
    n_samples: int = 1024
    spacing: float = 0.5
    shots: tuple[int, ...] = (1024 * 1000,)
    repetitions: int = 20
    seed: int = 0
    output_dir: str | None = None
    gamma_sl_target: float | None = None
    search_start: int | None = None
    search_factor: float = 1.2
    search_max: int | None = None
    exact: bool = False
    metric_scale: str = "linear"
    workers: int = 1

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ParameterError(f"generator must be one of {GENERATORS}, got {self.generator!r}")
        if (self.generator == "file") != (self.excitation_file is not None):
            raise ParameterError(
                "exactly one excitation source: use generator=file together with excitation_file"
            )
        n = self.n_samples
        if n < 1 or n & (n - 1):
            raise ParameterError(f"n_samples must be a power of two, got {n}")
        shots = tuple(int(t) for t in self.shots)
        if not shots or any(t < 1 for t in shots):
            raise ParameterError("every shot count must be >= 1")
        object.__setattr__(self, "shots", shots)
        if self.repetitions < 1:
            raise ParameterError("repetitions must be >= 1")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")
        if self.gamma_sl_target is not None and not self.gamma_sl_target > 0:
            raise ParameterError("gamma_sl_target must be positive")
        if not self.search_factor > 1:
            raise ParameterError("search_factor must exceed 1")
        if self.metric_scale not in ("linear", "db"):
            raise ParameterError("metric_scale must be 'linear' or 'db'")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")

    def excitations(self) -> ExcitationSet:
        if self.generator == "dolph":
            return dolph_chebyshev(self.n_elements, self.sll_db)
        if self.generator == "taylor":
            return taylor(self.n_elements, self.sll_db, self.n_bar)
        return read_excitations(self.excitation_file)

    @property
    def start_shots(self) -> int:
        return self.search_start if self.search_start is not None else self.n_samples * 80

    @property
    def max_shots(self) -> int:
        return self.search_max if self.search_max is not None else self.n_samples * 10_000


_SHOTS_RE = re.compile(r"^\s*[mM]\s*[*xX]\s*([0-9.eE+]+)\s*$")


def parse_shots(text: str | int, n_samples: int) -> int:
    """Shot count from ``"81920"``, ``"M*80"``, ``"Mx80"`` or ``"M*1.8e3"``."""
    if isinstance(text, (int, np.integer)):
        return int(text)
    s = str(text).strip()
    m = _SHOTS_RE.match(s)
    try:
        if m:
            value = n_samples * float(m.group(1))
        else:
            value = float(s)
    except ValueError:
        raise ParseError(f"bad shot count {text!r}") from None
    if not math.isfinite(value) or value < 1 or abs(value - round(value)) > 1e-6 * max(1.0, value):
        raise ParseError(f"shot count {text!r} is not a positive integer")
    return int(round(value))


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _convert(name: str, raw: str, n_samples: int):
    raw = raw.strip()
    if name == "shots":
        return tuple(parse_shots(p, n_samples) for p in raw.split(",") if p.strip())
    if name in ("search_start", "search_max"):
        return None if raw.lower() in ("", "none") else parse_shots(raw, n_samples)
    if name in ("n_bar", "n_elements", "n_samples", "repetitions", "seed", "workers"):
        return int(raw)
    if name in ("sll_db", "spacing", "search_factor"):
        return float(raw)
    if name == "gamma_sl_target":
        return None if raw.lower() in ("", "none") else float(raw)
    if name == "exact":
        try:
            return _BOOL[raw.lower()]
        except KeyError:
            raise ValueError(f"not a boolean: {raw!r}") from None
    if name in ("excitation_file", "output_dir"):
        return None if raw.lower() in ("", "none") else raw
    return raw


def parse_config(lines: Iterable[str], overrides: dict | None = None,
                 base_dir: str | os.PathLike | None = None) -> ExperimentConfig:
    """Build a config from ``key = value`` lines plus already-typed overrides.

    A relative ``excitation_file`` read from the lines is taken relative to
    ``base_dir`` (the config file's directory) when one is given.
    """
    known = {f.name for f in fields(ExperimentConfig)}
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ParseError(f"expected 'key = value', got {line.strip()!r}", row=lineno)
        key, value = (p.strip() for p in text.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ParseError(f"unknown key {key!r}", row=lineno)
        raw[key] = (lineno, value)
    overrides = dict(overrides or {})
    n_samples = overrides.get("n_samples")
    if n_samples is None:
        n_samples = int(raw["n_samples"][1]) if "n_samples" in raw else ExperimentConfig.n_samples
    values = {}
    for key, (lineno, value) in raw.items():
        try:
            values[key] = _convert(key, value, n_samples)
        except (ValueError, ParseError) as exc:
            raise ParseError(f"{key}: {exc}", row=lineno) from None
    path = values.get("excitation_file")
    if path and base_dir is not None and not os.path.isabs(path):
        values["excitation_file"] = os.path.join(base_dir, path)
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "excitation_file" in values and values["excitation_file"] and "generator" not in values:
        values["generator"] = "file"
    return ExperimentConfig(**values)


def load_config(path: str | os.PathLike, overrides: dict | None = None) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh, overrides, os.path.dirname(os.path.abspath(path)))


def derive_seed(master: int, point: int, run: int) -> int:
    state = np.random.SeedSequence(int(master), spawn_key=(int(point), int(run))).generate_state(2, np.uint64)
    return (int(state[0]) << 64) | int(state[1])


def search_schedule(start: int, factor: float, cap: int) -> list[int]:
    """Geometric shot schedule ``round(start * factor**k)``, strictly increasing, up to ``cap``."""
    out = []
    k = 0
    while True:
        t = int(round(start * factor**k))
        if out and t <= out[-1]:
            t = out[-1] + 1
        if t > cap:
            break
        out.append(t)
        k += 1
    return out


class Experiment:
    """Everything that does not depend on the shot count, computed once."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        exc = config.excitations()
        self.excitations = exc if exc.normalized else normalize(exc)
        self.grid = GridSpec(self.excitations.n_elements, config.n_samples, config.spacing)
        self.array_factor = dft_array_factor(self.excitations, self.grid)
        self.reference = power_pattern(self.array_factor, config.spacing).normalized()
        try:
            self.nulls = find_mainlobe_nulls(self.reference)
        except NullNotFoundError:
            log.warning("reference pattern has no mainlobe nulls; treating it all as mainlobe")
            self.nulls = (-1, config.n_samples)
        self.n_qubits = register_size(self.excitations.n_elements, config.n_samples)
        self.output_state: QuantumState = apply_qft(encode(self.excitations, self.n_qubits))
        self.probabilities = exact_probabilities(self.output_state)
        self.exact_pattern = PatternSamples.from_natural(self.probabilities, config.spacing, normalize=True)
        self._table = None

    @property
    def table(self) -> AliasTable:
        if self._table is None:
            self._table = AliasTable(self.probabilities)
        return self._table

    def run_point(self, shots: int, point: int, repetitions: int | None = None):
        """R seeded repetitions at one shot count: ``(report, histograms, patterns)``."""
        cfg = self.config
        reps = cfg.repetitions if repetitions is None else repetitions
        hists, patterns = [], []
        for r in range(reps):
            h = sample_shots(
                self.output_state, shots, derive_seed(cfg.seed, point, r),
                workers=cfg.workers, table=self.table,
            )
            hists.append(h)
            patterns.append(estimate_pattern(h, cfg.spacing))
        report = match(self.reference, patterns, hists, self.nulls, cfg.metric_scale)
        return report, hists, patterns

    def exact_report(self) -> MatchReport:
        return match(self.reference, [self.exact_pattern], None, self.nulls, self.config.metric_scale)


class RunResult(NamedTuple):
    reference: PatternSamples
    estimated: PatternSamples
    report: MatchReport


class SweepRow(NamedTuple):
    shots: int
    delta_mean_db: float
    delta_min_db: float
    delta_max_db: float
    gamma: float
    gamma_ml: float
    gamma_sl: float


@dataclass
class SearchResult:
    t_star: int | None
    report: MatchReport | None
    trajectory: list[SweepRow] = field(default_factory=list)
    target: float = 0.0

    @property
    def exhausted(self) -> bool:
        return self.t_star is None


def _row(shots: int, report: MatchReport) -> SweepRow:
    return SweepRow(shots, report.delta_db, report.delta_min_db, report.delta_max_db,
                    report.gamma, report.gamma_ml, report.gamma_sl)


def run_single(config: ExperimentConfig, experiment: Experiment | None = None) -> RunResult:
    """Encode, transform, sample and compare at one shot count.

    ``estimated`` is the first repetition's pattern (or the exact pattern
    when ``config.exact``); the report covers all repetitions.
    """
    exp = experiment or Experiment(config)
    if len(config.shots) != 1 and not config.exact:
        raise ParameterError("run_single needs exactly one shot count")
    if config.exact:
        result = RunResult(exp.reference, exp.exact_pattern, exp.exact_report())
    else:
        report, _, patterns = exp.run_point(config.shots[0], 0)
        result = RunResult(exp.reference, patterns[0], report)
    if config.output_dir:
        emit_plotdata(result, config.output_dir)
    return result


def sweep_shots(config: ExperimentConfig, experiment: Experiment | None = None) -> list[SweepRow]:
    if len(config.shots) < 2:
        raise ParameterError("a sweep needs at least two shot counts")
    exp = experiment or Experiment(config)
    rows = []
    for t_index, shots in enumerate(config.shots):
        report, _, _ = exp.run_point(shots, t_index)
        rows.append(_row(shots, report))
        log.info("T=%d  delta=%.2f dB  gamma_sl=%.4g", shots, report.delta_db, report.gamma_sl)
    if config.output_dir:
        emit_plotdata(rows, config.output_dir)
    return rows


def search_shots(config: ExperimentConfig, experiment: Experiment | None = None,
                 repetitions: int | None = None) -> SearchResult:
    """Smallest scheduled T whose mean Γ_SL meets ``gamma_sl_target``.

    Runs out of schedule without success -> ``SearchResult.exhausted``.
    """
    target = config.gamma_sl_target
    if target is None:
        raise ParameterError("search needs gamma_sl_target")
    exp = experiment or Experiment(config)
    schedule = search_schedule(config.start_shots, config.search_factor, config.max_shots)
    result = SearchResult(None, None, [], target)
    for k, shots in enumerate(schedule):
        report, _, _ = exp.run_point(shots, k, repetitions)
        result.trajectory.append(_row(shots, report))
        log.info("search T=%d  gamma_sl=%.4g (target %.4g)", shots, report.gamma_sl, target)
        if report.gamma_sl <= target:
            result.t_star, result.report = shots, report
            break
    if config.output_dir:
        emit_plotdata(result, config.output_dir)
    return result


def _write_rows(path: Path, header: str, rows: Iterable[Sequence]):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def _write_sweep(rows: Sequence[SweepRow], out: Path, prefix: str = ""):
    _write_rows(out / f"{prefix}delta_vs_shots.csv", "shots,delta_mean_db,delta_min_db,delta_max_db",
                [(r.shots, r.delta_mean_db, r.delta_min_db, r.delta_max_db) for r in rows])
    _write_rows(out / f"{prefix}gamma_vs_shots.csv", "shots,gamma,gamma_ml,gamma_sl",
                [(r.shots, r.gamma, r.gamma_ml, r.gamma_sl) for r in rows])


def emit_plotdata(results, directory: str | os.PathLike) -> list[Path]:
    """Write plot-ready CSVs for a :class:`RunResult`, sweep rows or a :class:`SearchResult`.

    Files (all with a header row):
      ``pattern_reference.csv``, ``pattern_estimated.csv``: ``u,value_db,value_linear``
      ``report.csv``: ``run,gamma,gamma_ml,gamma_sl,delta_db`` plus a ``mean`` row
      ``delta_vs_shots.csv``: ``shots,delta_mean_db,delta_min_db,delta_max_db``
      ``gamma_vs_shots.csv``: ``shots,gamma,gamma_ml,gamma_sl``
      ``search.csv``: ``target,t_star,exhausted``
    """
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"{out}: cannot create output directory ({exc.strerror or exc})") from exc
    before = set(out.iterdir())
    if isinstance(results, RunResult):
        write_pattern_csv(results.reference, out / "pattern_reference.csv")
        write_pattern_csv(results.estimated, out / "pattern_estimated.csv")
        write_report_csv(results.report, out / "report.csv")
    elif isinstance(results, SearchResult):
        _write_sweep(results.trajectory, out, "search_")
        _write_rows(out / "search.csv", "target,t_star,exhausted",
                    [(repr(results.target), results.t_star if results.t_star else "", int(results.exhausted))])
        if results.report is not None:
            write_report_csv(results.report, out / "search_report.csv")
    elif isinstance(results, (list, tuple)) and all(isinstance(r, SweepRow) for r in results):
        _write_sweep(results, out)
    else:
        raise TypeError(f"don't know how to emit {type(results).__name__}")
    return sorted(set(out.iterdir()) - before) or sorted(out.iterdir())


def config_with(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **changes)
