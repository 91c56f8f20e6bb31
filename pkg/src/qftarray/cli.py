"""Command-line entry point ``qftarray``.

Subcommands: ``run``, ``sweep``, ``search``, ``gen-excitations`` and
``dump-circuit``.  Errors print ``error[<category>]: <message>`` on stderr
and exit with the category's status (2 parameter, 3 parse, 4 null not found,
5 I/O, 1 anything else of ours).
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import fields

from . import __version__
from .errors import ParseError, QftArrayError
from .excitations import dolph_chebyshev, dump_excitations, taylor
from .harness import (
    Experiment,
    ExperimentConfig,
    parse_config,
    parse_shots,
    run_single,
    search_shots,
    sweep_shots,
)
from .qsim import format_circuit, qft_circuit, register_size

EXIT_IO = 5


def _add_experiment_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("experiment")
    g.add_argument("--config", help="key = value config file; flags below override it")
    g.add_argument("--generator", choices=("dolph", "taylor", "file"))
    g.add_argument("--sll", dest="sll_db", type=float, help="design sidelobe level in dB (negative)")
    g.add_argument("--nbar", dest="n_bar", type=int, help="Taylor n-bar")
    g.add_argument("--excitations", dest="excitation_file", help="index,real,imag CSV (implies --generator file)")
    g.add_argument("-N", "--elements", dest="n_elements", type=int)
    g.add_argument("-M", "--samples", dest="n_samples", type=int, help="pattern samples, a power of two")
    g.add_argument("--spacing", type=float, help="element spacing in wavelengths")
    g.add_argument("-T", "--shots", help="shot count(s), comma separated; 'M*1000' style allowed")
    g.add_argument("-R", "--repetitions", type=int)
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("-o", "--output", dest="output_dir", help="directory for CSV output")
    g.add_argument("--target", dest="gamma_sl_target", type=float, help="sidelobe mismatch target for search")
    g.add_argument("--search-start", help="first scheduled shot count (default M*80)")
    g.add_argument("--search-factor", type=float, help="geometric schedule multiplier (default 1.2)")
    g.add_argument("--search-max", help="schedule cap (default M*10000)")
    g.add_argument("--exact", action="store_true", default=None, help="skip sampling, use exact probabilities")
    g.add_argument("--metric-scale", choices=("linear", "db"))
    g.add_argument("--workers", type=int, help="sampling threads")


def build_config(args) -> ExperimentConfig:
    """Config file (if any) with the command-line flags layered on top."""
    names = {f.name for f in fields(ExperimentConfig)}
    overrides = {k: v for k, v in vars(args).items() if k in names and v is not None}
    # shot strings like 'M*80' need the final M, which may come from the file
    shot_text = {k: overrides.pop(k) for k in ("shots", "search_start", "search_max") if k in overrides}
    lines, base = [], None
    if args.config:
        with open(args.config) as fh:
            lines = fh.readlines()
        base = os.path.dirname(os.path.abspath(args.config))
    if "excitation_file" in overrides and "generator" not in overrides:
        overrides["generator"] = "file"
    if not shot_text:
        return parse_config(lines, overrides, base)
    m = overrides.get("n_samples") or parse_config(lines, {}, base).n_samples
    if "shots" in shot_text:
        overrides["shots"] = tuple(parse_shots(s, m) for s in shot_text["shots"].split(",") if s.strip())
    for key in ("search_start", "search_max"):
        if key in shot_text:
            overrides[key] = parse_shots(shot_text[key], m)
    return parse_config(lines, overrides, base)


def _fmt(x: float) -> str:
    return "-inf" if x == -math.inf else f"{x:.6g}"


def cmd_run(args) -> int:
    cfg = build_config(args)
    exp = Experiment(cfg)
    ref, est, report = run_single(cfg, exp)
    print(f"excitations  {exp.excitations.label or 'file'}  N={exp.excitations.n_elements}")
    print(f"grid         M={cfg.n_samples}  L={exp.n_qubits}  d/lambda={cfg.spacing:g}")
    print(f"p_max exact  {exp.probabilities.max():.6g}")
    if cfg.exact:
        print("shots        exact (no sampling)")
    else:
        print(f"shots        T={cfg.shots[0]}  R={cfg.repetitions}  seed={cfg.seed}")
        print(f"p_max est    {est.p_max:.6g}  (run 1)")
        print(f"delta        mean {_fmt(report.delta_db)} dB  [{_fmt(report.delta_min_db)}, {_fmt(report.delta_max_db)}]")
    print(f"nulls        chi1={report.chi1}  chi2={report.chi2}")
    print(f"gamma        {_fmt(report.gamma)}  ML {_fmt(report.gamma_ml)}  SL {_fmt(report.gamma_sl)}  ({report.scale})")
    if cfg.output_dir:
        print(f"wrote        {cfg.output_dir}")
    return 0


def cmd_sweep(args) -> int:
    cfg = build_config(args)
    rows = sweep_shots(cfg)
    print("shots,delta_mean_db,delta_min_db,delta_max_db,gamma,gamma_ml,gamma_sl")
    for r in rows:
        print(",".join(str(r.shots) if i == 0 else _fmt(v) for i, v in enumerate(r)))
    return 0


def cmd_search(args) -> int:
    cfg = build_config(args)
    res = search_shots(cfg)
    print("shots,gamma_sl")
    for r in res.trajectory:
        print(f"{r.shots},{_fmt(r.gamma_sl)}")
    if res.exhausted:
        print(f"search exhausted: no scheduled T up to {cfg.max_shots} reached gamma_sl <= {cfg.gamma_sl_target:g}")
        return 0
    print(f"T* = {res.t_star}  (M x {res.t_star / cfg.n_samples:.4g})  gamma_sl = {_fmt(res.report.gamma_sl)}")
    return 0


def cmd_gen(args) -> int:
    if args.generator == "dolph":
        exc = dolph_chebyshev(args.n_elements, args.sll_db)
    elif args.generator == "taylor":
        exc = taylor(args.n_elements, args.sll_db, args.n_bar)
    else:
        raise ParseError("unknown generator")
    if args.output:
        try:
            with open(args.output, "w", newline="") as fh:
                dump_excitations(exc, fh)
        except OSError as exc_:
            raise OSError(f"{args.output}: {exc_.strerror or exc_}") from exc_
    else:
        dump_excitations(exc, sys.stdout)
    return 0


def cmd_dump(args) -> int:
    if args.qubits is not None:
        n_qubits = args.qubits
    else:
        n_qubits = register_size(args.n_elements, args.n_samples)
    gates = qft_circuit(n_qubits, args.sign)
    if args.counts:
        names = [g.name for g in gates]
        print(f"L={n_qubits}  H={names.count('H')}  CP={names.count('CP')}  SWAP={names.count('SWAP')}")
    else:
        sys.stdout.write(format_circuit(gates))
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qftarray", description="Array power patterns from an emulated QFT.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one shot count, R repetitions")
    _add_experiment_flags(run)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="several shot counts")
    _add_experiment_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    search = sub.add_parser("search", help="smallest T meeting a sidelobe mismatch target")
    _add_experiment_flags(search)
    search.set_defaults(func=cmd_search)

    gen = sub.add_parser("gen-excitations", help="write a taper as index,real,imag CSV")
    gen.add_argument("--generator", choices=("dolph", "taylor"), default="dolph")
    gen.add_argument("-N", "--elements", dest="n_elements", type=int, default=16)
    gen.add_argument("--sll", dest="sll_db", type=float, default=-15.0)
    gen.add_argument("--nbar", dest="n_bar", type=int, default=4)
    gen.add_argument("-o", "--output", help="file (default stdout)")
    gen.set_defaults(func=cmd_gen)

    dump = sub.add_parser("dump-circuit", help="print the QFT gate list")
    dump.add_argument("-L", "--qubits", type=int)
    dump.add_argument("-N", "--elements", dest="n_elements", type=int, default=16)
    dump.add_argument("-M", "--samples", dest="n_samples", type=int, default=1024)
    dump.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    dump.add_argument("--counts", action="store_true", help="print gate totals only")
    dump.set_defaults(func=cmd_dump)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except QftArrayError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
