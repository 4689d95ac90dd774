"""Command-line interface.

Subcommands::

    reactlearn gen-ref MODEL --out ref.csv         # reference trajectory
    reactlearn fit REF --problem KIND --init ...   # learn models
    reactlearn eval MODEL REF                      # score a model
    reactlearn library                             # inspect the library

Exit codes: 0 success, 2 usage error, 3 model/data parse error, 4 runtime
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dsl import _format_side, format_system, parse_model_file
from .errors import (
    ContractViolationError,
    DescentAbortedError,
    ModelParseError,
)
from .grad import EstimatorConfig
from .loss import Objective
from .optimize import AdamState, run_descent, write_trace_csv
from .problems import (
    CoefficientSteps,
    DEFAULT_EXTRACTION_THRESHOLD,
    LibraryOfReactions,
    LibraryOfSystems,
    Problem,
    ReactionSteps,
)
from .reactions import SpeciesSet, State, enumerate_library
from .rng import RngStream
from .ssa import SnapshotGrid, read_timeseries_csv, simulate, write_timeseries_csv

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4

PROBLEM_KINDS = (
    "library-of-reactions",
    "coefficient-steps",
    "reaction-steps",
    "library-of-systems",
)


def _load_model(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelParseError(f"cannot read model file {path}: {exc}") from exc
    return parse_model_file(text)


def _build_problem(kind: str, species: SpeciesSet, total: int, threshold: float) -> Problem:
    if kind == "coefficient-steps":
        return CoefficientSteps(species)
    library = enumerate_library(species, total)
    if kind == "library-of-reactions":
        return LibraryOfReactions(library, threshold=threshold)
    if kind == "reaction-steps":
        return ReactionSteps(library)
    if kind == "library-of-systems":
        return LibraryOfSystems(library)
    raise ContractViolationError(f"unknown problem kind {kind!r}")


def cmd_gen_ref(args) -> int:
    system, init = _load_model(args.model)
    if init is None:
        raise ContractViolationError(
            f"model file {args.model} lacks an 'init:' line; gen-ref needs an initial state"
        )
    grid = SnapshotGrid.equidistant(args.t_end, args.grid)
    series = simulate(system, init, grid, RngStream(args.seed))
    write_timeseries_csv(args.out, series)
    print(f"wrote {len(grid)} snapshots to {args.out}")
    return 0


def cmd_eval(args) -> int:
    system, init = _load_model(args.model)
    if init is None:
        raise ContractViolationError(
            f"model file {args.model} lacks an 'init:' line; eval needs an initial state"
        )
    reference = read_timeseries_csv(args.reference)
    objective = Objective(reference, replications=args.reps)
    value = objective.evaluate(system, init, RngStream(args.seed), jobs=args.jobs)
    print(repr(value))
    return 0


def cmd_library(args) -> int:
    species = SpeciesSet(tuple(args.species))
    library = enumerate_library(species, args.total)
    n_s = species.n_species
    for i, row in enumerate(library.reactions):
        lhs = _format_side(species, row[:n_s])
        rhs = _format_side(species, row[n_s:])
        print(f"{i}: {lhs} -> {rhs}")
    return 0


def cmd_fit(args) -> int:
    reference = read_timeseries_csv(args.reference)
    species = SpeciesSet(reference.species_names)
    try:
        counts = [int(tok) for tok in args.init.replace(",", " ").split()]
    except ValueError:
        raise ContractViolationError(f"bad --init value {args.init!r}")
    if len(counts) != species.n_species:
        raise ContractViolationError(
            f"--init has {len(counts)} counts but the reference has {species.n_species} species"
        )
    init = State(np.array(counts, dtype=np.int64))
    total = int(init.counts.sum())

    problem = _build_problem(args.problem, species, total, args.threshold)
    samples = args.samples if args.samples is not None else problem.preset[0]
    sigma = args.sigma if args.sigma is not None else problem.preset[1]
    eta = args.lr if args.lr is not None else problem.preset[2]
    estimator = EstimatorConfig(samples=samples, sigma=sigma)
    objective = Objective(reference, replications=args.reps)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = RngStream(args.seed)
    summary_rows = []
    for run in range(args.repeats):
        stream = base.child(run)
        theta0 = problem.initialize(stream.child(0))
        status = "ok"
        try:
            trace = run_descent(
                problem,
                objective,
                init,
                estimator,
                AdamState.fresh(problem.dimension, eta),
                args.steps,
                theta0,
                stream.child(1),
                jobs=args.jobs,
            )
        except DescentAbortedError as exc:
            trace = exc.trace
            status = "aborted"
            print(f"run {run}: {exc}", file=sys.stderr)
        write_trace_csv(out_dir / f"run_{run:02d}_trace.csv", trace)
        if trace.records:
            final_loss = trace.final_loss
            model = problem.extract(
                trace.final_theta, objective=objective, init=init, rng=stream.child(2), jobs=args.jobs
            )
            (out_dir / f"run_{run:02d}_model.txt").write_text(format_system(model, init))
            n_extracted = model.n_reactions
        else:
            final_loss = float("nan")
            n_extracted = 0
        summary_rows.append((run, final_loss, n_extracted, status))
        print(f"run {run}: final loss {final_loss!r}, {n_extracted} reactions ({status})")

    with open(out_dir / "summary.csv", "w", newline="") as fh:
        fh.write("run,final_loss,extracted_reactions,status\n")
        for run, final_loss, n_extracted, status in summary_rows:
            fh.write(f"{run},{final_loss!r},{n_extracted},{status}\n")
    print(f"wrote {args.repeats} runs to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reactlearn",
        description="Learn stochastic reaction systems from time-series snapshots.",
    )
    parser.add_argument("--version", action="version", version=f"reactlearn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-ref", help="simulate a model and write reference snapshots")
    p.add_argument("model", help="model DSL file with an init: line")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=100, help="number of snapshot times")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_gen_ref)

    p = sub.add_parser("fit", help="learn models matching a reference time series")
    p.add_argument("reference", help="reference time-series CSV")
    p.add_argument("--problem", required=True, choices=PROBLEM_KINDS)
    p.add_argument("--init", required=True, help="initial species counts, e.g. '1980,20,0'")
    p.add_argument("--samples", type=int, default=None, help="gradient samples N (preset default)")
    p.add_argument("--sigma", type=float, default=None, help="smoothing factor (preset default)")
    p.add_argument("--lr", type=float, default=None, help="learning rate (preset default)")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--reps", type=int, default=20, help="simulation replications per evaluation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=10, help="independent optimization runs")
    p.add_argument("--threshold", type=float, default=DEFAULT_EXTRACTION_THRESHOLD)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="print the loss of a model against a reference")
    p.add_argument("model")
    p.add_argument("reference")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("library", help="print the candidate reaction library")
    p.add_argument("--species", nargs="+", default=["S", "I", "R"])
    p.add_argument("--total", type=int, default=2000)
    p.set_defaults(func=cmd_library)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ContractViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
