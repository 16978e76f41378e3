"""cutbound command line: bound | simulate | exact | compare.

Exit status: 0 success, 1 usage or validation error, 2 enumeration guard
exceeded, 3 comparison found a bound above the empirical confidence band.
"""

from __future__ import annotations

import argparse
import datetime as dt
import logging
import sys
import time
from pathlib import Path

from . import __version__, records
from .bound import (
    default_delta_max,
    max_relative_disagreement,
    tail_lower_bound,
    tail_lower_bound_logdomain,
)
from .ensemble import DEFAULT_ENUMERATION_GUARD, EnsembleParams, GuardExceeded, WeightPmf
from .montecarlo import SimulationConfig, compare_curves, params_mismatch, run_simulation
from .oracle import exact_statistics

log = logging.getLogger("cutbound")

EXIT_USAGE = 1
EXIT_GUARD = 2
EXIT_VIOLATION = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _window(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like LO..HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty window {text!r}")
    return lo, hi


def _add_ensemble(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, required=True, help="number of vertices")
    p.add_argument("--n", type=int, required=True, help="number of edges")
    p.add_argument("--mu", required=True, help="weight pmf, e.g. 0.1,0.2,0.4,0.2,0.1")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cutbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="lower bound on Pr[lambda >= delta]")
    _add_ensemble(p)
    p.add_argument("--delta-max", type=int, help="default: twice the delta where the bound reaches 0")
    p.add_argument("--representation", choices=("exact", "log", "both"), default="exact")
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of Pr[lambda >= delta]")
    _add_ensemble(p)
    p.add_argument("--instances", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--delta-max", type=int, help="default: q*n + 1, i.e. until the estimate hits 0")
    p.add_argument("--workers", type=int, default=1)
    _add_output(p)

    p = sub.add_parser("exact", help="exact tail and spectra by enumerating the ensemble")
    _add_ensemble(p)
    p.add_argument("--delta-max", type=int, help="default: q*n + 1")
    p.add_argument("--guard", type=int, default=DEFAULT_ENUMERATION_GUARD, help="max configurations")
    _add_output(p)

    p = sub.add_parser("compare", help="gap table between a bound file and an empirical file")
    p.add_argument("bound_file", type=Path)
    p.add_argument("empirical_file", type=Path)
    p.add_argument("--window", type=_window, help="delta range LO..HI for the max-gap summary")
    _add_output(p)
    return parser


def _params(args) -> EnsembleParams:
    try:
        return EnsembleParams(args.k, args.n, WeightPmf.parse(args.mu))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, stem: str, manifest: dict, columns, rows, data: dict) -> list[Path]:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("csv", "both"):
        path = args.out_dir / f"{stem}.csv"
        records.write_csv(path, manifest, columns, rows)
        written.append(path)
    if args.format in ("json", "both"):
        path = args.out_dir / f"{stem}.json"
        records.write_json(path, data)
        written.append(path)
    return written


def _outputs(args, stem: str) -> list[str]:
    return [f"{stem}.{ext}" for ext in ("csv", "json") if args.format in (ext, "both")]


def cmd_bound(args) -> int:
    params = _params(args)
    if args.delta_max is not None and args.delta_max < 0:
        raise UsageError("--delta-max must be non-negative")
    delta_max = args.delta_max if args.delta_max is not None else default_delta_max(params)
    manifest = records.make_manifest(
        "bound", params, delta_max=delta_max, representation=args.representation,
        format=args.format, outputs=_outputs(args, "bound"),
    )
    exact = log_curve = disagreement = None
    if args.representation in ("exact", "both"):
        exact = tail_lower_bound(params, delta_max)
    if args.representation in ("log", "both"):
        log_curve = tail_lower_bound_logdomain(params, delta_max)
    if exact is not None and log_curve is not None:
        disagreement = max_relative_disagreement(exact, log_curve)
        print(f"max relative disagreement exact vs log: {disagreement:.3e}")
    curve = exact if exact is not None else log_curve
    data = records.bound_json(curve, manifest, log_curve if exact is not None else None, disagreement)
    _emit(args, "bound", manifest, records.BOUND_COLUMNS, records.bound_rows(curve), data)
    for d, r, c in zip(curve.deltas, curve.raw, curve.clamped):
        print(f"{d:4d}  raw={records.fmt_number(r):>20}  clamped={records.fmt_number(c)}")
    return 0


def cmd_simulate(args) -> int:
    params = _params(args)
    if args.instances < 1:
        raise UsageError("--instances must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    delta_max = args.delta_max if args.delta_max is not None else params.q * params.n + 1
    if delta_max < 1:
        raise UsageError("--delta-max must be >= 1")
    config = SimulationConfig(params, args.instances, args.seed, delta_max, args.workers)
    started = time.perf_counter()
    curve = run_simulation(config)
    elapsed = time.perf_counter() - started
    manifest = records.make_manifest(
        "simulate", params, delta_max=delta_max, instances=args.instances, seed=args.seed,
        format=args.format, outputs=_outputs(args, "empirical"),
    )
    _emit(args, "empirical", manifest, records.EMPIRICAL_COLUMNS, records.empirical_rows(curve),
          records.empirical_json(curve, manifest))
    # wall-clock facts live in a sidecar so the data files stay reproducible
    records.write_json(args.out_dir / "empirical.run.json", {
        "manifest": manifest,
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        "workers": args.workers,
        "elapsed_seconds": round(elapsed, 3),
        "code_version": __version__,
    })
    print(f"{args.instances} instances in {elapsed:.1f}s; lambda histogram {curve.histogram}")
    for d, p, lo, hi in zip(curve.deltas, curve.estimate, curve.ci_low, curve.ci_high):
        print(f"{d:4d}  p={p:.6f}  [{lo:.6f}, {hi:.6f}]")
    return 0


def cmd_exact(args) -> int:
    params = _params(args)
    delta_max = args.delta_max if args.delta_max is not None else params.q * params.n + 1
    if delta_max < 0:
        raise UsageError("--delta-max must be non-negative")
    stats = exact_statistics(params, guard=args.guard)
    manifest = records.make_manifest(
        "exact", params, delta_max=delta_max, format=args.format, outputs=_outputs(args, "exact"),
    )
    _emit(args, "exact", manifest, records.EXACT_COLUMNS, records.exact_rows(stats, delta_max),
          records.exact_json(stats, delta_max, manifest))
    for d in range(delta_max + 1):
        print(f"Pr[lambda >= {d}] = {stats.tail(d)}")
    for w, x in stats.expected_b.items():
        print(f"E[B_{w}] = {x}")
    return 0


def _load_bound(path: Path):
    if path.suffix == ".csv":
        manifest, rows = records.read_csv(path)
        if manifest.get("subcommand") != "bound":
            raise UsageError(f"{path} is not a bound file")
        return records.bound_from_csv(manifest, rows)
    data = records.read_json(path)
    if data.get("kind") != "bound":
        raise UsageError(f"{path} is not a bound file")
    return records.bound_from_json(data)


def _load_empirical(path: Path):
    if path.suffix == ".csv":
        manifest, rows = records.read_csv(path)
        kind = manifest.get("subcommand")
        if kind == "bound":
            return records.bound_as_empirical(records.bound_from_csv(manifest, rows))
        if kind != "simulate":
            raise UsageError(f"{path} is neither an empirical nor a bound file")
        return records.empirical_from_csv(manifest, rows)
    data = records.read_json(path)
    if data.get("kind") == "bound":
        return records.bound_as_empirical(records.bound_from_json(data))
    if data.get("kind") != "empirical":
        raise UsageError(f"{path} is neither an empirical nor a bound file")
    return records.empirical_from_json(data)


def cmd_compare(args) -> int:
    bound = _load_bound(args.bound_file)
    emp = _load_empirical(args.empirical_file)
    mismatch = params_mismatch(bound.params, emp.params)
    if mismatch:
        raise UsageError(f"manifest mismatch in {', '.join(mismatch)}")
    try:
        report = compare_curves(bound, emp, args.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    window = f"{args.window[0]}..{args.window[1]}" if args.window else None
    manifest = records.make_manifest(
        "compare", bound.params, inputs=[str(args.bound_file), str(args.empirical_file)],
        window=window, format=args.format, outputs=_outputs(args, "compare"),
    )
    _emit(args, "compare", manifest, records.COMPARE_COLUMNS, records.compare_rows(report),
          records.compare_json(report, manifest))
    for r in report.rows:
        flag = "  VIOLATION" if r.violation else ""
        print(f"{r.delta:4d}  bound={r.clamped_bound:.6f}  empirical={r.empirical:.6f}  gap={r.gap:+.6f}{flag}")
    print(f"max gap{f' over {window}' if window else ''}: {report.max_gap:.6f}")
    if report.violations:
        print(f"violations at delta {report.violations}", file=sys.stderr)
        return EXIT_VIOLATION
    return 0


COMMANDS = {"bound": cmd_bound, "simulate": cmd_simulate, "exact": cmd_exact, "compare": cmd_compare}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cutbound {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardExceeded as exc:
        print(f"cutbound {args.command}: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
