"""On-disk formats: CSV and JSON data files, each carrying the manifest that
produced it.

CSV files start with one ``# manifest: {...}`` comment line followed by a
mandatory header row; UTF-8, LF line endings, '.' decimal separator.
Column schemas are fixed:

    bound      delta,raw,clamped
    empirical  delta,empirical,ci_low,ci_high
    compare    delta,clamped_bound,empirical,gap,violation
    exact      delta,probability
"""

from __future__ import annotations

import csv
import io
import json
import math
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bound import BoundCurve
from .ensemble import EnsembleParams, WeightPmf
from .montecarlo import ComparisonReport, EmpiricalCurve
from .oracle import ExactStatistics

MANIFEST_PREFIX = "# manifest: "

BOUND_COLUMNS = ("delta", "raw", "clamped")
EMPIRICAL_COLUMNS = ("delta", "empirical", "ci_low", "ci_high")
COMPARE_COLUMNS = ("delta", "clamped_bound", "empirical", "gap", "violation")
EXACT_COLUMNS = ("delta", "probability")


def fmt_number(x) -> str:
    """15 significant digits; Fractions are rounded exactly, not via float."""
    if isinstance(x, Fraction):
        with localcontext() as ctx:
            ctx.prec = 15
            d = Decimal(x.numerator) / Decimal(x.denominator)
        f = float(d)
        return f"{f:.15g}" if math.isfinite(f) else str(d)
    return f"{float(x):.15g}"


def fmt_exact(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def make_manifest(subcommand: str, params: EnsembleParams | None = None, **fields) -> dict:
    manifest = {"tool": "cutbound", "version": __version__, "subcommand": subcommand}
    if params is not None:
        manifest.update(k=params.k, n=params.n, mu=str(params.pmf))
    manifest.update({key: value for key, value in fields.items() if value is not None})
    return manifest


def params_from_manifest(manifest: dict) -> EnsembleParams:
    return EnsembleParams(int(manifest["k"]), int(manifest["n"]), WeightPmf.parse(manifest["mu"]))


def manifest_argv(manifest: dict) -> list[str]:
    """Command-line arguments that reproduce the run described by a manifest."""
    argv = [manifest["subcommand"]]
    if manifest["subcommand"] == "compare":
        argv += manifest["inputs"]
    for key in ("k", "n", "mu", "delta_max", "instances", "seed", "representation", "format", "window"):
        if key in manifest:
            argv += [f"--{key.replace('_', '-')}", str(manifest[key])]
    return argv


def _dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_csv(path: Path, manifest: dict, columns, rows) -> None:
    buf = io.StringIO()
    buf.write(MANIFEST_PREFIX + json.dumps(manifest, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def write_json(path: Path, data: dict) -> None:
    Path(path).write_text(_dump_json(data), encoding="utf-8", newline="")


def read_csv(path: Path) -> tuple[dict, list[dict]]:
    text = Path(path).read_text(encoding="utf-8")
    first, _, rest = text.partition("\n")
    if not first.startswith(MANIFEST_PREFIX):
        raise ValueError(f"{path}: missing manifest line")
    return json.loads(first[len(MANIFEST_PREFIX):]), list(csv.DictReader(io.StringIO(rest)))


def read_json(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# bound curves


def bound_rows(curve: BoundCurve) -> list[list[str]]:
    return [[str(d), fmt_number(r), fmt_number(c)] for d, r, c in zip(curve.deltas, curve.raw, curve.clamped)]


def bound_json(curve: BoundCurve, manifest: dict, log_curve: BoundCurve | None = None,
               disagreement: float | None = None) -> dict:
    rows = []
    for d, r, c in zip(curve.deltas, curve.raw, curve.clamped):
        row = {"delta": d, "raw": fmt_number(r), "clamped": fmt_number(c)}
        if isinstance(r, Fraction):
            row["raw_exact"] = fmt_exact(r)
        if log_curve is not None:
            row["raw_log"] = fmt_number(log_curve.raw[d])
        rows.append(row)
    data = {"manifest": manifest, "kind": "bound", "representation": curve.representation, "rows": rows}
    if disagreement is not None:
        data["max_relative_disagreement"] = fmt_number(disagreement)
    return data


def bound_from_json(data: dict) -> BoundCurve:
    params = params_from_manifest(data["manifest"])
    rows = sorted(data["rows"], key=lambda r: r["delta"])
    if all("raw_exact" in r for r in rows):
        return BoundCurve(params, tuple(Fraction(r["raw_exact"]) for r in rows), "exact")
    return BoundCurve(params, tuple(float(r["raw"]) for r in rows), "log")


def bound_from_csv(manifest: dict, rows: list[dict]) -> BoundCurve:
    rows = sorted(rows, key=lambda r: int(r["delta"]))
    return BoundCurve(params_from_manifest(manifest), tuple(float(r["raw"]) for r in rows), "log")


# empirical curves


def empirical_rows(curve: EmpiricalCurve) -> list[list[str]]:
    return [
        [str(d), fmt_number(p), fmt_number(lo), fmt_number(hi)]
        for d, p, lo, hi in zip(curve.deltas, curve.estimate, curve.ci_low, curve.ci_high)
    ]


def empirical_json(curve: EmpiricalCurve, manifest: dict) -> dict:
    rows = [
        {"delta": d, "successes": s, "empirical": fmt_number(p), "ci_low": fmt_number(lo), "ci_high": fmt_number(hi)}
        for d, s, p, lo, hi in zip(curve.deltas, curve.successes, curve.estimate, curve.ci_low, curve.ci_high)
    ]
    return {
        "manifest": manifest,
        "kind": "empirical",
        "instances": curve.instances,
        "master_seed": curve.master_seed,
        "confidence": curve.confidence,
        "delta_max": curve.delta_max,
        "lambda_histogram": {str(lam): c for lam, c in curve.histogram.items()},
        "rows": rows,
    }


def empirical_from_json(data: dict) -> EmpiricalCurve:
    return EmpiricalCurve(
        params_from_manifest(data["manifest"]),
        int(data["instances"]),
        int(data["master_seed"]),
        {int(lam): int(c) for lam, c in data["lambda_histogram"].items()},
        int(data["delta_max"]),
        float(data["confidence"]),
    )


class TableCurve:
    """Tail values read from a table: (estimate, ci_high) per delta.

    Used for empirical CSV files (no histogram) and for treating a bound file
    as a degenerate empirical curve whose interval collapses to the point.
    """

    def __init__(self, params: EnsembleParams, values: dict[int, tuple[float, float]]):
        self.params = params
        self.values = values

    def tail(self, delta: int) -> tuple[float, float]:
        if delta in self.values:
            return self.values[delta]
        last = max(self.values)
        if delta > last and self.values[last][0] == 0:
            return self.values[last]
        raise ValueError(f"delta {delta} is outside the tabulated range")


def empirical_from_csv(manifest: dict, rows: list[dict]) -> TableCurve:
    values = {int(r["delta"]): (float(r["empirical"]), float(r["ci_high"])) for r in rows}
    return TableCurve(params_from_manifest(manifest), values)


def bound_as_empirical(curve: BoundCurve) -> TableCurve:
    values = {d: (c, c) for d, c in zip(curve.deltas, curve.clamped_float())}
    return TableCurve(curve.params, values)


# comparison reports


def compare_rows(report: ComparisonReport) -> list[list[str]]:
    return [
        [str(r.delta), fmt_number(r.clamped_bound), fmt_number(r.empirical), fmt_number(r.gap), str(int(r.violation))]
        for r in report.rows
    ]


def compare_json(report: ComparisonReport, manifest: dict) -> dict:
    return {
        "manifest": manifest,
        "kind": "compare",
        "window": list(report.window) if report.window else None,
        "max_gap": fmt_number(report.max_gap),
        "violations": report.violations,
        "rows": [
            {
                "delta": r.delta,
                "clamped_bound": fmt_number(r.clamped_bound),
                "empirical": fmt_number(r.empirical),
                "ci_high": fmt_number(r.ci_high),
                "gap": fmt_number(r.gap),
                "violation": r.violation,
            }
            for r in report.rows
        ],
    }


# exact enumeration


def exact_json(stats: ExactStatistics, delta_max: int, manifest: dict) -> dict:
    def entry(x: Fraction) -> dict:
        return {"value": fmt_number(x), "exact": fmt_exact(x)}

    return {
        "manifest": manifest,
        "kind": "exact",
        "tail": {str(d): entry(stats.tail(d)) for d in range(delta_max + 1)},
        "expected_b": {str(w): entry(x) for w, x in stats.expected_b.items()},
        "expected_a": {f"{u},{v},{w}": entry(x) for (u, v, w), x in stats.expected_a.items()},
    }


def exact_rows(stats: ExactStatistics, delta_max: int) -> list[list[str]]:
    return [[str(d), fmt_number(stats.tail(d))] for d in range(delta_max + 1)]
