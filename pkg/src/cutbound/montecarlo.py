"""Monte Carlo estimate of Pr[lambda(G) >= delta] over the weighted ensemble.

Instance i draws from its own Philox stream keyed on (master_seed, i), so the
result does not depend on how instances are split across worker processes.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .bound import BoundCurve
from .ensemble import EnsembleParams, sample_graph
from .mincut import global_min_cut

CONFIDENCE = 0.95


@dataclass(frozen=True)
class SimulationConfig:
    params: EnsembleParams
    instances: int
    master_seed: int
    delta_max: int
    workers: int = 1

    def __post_init__(self):
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        if self.delta_max < 1:
            raise ValueError("delta_max must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def instance_stream(master_seed: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed % 2**64, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(seq))


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError(f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, centre - half)
    high = 1.0 if successes == trials else min(1.0, centre + half)
    return low, high


@dataclass(frozen=True)
class EmpiricalCurve:
    """Tail estimates p(d) = #{lambda >= d} / N for d = 0..delta_max, plus the lambda histogram."""

    params: EnsembleParams
    instances: int
    master_seed: int
    histogram: dict[int, int]
    delta_max: int
    confidence: float = CONFIDENCE
    successes: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "successes", tuple(self.successes_at(d) for d in range(self.delta_max + 1)))

    def successes_at(self, delta: int) -> int:
        """Number of instances with lambda >= delta, for any delta >= 0."""
        return sum(c for lam, c in self.histogram.items() if lam >= delta)

    def tail(self, delta: int) -> tuple[float, float]:
        """(estimate, CI upper end) at any delta >= 0."""
        hits = self.successes_at(delta)
        return hits / self.instances, wilson_interval(hits, self.instances, self.confidence)[1]

    @property
    def deltas(self) -> range:
        return range(self.delta_max + 1)

    @property
    def estimate(self) -> list[float]:
        return [s / self.instances for s in self.successes]

    def interval(self, delta: int) -> tuple[float, float]:
        return wilson_interval(self.successes[delta], self.instances, self.confidence)

    @property
    def ci_low(self) -> list[float]:
        return [self.interval(d)[0] for d in self.deltas]

    @property
    def ci_high(self) -> list[float]:
        return [self.interval(d)[1] for d in self.deltas]


def _lambdas(params: EnsembleParams, master_seed: int, start: int, stop: int) -> list[int]:
    return [
        global_min_cut(sample_graph(params, instance_stream(master_seed, i))).value
        for i in range(start, stop)
    ]


def sample_min_cuts(config: SimulationConfig) -> list[int]:
    """lambda(G_i) for i = 0..N-1, in instance order."""
    N = config.instances
    if config.workers == 1:
        return _lambdas(config.params, config.master_seed, 0, N)
    chunk = max(1, math.ceil(N / (4 * config.workers)))
    starts = list(range(0, N, chunk))
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        parts = pool.map(
            _lambdas,
            [config.params] * len(starts),
            [config.master_seed] * len(starts),
            starts,
            [min(s + chunk, N) for s in starts],
        )
        return [lam for part in parts for lam in part]


def run_simulation(config: SimulationConfig) -> EmpiricalCurve:
    """Estimate the tail curve over delta = 0..min(first delta with p = 0, config.delta_max)."""
    lambdas = sample_min_cuts(config)
    histogram = dict(sorted(Counter(lambdas).items()))
    delta_star = max(histogram) + 1
    return EmpiricalCurve(
        config.params,
        config.instances,
        config.master_seed,
        histogram,
        min(delta_star, config.delta_max),
    )


@dataclass(frozen=True)
class ComparisonRow:
    delta: int
    clamped_bound: float
    empirical: float
    ci_high: float
    gap: float
    violation: bool


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    window: tuple[int, int] | None

    @property
    def violations(self) -> list[int]:
        return [r.delta for r in self.rows if r.violation]

    @property
    def max_gap(self) -> float:
        rows = self.rows
        if self.window is not None:
            lo, hi = self.window
            rows = [r for r in rows if lo <= r.delta <= hi]
        return max((r.gap for r in rows), default=0.0)


def params_mismatch(a: EnsembleParams, b: EnsembleParams) -> list[str]:
    out = []
    for name in ("k", "n"):
        if getattr(a, name) != getattr(b, name):
            out.append(name)
    if a.pmf != b.pmf:
        out.append("mu")
    return out


def compare_curves(
    bound: BoundCurve, emp, window: tuple[int, int] | None = None
) -> ComparisonReport:
    """Per-delta gap p(d) - clamped bound(d); a violation is a bound above the CI upper end.

    `emp` needs `params` and `tail(delta) -> (estimate, ci_high)`; an
    EmpiricalCurve evaluates deltas beyond its stored range from the histogram.
    """
    mismatch = params_mismatch(bound.params, emp.params)
    if mismatch:
        raise ValueError(f"curves disagree on {', '.join(mismatch)}")
    clamped = bound.clamped_float()
    rows = []
    for d in bound.deltas:
        p, high = emp.tail(d)
        rows.append(ComparisonRow(d, clamped[d], p, high, p - clamped[d], clamped[d] > high))
    return ComparisonReport(tuple(rows), window)
