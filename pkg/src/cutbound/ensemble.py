"""Weighted Erdos-Renyi ensemble: labeled simple graphs on k vertices with n
labeled edges, each edge carrying an i.i.d. integer weight drawn from a pmf
over [1, q].

Vertices are labeled 1..k throughout the package.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

DEFAULT_ENUMERATION_GUARD = 10**7


class GuardExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured size limit."""

    def __init__(self, what: str, size: int, guard: int):
        self.what = what
        self.size = size
        self.guard = guard
        digits = str(size)
        shown = digits if len(digits) <= 15 else f"{digits[0]}.{digits[1:4]}e+{len(digits) - 1}"
        super().__init__(f"{what}: {shown} exceeds guard {guard}")


@dataclass(frozen=True)
class WeightPmf:
    """Exact probability mass function over weights 1..q; probs[i] = mu(i+1)."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValueError("pmf needs at least one weight")
        if any(p < 0 for p in probs):
            raise ValueError("pmf has a negative entry")
        total = sum(probs, Fraction(0))
        if total != 1:
            raise ValueError(f"pmf sums to {_fmt_fraction(total)}")

    @classmethod
    def parse(cls, text: str) -> WeightPmf:
        """Parse '0.1,0.2,0.4,0.2,0.1' or '1/10,1/5,...' exactly."""
        items = [s.strip() for s in text.split(",")]
        if not items or any(not s for s in items):
            raise ValueError(f"malformed pmf {text!r}")
        try:
            probs = tuple(Fraction(s) for s in items)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed pmf {text!r}: {exc}") from None
        return cls(probs)

    @property
    def q(self) -> int:
        return len(self.probs)

    def __call__(self, w: int) -> Fraction:
        if 1 <= w <= self.q:
            return self.probs[w - 1]
        return Fraction(0)

    @property
    def support(self) -> list[int]:
        return [i + 1 for i, p in enumerate(self.probs) if p > 0]

    @property
    def min_support(self) -> int:
        return self.support[0]

    def __str__(self) -> str:
        return ",".join(_fmt_fraction(p) for p in self.probs)


def _fmt_fraction(x: Fraction) -> str:
    """Shortest exact text for x: terminating decimals as decimals, else p/q."""
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = x * 10**digits
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


@dataclass(frozen=True)
class EnsembleParams:
    k: int
    n: int
    pmf: WeightPmf

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not 1 <= self.n <= self.num_pairs:
            raise ValueError(f"n must lie in [1, {self.num_pairs}] for k={self.k}, got {self.n}")

    @property
    def q(self) -> int:
        return self.pmf.q

    @property
    def num_pairs(self) -> int:
        return self.k * (self.k - 1) // 2


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph; edge i is edges[i] = (u, v, w), 1-based vertices."""

    k: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        edges = tuple((int(u), int(v), int(w)) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for u, v, w in edges:
            if not (1 <= u <= self.k and 1 <= v <= self.k):
                raise ValueError(f"edge ({u},{v}) has a vertex outside [1,{self.k}]")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if w < 1:
                raise ValueError(f"edge ({u},{v}) has non-positive weight {w}")
            pair = (min(u, v), max(u, v))
            if pair in seen:
                raise ValueError(f"multi-edge between {pair[0]} and {pair[1]}")
            seen.add(pair)

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> list[int]:
        return [w for _, _, w in self.edges]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((min(u, v), max(u, v)) for u, v, _ in self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric k x k int64 weight matrix (0-based indices)."""
        adj = np.zeros((self.k, self.k), dtype=np.int64)
        for u, v, w in self.edges:
            adj[u - 1, v - 1] = w
            adj[v - 1, u - 1] = w
        return adj

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest vertex."""
        parent = list(range(self.k + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        groups: dict[int, list[int]] = {}
        for x in range(1, self.k + 1):
            groups.setdefault(find(x), []).append(x)
        return [groups[r] for r in sorted(groups)]

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def check_member(self, params: EnsembleParams) -> None:
        """Raise ValueError unless this graph belongs to the ensemble of params."""
        if self.k != params.k or self.n != params.n:
            raise ValueError(
                f"graph has k={self.k}, n={self.n}; ensemble expects k={params.k}, n={params.n}"
            )
        for _, _, w in self.edges:
            if w > params.q:
                raise ValueError(f"weight {w} outside [1,{params.q}]")


@lru_cache(maxsize=64)
def vertex_pairs(k: int) -> tuple[tuple[int, int], ...]:
    """All unordered pairs (u, v), u < v, in lexicographic order."""
    return tuple(itertools.combinations(range(1, k + 1), 2))


def ensemble_cardinality(params: EnsembleParams) -> int:
    return math.factorial(params.n) * math.comb(params.num_pairs, params.n) * params.q**params.n


def graph_probability(params: EnsembleParams, g: WeightedGraph) -> Fraction:
    g.check_member(params)
    p = Fraction(1, math.factorial(params.n) * math.comb(params.num_pairs, params.n))
    for w in g.weights:
        p *= params.pmf(w)
    return p


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    if bound < 2**62:
        return int(rng.integers(0, bound))
    # arbitrary-size bound: rejection sampling on raw bytes
    nbits = bound.bit_length()
    nbytes = (nbits + 7) // 8
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - nbits)
        if r < bound:
            return r


class _WeightSampler:
    """Exact inverse-CDF sampling from a rational pmf via integer thresholds."""

    def __init__(self, pmf: WeightPmf):
        self.denom = math.lcm(*(p.denominator for p in pmf.probs))
        cum = 0
        self.thresholds = []
        for p in pmf.probs:
            cum += p.numerator * (self.denom // p.denominator)
            self.thresholds.append(cum)

    def draw(self, rng: np.random.Generator, size: int) -> list[int]:
        if self.denom < 2**62:
            draws = rng.integers(0, self.denom, size=size).tolist()
        else:
            draws = [_randbelow(rng, self.denom) for _ in range(size)]
        return [bisect_right(self.thresholds, r) + 1 for r in draws]


def sample_graph(params: EnsembleParams, rng: np.random.Generator) -> WeightedGraph:
    """Draw one labeled graph from the ensemble.

    The edge sequence comes from a partial Fisher-Yates shuffle of the pair
    indices, so the ordered n-tuple of distinct pairs is uniform; weights are
    then drawn i.i.d. from the pmf.
    """
    pairs = vertex_pairs(params.k)
    size = len(pairs)
    # j_i uniform on [i, size) for each step i of the shuffle
    picks = rng.integers(np.arange(params.n), size).tolist()
    swapped: dict[int, int] = {}
    chosen = []
    for i, j in enumerate(picks):
        chosen.append(swapped.get(j, j))
        swapped[j] = swapped.get(i, i)
    weights = _WeightSampler(params.pmf).draw(rng, params.n)
    return WeightedGraph(params.k, tuple((*pairs[idx], w) for idx, w in zip(chosen, weights)))


def enumeration_size(params: EnsembleParams) -> int:
    return math.comb(params.num_pairs, params.n) * params.q**params.n


def enumerate_ensemble(
    params: EnsembleParams, guard: int = DEFAULT_ENUMERATION_GUARD
) -> Iterator[tuple[WeightedGraph, Fraction]]:
    """Yield (graph, probability) over unlabeled edge sets x weight assignments.

    Each item stands for all n! edge labelings of the same weighted edge set,
    so its probability is prod(mu(w_i)) / C(C(k,2), n). Only valid for
    statistics that do not depend on edge labels. Weight assignments with
    zero probability are skipped.
    """
    size = enumeration_size(params)
    if size > guard:
        raise GuardExceeded("ensemble configurations", size, guard)
    base = Fraction(1, math.comb(params.num_pairs, params.n))
    assignments = []
    for ws in itertools.product(params.pmf.support, repeat=params.n):
        p = base
        for w in ws:
            p *= params.pmf(w)
        assignments.append((ws, p))
    for edge_set in itertools.combinations(vertex_pairs(params.k), params.n):
        for ws, p in assignments:
            yield WeightedGraph(params.k, tuple((u, v, w) for (u, v), w in zip(edge_set, ws))), p


def make_graph(k: int, edges: Sequence[Sequence[int]]) -> WeightedGraph:
    """Convenience constructor; 2-tuples get unit weight."""
    return WeightedGraph(k, tuple((e[0], e[1], e[2] if len(e) > 2 else 1) for e in edges))
