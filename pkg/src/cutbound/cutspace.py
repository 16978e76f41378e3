"""Exact per-graph cut-space quantities by exhaustive enumeration.

Everything here is exponential in k and meant for oracle-scale graphs.
Vertex vectors m are enumerated in Gray-code order so that each step flips a
single vertex and the cut vector c = m M(G) changes only on the edges incident
to that vertex.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .ensemble import GuardExceeded, WeightedGraph

CUT_ENUMERATION_MAX_K = 24
DETAILED_ENUMERATION_MAX_K = 20


@dataclass(frozen=True)
class IncidenceMatrix:
    """k x n incidence matrix over F2; rows[i] has bit j set iff vertex i+1 is on edge j."""

    k: int
    n: int
    rows: tuple[int, ...]

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> tuple[int, ...]:
        return tuple((row >> j) & 1 for row in self.rows)

    def to_lists(self) -> list[list[int]]:
        return [[(row >> j) & 1 for j in range(self.n)] for row in self.rows]


def incidence_matrix(g: WeightedGraph) -> IncidenceMatrix:
    rows = [0] * g.k
    for j, (u, v, _) in enumerate(g.edges):
        rows[u - 1] |= 1 << j
        rows[v - 1] |= 1 << j
    return IncidenceMatrix(g.k, g.n, tuple(rows))


def f2_rank(m: IncidenceMatrix) -> int:
    # basis keyed by leading bit
    basis: dict[int, int] = {}
    for row in m.rows:
        while row:
            lead = row.bit_length() - 1
            if lead not in basis:
                basis[lead] = row
                break
            row ^= basis[lead]
    return len(basis)


@dataclass(frozen=True)
class CutSpectrum:
    """Cut weight distribution b[w] and detailed distribution a[(u, v, w)]."""

    k: int
    n: int
    b: dict[int, int]
    a: dict[tuple[int, int, int], int]

    @property
    def max_weight(self) -> int:
        keys = list(self.b) + [w for _, _, w in self.a]
        return max(keys, default=0)

    def detailed_weight_totals(self) -> dict[int, int]:
        """Per weight w, the sum of a[(u, v, w)] over all (u, v)."""
        out: Counter[int] = Counter()
        for (_, _, w), count in self.a.items():
            out[w] += count
        return dict(out)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "b": {str(w): c for w, c in sorted(self.b.items())},
            "a": {f"{u},{v},{w}": c for (u, v, w), c in sorted(self.a.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> CutSpectrum:
        b = {int(w): int(c) for w, c in data["b"].items()}
        a = {tuple(int(x) for x in key.split(",")): int(c) for key, c in data["a"].items()}
        return cls(int(data["k"]), int(data["n"]), b, a)


def _incident(g: WeightedGraph) -> list[list[tuple[int, int]]]:
    inc: list[list[tuple[int, int]]] = [[] for _ in range(g.k)]
    for j, (u, v, w) in enumerate(g.edges):
        inc[u - 1].append((1 << j, w))
        inc[v - 1].append((1 << j, w))
    return inc


def _gray_walk(g: WeightedGraph, free: range, start: int) -> Iterator[tuple[int, int, int]]:
    """Yield (m, c, weight) for every m agreeing with `start` off the `free` vertex bits.

    Vertices are 0-based bit positions; c is the edge bitmask of m M(G).
    """
    inc = _incident(g)
    m, c, weight = 0, 0, 0
    preset = [x for x in range(g.k) if start >> x & 1]
    free = list(free)
    # set up `start` first, then walk the Gray code over the free vertices
    flips = preset + [free[(t & -t).bit_length() - 1] for t in range(1, 1 << len(free))]
    if not preset:
        yield m, c, weight
    for step, x in enumerate(flips, start=1):
        m ^= 1 << x
        for bit, w in inc[x]:
            c ^= bit
            weight += w if c & bit else -w
        if step >= len(preset):
            yield m, c, weight


def cut_sets(g: WeightedGraph, max_k: int = CUT_ENUMERATION_MAX_K) -> dict[int, int]:
    """Map each distinct cut-set (edge bitmask) to its cut weight."""
    if g.k > max_k:
        raise GuardExceeded("bipartition enumeration vertex count", g.k, max_k)
    full = (1 << g.k) - 1
    found: dict[int, int] = {}
    # vertex 1 stays on side X; each bipartition is visited once
    for m, c, weight in _gray_walk(g, range(1, g.k), start=1):
        if m != full and c not in found:
            found[c] = weight
    return found


def cut_weight_distribution(g: WeightedGraph, max_k: int = CUT_ENUMERATION_MAX_K) -> dict[int, int]:
    """B_w(G): number of distinct cut-sets of weight w (the empty cut-set counts at w=0)."""
    return dict(sorted(Counter(cut_sets(g, max_k).values()).items()))


def detailed_cut_distribution(
    g: WeightedGraph, max_k: int = DETAILED_ENUMERATION_MAX_K
) -> dict[tuple[int, int, int], int]:
    """A_{u,v,w}(G) over all m outside {0^k, 1^k}."""
    if g.k > max_k:
        raise GuardExceeded("detailed enumeration vertex count", g.k, max_k)
    full = (1 << g.k) - 1
    cells: Counter[tuple[int, int, int]] = Counter()
    for m, c, weight in _gray_walk(g, range(g.k), start=0):
        if m and m != full:
            cells[m.bit_count(), c.bit_count(), weight] += 1
    return dict(sorted(cells.items()))


def cut_spectrum(g: WeightedGraph) -> CutSpectrum:
    return CutSpectrum(g.k, g.n, cut_weight_distribution(g), detailed_cut_distribution(g))


class CutCountCheck(NamedTuple):
    holds: bool
    witness: int | None  # first weight w where the inequality fails


def cut_count_check(g: WeightedGraph, spectrum: CutSpectrum | None = None) -> CutCountCheck:
    """Check B_w(G) <= 1/2 sum_{u,v} A_{u,v,w}(G) for every w, in integers."""
    spectrum = spectrum or cut_spectrum(g)
    doubled = spectrum.detailed_weight_totals()
    for w in sorted(set(spectrum.b) | set(doubled)):
        if 2 * spectrum.b.get(w, 0) > doubled.get(w, 0):
            return CutCountCheck(False, w)
    return CutCountCheck(True, None)
