"""Exact ensemble averages by full enumeration of the ensemble.

These are the reference values the closed-form bound is checked against:
Pr[lambda >= delta], E[B_w] and E[A_{u,v,w}] as exact rationals.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .cutspace import cut_weight_distribution, detailed_cut_distribution
from .ensemble import DEFAULT_ENUMERATION_GUARD, EnsembleParams, enumerate_ensemble
from .mincut import min_cut_by_enumeration


@dataclass(frozen=True)
class ExactStatistics:
    params: EnsembleParams
    lambda_pmf: dict[int, Fraction]  # Pr[lambda(G) = x]
    expected_b: dict[int, Fraction]
    expected_a: dict[tuple[int, int, int], Fraction]

    def tail(self, delta: int) -> Fraction:
        """Pr[lambda(G) >= delta]."""
        return sum((p for lam, p in self.lambda_pmf.items() if lam >= delta), Fraction(0))


def exact_statistics(
    params: EnsembleParams,
    guard: int = DEFAULT_ENUMERATION_GUARD,
    *,
    lambdas: bool = True,
    cut_weights: bool = True,
    detailed: bool = True,
) -> ExactStatistics:
    """Average lambda, B_w and A_{u,v,w} over every ensemble member.

    Each flag switches one of the three accumulations off; the matching
    field of the result is then empty.

    Probabilities share the denominator C(C(k,2), n) * D^n (D = lcm of the pmf
    denominators), so accumulation is done on integer numerators.
    """
    denom = math.comb(params.num_pairs, params.n) * math.lcm(*(p.denominator for p in params.pmf.probs)) ** params.n
    lam_acc: Counter[int] = Counter()
    b_acc: Counter[int] = Counter()
    a_acc: Counter[tuple[int, int, int]] = Counter()
    for g, prob in enumerate_ensemble(params, guard):
        weight = prob * denom
        assert weight.denominator == 1
        weight = weight.numerator
        if lambdas:
            lam_acc[min_cut_by_enumeration(g).value] += weight
        if cut_weights:
            for w, count in cut_weight_distribution(g).items():
                b_acc[w] += weight * count
        if detailed:
            for cell, count in detailed_cut_distribution(g).items():
                a_acc[cell] += weight * count

    def scale(acc):
        return {key: Fraction(v, denom) for key, v in sorted(acc.items())}

    return ExactStatistics(params, scale(lam_acc), scale(b_acc), scale(a_acc))
