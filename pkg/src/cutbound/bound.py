"""Ensemble averages of cut weight distributions and the lower bound on
Pr[lambda(G) >= delta].

With N = C(k,2), a = u(k-u) and f(x) = sum_i mu(i) x^i:

    E[A_{u,v,w}] = C(k,u) C(a,v) C(N-a, n-v) [x^w] f(x)^v / C(N,n)
    E[B_w]      <= 1/2 sum_{u=1}^{k-1} sum_v E[A_{u,v,w}]
    Pr[lambda >= delta] >= 1 - sum_{w<delta} (1/2 sum_{u,v} E[A_{u,v,w}])

Since f has no constant term, [x^w] f^v vanishes once v * min_support > w,
so every v-sum below stops at min(n, a, w // min_support).

Two evaluation paths are provided: exact rationals (reference) and a float
log-domain path for quick scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .ensemble import EnsembleParams, WeightPmf

LOG_HALF = math.log(0.5)


@dataclass(frozen=True)
class TruncatedPolynomial:
    """Polynomial with exact coefficients for degrees 0..max_degree."""

    coeffs: tuple[Fraction, ...]

    @property
    def max_degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, degree: int) -> Fraction:
        if 0 <= degree <= self.max_degree:
            return self.coeffs[degree]
        return Fraction(0)

    def low_degree(self) -> int | None:
        """Smallest degree with a nonzero coefficient, None for the zero polynomial."""
        return next((i for i, c in enumerate(self.coeffs) if c), None)

    def mul(self, other: TruncatedPolynomial, max_degree: int) -> TruncatedPolynomial:
        out = [Fraction(0)] * (max_degree + 1)
        for i, a in enumerate(self.coeffs[: max_degree + 1]):
            if not a:
                continue
            for j, b in enumerate(other.coeffs[: max_degree + 1 - i]):
                if b:
                    out[i + j] += a * b
        return TruncatedPolynomial(tuple(out))


def weight_poly(pmf: WeightPmf, max_degree: int) -> TruncatedPolynomial:
    """f(x) = sum_i mu(i) x^i truncated at max_degree."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    return TruncatedPolynomial(tuple(pmf(i) if i else Fraction(0) for i in range(max_degree + 1)))


def power_coeff(f: TruncatedPolynomial, v: int, w: int) -> Fraction:
    """[x^w] f(x)^v, by repeated multiplication truncated at degree w."""
    if v < 0 or w < 0:
        raise ValueError("v and w must be non-negative")
    if w > f.max_degree:
        raise ValueError(f"degree {w} exceeds the polynomial's max_degree {f.max_degree}")
    if v == 0:
        return Fraction(int(w == 0))
    low = f.low_degree()
    if low is None or v * low > w:
        return Fraction(0)
    acc = TruncatedPolynomial((Fraction(1),))
    for _ in range(v):
        acc = acc.mul(f, w)
    return acc[w]


def _binom(n: int, r: int) -> int:
    return math.comb(n, r) if 0 <= r <= n else 0


def expected_A(params: EnsembleParams, u: int, v: int, w: int) -> Fraction:
    """Ensemble average of the detailed cut weight distribution A_{u,v,w}."""
    k, n = params.k, params.n
    if not 1 <= u <= k - 1:
        raise ValueError(f"u must lie in [1,{k - 1}]")
    if not 0 <= v <= n:
        raise ValueError(f"v must lie in [0,{n}]")
    if w < 0:
        raise ValueError("w must be non-negative")
    N = params.num_pairs
    a = u * (k - u)
    count = math.comb(k, u) * _binom(a, v) * _binom(N - a, n - v)
    if not count:
        return Fraction(0)
    coeff = power_coeff(weight_poly(params.pmf, w), v, w)
    return count * coeff / math.comb(N, n)


def _v_limit(params: EnsembleParams, u: int, w: int) -> int:
    return min(params.n, u * (params.k - u), w // params.pmf.min_support)


def expected_Bw_upper(params: EnsembleParams, w: int) -> Fraction:
    """Upper bound on E[B_w]: half the summed E[A_{u,v,w}] over u in [1,k-1] and v."""
    if w < 0:
        raise ValueError("w must be non-negative")
    total = Fraction(0)
    for u in range(1, params.k):
        for v in range(_v_limit(params, u, w) + 1):
            total += expected_A(params, u, v, w)
    return total / 2


class _ExactTerms:
    """Yields the upper bound on E[B_w] for w = 0, 1, 2, ... in exact arithmetic.

    With D the common denominator of mu and g = D f (integer coefficients),
    D^w * [x^w] f^v = D^(w-v) * [x^w] g^v, so each w reduces to one integer
    sum over (u, v) divided by 2 C(N,n) D^w.
    """

    def __init__(self, params: EnsembleParams):
        self.params = params
        pmf = params.pmf
        self.denom = math.lcm(*(p.denominator for p in pmf.probs))
        self.g = [0] + [int(p * self.denom) for p in pmf.probs]
        self.gpow: list[list[int]] = [[1]]  # gpow[v][w] = [x^w] g^v for w computed so far
        k, N, n = params.k, params.num_pairs, params.n
        self.norm = 2 * math.comb(N, n)
        self.us = []
        for u in range(1, k):
            a = u * (k - u)
            self.us.append((u, a, math.comb(k, u), [_binom(a, 0)], [_binom(N - a, n)]))

    def _extend_powers(self, w: int) -> None:
        # column w of [x^w] g^v for every v <= w
        gp = self.gpow
        while len(gp) <= w:
            gp.append([0] * len(gp[-1]))
        for row in gp:
            row.extend([0] * (w + 1 - len(row)))
        for v in range(1, w + 1):
            prev = gp[v - 1]
            gp[v][w] = sum(self.g[i] * prev[w - i] for i in range(1, min(len(self.g) - 1, w) + 1))

    def _binoms(self, entry, v: int) -> tuple[int, int]:
        _, a, _, lower, upper = entry
        N, n = self.params.num_pairs, self.params.n
        while len(lower) <= v:
            j = len(lower)
            lower.append(_binom(a, j))
            upper.append(_binom(N - a, n - j))
        return lower[v], upper[v]

    def __iter__(self) -> Iterator[Fraction]:
        w = 0
        while True:
            self._extend_powers(w)
            total = 0
            for entry in self.us:
                u, _, cku, _, _ = entry
                inner = 0
                for v in range(_v_limit(self.params, u, w) + 1):
                    coeff = self.gpow[v][w] if v < len(self.gpow) else 0
                    if not coeff:
                        continue
                    lo, hi = self._binoms(entry, v)
                    inner += lo * hi * coeff * self.denom ** (w - v)
                total += cku * inner
            yield Fraction(total, self.norm * self.denom**w)
            w += 1


def _log_comb_ratio_terms(a: int, N: int, n: int) -> list[float]:
    # log(1 - a/(N-i)) for i < n; -inf once the factor reaches zero
    out = []
    for i in range(n):
        x = a / (N - i)
        out.append(math.log1p(-x) if x < 1 else -math.inf)
    return out


def _log_binom_small(n: int, r: int) -> float:
    if r < 0 or r > n:
        return -math.inf
    return math.fsum(math.log((n - j) / (j + 1)) for j in range(r))


class _LogTerms:
    """Float log-domain counterpart of _ExactTerms: yields log of the E[B_w] bound.

    C(N-a, n-v)/C(N,n) is split as [C(N-a, n-v)/C(N, n-v)] * [C(N, n-v)/C(N, n)]
    = prod_{i<n-v} (1 - a/(N-i)) * prod_{j<v} (n-j)/(N-n+1+j), each summed in
    the log domain with fsum; small binomials likewise.
    """

    def __init__(self, params: EnsembleParams):
        self.params = params
        k, N, n = params.k, params.num_pairs, params.n
        self.mu = np.array([0.0] + [float(p) for p in params.pmf.probs])
        self.pows: list[list[float]] = [[1.0]]
        self.us = []
        for u in range(1, k):
            a = u * (k - u)
            self.us.append((u, a, _log_binom_small(k, u), _log_comb_ratio_terms(a, N, n), {}))

    def _extend_powers(self, w: int) -> None:
        pw = self.pows
        while len(pw) <= w:
            pw.append([0.0] * len(pw[-1]))
        for row in pw:
            row.extend([0.0] * (w + 1 - len(row)))
        q = len(self.mu) - 1
        for v in range(1, w + 1):
            prev = pw[v - 1]
            pw[v][w] = math.fsum(self.mu[i] * prev[w - i] for i in range(1, min(q, w) + 1))

    def _log_count(self, entry, v: int) -> float:
        _, a, log_cku, ratio_terms, cache = entry
        if v not in cache:
            N, n = self.params.num_pairs, self.params.n
            tail = math.fsum(ratio_terms[: n - v]) if -math.inf not in ratio_terms[: n - v] else -math.inf
            head = math.fsum(math.log((n - j) / (N - n + 1 + j)) for j in range(v))
            cache[v] = log_cku + _log_binom_small(a, v) + tail + head
        return cache[v]

    def __iter__(self) -> Iterator[float]:
        w = 0
        while True:
            self._extend_powers(w)
            logs = []
            for entry in self.us:
                u = entry[0]
                for v in range(_v_limit(self.params, u, w) + 1):
                    coeff = self.pows[v][w]
                    if coeff <= 0:
                        continue
                    lc = self._log_count(entry, v)
                    if lc > -math.inf:
                        logs.append(lc + math.log(coeff))
            yield _logsumexp(logs) + LOG_HALF
            w += 1


def _logsumexp(logs: Sequence[float]) -> float:
    if not logs:
        return -math.inf
    top = max(logs)
    return top + math.log(math.fsum(math.exp(x - top) for x in logs))


@dataclass(frozen=True)
class BoundCurve:
    """raw[d] = 1 - sum_{w<d} E[B_w] bound, for d = 0..delta_max.

    raw entries are Fractions for the exact representation and floats for the
    log-domain one; clamped = max(0, raw).
    """

    params: EnsembleParams
    raw: tuple
    representation: str  # "exact" or "log"

    @property
    def delta_max(self) -> int:
        return len(self.raw) - 1

    @property
    def deltas(self) -> range:
        return range(len(self.raw))

    @property
    def clamped(self) -> tuple:
        zero = Fraction(0) if self.representation == "exact" else 0.0
        return tuple(max(zero, r) for r in self.raw)

    def raw_float(self) -> list[float]:
        return [float(r) for r in self.raw]

    def clamped_float(self) -> list[float]:
        return [float(c) for c in self.clamped]

    def first_nonpositive(self) -> int | None:
        return next((d for d, r in enumerate(self.raw) if r <= 0), None)


def tail_lower_bound(params: EnsembleParams, delta_max: int) -> BoundCurve:
    """Exact lower bound on Pr[lambda(G) >= delta] for delta = 0..delta_max."""
    if delta_max < 0:
        raise ValueError("delta_max must be non-negative")
    raw = [Fraction(1)]
    acc = Fraction(0)
    terms = iter(_ExactTerms(params))
    for _ in range(delta_max):
        acc += next(terms)
        raw.append(1 - acc)
    return BoundCurve(params, tuple(raw), "exact")


def tail_lower_bound_logdomain(params: EnsembleParams, delta_max: int) -> BoundCurve:
    """Float version of tail_lower_bound; the accumulated sum is kept as a log
    and subtracted from 1 once per delta."""
    if delta_max < 0:
        raise ValueError("delta_max must be non-negative")
    raw = [1.0]
    log_acc = -math.inf
    terms = iter(_LogTerms(params))
    for _ in range(delta_max):
        log_acc = np.logaddexp(log_acc, next(terms))
        raw.append(_one_minus_exp(float(log_acc)))
    return BoundCurve(params, tuple(raw), "log")


def _one_minus_exp(log_x: float) -> float:
    if log_x > 709.0:
        return -math.inf
    return -math.expm1(log_x)


def max_relative_disagreement(exact: BoundCurve, approx: BoundCurve, floor: float = 1e-12) -> float:
    """Largest |approx - exact| / |exact| over deltas where |exact| > floor."""
    worst = 0.0
    for e, x in zip(exact.raw, approx.raw):
        e = Fraction(e)
        if abs(e) <= floor:
            continue
        diff = abs(Fraction(x) - e) / abs(e) if math.isfinite(x) else math.inf
        worst = max(worst, float(diff))
    return worst


def default_delta_max(params: EnsembleParams) -> int:
    """Twice the first delta where the bound reaches zero (capped at q*n + 1)."""
    cap = params.q * params.n + 1
    log_acc = -math.inf
    for delta, term in enumerate(_LogTerms(params), start=1):
        log_acc = np.logaddexp(log_acc, term)
        if _one_minus_exp(float(log_acc)) <= 0 or delta >= cap:
            return min(2 * delta, cap)
    raise AssertionError("unreachable")
