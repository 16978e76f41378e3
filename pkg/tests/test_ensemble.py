import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutbound.cutspace import cut_weight_distribution
from cutbound.ensemble import (
    EnsembleParams,
    GuardExceeded,
    WeightedGraph,
    WeightPmf,
    ensemble_cardinality,
    enumerate_ensemble,
    graph_probability,
    make_graph,
    sample_graph,
    vertex_pairs,
)
from cutbound.mincut import global_min_cut

from graphs import params


def labeled_graphs(p: EnsembleParams):
    """Every member of the labeled ensemble: ordered sequences of distinct pairs x weights."""
    for seq in itertools.permutations(vertex_pairs(p.k), p.n):
        for ws in itertools.product(range(1, p.q + 1), repeat=p.n):
            yield WeightedGraph(p.k, tuple((u, v, w) for (u, v), w in zip(seq, ws)))


class TestWeightPmf:
    def test_parse_decimal_is_exact(self):
        pmf = WeightPmf.parse("0.1,0.2,0.4,0.2,0.1")
        assert pmf.probs == (Fraction(1, 10), Fraction(1, 5), Fraction(2, 5), Fraction(1, 5), Fraction(1, 10))
        assert pmf.q == 5

    def test_parse_rationals(self):
        assert WeightPmf.parse("1/10,1/5,2/5,1/5,1/10") == WeightPmf.parse("0.1,0.2,0.4,0.2,0.1")

    def test_bad_sum_names_the_sum(self):
        with pytest.raises(ValueError, match="pmf sums to 1.1"):
            WeightPmf.parse("0.5,0.6")

    @pytest.mark.parametrize("text", ["", "0.5,", "a,b", "1/0"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            WeightPmf.parse(text)

    def test_negative(self):
        with pytest.raises(ValueError, match="negative"):
            WeightPmf.parse("1.5,-0.5")

    def test_str_round_trips(self):
        for text in ["0.1,0.2,0.4,0.2,0.1", "1/3,2/3", "1", "0,1"]:
            pmf = WeightPmf.parse(text)
            assert WeightPmf.parse(str(pmf)) == pmf
        assert str(WeightPmf.parse("1/10,9/10")) == "0.1,0.9"


class TestParamsAndGraph:
    def test_k_below_two_rejected(self):
        with pytest.raises(ValueError):
            params(1, 1)

    @pytest.mark.parametrize("n", [0, 4])
    def test_n_out_of_range(self, n):
        with pytest.raises(ValueError):
            params(3, n)

    @pytest.mark.parametrize(
        "edges",
        [[(1, 1, 1)], [(1, 2, 1), (2, 1, 1)], [(1, 5, 1)], [(1, 2, 0)]],
    )
    def test_invalid_graphs(self, edges):
        with pytest.raises(ValueError):
            WeightedGraph(4, tuple(edges))

    def test_components(self, two_edges, triangle):
        assert two_edges.components() == [[1, 2], [3, 4]]
        assert triangle.is_connected()


class TestCardinality:
    @pytest.mark.parametrize("k,n,mu,expected", [(2, 1, "1", 1), (3, 2, "1", 6), (3, 3, "1/2,1/2", 48)])
    def test_examples(self, k, n, mu, expected):
        p = params(k, n, mu)
        assert ensemble_cardinality(p) == expected
        assert sum(1 for _ in labeled_graphs(p)) == expected


class TestGraphProbability:
    def test_single_graph(self):
        assert graph_probability(params(2, 1), make_graph(2, [(1, 2)])) == 1

    @pytest.mark.parametrize("k,n,mu,each", [(3, 2, "1", Fraction(1, 6)), (3, 2, "1/2,1/2", Fraction(1, 24))])
    def test_examples_and_total_mass(self, k, n, mu, each):
        p = params(k, n, mu)
        probs = [graph_probability(p, g) for g in labeled_graphs(p)]
        assert set(probs) == {each}
        assert sum(probs) == 1

    def test_nonuniform_total_mass(self):
        p = params(3, 2, "1/3,2/3")
        assert sum(graph_probability(p, g) for g in labeled_graphs(p)) == 1

    def test_rejects_foreign_graphs(self):
        p = params(3, 2)
        with pytest.raises(ValueError):
            graph_probability(p, make_graph(3, [(1, 2)]))
        with pytest.raises(ValueError):
            graph_probability(p, make_graph(3, [(1, 2, 1), (2, 3, 2)]))


class TestSampling:
    def test_unique_outcome(self):
        for seed in range(5):
            g = sample_graph(params(2, 1), np.random.default_rng(seed))
            assert g.edges == ((1, 2, 1),)

    def test_deterministic_given_seed(self):
        p = params(20, 40, "0.1,0.2,0.4,0.2,0.1")
        a = sample_graph(p, np.random.default_rng(123))
        b = sample_graph(p, np.random.default_rng(123))
        assert a == b

    def test_edge_sets_uniform(self):
        p = params(3, 2)
        rng = np.random.default_rng(2024)
        counts = Counter(sample_graph(p, rng).edge_set() for _ in range(60000))
        assert len(counts) == 3
        for c in counts.values():
            assert abs(c - 20000) <= 500

    def test_pair_inclusion_frequency(self):
        p = params(8, 10, "0.5,0.5")
        rng = np.random.default_rng(7)
        trials = 5000
        counts = Counter()
        for _ in range(trials):
            counts.update(sample_graph(p, rng).edge_set())
        rate = p.n / p.num_pairs
        se = math.sqrt(rate * (1 - rate) / trials)
        for pair in vertex_pairs(p.k):
            assert abs(counts[pair] / trials - rate) <= 5 * se

    def test_weights_follow_pmf(self):
        p = params(30, 200, "0.1,0.2,0.4,0.2,0.1")
        rng = np.random.default_rng(11)
        counts = Counter()
        for _ in range(100):
            counts.update(sample_graph(p, rng).weights)
        total = sum(counts.values())
        for w in range(1, 6):
            mu = float(p.pmf(w))
            assert abs(counts[w] / total - mu) <= 5 * math.sqrt(mu * (1 - mu) / total)

    def test_zero_mass_weights_never_drawn(self):
        p = params(10, 20, "0,1/3,0,2/3")
        rng = np.random.default_rng(5)
        seen = set()
        for _ in range(50):
            g = sample_graph(p, rng)
            seen.update(g.weights)
            assert graph_probability(p, g) > 0
        assert seen == {2, 4}

    def test_huge_denominator_pmf(self):
        big = 2**70
        p = EnsembleParams(6, 5, WeightPmf((Fraction(1, big), 1 - Fraction(1, big))))
        g = sample_graph(p, np.random.default_rng(0))
        assert set(g.weights) <= {1, 2}


class TestEnumeration:
    def test_path_ensemble(self):
        items = list(enumerate_ensemble(params(3, 2)))
        assert len(items) == 3
        assert all(prob == Fraction(1, 3) for _, prob in items)

    def test_triangle_forced(self):
        items = list(enumerate_ensemble(params(3, 3)))
        assert len(items) == 1 and items[0][1] == 1

    def test_triangle_weights(self):
        items = list(enumerate_ensemble(params(3, 3, "1/2,1/2")))
        assert len(items) == 8
        assert all(prob == Fraction(1, 8) for _, prob in items)

    @given(k=st.integers(2, 5), data=st.data())
    @settings(max_examples=25, deadline=None)
    def test_total_mass_is_one(self, k, data):
        n = data.draw(st.integers(1, k * (k - 1) // 2))
        mu = data.draw(st.sampled_from(["1", "1/2,1/2", "1/3,0,2/3"]))
        p = params(k, n, mu)
        if math.comb(p.num_pairs, n) * p.q**n > 20000:
            return
        assert sum(prob for _, prob in enumerate_ensemble(p)) == 1

    def test_guard(self):
        with pytest.raises(GuardExceeded) as info:
            list(enumerate_ensemble(params(6, 7, "1/2,1/2"), guard=1000))
        assert info.value.size == math.comb(15, 7) * 2**7
        assert info.value.guard == 1000

    @pytest.mark.parametrize("mu", ["1", "1/3,2/3"])
    def test_label_invariance(self, mu):
        # labeled-ensemble averages of lambda and B_w equal the representative averages
        p = params(3, 2, mu)

        def averages(pairs):
            lam, bw = Fraction(0), Counter()
            for g, prob in pairs:
                lam += prob * global_min_cut(g).value
                for w, c in cut_weight_distribution(g).items():
                    bw[w] += prob * c
            return lam, dict(bw)

        labeled = averages((g, graph_probability(p, g)) for g in labeled_graphs(p))
        assert labeled == averages(enumerate_ensemble(p))
