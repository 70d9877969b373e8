import math
import random
from fractions import Fraction

import pytest

from sublin import (
    AmbiguitySet,
    DiscreteDistribution,
    ModelError,
    NumericalFailure,
    NumericMode,
    ambiguity_set_from_dict,
    bernoulli,
    dirac,
    lower_expectation,
    lower_probability,
    same_distribution,
    upper_expectation,
    upper_probability,
)
from sublin.limits import counterexample_family

from conftest import random_ambiguity_set

F = Fraction


class TestDiscreteDistribution:
    def test_merges_duplicate_points(self):
        d = DiscreteDistribution([1, 0, 1], [F(1, 4), F(1, 4), F(1, 2)])
        assert d.points == (0, 1)
        assert d.weights == (F(1, 4), F(3, 4))

    def test_points_sorted(self):
        d = DiscreteDistribution([2, -1, 0], [0.2, 0.3, 0.5])
        assert d.points == (-1, 0, 2)

    def test_rejects_bad_weights(self):
        with pytest.raises(ModelError):
            DiscreteDistribution([0, 1], [F(1, 2), F(1, 4)])
        with pytest.raises(ModelError):
            DiscreteDistribution([0, 1], [F(3, 2), F(-1, 2)])
        with pytest.raises(ModelError):
            DiscreteDistribution([0, 1], [0.5, 0.5 + 1e-6])

    def test_float_tolerance(self):
        DiscreteDistribution([0, 1, 2], [0.1, 0.2, 0.7])  # fine

    def test_zero_weight_atoms_kept(self):
        d = DiscreteDistribution([0, 1], [1, 0])
        assert d.points == (0, 1)

    def test_map_merges_images(self):
        d = DiscreteDistribution([-1, 0, 1], [F(1, 4), F(1, 2), F(1, 4)])
        sq = d.map(lambda x: x * x)
        assert sq.atoms == ((0, F(1, 2)), (1, F(1, 2)))


class TestEnvelopes:
    def test_dirac_identity(self):
        assert upper_expectation(AmbiguitySet([dirac(0)]), lambda x: x).value == 0
        assert lower_expectation(AmbiguitySet([dirac(0)]), lambda x: x).value == 0

    def test_example36_marginal(self):
        # marginals of X under the two joint measures: Bern(3/4), Bern(1/2)
        marg = AmbiguitySet([bernoulli(F(3, 4)), bernoulli(F(1, 2))])
        res = upper_expectation(marg, lambda x: x)
        assert res.value == F(3, 4)
        assert res.argmax == 0

    def test_counterexample_second_moment(self):
        fam = counterexample_family(10)
        assert upper_expectation(fam, lambda x: x * x).value == 1
        assert lower_expectation(fam, lambda x: x * x).value == 1

    def test_lower_band_mean(self):
        band = AmbiguitySet([bernoulli(0.4), bernoulli(0.6)])
        assert lower_expectation(band, lambda x: x).value == pytest.approx(0.4)

    def test_nan_raises(self):
        with pytest.raises(NumericalFailure):
            upper_expectation(AmbiguitySet([dirac(0.0)]), lambda x: math.nan)

    def test_singleton_is_classical(self):
        d = DiscreteDistribution([-1, 2], [F(1, 3), F(2, 3)])
        v = upper_expectation(AmbiguitySet([d]), lambda x: x).value
        assert v == d.expectation(lambda x: x) == 1


class TestProbabilities:
    def test_whole_line(self):
        band = AmbiguitySet([bernoulli(0.4), bernoulli(0.6)])
        assert upper_probability(band, lambda x: True).value == 1
        assert lower_probability(band, lambda x: True).value == 1

    def test_band_point_event(self):
        band = AmbiguitySet([bernoulli(0.4), bernoulli(0.6)])
        assert upper_probability(band, lambda x: x == 1).value == pytest.approx(0.6)
        assert lower_probability(band, lambda x: x == 1).value == pytest.approx(0.4)

    def test_counterexample_tail(self):
        fam = counterexample_family(10)
        for m in range(1, 11):
            assert upper_probability(fam, lambda x: abs(x) >= m).value == F(1, m * m)

    def test_conjugacy_exact_random(self):
        rng = random.Random(7)
        for _ in range(50):
            aset = random_ambiguity_set(rng)
            cut = rng.randint(-3, 3)
            event = lambda x, cut=cut: x >= cut
            V = upper_probability(aset, event).value
            v = lower_probability(aset, lambda x: not event(x)).value
            assert V + v == 1


class TestSublinearity:
    """The four envelope properties on random test pairs, exact in rationals."""

    def _pair(self, rng):
        aset = random_ambiguity_set(rng)
        table_f = {x: F(rng.randint(-9, 9), rng.randint(1, 5)) for x in aset.union_support()}
        table_g = {x: F(rng.randint(-9, 9), rng.randint(1, 5)) for x in aset.union_support()}
        return aset, table_f.__getitem__, table_g.__getitem__

    def test_monotone_constants_subadditive_homogeneous(self):
        rng = random.Random(11)
        for _ in range(100):
            aset, f, g = self._pair(rng)
            Ef = upper_expectation(aset, f).value
            Eg = upper_expectation(aset, g).value
            # monotonicity via f vs f + |g|
            dominated = lambda x: f(x) - abs(g(x))
            assert upper_expectation(aset, dominated).value <= Ef
            # constants
            c = F(rng.randint(-5, 5), rng.randint(1, 3))
            assert upper_expectation(aset, lambda x: c).value == c
            # sub-additivity
            assert upper_expectation(aset, lambda x: f(x) + g(x)).value <= Ef + Eg
            # positive homogeneity
            lam = F(rng.randint(0, 6), rng.randint(1, 3))
            assert upper_expectation(aset, lambda x: lam * f(x)).value == lam * Ef


class TestSameDistribution:
    def test_reflexive(self):
        a = AmbiguitySet([dirac(0)])
        assert same_distribution(a, a)

    def test_hull_midpoint_added(self):
        a = AmbiguitySet([dirac(0), dirac(1)])
        b = AmbiguitySet([dirac(0), dirac(1), bernoulli(F(1, 2))])
        assert same_distribution(a, b)

    def test_strict_subset_differs(self):
        a = AmbiguitySet([bernoulli(F(1, 2))])
        b = AmbiguitySet([dirac(0), dirac(1)])
        assert not same_distribution(a, b)

    def test_equivalence_relation_on_random_sets(self):
        rng = random.Random(3)
        sets = [random_ambiguity_set(rng) for _ in range(12)]
        # symmetry + transitivity within the sample
        rel = {}
        for i, a in enumerate(sets):
            for j, b in enumerate(sets):
                rel[i, j] = same_distribution(a, b)
        for i in range(len(sets)):
            assert rel[i, i]
            for j in range(len(sets)):
                assert rel[i, j] == rel[j, i]
                for k in range(len(sets)):
                    if rel[i, j] and rel[j, k]:
                        assert rel[i, k]


class TestModelFile:
    def test_rational_strings(self):
        doc = {"measures": [{"atoms": [0, 1], "probs": ["9/16", "7/16"]}]}
        aset = ambiguity_set_from_dict(doc, NumericMode.EXACT)
        assert aset.members[0].weights == (F(9, 16), F(7, 16))

    def test_schema_rejects_garbage(self):
        with pytest.raises(ModelError):
            ambiguity_set_from_dict({"measures": []})
        with pytest.raises(ModelError):
            ambiguity_set_from_dict({"measures": [{"atoms": [0]}]})

    def test_mismatched_lengths(self):
        with pytest.raises(ModelError):
            ambiguity_set_from_dict({"measures": [{"atoms": [0, 1], "probs": [1]}]})
