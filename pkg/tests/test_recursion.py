import itertools
import math
import random
from fractions import Fraction

import pytest

from sublin import (
    AmbiguitySet,
    DiscreteDistribution,
    NoCommonLattice,
    NumericMode,
    StateExplosion,
    StepSequence,
    bernoulli,
    dirac,
    lattice_embed,
    rademacher,
    sublinear_eval_sum,
    sublinear_event_probability,
)
from sublin.limits import counterexample_family

from conftest import random_ambiguity_set

F = Fraction


def brute_force_upper(seq, f):
    """Path enumeration: maximize over per-step measure choices adapted to history.

    The recursion's optimum over history-dependent choices equals a nested
    max/expectation evaluated by explicit tree walk.
    """

    def go(k, s):
        if k == len(seq.steps):
            return f(s)
        best = None
        for d in seq.steps[k].members:
            v = sum(w * go(k + 1, s + x) for x, w in d.atoms)
            best = v if best is None else max(best, v)
        return best

    return go(0, F(0) if seq.mode is NumericMode.EXACT else 0.0)


def small_exact_sequence(rng, n):
    steps = []
    for _ in range(n):
        steps.append(random_ambiguity_set(rng, max_members=2, max_atoms=3))
    return StepSequence(tuple(steps), NumericMode.EXACT)


class TestLattice:
    def test_integer_atoms(self):
        emb = lattice_embed(StepSequence.iid(AmbiguitySet([rademacher()]), 3))
        assert emb.h == 1

    def test_mixed_halves(self):
        aset = AmbiguitySet(
            [
                DiscreteDistribution([F(-1, 2), F(1, 2)], [F(1, 2), F(1, 2)]),
                DiscreteDistribution([-1, 1], [F(1, 2), F(1, 2)]),
            ]
        )
        emb = lattice_embed(StepSequence.iid(aset, 2))
        assert emb.h == F(1, 2)

    def test_irrational_rejected(self):
        aset = AmbiguitySet([DiscreteDistribution([0.0, math.sqrt(2)], [0.5, 0.5])])
        with pytest.raises(NoCommonLattice):
            lattice_embed(StepSequence.iid(aset, 2))

    def test_snap_tolerance_accepts_noisy_grid(self):
        aset = AmbiguitySet([DiscreteDistribution([0.0, 0.5 + 3e-7], [0.5, 0.5])])
        emb = lattice_embed(StepSequence.iid(aset, 2), snap_tol=1e-6)
        assert emb.h == F(1, 2)

    def test_zero_weight_atoms_pruned(self):
        aset = AmbiguitySet([DiscreteDistribution([0, F(1, 3), 1], [F(1, 2), 0, F(1, 2)])])
        emb = lattice_embed(StepSequence.iid(aset, 1))
        assert emb.h == 1


class TestBruteForceEquivalence:
    def test_exact_random_models(self):
        rng = random.Random(42)
        for trial in range(40):
            n = rng.randint(1, 4)
            seq = small_exact_sequence(rng, n)
            c = rng.randint(-2, 2)
            f = lambda s, c=c: abs(s - c)
            got = sublinear_eval_sum(seq, f)
            want = brute_force_upper(seq, f)
            assert got == want, f"trial {trial}"

    def test_float_random_models(self):
        rng = random.Random(43)
        for _ in range(25):
            n = rng.randint(1, 4)
            exact_seq = small_exact_sequence(rng, n)
            float_steps = tuple(
                AmbiguitySet(
                    [
                        DiscreteDistribution(
                            [float(x) for x in d.points], [float(w) for w in d.weights]
                        )
                        for d in a.members
                    ]
                )
                for a in exact_seq.steps
            )
            seq = StepSequence(float_steps, NumericMode.FLOAT64)
            f = lambda s: max(1.0 - abs(s), 0.0)
            got = sublinear_eval_sum(seq, f)
            want = float(brute_force_upper(exact_seq, lambda s: max(1 - abs(s), F(0))))
            assert got == pytest.approx(want, abs=1e-12)

    def test_longer_singleton_matches_convolution(self):
        # one measure: robust recursion must equal the classical expectation
        d = DiscreteDistribution([-1, 0, 2], [F(1, 4), F(1, 4), F(1, 2)])
        seq = StepSequence.iid(AmbiguitySet([d]), 6, NumericMode.EXACT)
        f = lambda s: s * s
        # classical oracle via explicit 6-fold product
        want = F(0)
        for combo in itertools.product(d.atoms, repeat=6):
            w = math.prod(c[1] for c in combo)
            want += w * f(sum(c[0] for c in combo))
        assert sublinear_eval_sum(seq, f) == want


class TestInvariants:
    def test_lower_leq_upper(self):
        rng = random.Random(5)
        for _ in range(20):
            seq = small_exact_sequence(rng, 3)
            f = lambda s: max(1 - abs(s), F(0))
            lo = sublinear_eval_sum(seq, f, direction="lower")
            hi = sublinear_eval_sum(seq, f, direction="upper")
            assert lo <= hi

    def test_constants_pass_through(self):
        seq = StepSequence.iid(counterexample_family(5), 4, NumericMode.EXACT)
        assert sublinear_eval_sum(seq, lambda s: F(7, 3)) == F(7, 3)

    def test_linear_telescopes(self):
        # for linear f the optimum decouples: value = sum of per-step envelopes
        band = AmbiguitySet([bernoulli(F(1, 3)), bernoulli(F(2, 3))])
        seq = StepSequence.iid(band, 5, NumericMode.EXACT)
        assert sublinear_eval_sum(seq, lambda s: s) == 5 * F(2, 3)
        assert sublinear_eval_sum(seq, lambda s: s, direction="lower") == 5 * F(1, 3)

    def test_step_order_matters_only_with_ambiguity(self):
        # singleton steps: classical convolution commutes, so reordering is harmless
        rng = random.Random(9)
        steps = tuple(
            AmbiguitySet([random_ambiguity_set(rng, max_members=1, max_atoms=3).members[0]])
            for _ in range(4)
        )
        seq = StepSequence(steps, NumericMode.EXACT)
        perm = StepSequence(tuple(reversed(steps)), NumericMode.EXACT)
        f = lambda s: abs(s)
        assert sublinear_eval_sum(seq, f) == sublinear_eval_sum(perm, f)

    def test_monotone_in_function(self):
        seq = StepSequence.iid(counterexample_family(4), 3)
        small = sublinear_eval_sum(seq, lambda s: min(abs(s), F(1)))
        big = sublinear_eval_sum(seq, lambda s: min(abs(s), F(2)))
        assert small <= big

    def test_exact_matches_float(self):
        fam_e = counterexample_family(3)
        fam_f = AmbiguitySet(
            [
                DiscreteDistribution([float(x) for x in d.points], [float(w) for w in d.weights])
                for d in fam_e.members
            ]
        )
        f = lambda s: max(1 - abs(F(s)) / 4, F(0))
        ff = lambda s: max(1 - abs(s) / 4, 0.0)
        ve = sublinear_eval_sum(StepSequence.iid(fam_e, 8, NumericMode.EXACT), f)
        vf = sublinear_eval_sum(StepSequence.iid(fam_f, 8), ff)
        assert vf == pytest.approx(float(ve), abs=1e-12)


class TestEventProbability:
    def test_conjugate_pair(self):
        seq = StepSequence.iid(counterexample_family(4), 5)
        hi = sublinear_event_probability(seq, lambda s: abs(s) >= 4)
        lo = sublinear_event_probability(seq, lambda s: abs(s) >= 4, direction="lower")
        assert 0 <= lo <= hi <= 1

    def test_certain_event(self):
        seq = StepSequence.iid(AmbiguitySet([rademacher()]), 3)
        assert sublinear_event_probability(seq, lambda s: True) == 1
        assert sublinear_event_probability(seq, lambda s: False) == 0

    def test_single_step_matches_static_envelope(self):
        fam = counterexample_family(7)
        seq = StepSequence.iid(fam, 1, NumericMode.EXACT)
        assert sublinear_event_probability(seq, lambda s: abs(s) >= 7) == F(1, 49)


class TestGuards:
    def test_state_cap(self):
        aset = AmbiguitySet([DiscreteDistribution([0, 10**6], [F(1, 2), F(1, 2)])])
        seq = StepSequence.iid(aset, 50)
        with pytest.raises(StateExplosion):
            sublinear_eval_sum(seq, lambda s: s, state_cap=1000)

    def test_strategy_recording(self):
        band = AmbiguitySet([bernoulli(F(1, 3)), bernoulli(F(2, 3))])
        seq = StepSequence.iid(band, 2, NumericMode.EXACT)
        res = sublinear_eval_sum(seq, lambda s: s, record_strategy=True)
        assert res.strategy is not None
        assert len(res.strategy) == 2
