import random
from fractions import Fraction

import pytest

from sublin import AmbiguitySet, DiscreteDistribution, JointModel, bernoulli, rademacher


@pytest.fixture
def example36():
    """The two-measure binary joint model with the 5/8 vs 11/16 gap."""
    F = Fraction
    return JointModel(
        ["X", "Y"],
        [[0, 1], [0, 1]],
        [
            # cells ordered (X=0,Y=0), (X=0,Y=1), (X=1,Y=0), (X=1,Y=1)
            [F(1, 16), F(3, 16), F(3, 16), F(9, 16)],
            [F(1, 4), F(1, 4), F(1, 4), F(1, 4)],
        ],
    )


@pytest.fixture
def phi_star():
    return lambda v: 1 if v[0] == v[1] else 0


@pytest.fixture
def bernoulli_band():
    return AmbiguitySet([bernoulli(0.4), bernoulli(0.6)], "bernoulli-band")


@pytest.fixture
def bernoulli_band_exact():
    F = Fraction
    return AmbiguitySet([bernoulli(F(2, 5)), bernoulli(F(3, 5))], "bernoulli-band")


@pytest.fixture
def two_variance_rademacher():
    return AmbiguitySet([rademacher(0.5), rademacher(1.0)], "two-variance rademacher")


def random_distribution(rng: random.Random, max_atoms=4, span=3):
    k = rng.randint(1, max_atoms)
    points = rng.sample(range(-span, span + 1), k)
    raw = [rng.randint(1, 9) for _ in range(k)]
    total = sum(raw)
    return DiscreteDistribution(points, [Fraction(w, total) for w in raw])


def random_ambiguity_set(rng: random.Random, max_members=3, **kw):
    members = [random_distribution(rng, **kw) for _ in range(rng.randint(1, max_members))]
    return AmbiguitySet(members)


def random_product_model(rng: random.Random, max_measures=3):
    """A random two-variable model of product measures (hence pseudo-independent)."""
    sx = sorted(rng.sample(range(-2, 3), rng.randint(2, 3)))
    sy = sorted(rng.sample(range(-2, 3), rng.randint(2, 3)))

    def law(size):
        raw = [rng.randint(1, 9) for _ in range(size)]
        total = sum(raw)
        return [Fraction(w, total) for w in raw]

    tables = []
    for _ in range(rng.randint(1, max_measures)):
        px, py = law(len(sx)), law(len(sy))
        tables.append([wx * wy for wx in px for wy in py])
    return JointModel(["X", "Y"], [sx, sy], tables)
