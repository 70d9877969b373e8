"""Discrete probability laws, ambiguity sets, and their upper envelopes.

An :class:`AmbiguitySet` is a finite set of finitely supported laws; it
induces the sublinear expectation ``sup_P E_P[f]``, the conjugate pair of
upper/lower probabilities, and an exact identical-distribution test via
convex-hull comparison of the law vectors.

Numbers may be ints, floats, or :class:`~fractions.Fraction`.  Rational
inputs stay rational through every operation, which is what makes the
exact-rational mode of the rest of the package work.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

from .errors import ModelError, NumericalFailure
from .linprog import hull_gap, in_hull

WEIGHT_TOL = 1e-12
HULL_TOL = 1e-9


class NumericMode(Enum):
    FLOAT64 = "float64"
    EXACT = "exact-rational"


def parse_number(value, mode: NumericMode = NumericMode.FLOAT64):
    """Read a number from JSON: a plain number or a string like ``"9/16"``."""
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ModelError(f"non-finite number {value!r}")
        if mode is NumericMode.EXACT:
            # decimal floats were typed by a human; recover the short rational
            return Fraction(repr(value))
        return value
    raise ModelError(f"not a number: {value!r}")


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _check_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        raise NumericalFailure("test function produced a non-finite value")
    return v


@dataclass(frozen=True)
class DiscreteDistribution:
    """One probability law with finite real support.

    ``atoms`` is a tuple of ``(point, weight)`` pairs with strictly
    increasing points.  Duplicate points are merged at construction;
    zero-weight atoms are kept (they change nothing).
    """

    atoms: tuple

    def __init__(self, points: Sequence, weights: Sequence):
        if len(points) != len(weights) or not points:
            raise ModelError("points and weights must be nonempty and equal length")
        merged: dict = {}
        for x, w in zip(points, weights):
            if isinstance(w, float) and w < -WEIGHT_TOL or is_exact(w) and w < 0:
                raise ModelError(f"negative weight {w!r} at {x!r}")
            merged[x] = merged.get(x, 0) + w
        pairs = tuple(sorted(merged.items(), key=lambda kv: kv[0]))
        total = sum(w for _, w in pairs)
        if all(is_exact(w) for _, w in pairs):
            if total != 1:
                raise ModelError(f"weights sum to {total}, not 1")
        elif abs(total - 1.0) > WEIGHT_TOL:
            raise ModelError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", pairs)

    @property
    def points(self):
        return tuple(x for x, _ in self.atoms)

    @property
    def weights(self):
        return tuple(w for _, w in self.atoms)

    def expectation(self, f: Callable):
        return sum(w * _check_value(f(x)) for x, w in self.atoms if w != 0)

    def probability(self, event: Callable) -> float:
        return sum(w for x, w in self.atoms if event(x))

    def law_vector(self, support: Sequence):
        """Weights aligned to an enclosing support (0 off the support)."""
        lookup = dict(self.atoms)
        return [lookup.get(x, 0) for x in support]

    def map(self, g: Callable) -> "DiscreteDistribution":
        """Law of ``g(X)``; colliding images merge their weights."""
        return DiscreteDistribution([g(x) for x, _ in self.atoms], list(self.weights))

    def exact(self) -> bool:
        return all(is_exact(x) and is_exact(w) for x, w in self.atoms)


def dirac(x) -> DiscreteDistribution:
    return DiscreteDistribution([x], [1])


def bernoulli(p) -> DiscreteDistribution:
    return DiscreteDistribution([0, 1], [1 - p, p])


def rademacher(scale=1) -> DiscreteDistribution:
    half = Fraction(1, 2) if is_exact(scale) else 0.5
    return DiscreteDistribution([-scale, scale], [half, half])


@dataclass(frozen=True)
class AmbiguitySet:
    """A finite, nonempty set of discrete laws for one coordinate."""

    members: tuple
    label: str = ""

    def __init__(self, members: Sequence[DiscreteDistribution], label: str = ""):
        members = tuple(members)
        if not members:
            raise ModelError("ambiguity set must be nonempty")
        for m in members:
            if not isinstance(m, DiscreteDistribution):
                raise ModelError("members must be DiscreteDistribution")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "label", label)

    def union_support(self):
        return tuple(sorted({x for m in self.members for x in m.points}))

    def map(self, g: Callable, label: str = "") -> "AmbiguitySet":
        return AmbiguitySet([m.map(g) for m in self.members], label or self.label)

    def exact(self) -> bool:
        return all(m.exact() for m in self.members)


class EnvelopeValue(NamedTuple):
    """An envelope value together with the attaining member index."""

    value: object
    argmax: int

    def __float__(self):
        return float(self.value)


def upper_expectation(aset: AmbiguitySet, f: Callable) -> EnvelopeValue:
    """sup over members of E_P[f], with the maximizing member index."""
    best, arg = None, -1
    for i, m in enumerate(aset.members):
        v = m.expectation(f)
        if best is None or v > best:
            best, arg = v, i
    return EnvelopeValue(best, arg)


def lower_expectation(aset: AmbiguitySet, f: Callable) -> EnvelopeValue:
    """inf over members of E_P[f], as ``-sup E_P[-f]``."""
    value, arg = upper_expectation(aset, lambda x: -f(x))
    return EnvelopeValue(-value, arg)


def upper_probability(aset: AmbiguitySet, event: Callable) -> EnvelopeValue:
    """V(A) = sup over members of P(A)."""
    best, arg = None, -1
    for i, m in enumerate(aset.members):
        v = m.probability(event)
        if best is None or v > best:
            best, arg = v, i
    return EnvelopeValue(best, arg)


def lower_probability(aset: AmbiguitySet, event: Callable) -> EnvelopeValue:
    """v(A) = 1 - V(complement of A); conjugacy holds exactly."""
    value, arg = upper_probability(aset, lambda x: not event(x))
    return EnvelopeValue(1 - value, arg)


def same_distribution(a: AmbiguitySet, b: AmbiguitySet, tol: float = HULL_TOL) -> bool:
    """Whether a and b induce the same sublinear expectation.

    On the union support, test functions span the whole space, so equality
    of the envelopes is exactly equality of the convex hulls of the law
    vectors.  Decided by mutual hull membership; exact for rational inputs
    (pass ``tol=0``), within ``tol`` for float inputs.
    """
    support = tuple(sorted(set(a.union_support()) | set(b.union_support())))
    va = [m.law_vector(support) for m in a.members]
    vb = [m.law_vector(support) for m in b.members]
    effective = 0 if (a.exact() and b.exact() and tol == 0) else tol
    return all(in_hull(v, vb, effective) for v in va) and all(
        in_hull(v, va, effective) for v in vb
    )


MEASURES_SCHEMA = {
    "type": "object",
    "required": ["measures"],
    "properties": {
        "measures": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["atoms", "probs"],
                "properties": {
                    "atoms": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": ["number", "string"]},
                    },
                    "probs": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": ["number", "string"]},
                    },
                },
            },
        },
        "label": {"type": "string"},
    },
}


def ambiguity_set_from_dict(doc: dict, mode: NumericMode = NumericMode.FLOAT64) -> AmbiguitySet:
    """Build an AmbiguitySet from the model-file JSON schema."""
    import jsonschema

    try:
        jsonschema.validate(doc, MEASURES_SCHEMA)
    except jsonschema.ValidationError as e:
        raise ModelError(f"invalid model file: {e.message}") from e
    members = []
    for entry in doc["measures"]:
        points = [parse_number(v, mode) for v in entry["atoms"]]
        weights = [parse_number(v, mode) for v in entry["probs"]]
        if len(points) != len(weights):
            raise ModelError("atoms and probs must have equal length")
        members.append(DiscreteDistribution(points, weights))
    return AmbiguitySet(members, doc.get("label", ""))


def load_ambiguity_set(path: str, mode: NumericMode = NumericMode.FLOAT64) -> AmbiguitySet:
    with open(path) as fh:
        return ambiguity_set_from_dict(json.load(fh), mode)
