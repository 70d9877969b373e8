"""Upper and lower expectations over a finite ambiguity set.

A sublinear expectation on a finite model is just a maximum of classical
expectations over a set of candidate laws.  This walk-through builds a small
Bernoulli band (success probability anywhere in [2/5, 3/5]) and shows the
envelope values, the conjugacy identity, and exact rational arithmetic.
"""

from fractions import Fraction

from sublin import (
    AmbiguitySet,
    bernoulli,
    lower_expectation,
    lower_probability,
    upper_expectation,
    upper_probability,
)

F = Fraction


def main():
    band = AmbiguitySet([bernoulli(F(2, 5)), bernoulli(F(3, 5))], "bernoulli-band")

    hi = upper_expectation(band, lambda x: x)
    lo = lower_expectation(band, lambda x: x)
    print(f"mean envelope: [{lo.value}, {hi.value}]")
    print(f"upper envelope attained by member #{hi.argmax}")

    # conjugacy: V(A) + v(complement of A) = 1, exactly in rational mode
    V = upper_probability(band, lambda x: x == 1)
    v = lower_probability(band, lambda x: x == 0)
    print(f"V(X=1) = {V.value}, v(X=0) = {v.value}, sum = {V.value + v.value}")

    # sub-additivity in action: E[f+g] <= E[f] + E[g], strict here
    f = lambda x: x
    g = lambda x: 1 - x
    lhs = upper_expectation(band, lambda x: f(x) + g(x)).value
    rhs = upper_expectation(band, f).value + upper_expectation(band, g).value
    print(f"E[f+g] = {lhs}  <=  E[f] + E[g] = {rhs}")


if __name__ == "__main__":
    main()
