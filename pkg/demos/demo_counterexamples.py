"""Why standardized moments are not enough for robust limit theorems.

The family P_k({0}) = 1 - 1/k^2, P_k({+-k}) = 1/(2k^2) has mean-zero and
unit-variance envelopes for every k, yet both the law of large numbers and
the central limit theorem fail over it: the dynamic-programming value of a
bounded test function tends to its maximum 1 instead of the classical
prediction.  The tail diagnostics explain the dichotomy: n V(|X| >= n)
decays like 1/n (first-moment uniform integrability holds) while
n V(X^2 >= n) stays of order one (the second-moment analogue fails).
"""

import math

from sublin import (
    NumericMode,
    StepSequence,
    counterexample_family,
    moment_summary,
    prop62_experiment,
    prop63_experiment,
)


def main():
    print("LLN failure: E[phi_M(sum X_i^2 / n)], phi_M(y) = max(1-y, 1-M), M=2")
    for K in (10, 30, 100):
        value, bound = prop62_experiment(K, 20)
        print(f"  K={K:4d} n=20  value={value:.6f}  analytic lower bound={bound:.6f}")
    print("  classical prediction phi(1) = 0; robust limit = 1")

    print()
    print("CLT failure: E[phi_M(S_n / sqrt(n))], phi_M(x) = max(1-|x|, 1-M), M=1")
    for K in (25, 100, 400):
        value, _ = prop63_experiment(K, 25)
        print(f"  K={K:4d} n=25  value={value:.6f}")
    classical = 1 - math.sqrt(2 / math.pi)
    print(f"  classical reference 1-sqrt(2/pi) = {classical:.6f}; robust limit = 1")

    one_step, _ = prop63_experiment(2, 1, mode=NumericMode.EXACT)
    print(f"  exact one-step check (K=2, n=1): {one_step}")

    print()
    print("tail diagnostics (K=1000):")
    seq = StepSequence.iid(counterexample_family(1000), 1, NumericMode.EXACT)
    s = moment_summary(seq, 1000, schedule=[10, 100, 400, 900, 1000])
    print("  n     nV(|X|>=n)   nV(X^2>=n)")
    for (n, a), (_, q) in zip(s.tail_abs, s.tail_sq):
        print(f"  {n:5d} {float(a):10.6f} {float(q):12.6f}")
    print(f"  first moment tail decaying:  {s.h1_decaying}")
    print(f"  second moment tail decaying: {s.h2_decaying}")


if __name__ == "__main__":
    main()
