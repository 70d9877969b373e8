"""Pseudo-independence versus the stronger recursive notion.

Two binary variables under two candidate joint laws: a product measure with
P(X=1) = 3/4, P(Y=1) = 3/4 correlation-free at weight table
(1/16, 3/16, 3/16, 9/16), and the uniform table (1/4 each).  Every
conditional law of Y sits inside the hull of its marginal laws, so the model
is pseudo-independent.  Yet the joint upper expectation of the equality
indicator is 5/8 while the nested (backward) evaluation gives 11/16: the
stronger independence fails.  Enlarging the measure set with every
history-dependent recombination of marginal vertices closes the gap.
"""

from fractions import Fraction

from sublin import (
    JointModel,
    check_peng_independence,
    check_pseudo_independence,
    enlarge_vertices,
)
from sublin.independence import joint_value, nested_value

F = Fraction


def main():
    model = JointModel(
        ["X", "Y"],
        [[0, 1], [0, 1]],
        [
            [F(1, 16), F(3, 16), F(3, 16), F(9, 16)],
            [F(1, 4), F(1, 4), F(1, 4), F(1, 4)],
        ],
    )
    phi = lambda v: 1 if v[0] == v[1] else 0

    print("pseudo-independence:", check_pseudo_independence(model, 2).verdict)
    print("joint value of the equality probe: ", joint_value(model, 2, phi))
    print("nested value of the equality probe:", nested_value(model, 2, phi))

    report = check_peng_independence(model, 2, mode="probe")
    print(f"strict independence: {report.verdict} (gap {report.gap})")

    big = enlarge_vertices(model)
    print(f"enlargement has {len(big.tables)} vertex measures")
    print("joint value over the enlargement:", joint_value(big, 2, phi))
    print("strict independence after enlargement:",
          check_peng_independence(big, 2, mode="exact").verdict)


if __name__ == "__main__":
    main()
