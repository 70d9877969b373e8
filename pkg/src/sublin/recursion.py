"""Backward recursion for sublinear expectations of partial sums.

The evaluator embeds all step atoms on a common rational lattice, tracks
the exact reachable set of partial sums forward, and then sweeps backward

    v_n(x)   = f(x)
    v_{k-1}(x) = max over step-k laws Q of  sum_y Q(y) v_k(x + y)

so ``v_0(0)`` is the nested (robust-DP) value, i.e. the supremum over the
rectangular enlargement of the per-step ambiguity sets.

Float mode uses dense numpy windows over the reachable range with Kahan
compensation across atom contributions; exact-rational mode uses sparse
Fraction maps and is capped to small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ModelError, NoCommonLattice, NumericalFailure, StateExplosion
from .measures import AmbiguitySet, NumericMode, is_exact

MAX_LATTICE_DENOMINATOR = 10**4
LATTICE_TOL = 1e-12
DEFAULT_STATE_CAP = 50_000_000
EXACT_WORK_CAP = 10**4


@dataclass(frozen=True)
class StepSequence:
    """Per-step ambiguity sets for X_1, ..., X_n (identical entries = i.i.d.)."""

    steps: tuple
    mode: NumericMode = NumericMode.FLOAT64

    def __init__(self, steps: Sequence[AmbiguitySet], mode: NumericMode = NumericMode.FLOAT64):
        steps = tuple(steps)
        if not steps:
            raise ModelError("a step sequence needs at least one step")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "mode", mode)

    @classmethod
    def iid(cls, aset: AmbiguitySet, n: int, mode: NumericMode = NumericMode.FLOAT64):
        if n < 1:
            raise ModelError("n must be >= 1")
        return cls((aset,) * n, mode)

    def __len__(self):
        return len(self.steps)


class LatticeEmbedding(NamedTuple):
    """Common spacing h plus integerized atoms: steps[k][measure] = (ints, weights)."""

    h: Fraction
    steps: tuple


def _rationalize(x, snap_tol=None):
    if is_exact(x):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ModelError(f"non-finite atom {x!r}")
        approx = Fraction(x).limit_denominator(MAX_LATTICE_DENOMINATOR)
        tol = LATTICE_TOL if snap_tol is None else snap_tol
        if abs(float(approx) - x) <= tol * max(1.0, abs(x)):
            return approx
        raise NoCommonLattice(
            f"atom {x!r} is not within {tol:g} of a rational with denominator "
            f"<= {MAX_LATTICE_DENOMINATOR}; pass snap_tol to snap to grid"
        )
    raise ModelError(f"not a number: {x!r}")


def lattice_embed(seq: StepSequence, snap_tol=None) -> LatticeEmbedding:
    """Common rational spacing h with every atom an integer multiple of h.

    Zero-weight atoms are pruned here (they cannot affect the recursion).
    Raises :class:`NoCommonLattice` for incommensurable atoms.
    """
    rationals = []
    pruned_steps = []
    for aset in seq.steps:
        measures = []
        for m in aset.members:
            pairs = [(x, w) for x, w in m.atoms if w != 0]
            pts = [_rationalize(x, snap_tol) for x, _ in pairs]
            rationals.extend(pts)
            measures.append((pts, tuple(w for _, w in pairs)))
        pruned_steps.append(measures)

    denom_lcm = 1
    for r in rationals:
        denom_lcm = denom_lcm * r.denominator // math.gcd(denom_lcm, r.denominator)
    ints = [r.numerator * (denom_lcm // r.denominator) for r in rationals]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    h = Fraction(g, denom_lcm) if g else Fraction(1)

    out_steps = []
    for measures in pruned_steps:
        out = []
        for pts, weights in measures:
            out.append((tuple(int(p / h) for p in pts), weights))
        out_steps.append(tuple(out))
    return LatticeEmbedding(h, tuple(out_steps))


class EvalResult(NamedTuple):
    value: object
    strategy: object  # per-step argmax measure arrays, or None


def _reachable(emb: LatticeEmbedding, state_cap: int):
    """Forward reachable sets as (lo, boolean array) per step, step 0 = {0}."""
    lo, mask = 0, np.array([True])
    out = [(lo, mask)]
    total = 1
    for measures in emb.steps:
        atoms = sorted({a for ints, _ in measures for a in ints})
        new_lo = lo + atoms[0]
        new_hi = lo + len(mask) - 1 + atoms[-1]
        width = new_hi - new_lo + 1
        total += width
        if total > state_cap:
            raise StateExplosion(
                f"reachable lattice exceeds the state cap ({state_cap})"
            )
        new_mask = np.zeros(width, dtype=bool)
        for a in atoms:
            off = lo + a - new_lo
            new_mask[off : off + len(mask)] |= mask
        lo, mask = new_lo, new_mask
        out.append((lo, mask))
    return out


def _eval_float(seq, emb, f, record_strategy, state_cap):
    reach = _reachable(emb, state_cap)
    h = float(emb.h)
    lo_n, mask_n = reach[-1]
    xs = (np.flatnonzero(mask_n) + lo_n) * h
    vals = np.fromiter((f(x) for x in xs), dtype=float, count=len(xs))
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure("terminal function produced non-finite values")
    v = np.zeros(len(mask_n))
    v[mask_n] = vals

    strategy = [] if record_strategy else None
    for k in range(len(seq) - 1, -1, -1):
        lo_k, mask_k = reach[k]
        lo_next, mask_next = reach[k + 1]
        width = len(mask_k)
        best = None
        argbest = None
        for mi, (ints, weights) in enumerate(emb.steps[k]):
            # Kahan compensation across atom contributions
            acc = np.zeros(width)
            comp = np.zeros(width)
            for a, w in zip(ints, weights):
                start = lo_k + a - lo_next
                term = float(w) * v[start : start + width]
                y = term - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
            if best is None:
                best = acc
                argbest = np.zeros(width, dtype=np.int32) if record_strategy else None
            else:
                if record_strategy:
                    argbest = np.where(acc > best, mi, argbest)
                best = np.maximum(best, acc)
        if not np.all(np.isfinite(best[mask_k])):
            raise NumericalFailure("non-finite value during backward sweep")
        v = np.where(mask_k, best, 0.0)
        if record_strategy:
            strategy.append((lo_k, argbest))
    lo_0, _ = reach[0]
    value = float(v[0 - lo_0])
    if record_strategy:
        strategy.reverse()
    return EvalResult(value, strategy)


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _eval_exact(seq, emb, f, record_strategy):
    # Values are swept as integer numerators over one growing common
    # denominator, so the inner loop is pure bigint arithmetic (no gcd
    # normalization per operation).
    work = len(seq) * max(
        len({a for ints, _ in measures for a in ints}) for measures in emb.steps
    )
    if work > EXACT_WORK_CAP:
        raise StateExplosion(
            f"exact-rational evaluation capped at n*|support| <= {EXACT_WORK_CAP}"
        )
    reach = [{0}]
    for measures in emb.steps:
        atoms = {a for ints, _ in measures for a in ints}
        reach.append({s + a for s in reach[-1] for a in atoms})
    h = emb.h
    terminal = {s: Fraction(f(s * h)) for s in reach[-1]}
    denom = _lcm([v.denominator for v in terminal.values()])
    num = {s: v.numerator * (denom // v.denominator) for s, v in terminal.items()}
    strategy = [] if record_strategy else None
    for k in range(len(seq) - 1, -1, -1):
        weights_k = [
            [Fraction(w) for w in weights] for _, weights in emb.steps[k]
        ]
        step_lcm = _lcm([w.denominator for ws in weights_k for w in ws])
        int_steps = [
            (ints, [w.numerator * (step_lcm // w.denominator) for w in ws])
            for (ints, _), ws in zip(emb.steps[k], weights_k)
        ]
        new_num = {}
        arg = {} if record_strategy else None
        for s in reach[k]:
            best, besti = None, -1
            for mi, (ints, ws) in enumerate(int_steps):
                val = sum(w * num[s + a] for a, w in zip(ints, ws))
                if best is None or val > best:
                    best, besti = val, mi
            new_num[s] = best
            if record_strategy:
                arg[s] = besti
        num = new_num
        denom *= step_lcm
        if record_strategy:
            strategy.append(arg)
    if record_strategy:
        strategy.reverse()
    return EvalResult(Fraction(num[0], denom), strategy)


def sublinear_eval_sum(
    seq: StepSequence,
    f: Callable,
    direction: str = "upper",
    record_strategy: bool = False,
    state_cap: int = DEFAULT_STATE_CAP,
    snap_tol=None,
):
    """Nested sublinear expectation of ``f(S_n)`` (upper) or ``-E[-f]`` (lower).

    Returns the value; pass ``record_strategy=True`` to get an
    :class:`EvalResult` with the per-step maximizing measure indices.
    """
    if direction not in ("upper", "lower"):
        raise ModelError(f"direction must be 'upper' or 'lower', got {direction!r}")
    if direction == "lower":
        res = sublinear_eval_sum(
            seq, lambda x: -f(x), "upper", record_strategy, state_cap, snap_tol
        )
        if record_strategy:
            return EvalResult(-res.value, res.strategy)
        return -res
    emb = lattice_embed(seq, snap_tol)
    if seq.mode is NumericMode.EXACT:
        res = _eval_exact(seq, emb, f, record_strategy)
    else:
        res = _eval_float(seq, emb, f, record_strategy, state_cap)
    return res if record_strategy else res.value


def sublinear_event_probability(
    seq: StepSequence,
    event: Callable,
    direction: str = "upper",
    state_cap: int = DEFAULT_STATE_CAP,
):
    """Upper probability of ``{S_n in A}`` over the enlargement, or its
    conjugate lower probability ``1 - V(complement)``."""
    if direction == "upper":
        one = Fraction(1) if seq.mode is NumericMode.EXACT else 1.0
        return sublinear_eval_sum(
            seq, lambda x: one if event(x) else 0 * one, "upper", state_cap=state_cap
        )
    if direction == "lower":
        return 1 - sublinear_event_probability(
            seq, lambda x: not event(x), "upper", state_cap
        )
    raise ModelError(f"direction must be 'upper' or 'lower', got {direction!r}")
