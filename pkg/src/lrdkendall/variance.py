"""Variance of the trend score: classical, estimated, and theoretical.

Three computations live here. ``var_classical`` is the textbook
tie-corrected null variance of the signed concordance count.
``var_extended_hat`` is the plug-in estimator built from the
per-observation exceedance counts, valid for any threshold.
``var_theoretical`` evaluates the closed-form null variance given the
population exceedance moments of the error distribution.

At d = 0 the three agree: with the default boundary the plug-in
estimator reproduces the tie-corrected formula identically (an algebraic
identity, not an approximation), and the theoretical form with the
continuous-distribution moments (1/3, 1/3, 1/6, 1/2) collapses to
n(n-1)(2n+5)/18.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvalidMoments

#: quadrature rounding can nick the moment inequalities by ~1 ulp
MOMENT_SLACK = 1e-12


def tie_groups(values) -> tuple[int, ...]:
    """Sizes of the groups of exactly equal values, smallest first.

    Only groups of 2 or more are reported; singletons do not correct
    anything.
    """
    _, counts = np.unique(np.asarray(values, dtype=float), return_counts=True)
    return tuple(sorted(int(c) for c in counts if c > 1))


def var_classical(n: int, ties: tuple[int, ...] = ()) -> float:
    """Tie-corrected null variance of the classical score.

    (1/18) * { n(n-1)(2n+5) - sum_i w_i(w_i-1)(2w_i+5) } for tie-group
    extents w_i.

    Args:
        n: Number of observations, at least 2.
        ties: Extents of exactly-tied groups (each >= 2, summing to <= n).
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    total = 0
    for w in ties:
        if w < 2 or w > n:
            raise InputError(f"tie extent {w} invalid for n={n}")
        total += w
        if total > n:
            raise InputError(f"tie extents sum to {total} > n={n}")
    base = n * (n - 1) * (2 * n + 5)
    corr = sum(w * (w - 1) * (2 * w + 5) for w in ties)
    return (base - corr) / 18.0


def var_extended_hat(u, v) -> float:
    """Plug-in variance estimate from exceedance counts: (1/3)sum((u-v)^2) + (1/3)sum(u).

    Nonnegative; zero exactly when every pair is tied; equal to the
    no-tie classical variance whenever no pair is tied.

    Args:
        u: Per-observation counts of relevant exceedances (see uv_counts).
        v: Matching counts of relevant shortfalls; totals must agree.
    """
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape or u.ndim != 1:
        raise InputError("u and v must be 1-d arrays of equal length")
    if u.sum() != v.sum():
        raise InputError(
            f"inconsistent counts: sum(u)={u.sum()} != sum(v)={v.sum()}; "
            "u and v must come from the same pairwise comparison"
        )
    return float((np.sum((u - v) ** 2) + np.sum(u)) / 3.0)


@dataclass(frozen=True)
class MomentSet:
    """Exceedance moments of three independent errors under the null.

    above_two:   P(X1 > X2 + d and X1 > X3 + d), one value relevantly
                 above two independent others.
    below_two:   P(X1 < X2 - d and X1 < X3 - d), the mirror.
    above_below: P(X1 > X2 + d and X1 < X3 - d), relevantly above one
                 specific comparator and below the other.
    above_one:   P(X1 > X2 + d), relevantly above a single comparator.
                 (The probability a pair scores at all is twice this for
                 a continuous symmetric difference.)

    For any continuous error distribution these satisfy
    min(below_two, above_two) >= above_one^2 >= above_below, and at
    d = 0 they are (1/3, 1/3, 1/6, 1/2). The container itself does not
    enforce the chain: plug-in estimates from small samples violate it
    routinely, and they are still valid inputs for the estimator
    identity. Use :func:`validate_moments` where population moments are
    expected.
    """

    above_two: float
    below_two: float
    above_below: float
    above_one: float


def validate_moments(m: MomentSet, slack: float = MOMENT_SLACK) -> None:
    """Check range and the correlation-inequality chain, with slack for rounding."""
    for name in ("above_two", "below_two", "above_below", "above_one"):
        x = getattr(m, name)
        if not np.isfinite(x) or x < -slack or x > 1 + slack:
            raise InvalidMoments(f"{name}={x!r} outside [0, 1]")
    lo = min(m.below_two, m.above_two)
    sq = m.above_one**2
    if lo + slack < sq:
        raise InvalidMoments(
            f"min(above_two, below_two)={lo!r} < above_one^2={sq!r} "
            f"beyond slack {slack}"
        )
    if sq + slack < m.above_below:
        raise InvalidMoments(
            f"above_one^2={sq!r} < above_below={m.above_below!r} beyond slack {slack}"
        )


def _var_formula(m: MomentSet, n: int) -> float:
    # n(n-1)(n-2)/3 multiplies the triple-overlap part, n(n-1) the pair part
    cubic = (n**3) / 3.0 - n**2 + 2.0 * n / 3.0
    pair = m.below_two + m.above_two - 2.0 * m.above_below
    return cubic * pair + (n**2 - n) * m.above_one


def var_theoretical(m: MomentSet, n: int) -> float:
    """Null variance of the extended score from population moments.

    ((1/3)n^3 - n^2 + (2/3)n)(alpha_minus + alpha_plus - 2 beta)
    + (n^2 - n) gamma.

    Validates the moment constraints; use this with quadrature or
    closed-form moments. For plug-in estimates see
    :func:`var_extended_from_moments`.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    validate_moments(m)
    return _var_formula(m, n)


def moment_estimates(u, v) -> MomentSet:
    """Plug-in estimates of the exceedance moments from observed counts.

    above_two:   sum(u(u-1)) / (n(n-1)(n-2)),   below_two from v,
    above_below: sum(u*v)    / (n(n-1)(n-2)),
    above_one:   sum(u)      / (n(n-1)).

    Estimates can step outside the population constraints on small
    samples; they are reported as computed.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    n = len(u)
    if n < 3:
        raise InputError("moment estimates need n >= 3")
    triples = n * (n - 1) * (n - 2)
    pairs = n * (n - 1)
    return MomentSet(
        above_two=float(np.sum(u * (u - 1)) / triples),
        below_two=float(np.sum(v * (v - 1)) / triples),
        above_below=float(np.sum(u * v) / triples),
        above_one=float(np.sum(u) / pairs),
    )


def var_extended_from_moments(m: MomentSet, n: int) -> float:
    """The variance formula evaluated without the population-constraint check.

    With ``m = moment_estimates(u, v)`` this equals
    ``var_extended_hat(u, v)`` exactly: expanding sum((u-v)^2) shows the
    two forms are the same polynomial in the counts.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    return _var_formula(m, n)
