"""Permutation inference for the thresholded trend score.

This is the fallback path recommended whenever the normal approximation
is doubtful (small n, heavy ties) and the only path for one-directional
rules, whose analytic variance is not derived.

Seeding contract
----------------
Draws are generated in fixed-size chunks, each chunk from its own
generator keyed by (seed, stream-tag, chunk-index) through
:mod:`lrdkendall.seeds`. The draw sequence is therefore a pure function
of the inputs: identical (series, rule, replicates, seed) give an
identical p-value regardless of scheduling, threading, or how many other
tests ran first. For n <= 8 the test enumerates all n! orderings instead
and the p-value is exact, with no randomness at all.

The grouped variant (permute within each group independently, recombine
the summed score) is this package's extension; treat its p-values as a
sensible default rather than a published procedure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import LrdRule, Series, _exceeds, s_extended
from .errors import InputError
from .inference import SIDEDNESS
from .regional import LrdPolicy, RegionalDataset
from .seeds import generator_for

EXHAUSTIVE_MAX_N = 8          # 8! = 40320 orderings; 9! starts to drag
_CHUNK_ELEMENTS = 4_000_000   # target pairwise-matrix size per chunk


@dataclass(frozen=True)
class PermutationResult:
    """Permutation p-value and the null-distribution summary behind it.

    ``draws`` is n! in exhaustive mode, the replicate count otherwise.
    ``exceed_count`` is how many draws met the tail criterion; the
    sampled p is (1 + exceed_count)/(draws + 1) so that it can never be
    exactly zero, the exhaustive p is exceed_count/draws exactly.
    """

    p: float
    s_observed: int
    sidedness: str
    method: str
    draws: int
    exceed_count: int
    null_mean: float
    null_sd: float
    seed: int | None = None


def _row_scores(rows: np.ndarray, rule: LrdRule) -> np.ndarray:
    """Trend score of each row of an (m, n) matrix of value orderings."""
    n = rows.shape[1]
    i, j = np.triu_indices(n, k=1)
    deltas = rows[:, j] - rows[:, i]
    if rule.direction == "symmetric":
        hit = _exceeds(np.abs(deltas), rule.d, rule.boundary)
        return (np.sign(deltas) * hit).sum(axis=1).astype(np.int64)
    if rule.direction == "positive_only":
        up = (deltas > 0) & _exceeds(deltas, rule.d, rule.boundary)
        down = deltas < 0
    else:
        up = deltas > 0
        down = (deltas < 0) & _exceeds(-deltas, rule.d, rule.boundary)
    return (up.sum(axis=1) - down.sum(axis=1)).astype(np.int64)


def _rows_per_chunk(n: int) -> int:
    pairs = n * (n - 1) // 2
    return max(1, min(4096, _CHUNK_ELEMENTS // pairs))


def _tail_hits(null_s: np.ndarray, s_obs: int, sidedness: str) -> int:
    if sidedness == "two_sided":
        return int(np.sum(np.abs(null_s) >= abs(s_obs)))
    if sidedness == "greater":
        return int(np.sum(null_s >= s_obs))
    return int(np.sum(null_s <= s_obs))


def permutation_test(
    series: Series,
    rule: LrdRule | None = None,
    replicates: int = 10000,
    seed: int = 0,
    sidedness: str = "two_sided",
    method: str = "auto",
) -> PermutationResult:
    """Permutation test of no trend, resampling time order.

    Args:
        series: Observations in time order.
        rule: Comparison policy (any direction); default d = 0.
        replicates: Number of sampled permutations (ignored in
            exhaustive mode); at least 1.
        seed: Base seed for the chunked draw streams.
        sidedness: "two_sided", "greater", or "less".
        method: "auto" enumerates all orderings for n <= 8 and samples
            otherwise; "exhaustive" and "sampled" force the choice
            (exhaustive refuses n > 8).

    Returns:
        PermutationResult. The sampled estimator adds one to numerator
        and denominator, so p is in (0, 1]; the exhaustive p is exact.
    """
    if rule is None:
        rule = LrdRule(d=0.0)
    if sidedness not in SIDEDNESS:
        raise InputError(f"sidedness must be one of {SIDEDNESS}, got {sidedness!r}")
    if method not in ("auto", "exhaustive", "sampled"):
        raise InputError(f"unknown method {method!r}")
    if replicates < 1:
        raise InputError(f"replicates must be >= 1, got {replicates}")

    n = len(series)
    s_obs = s_extended(series, rule)
    if method == "auto":
        method = "exhaustive" if n <= EXHAUSTIVE_MAX_N else "sampled"
    if method == "exhaustive" and n > EXHAUSTIVE_MAX_N:
        raise InputError(
            f"exhaustive enumeration supports n <= {EXHAUSTIVE_MAX_N}, got {n}"
        )

    if method == "exhaustive":
        rows = np.array(list(itertools.permutations(series.values)))
        null_s = _row_scores(rows, rule)
        hits = _tail_hits(null_s, s_obs, sidedness)
        draws = len(null_s)
        p = hits / draws
    else:
        chunk = _rows_per_chunk(n)
        parts = []
        done = 0
        idx = 0
        while done < replicates:
            m = min(chunk, replicates - done)
            rng = generator_for(seed, "perm", idx)
            rows = rng.permuted(np.tile(series.values, (m, 1)), axis=1)
            parts.append(_row_scores(rows, rule))
            done += m
            idx += 1
        null_s = np.concatenate(parts)
        hits = _tail_hits(null_s, s_obs, sidedness)
        draws = replicates
        p = (1 + hits) / (draws + 1)

    return PermutationResult(
        p=float(p),
        s_observed=s_obs,
        sidedness=sidedness,
        method=method,
        draws=draws,
        exceed_count=hits,
        null_mean=float(null_s.mean()),
        null_sd=float(null_s.std(ddof=0)),
        seed=None if method == "exhaustive" else seed,
    )


def regional_permutation_test(
    data: RegionalDataset,
    policy: LrdPolicy | None = None,
    replicates: int = 10000,
    seed: int = 0,
    sidedness: str = "two_sided",
) -> PermutationResult:
    """Permutation test for the aggregate score across groups.

    Each group's values are permuted against its own time grid,
    independently of the others; the per-group scores are summed to give
    each null draw. This grouped scheme is this package's extension (see
    the module docstring).
    """
    if policy is None:
        policy = LrdPolicy()
    if sidedness not in SIDEDNESS:
        raise InputError(f"sidedness must be one of {SIDEDNESS}, got {sidedness!r}")
    if replicates < 1:
        raise InputError(f"replicates must be >= 1, got {replicates}")

    rules = {
        label: policy.rule_for(label, series)
        for label, series in data.groups.items()
    }
    s_obs = sum(s_extended(series, rules[label]) for label, series in data.groups.items())

    n = data.periods
    chunk = _rows_per_chunk(n)
    totals = []
    done = 0
    idx = 0
    while done < replicates:
        m = min(chunk, replicates - done)
        total = np.zeros(m, dtype=np.int64)
        for label, series in data.groups.items():
            rng = generator_for(seed, "regional", label, idx)
            rows = rng.permuted(np.tile(series.values, (m, 1)), axis=1)
            total += _row_scores(rows, rules[label])
        totals.append(total)
        done += m
        idx += 1
    null_s = np.concatenate(totals)
    hits = _tail_hits(null_s, s_obs, sidedness)
    p = (1 + hits) / (replicates + 1)

    return PermutationResult(
        p=float(p),
        s_observed=int(s_obs),
        sidedness=sidedness,
        method="sampled",
        draws=replicates,
        exceed_count=hits,
        null_mean=float(null_s.mean()),
        null_sd=float(null_s.std(ddof=0)),
        seed=seed,
    )
