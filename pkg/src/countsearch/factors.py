"""Precomputed log-space factor tables for permanent upper bounds.

Two classical upper bounds on the permanent of a 0-1 matrix are used
throughout: the Bregman-Minc bound, a product of per-row factors
(r!)^(1/r), and the Liang-Bai bound, whose per-row factors depend on
both the row sum and the row's position in a fixed ordering.  Both are
carried as sums of logarithms so that products over hundreds of rows
cannot overflow.
"""

from __future__ import annotations

import math
from functools import lru_cache


@lru_cache(maxsize=None)
def _bm_table(n_max: int) -> tuple[float, ...]:
    # log((r!)^(1/r)) = lgamma(r+1)/r ; entry 0 is unused but kept so the
    # table can be indexed directly by row sum.
    return tuple(
        0.0 if r == 0 else math.lgamma(r + 1) / r for r in range(n_max + 1)
    )


def bm_log_factor(r: int) -> float:
    """log of the Bregman-Minc per-row factor (r!)^(1/r)."""
    if r < 0:
        raise ValueError("row sum must be nonnegative")
    if r <= 512:
        return _bm_table(512)[r]
    return math.lgamma(r + 1) / r


def lb_q(r: int, i: int) -> int:
    """Liang-Bai q value for a row with sum ``r`` at 1-based position ``i``."""
    return min((r + 1) // 2 + (r + 1) % 2, (i + 1) // 2)


def lb_log_factor(r: int, i: int) -> float:
    """log of sqrt(q * (r - q + 1)) for row sum ``r`` at position ``i``."""
    q = lb_q(r, i)
    return 0.5 * math.log(q * (r - q + 1))


def bm_log_bound(row_sums) -> float:
    """Bregman-Minc log upper bound for given row sums.

    Returns ``-inf`` when some row is empty (no assignment exists).
    """
    total = 0.0
    for r in row_sums:
        if r == 0:
            return -math.inf
        total += bm_log_factor(r)
    return total


def lb_log_bound(row_sums) -> float:
    """Liang-Bai log upper bound with rows sorted by ascending row sum.

    The bound is valid for any row ordering because the permanent is
    invariant under row permutations; ascending order empirically gives
    the tightest product.
    """
    rows = sorted(row_sums)
    total = 0.0
    for i, r in enumerate(rows, start=1):
        if r == 0:
            return -math.inf
        total += lb_log_factor(r, i)
    return total


def min_log_bound(row_sums) -> float:
    """min of the Bregman-Minc and Liang-Bai log bounds."""
    return min(bm_log_bound(row_sums), lb_log_bound(row_sums))
