"""Search drivers: binary DFS, geometric restarts, and LDS.

The search tree is binary: the left child asserts x = d, the right
child refutes it (x != d).  A backtrack is counted each time a wipeout
forces a subtree to be abandoned.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from .engine import CONSISTENT, WIPEOUT, Model
from .heuristics import Heuristic

SAT = "sat"
UNSAT = "unsat"
TIMEOUT = "timeout"


@dataclass
class SearchStats:
    status: str = UNSAT
    backtracks: int = 0
    time_ms: float = 0.0
    restarts: int = 0
    max_discrepancy: int = 0
    seed: Optional[int] = None
    solution: Optional[dict[str, int]] = None


class _Budget:
    def __init__(self, timeout: Optional[float], backtrack_limit: Optional[int]):
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.backtrack_limit = backtrack_limit
        self.backtracks = 0
        self.timed_out = False
        self.cut_off = False

    def note_backtrack(self) -> None:
        self.backtracks += 1
        if (
            self.backtrack_limit is not None
            and self.backtracks >= self.backtrack_limit
        ):
            self.cut_off = True

    def exhausted(self) -> bool:
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.timed_out = True
        return self.timed_out or self.cut_off


def _observe(heuristic: Heuristic, model, var, value, before, status) -> None:
    if status == WIPEOUT:
        heuristic.observe(var, value, 1.0)
    else:
        after = model.log_search_space()
        heuristic.observe(var, value, 1.0 - math.exp(after - before))


def _dfs(
    model: Model,
    heuristic: Heuristic,
    budget: _Budget,
    randomized: bool,
) -> Optional[str]:
    """Returns SAT on success, None on exhaustion, TIMEOUT/cutoff via budget."""
    if budget.exhausted():
        return TIMEOUT
    pick = heuristic.choose(model, randomized)
    if pick is None:
        return SAT
    var, value = pick
    level = model.level
    before = model.log_search_space()
    status = model.push_decision("assign", var, value)
    _observe(heuristic, model, var, value, before, status)
    if status == CONSISTENT:
        result = _dfs(model, heuristic, budget, randomized)
        if result is not None:
            return result
    else:
        budget.note_backtrack()
    model.backtrack_to(level)
    if budget.exhausted():
        return TIMEOUT
    status = model.push_decision("refute", var, value)
    if status == CONSISTENT:
        result = _dfs(model, heuristic, budget, randomized)
        if result is not None:
            return result
    else:
        budget.note_backtrack()
    model.backtrack_to(level)
    return None


def dfs(
    model: Model,
    heuristic: Heuristic,
    timeout: Optional[float] = None,
    backtrack_limit: Optional[int] = None,
) -> SearchStats:
    """Depth-first search; left branch x=d, right branch x!=d."""
    stats = SearchStats()
    start = time.perf_counter()
    budget = _Budget(timeout, backtrack_limit)
    root = model.level
    if model.propagate() == WIPEOUT:
        stats.status = UNSAT
    else:
        outcome = _dfs(model, heuristic, budget, randomized=False)
        if outcome == SAT:
            stats.status = SAT
            stats.solution = model.solution()
        elif budget.timed_out or budget.cut_off:
            stats.status = TIMEOUT
        else:
            stats.status = UNSAT
        if stats.status != SAT:
            model.backtrack_to(root)
    stats.backtracks = budget.backtracks
    stats.time_ms = (time.perf_counter() - start) * 1000.0
    return stats


def restart_search(
    model: Model,
    heuristic: Heuristic,
    scale: int = 100,
    timeout: Optional[float] = None,
    max_restarts: Optional[int] = None,
) -> SearchStats:
    """Geometric restarts: run i is cut off after scale * 2^i backtracks.

    The heuristic randomizes between its two best choices; learned
    state persists across runs.  A run that completes without hitting
    its cutoff proves unsat; otherwise only sat or timeout can be
    concluded.
    """
    stats = SearchStats()
    start = time.perf_counter()
    deadline = None if timeout is None else time.monotonic() + timeout
    root = model.level
    if model.propagate() == WIPEOUT:
        stats.status = UNSAT
        stats.time_ms = (time.perf_counter() - start) * 1000.0
        return stats
    run = 0
    while True:
        remaining = None if deadline is None else deadline - time.monotonic()
        if remaining is not None and remaining <= 0:
            stats.status = TIMEOUT
            break
        cutoff = scale * (2 ** run)
        budget = _Budget(remaining, cutoff)
        outcome = _dfs(model, heuristic, budget, randomized=True)
        stats.backtracks += budget.backtracks
        if outcome == SAT:
            stats.status = SAT
            stats.solution = model.solution()
            break
        if budget.timed_out:
            stats.status = TIMEOUT
            break
        if outcome is None and not budget.cut_off:
            stats.status = UNSAT  # exhausted under the cutoff: real proof
            break
        model.backtrack_to(root)
        heuristic.on_restart()
        run += 1
        stats.restarts = run
        if max_restarts is not None and run >= max_restarts:
            stats.status = TIMEOUT
            break
    if stats.status != SAT:
        model.backtrack_to(root)
    stats.time_ms = (time.perf_counter() - start) * 1000.0
    return stats


def _lds_wave(
    model: Model,
    heuristic: Heuristic,
    budget: _Budget,
    remaining_low: int,
    remaining_high: int,
) -> Optional[str]:
    """Explore branches whose total discrepancy count t satisfies
    remaining_low <= t <= remaining_high (counts relative to this node)."""
    if budget.exhausted():
        return TIMEOUT
    pick = heuristic.choose(model)
    if pick is None:
        return SAT if remaining_low == 0 else None
    var, value = pick
    level = model.level
    # left branch: no discrepancy spent
    before = model.log_search_space()
    status = model.push_decision("assign", var, value)
    _observe(heuristic, model, var, value, before, status)
    if status == CONSISTENT:
        result = _lds_wave(
            model, heuristic, budget, remaining_low, remaining_high
        )
        if result is not None:
            return result
    else:
        budget.note_backtrack()
    model.backtrack_to(level)
    if budget.exhausted():
        return TIMEOUT
    # right branch: one discrepancy
    if remaining_high == 0:
        return None
    status = model.push_decision("refute", var, value)
    if status == CONSISTENT:
        result = _lds_wave(
            model,
            heuristic,
            budget,
            max(0, remaining_low - 1),
            remaining_high - 1,
        )
        if result is not None:
            return result
    else:
        budget.note_backtrack()
    model.backtrack_to(level)
    return None


def lds(
    model: Model,
    heuristic: Heuristic,
    skip: int = 1,
    timeout: Optional[float] = None,
    backtrack_limit: Optional[int] = None,
) -> SearchStats:
    """Limited discrepancy search in waves of ``skip`` discrepancies.

    Wave w visits branches with discrepancy count in
    [w*skip, (w+1)*skip - 1]; waves continue until a solution, proof of
    exhaustion, or timeout.
    """
    stats = SearchStats()
    start = time.perf_counter()
    deadline = None if timeout is None else time.monotonic() + timeout
    root = model.level
    if model.propagate() == WIPEOUT:
        stats.status = UNSAT
        stats.time_ms = (time.perf_counter() - start) * 1000.0
        return stats
    max_disc = sum(max(0, model.size(v) - 1) for v in model.variables)
    wave = 0
    stats.status = UNSAT
    while wave * skip <= max_disc:
        remaining = None if deadline is None else deadline - time.monotonic()
        if remaining is not None and remaining <= 0:
            stats.status = TIMEOUT
            break
        budget = _Budget(remaining, backtrack_limit)
        low = wave * skip
        high = (wave + 1) * skip - 1
        outcome = _lds_wave(model, heuristic, budget, low, high)
        stats.backtracks += budget.backtracks
        stats.max_discrepancy = high
        if outcome == SAT:
            stats.status = SAT
            stats.solution = model.solution()
            break
        model.backtrack_to(root)
        if budget.timed_out or budget.cut_off:
            stats.status = TIMEOUT
            break
        wave += 1
    stats.time_ms = (time.perf_counter() - start) * 1000.0
    return stats
