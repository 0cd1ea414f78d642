"""Exact solver for small instances by exhaustive assignment enumeration.

Assignment i encodes variable v as bit (v - 1) of i; enumeration runs in
vectorized blocks so 2^25 assignments stay in the seconds range.  This is
the ground truth the search results are checked against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formula import Instance

OPTIMAL = "optimal"
HARD_UNSAT = "hard_unsat"

_INFEASIBLE = 1 << 62
_BLOCK_BITS = 20


@dataclass
class ExactResult:
    status: str
    opt_cost: int | None
    assignment: np.ndarray | None  # uint8, slot 0 unused


def exact_solve(inst: Instance, var_limit: int = 25) -> ExactResult:
    """Minimum-cost hard-feasible assignment, or hard_unsat if none exists.

    Ties resolve to the numerically smallest assignment index, so the
    result is deterministic.
    """
    n = inst.num_vars
    if n > var_limit:
        raise ValueError(f"instance has {n} variables, exceeding var_limit={var_limit}")
    total = 1 << n
    block = min(total, 1 << _BLOCK_BITS)

    best_cost = None
    best_idx = -1
    for base in range(0, total, block):
        idx = np.arange(base, min(base + block, total), dtype=np.int64)
        cost = np.zeros(idx.shape[0], dtype=np.int64)
        hard_bad = np.zeros(idx.shape[0], dtype=bool)
        for c in inst.hard:
            hard_bad |= _falsified(c.lits, idx)
        for c in inst.soft:
            cost += c.weight * _falsified(c.lits, idx)
        cost[hard_bad] = _INFEASIBLE
        i = int(np.argmin(cost))
        if cost[i] < _INFEASIBLE and (best_cost is None or cost[i] < best_cost):
            best_cost = int(cost[i])
            best_idx = base + i
            if best_cost == 0:
                break

    if best_cost is None:
        return ExactResult(HARD_UNSAT, None, None)
    assignment = np.zeros(n + 1, dtype=np.uint8)
    for v in range(1, n + 1):
        assignment[v] = (best_idx >> (v - 1)) & 1
    return ExactResult(OPTIMAL, best_cost, assignment)


def _falsified(lits, idx: np.ndarray) -> np.ndarray:
    out = np.ones(idx.shape[0], dtype=bool)
    for lit in lits:
        bit = (idx >> (abs(lit) - 1)) & 1
        out &= (bit == 0) if lit > 0 else (bit == 1)
    return out
