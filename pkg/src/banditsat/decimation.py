"""Initial assignment construction by clause-driven decimation.

One variable is fixed per iteration, drawn from the first non-empty pool
in priority order: hard unit, soft unit, hard binary, soft binary, then a
random unassigned variable with a random value.  Unit clauses are
satisfied outright; in binary clauses the literal whose satisfaction
covers the larger total weight of still-open soft clauses is preferred
(ties uniform at random).  After every assignment the residual formula is
simplified: clauses with a satisfied literal leave play, falsified
literals shrink their clauses, and clauses shrinking to two or one live
literals enter the matching pools.

Conflicting hard clauses never abort construction; an emptied clause is
counted and the local search later repairs the infeasibility.
"""

from __future__ import annotations

import numpy as np

from .formula import Instance
from .rng import Rng


class Residual:
    """Clause status tracking under a growing partial assignment.

    Clause ids are global with hard clauses first (matching the search
    engine); a clause is open while it has no satisfied literal and at
    least one live (unassigned) literal.
    """

    def __init__(self, inst: Instance):
        self.inst = inst
        self.nh = inst.num_hard
        clauses = inst.hard + inst.soft
        self.lits = [c.lits for c in clauses]
        self.weight = [0 if c.is_hard else c.weight for c in clauses]
        self.live = [len(c.lits) for c in clauses]
        self.satisfied = bytearray(len(clauses))
        self.assigned: list[int] = [-1] * (inst.num_vars + 1)
        self.empty_hard = 0
        self.empty_soft = 0

        self.occ: dict[int, list[int]] = {}
        for cid, lits in enumerate(self.lits):
            for lit in lits:
                self.occ.setdefault(lit, []).append(cid)

        # pools may hold stale entries; draws validate lazily
        self.unit_hard: list[int] = []
        self.unit_soft: list[int] = []
        self.binary_hard: list[int] = []
        self.binary_soft: list[int] = []
        for cid, lits in enumerate(self.lits):
            self._pool_in(cid, len(lits))

        # unassigned variables as an indexable set for uniform draws
        self.un_arr = list(range(1, inst.num_vars + 1))
        self.un_pos = list(range(-1, inst.num_vars))

    def _pool_in(self, cid: int, length: int) -> None:
        if length == 1:
            (self.unit_hard if cid < self.nh else self.unit_soft).append(cid)
        elif length == 2:
            (self.binary_hard if cid < self.nh else self.binary_soft).append(cid)

    @property
    def num_unassigned(self) -> int:
        return len(self.un_arr)

    def is_open(self, cid: int) -> bool:
        return not self.satisfied[cid] and self.live[cid] > 0

    def live_lits(self, cid: int) -> list[int]:
        return [lit for lit in self.lits[cid] if self.assigned[abs(lit)] == -1]

    def soft_benefit(self, lit: int) -> int:
        """Total weight of open soft clauses containing lit."""
        nh = self.nh
        return sum(
            self.weight[c]
            for c in self.occ.get(lit, ())
            if c >= nh and self.is_open(c)
        )

    def draw(self, pool: list[int], length: int, rng: Rng) -> int | None:
        """Uniform draw of an open clause of the given live length; stale
        entries are discarded on the way.  The drawn clause is removed
        (its caller satisfies it)."""
        while pool:
            i = rng.below(len(pool))
            cid = pool[i]
            pool[i] = pool[-1]
            pool.pop()
            if not self.satisfied[cid] and self.live[cid] == length:
                return cid
        return None

    def assign(self, v: int, value: bool) -> None:
        """Fix one variable and simplify: clauses with the satisfied
        literal close, clauses with the falsified one shrink and repool."""
        if self.assigned[v] != -1:
            raise ValueError(f"variable {v} already assigned")
        self.assigned[v] = 1 if value else 0
        sat_lit = v if value else -v
        for cid in self.occ.get(sat_lit, ()):
            if not self.satisfied[cid]:
                self.satisfied[cid] = 1
        for cid in self.occ.get(-sat_lit, ()):
            if self.satisfied[cid]:
                continue
            self.live[cid] -= 1
            n = self.live[cid]
            if n == 0:
                if cid < self.nh:
                    self.empty_hard += 1
                else:
                    self.empty_soft += 1
            else:
                self._pool_in(cid, n)
        # remove v from the unassigned set (swap-pop)
        p = self.un_pos[v]
        last = self.un_arr[-1]
        self.un_arr[p] = last
        self.un_pos[last] = p
        self.un_arr.pop()
        self.un_pos[v] = -1

    def draw_unassigned(self, rng: Rng) -> int:
        return self.un_arr[rng.below(len(self.un_arr))]


def greedy_binary_literal(cid: int, residual: Residual, rng: Rng) -> int:
    """Of the two live literals of an open binary clause, the one covering
    the larger open-soft weight; ties break uniformly at random."""
    lits = residual.live_lits(cid)
    assert len(lits) == 2
    b0 = residual.soft_benefit(lits[0])
    b1 = residual.soft_benefit(lits[1])
    if b0 > b1:
        return lits[0]
    if b1 > b0:
        return lits[1]
    return lits[rng.below(2)]


def decimate(
    inst: Instance,
    rng: Rng,
    no_binary: bool = False,
    trace: list | None = None,
) -> np.ndarray:
    """Build a complete initial assignment (uint8 array, slot 0 unused).

    ``no_binary`` drops the binary pools from the priority order.  When a
    ``trace`` list is supplied, each decision is appended as
    (category, clause_id or None, variable, value).
    """
    res = Residual(inst)
    while res.num_unassigned:
        lit = None
        cid = res.draw(res.unit_hard, 1, rng)
        kind = "hard_unit"
        if cid is None:
            cid = res.draw(res.unit_soft, 1, rng)
            kind = "soft_unit"
        if cid is not None:
            lit = res.live_lits(cid)[0]
        elif not no_binary:
            cid = res.draw(res.binary_hard, 2, rng)
            kind = "hard_binary"
            if cid is None:
                cid = res.draw(res.binary_soft, 2, rng)
                kind = "soft_binary"
            if cid is not None:
                lit = greedy_binary_literal(cid, res, rng)
        if lit is not None:
            v, value = abs(lit), lit > 0
        else:
            cid = None
            kind = "random"
            v = res.draw_unassigned(rng)
            value = bool(rng.bit())
        if trace is not None:
            trace.append((kind, cid, v, value))
        res.assign(v, value)

    out = np.zeros(inst.num_vars + 1, dtype=np.uint8)
    for v in range(1, inst.num_vars + 1):
        out[v] = res.assigned[v]
    return out
