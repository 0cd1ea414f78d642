"""Incremental search state: assignment, satisfaction counts, dynamic clause
weights, per-variable flip scores, and falsified-clause sets.

The state is backed by flat numpy arrays driven by the kernels in
``_kernels``; clause ids are global with hard clauses first.  Publicly,
hard and soft clauses are addressed by their index within ``inst.hard``
and ``inst.soft`` respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .formula import Instance

_UNCAPPED = 1 << 62


@dataclass
class CompiledInstance:
    """Flat-array form of an Instance, shared by all its search states."""

    num_vars: int
    nh: int
    num_clauses: int
    lit_flat: np.ndarray   # int32 signed literals, clauses concatenated
    cl_start: np.ndarray   # int64, clause c occupies lit_flat[cl_start[c]:cl_start[c+1]]
    weight: np.ndarray     # int64 original weights; 0 for hard clauses
    occ_flat: np.ndarray   # int32 clause ids grouped by literal code
    occ_start: np.ndarray  # int64 slices of occ_flat per literal code (2v / 2v+1)

    @property
    def hard_arm_count(self) -> int:
        return int(self.cl_start[self.nh])


def compiled(inst: Instance) -> CompiledInstance:
    if inst._compiled is None:
        inst._compiled = _compile(inst)
    return inst._compiled


def _compile(inst: Instance) -> CompiledInstance:
    n = inst.num_vars
    nh = inst.num_hard
    clauses = inst.hard + inst.soft
    m = len(clauses)
    total = sum(len(c.lits) for c in clauses)

    lit_flat = np.empty(total, dtype=np.int32)
    cl_start = np.zeros(m + 1, dtype=np.int64)
    weight = np.zeros(m, dtype=np.int64)
    counts = np.zeros(2 * n + 2, dtype=np.int64)

    pos = 0
    for c, clause in enumerate(clauses):
        cl_start[c] = pos
        if not clause.is_hard:
            weight[c] = clause.weight
        for lit in clause.lits:
            lit_flat[pos] = lit
            counts[_code(lit)] += 1
            pos += 1
    cl_start[m] = pos

    occ_start = np.zeros(2 * n + 3, dtype=np.int64)
    occ_start[1:] = np.cumsum(counts)
    occ_flat = np.empty(total, dtype=np.int32)
    cursor = occ_start[:-1].copy()
    for c, clause in enumerate(clauses):
        for lit in clause.lits:
            code = _code(lit)
            occ_flat[cursor[code]] = c
            cursor[code] += 1

    return CompiledInstance(n, nh, m, lit_flat, cl_start, weight, occ_flat, occ_start)


def _code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


class SearchState:
    """Assignment plus everything the local search maintains incrementally.

    ``assignment`` must have length ``num_vars + 1`` (slot 0 unused).
    Dynamic weights start at 1 for hard clauses and at the original weight
    for soft ones; ``dyn_weights`` overrides that (used by rebuild checks).
    Soft weight growth is capped at
    ``max(orig_weight, ceil(soft_cap_factor * mean original soft weight))``.
    """

    def __init__(
        self,
        inst: Instance,
        assignment,
        dyn_weights: np.ndarray | None = None,
        soft_cap_factor: float = 10.0,
    ):
        self.inst = inst
        ci = compiled(inst)
        self.ci = ci
        n, nh, m = ci.num_vars, ci.nh, ci.num_clauses
        ns = m - nh

        assign = np.asarray(assignment, dtype=np.uint8).copy()
        if assign.shape != (n + 1,):
            raise ValueError(f"assignment must have length {n + 1} (slot 0 unused)")
        self.assign = assign

        if dyn_weights is not None:
            self.dyn_w = np.asarray(dyn_weights, dtype=np.int64).copy()
        else:
            self.dyn_w = ci.weight.copy()
            self.dyn_w[:nh] = 1

        self.cap = np.full(m, _UNCAPPED, dtype=np.int64)
        if ns:
            mean_w = inst.total_soft_weight / ns
            floor_cap = math.ceil(soft_cap_factor * mean_w)
            self.cap[nh:] = np.maximum(ci.weight[nh:], floor_cap)

        self.sat_cnt = np.zeros(m, dtype=np.int32)
        self.crit = np.zeros(m, dtype=np.int32)
        self._score = np.zeros(n + 1, dtype=np.int64)
        self.gv_arr = np.zeros(max(n, 1), dtype=np.int32)
        self.gv_pos = np.zeros(n + 1, dtype=np.int32)
        self.fh_arr = np.zeros(max(nh, 1), dtype=np.int32)
        self.fh_pos = np.zeros(max(nh, 1), dtype=np.int32)
        self.fs_arr = np.zeros(max(ns, 1), dtype=np.int32)
        self.fs_pos = np.zeros(max(ns, 1), dtype=np.int32)
        self.meta = np.zeros(4, dtype=np.int64)
        self.step = 0

        _kernels.build_state(
            self.assign, ci.lit_flat, ci.cl_start, nh, ci.weight,
            self.dyn_w, self.sat_cnt, self.crit, self._score,
            self.gv_arr, self.gv_pos, self.fh_arr, self.fh_pos,
            self.fs_arr, self.fs_pos, self.meta,
        )

    # -- mutation ----------------------------------------------------------

    def flip(self, v: int) -> None:
        """Flip variable v, updating all incremental structures."""
        if not 1 <= v <= self.ci.num_vars:
            raise ValueError(f"variable {v} out of range")
        ci = self.ci
        _kernels.flip(
            v, self.assign, ci.lit_flat, ci.cl_start, ci.nh, ci.weight,
            self.dyn_w, self.sat_cnt, self.crit, ci.occ_flat, ci.occ_start,
            self._score, self.gv_arr, self.gv_pos, self.fh_arr, self.fh_pos,
            self.fs_arr, self.fs_pos, self.meta,
        )
        self.step += 1

    def _bump_weights(self, hard_inc: int = 1, soft_inc: int = 1) -> None:
        ci = self.ci
        _kernels.bump_weights(
            hard_inc, soft_inc, self.cap, ci.lit_flat, ci.cl_start,
            self.dyn_w, self._score, self.gv_arr, self.gv_pos,
            self.fh_arr, self.fs_arr, self.meta,
        )

    # -- queries -----------------------------------------------------------

    def score(self, v: int) -> int:
        """Decrease in total dynamic weight of falsified clauses if v flips."""
        return int(self._score[v])

    @property
    def cost(self) -> int:
        return int(self.meta[_kernels.COST])

    @property
    def hard_falsified_count(self) -> int:
        return int(self.meta[_kernels.FH_SIZE])

    @property
    def goodvars(self) -> set[int]:
        return set(map(int, self.gv_arr[: self.meta[_kernels.GV_SIZE]]))

    @property
    def falsified_hard(self) -> set[int]:
        return set(map(int, self.fh_arr[: self.meta[_kernels.FH_SIZE]]))

    @property
    def falsified_soft(self) -> set[int]:
        nh = self.ci.nh
        return set(int(c) - nh for c in self.fs_arr[: self.meta[_kernels.FS_SIZE]])

    @property
    def hard_sat_counts(self) -> np.ndarray:
        return self.sat_cnt[: self.ci.nh]

    @property
    def soft_sat_counts(self) -> np.ndarray:
        return self.sat_cnt[self.ci.nh :]

    @property
    def hard_dyn_weights(self) -> np.ndarray:
        return self.dyn_w[: self.ci.nh]

    @property
    def soft_dyn_weights(self) -> np.ndarray:
        return self.dyn_w[self.ci.nh :]

    @property
    def assignment(self) -> np.ndarray:
        return self.assign
