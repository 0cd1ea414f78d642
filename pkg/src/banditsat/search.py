"""Anytime local search with bandit-guided escapes from local optima.

Each step flips one variable.  While positive-score variables exist the
flip is chosen greedily by best-of-k sampling; at a local optimum the
dynamic clause weights grow first, then the escape flip comes from a
random falsified hard clause (literal chosen by the hard bandit until a
feasible solution exists, by score afterwards) or, when feasible, from a
soft clause chosen by the soft bandit.  Bandit values are updated with
discounted delayed rewards measured between consecutive local optima of
the matching kind.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bandit import HardBandit, SoftBandit
from .decimation import decimate
from .formula import Clause, Instance
from .rng import Rng
from .state import SearchState

FEASIBLE = "feasible"
NO_FEASIBLE = "no_feasible_found"

_CHUNK = 1024  # flips between wall-clock checks


@dataclass
class Params:
    """Solver tunables and ablation switches."""

    k: int = 15                 # best-of-k greedy samples
    d: int = 20                 # reward delay depth
    gamma: float = 0.9          # reward discount factor
    arm_num: int = 20           # soft-arm samples per escape
    lam: float = 1.0            # exploration bias
    cutoff: float = 300.0       # wall-clock limit, seconds
    max_steps: int | None = None
    seed: int = 1
    no_delay: bool = False      # forces d = 1
    mixed_training: bool = False
    no_binary: bool = False
    no_sample: bool = False     # soft escapes scan all falsified soft clauses
    first_feasible: bool = False
    hard_reward_variant: str = "eq3"
    hard_weight_inc: int = 1
    soft_weight_inc: int = 1
    soft_cap_factor: float = 10.0

    def __post_init__(self):
        if self.k < 1 or self.d < 1 or self.arm_num < 1:
            raise ValueError("k, d and arm_num must be >= 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if self.lam < 0.0:
            raise ValueError("lambda must be >= 0")
        if self.hard_reward_variant not in ("eq3", "eq3p1"):
            raise ValueError("hard_reward_variant must be 'eq3' or 'eq3p1'")

    @property
    def effective_d(self) -> int:
        return 1 if self.no_delay else self.d


@dataclass
class RunResult:
    status: str
    best_cost: int | None
    best_assignment: np.ndarray | None
    proved_optimal: bool
    trace: list[tuple[float, int, int]]  # (elapsed s, step, best cost)
    steps: int
    n_hard_optima: int
    n_soft_optima: int
    time_to_first_feasible: float | None
    elapsed: float
    hard_bandit: HardBandit = field(repr=False, default=None)
    soft_bandit: SoftBandit = field(repr=False, default=None)


def solve(inst: Instance, params: Params | None = None, on_improvement=None) -> RunResult:
    """Run the search until cutoff or max_steps; anytime best tracking.

    ``on_improvement(cost, step, elapsed)`` fires for every new best
    feasible solution.  A feasible zero-cost solution ends the run early
    (it is provably optimal).
    """
    p = params or Params()
    master = Rng(p.seed)
    decim_rng = master.spawn()
    loop_rng = master.spawn()

    t_start = time.monotonic()
    assign = decimate(inst, decim_rng, no_binary=p.no_binary)
    state = SearchState(inst, assign, soft_cap_factor=p.soft_cap_factor)
    ci = state.ci
    hb = HardBandit(inst, d=p.effective_d)
    sb = SoftBandit(inst.num_soft, d=p.effective_d)

    run_meta = np.zeros(7, dtype=np.int64)
    run_meta[_kernels.RM_H_PREV] = -1
    run_meta[_kernels.RM_COST_PREV] = state.cost
    best_assign = np.zeros_like(state.assign)

    trace: list[tuple[float, int, int]] = []
    t_first: float | None = None
    proved = False

    while True:
        steps_done = int(run_meta[_kernels.RM_STEPS])
        budget = _CHUNK
        if p.max_steps is not None:
            budget = max(0, min(budget, p.max_steps - steps_done))
        code, _ = _kernels.run_chunk(
            budget,
            ci.lit_flat, ci.cl_start, ci.nh, ci.weight, ci.occ_flat,
            ci.occ_start, state.cap,
            state.assign, state.dyn_w, state.sat_cnt, state.crit,
            state._score, state.gv_arr, state.gv_pos,
            state.fh_arr, state.fh_pos, state.fs_arr, state.fs_pos, state.meta,
            hb.V, hb.t, hb.hist, hb.hmeta, sb.V, sb.t, sb.hist, sb.hmeta,
            run_meta, loop_rng.state, best_assign,
            p.k, p.arm_num, p.lam, p.gamma,
            p.hard_weight_inc, p.soft_weight_inc,
            1 if p.mixed_training else 0,
            1 if p.no_sample else 0,
            1 if p.hard_reward_variant == "eq3p1" else 0,
        )
        now = time.monotonic() - t_start
        if code in (_kernels.CH_IMPROVED, _kernels.CH_OPTIMUM):
            cost = int(run_meta[_kernels.RM_BEST_COST])
            step = int(run_meta[_kernels.RM_STEPS])
            if t_first is None:
                t_first = now
            trace.append((now, step, cost))
            if on_improvement is not None:
                on_improvement(cost, step, now)
            if code == _kernels.CH_OPTIMUM:
                proved = True
                break
            if p.first_feasible:
                break
        else:
            if p.max_steps is not None and run_meta[_kernels.RM_STEPS] >= p.max_steps:
                break
        if now >= p.cutoff:
            break

    state.step = int(run_meta[_kernels.RM_STEPS])
    hb.n_optima = int(run_meta[_kernels.RM_NH])
    sb.n_optima = int(run_meta[_kernels.RM_NS])
    feasible = bool(run_meta[_kernels.RM_BEST_FEAS])
    return RunResult(
        status=FEASIBLE if feasible else NO_FEASIBLE,
        best_cost=int(run_meta[_kernels.RM_BEST_COST]) if feasible else None,
        best_assignment=best_assign.copy() if feasible else None,
        proved_optimal=proved,
        trace=trace,
        steps=int(run_meta[_kernels.RM_STEPS]),
        n_hard_optima=int(run_meta[_kernels.RM_NH]),
        n_soft_optima=int(run_meta[_kernels.RM_NS]),
        time_to_first_feasible=t_first,
        elapsed=time.monotonic() - t_start,
        hard_bandit=hb,
        soft_bandit=sb,
    )


# ---------------------------------------------------------------------------
# the individual selection / weighting moves, usable standalone

def bms_pick(state: SearchState, k: int, rng: Rng) -> int:
    """Best of k samples (with replacement) from the positive-score set;
    ties go to the earliest-drawn sample."""
    size = int(state.meta[_kernels.GV_SIZE])
    if size == 0:
        raise ValueError("no positive-score variables")
    return int(_kernels.bms_pick(rng.state, k, state.gv_arr, size, state._score))


def update_clause_weights(state: SearchState, params: Params | None = None) -> None:
    """Local-optimum weighting: falsified hard clauses grow when any exist,
    otherwise falsified soft clauses grow up to their cap."""
    p = params or Params()
    state._bump_weights(p.hard_weight_inc, p.soft_weight_inc)


def best_score_var_in_clause(state: SearchState, clause) -> int:
    """Variable with the highest score among those in the clause; ties go
    to the lowest variable index.  ``clause`` is a Clause or literal list."""
    lits = clause.lits if isinstance(clause, Clause) else tuple(clause)
    best_v = abs(lits[0])
    best_s = state.score(best_v)
    for lit in lits[1:]:
        v = abs(lit)
        s = state.score(v)
        if s > best_s or (s == best_s and v < best_v):
            best_s, best_v = s, v
    return best_v


def random_falsified_hard(state: SearchState, rng: Rng) -> int:
    """Uniform draw from the falsified hard clauses (hard clause index)."""
    size = int(state.meta[_kernels.FH_SIZE])
    if size == 0:
        raise ValueError("no falsified hard clauses")
    return int(state.fh_arr[rng.below(size)])
