"""Multi-armed bandits over hard-clause literals and soft clauses.

Arm values start at 1 and pull counts at 0.  Selection uses an upper
confidence bound ``V + lam * sqrt(ln(N) / (t + 1))`` where N counts the
local optima of the matching kind.  Rewards are applied to the latest
``d`` pulled arms with geometric discounting (newest arm undiscounted).

Selection never mutates the bandit; callers record pulls explicitly, so
queries stay idempotent for tests and ablations.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .formula import Instance
from .rng import Rng
from .state import compiled


def reward_hard(h: int, h_prev: int, variant: str = "eq3") -> float:
    """Relative drop in falsified hard clauses between consecutive
    infeasible local optima.

    ``eq3`` divides by the previous count, ``eq3p1`` by previous + 1.
    """
    if variant == "eq3":
        return (h_prev - h) / h_prev
    if variant == "eq3p1":
        return (h_prev - h) / (h_prev + 1.0)
    raise ValueError(f"unknown hard reward variant {variant!r}")


def reward_soft(cost: int, cost_prev: int, cost_best: int) -> float:
    """Cost improvement between feasible optima, scaled by closeness of the
    previous optimum to the best solution found so far."""
    return (cost_prev - cost) / (cost_prev - cost_best + 1.0)


class Bandit:
    """Estimated values, pull counts, and a bounded pull history."""

    def __init__(self, n_arms: int, d: int = 20):
        if d < 1:
            raise ValueError("history depth d must be >= 1")
        self.n_arms = n_arms
        self.d = d
        self.V = np.ones(max(n_arms, 1), dtype=np.float64)
        self.t = np.zeros(max(n_arms, 1), dtype=np.int64)
        self.hist = np.zeros(d, dtype=np.int64)
        self.hmeta = np.zeros(2, dtype=np.int64)  # [next write slot, fill count]
        self.n_optima = 0

    def ucb(self, arm: int, lam: float = 1.0) -> float:
        """Upper confidence bound of one arm; requires n_optima >= 1."""
        return float(_kernels.ucb(self.V, self.t, arm, self.n_optima, lam))

    def record_pull(self, arm: int) -> None:
        _kernels.record_pull(self.t, self.hist, self.hmeta, arm)

    def apply_delayed_reward(self, r: float, gamma: float) -> None:
        _kernels.apply_delayed(self.V, self.hist, self.hmeta, r, gamma)

    @property
    def history(self) -> list[int]:
        """Pulled arms, oldest first."""
        head, count = int(self.hmeta[0]), int(self.hmeta[1])
        d = self.d
        return [int(self.hist[(head - count + j) % d]) for j in range(count)]


class HardBandit(Bandit):
    """One arm per literal occurrence in a hard clause.

    Arms are flat positions into the hard prefix of the compiled literal
    array; ``arm_info`` maps back to (clause index, position, literal).
    """

    def __init__(self, inst: Instance, d: int = 20):
        self.ci = compiled(inst)
        super().__init__(self.ci.hard_arm_count, d)

    def pick_arm(self, clause_id: int, lam: float = 1.0) -> int:
        """Arm with the highest UCB in one falsified hard clause; ties go to
        the earliest position.  Does not record the pull."""
        if not 0 <= clause_id < self.ci.nh:
            raise ValueError("not a hard clause id")
        return int(
            _kernels.pick_hard_arm(
                clause_id, self.ci.cl_start, self.V, self.t, self.n_optima, lam
            )
        )

    def arm_info(self, arm: int) -> tuple[int, int, int]:
        c = int(np.searchsorted(self.ci.cl_start, arm, side="right") - 1)
        pos = arm - int(self.ci.cl_start[c])
        return c, pos, int(self.ci.lit_flat[arm])


class SoftBandit(Bandit):
    """One arm per soft clause, addressed by index into ``inst.soft``."""

    def __init__(self, n_soft: int, d: int = 20):
        super().__init__(n_soft, d)

    def pick_arm(
        self,
        candidates,
        arm_num: int,
        lam: float,
        rng: Rng,
        scan_all: bool = False,
    ) -> int:
        """Sample ``arm_num`` falsified soft clauses with replacement and
        return the sampled arm with the highest UCB (earliest drawn on
        ties); with ``scan_all`` every candidate is considered instead.
        Does not record the pull."""
        cand = np.asarray(list(candidates), dtype=np.int32)
        if cand.size == 0:
            raise ValueError("no falsified soft clauses to pick from")
        return int(
            _kernels.pick_soft_arm(
                rng.state, cand, cand.size, 0, arm_num,
                self.V, self.t, self.n_optima, lam, 1 if scan_all else 0,
            )
        )
