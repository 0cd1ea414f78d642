"""Anytime local search for (weighted) partial MaxSAT with bandit-guided
escapes from local optima, plus WCNF parsing, an exact small-instance
solver, and a benchmark harness."""

from .bandit import Bandit, HardBandit, SoftBandit, reward_hard, reward_soft
from .decimation import Residual, decimate, greedy_binary_literal
from .formula import (
    Clause,
    Instance,
    WcnfError,
    evaluate_cost,
    falsified_hard_count,
    load_wcnf,
    parse_wcnf,
    serialize_wcnf,
)
from .harness import (
    BenchReport,
    RunRecord,
    generate_instance,
    load_best_known,
    mse_score,
    report_scores,
    run_suite,
    wins_and_times,
    write_csv,
    write_json,
)
from .oracle import HARD_UNSAT, OPTIMAL, ExactResult, exact_solve
from .rng import Rng
from .search import (
    FEASIBLE,
    NO_FEASIBLE,
    Params,
    RunResult,
    best_score_var_in_clause,
    bms_pick,
    random_falsified_hard,
    solve,
    update_clause_weights,
)
from .state import SearchState

__version__ = "0.1.0"

__all__ = [
    "Bandit",
    "BenchReport",
    "Clause",
    "ExactResult",
    "FEASIBLE",
    "HARD_UNSAT",
    "HardBandit",
    "Instance",
    "NO_FEASIBLE",
    "OPTIMAL",
    "Params",
    "Residual",
    "Rng",
    "RunRecord",
    "RunResult",
    "SearchState",
    "SoftBandit",
    "WcnfError",
    "best_score_var_in_clause",
    "bms_pick",
    "decimate",
    "evaluate_cost",
    "exact_solve",
    "falsified_hard_count",
    "generate_instance",
    "greedy_binary_literal",
    "load_best_known",
    "load_wcnf",
    "mse_score",
    "parse_wcnf",
    "random_falsified_hard",
    "report_scores",
    "reward_hard",
    "reward_soft",
    "run_suite",
    "serialize_wcnf",
    "solve",
    "update_clause_weights",
    "wins_and_times",
    "write_csv",
    "write_json",
]
