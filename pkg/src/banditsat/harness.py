"""Batch evaluation: run parameter configurations over an instance
directory, aggregate wins and times, score closeness to best-known costs,
and generate random test instances.

Per-run seeds derive from the base seed and a stable hash of (instance
name, config name), so reruns reproduce exactly when step budgets are
used instead of wall-clock cutoffs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .formula import Instance, load_wcnf
from .search import FEASIBLE, Params, RunResult, solve


@dataclass
class RunRecord:
    instance: str
    config: str
    feasible: bool
    cost: int | None
    steps: int
    t_first_feasible: float | None
    t_best: float | None        # elapsed seconds at the last improvement
    steps_to_best: int | None
    elapsed: float


@dataclass
class BenchReport:
    rows: list[RunRecord]
    configs: list[str]
    skipped: list[str]

    def rows_for(self, instance: str) -> list[RunRecord]:
        return [r for r in self.rows if r.instance == instance]

    def instances(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.rows:
            seen.setdefault(r.instance, None)
        return list(seen)


def derived_seed(base_seed: int, instance_name: str, config_name: str) -> int:
    digest = hashlib.blake2b(
        f"{instance_name}|{config_name}".encode(), digest_size=8
    ).digest()
    return (base_seed ^ int.from_bytes(digest, "big")) & (2**64 - 1)


def _normalize_configs(configs) -> list[tuple[str, Params]]:
    if isinstance(configs, Mapping):
        return list(configs.items())
    out = []
    for i, c in enumerate(configs):
        if isinstance(c, tuple):
            out.append(c)
        else:
            out.append((f"config{i}", c))
    return out


def run_suite(
    directory,
    configs,
    parallelism: int = 1,
    base_seed: int = 0,
) -> BenchReport:
    """Solve every parseable WCNF file in ``directory`` once per config.

    ``configs`` is a mapping name -> Params, or a sequence of Params /
    (name, Params) pairs.  Unparseable files are recorded as skipped.
    """
    named = _normalize_configs(configs)
    paths = sorted(p for p in Path(directory).iterdir() if p.is_file())
    skipped: list[str] = []
    instances: list[tuple[str, Instance]] = []
    for path in paths:
        try:
            instances.append((path.name, load_wcnf(path)))
        except Exception:
            skipped.append(path.name)

    jobs = [
        (name, inst, cfg_name, cfg)
        for name, inst in instances
        for cfg_name, cfg in named
    ]

    def _run(job) -> RunRecord:
        name, inst, cfg_name, cfg = job
        params = replace(cfg, seed=derived_seed(base_seed, name, cfg_name))
        return _record(name, cfg_name, solve(inst, params))

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_run, jobs))
    else:
        rows = [_run(j) for j in jobs]
    return BenchReport(rows, [n for n, _ in named], skipped)


def _record(instance: str, config: str, result: RunResult) -> RunRecord:
    t_best = result.trace[-1][0] if result.trace else None
    steps_to_best = result.trace[-1][1] if result.trace else None
    return RunRecord(
        instance=instance,
        config=config,
        feasible=result.status == FEASIBLE,
        cost=result.best_cost,
        steps=result.steps,
        t_first_feasible=result.time_to_first_feasible,
        t_best=t_best,
        steps_to_best=steps_to_best,
        elapsed=result.elapsed,
    )


def mse_score(c_bks: int | None, costs: Sequence[int | None]) -> list[float]:
    """Closeness-to-best score per solver: (best + 1) / (cost + 1) in
    [0, 1], or 0 for an infeasible result.  ``best`` is the minimum of the
    best-known cost and all feasible costs; without a best-known cost the
    minimum is over the provided costs only."""
    feasible = [c for c in costs if c is not None]
    pool = feasible + ([c_bks] if c_bks is not None else [])
    if not pool:
        return [0.0 for _ in costs]
    best = min(pool)
    return [0.0 if c is None else (best + 1) / (c + 1) for c in costs]


def wins_and_times(rows: Sequence[RunRecord]) -> dict[str, tuple[int, float | None]]:
    """Per config: number of instances won and mean time-to-best over the
    winning instances.  A config wins an instance with the strictly best
    cost, or the smallest time-to-best among those tied at the best cost;
    instances where every config is infeasible have no winner."""
    configs: dict[str, None] = {}
    by_instance: dict[str, list[RunRecord]] = {}
    for r in rows:
        configs.setdefault(r.config, None)
        by_instance.setdefault(r.instance, []).append(r)

    wins: dict[str, list[float]] = {c: [] for c in configs}
    for group in by_instance.values():
        feasible = [r for r in group if r.feasible]
        if not feasible:
            continue
        best = min(r.cost for r in feasible)
        tied = [r for r in feasible if r.cost == best]
        winner = min(tied, key=lambda r: r.t_best if r.t_best is not None else math.inf)
        wins[winner.config].append(winner.t_best if winner.t_best is not None else 0.0)

    return {
        c: (len(times), (sum(times) / len(times)) if times else None)
        for c, times in wins.items()
    }


def report_scores(report: BenchReport, best_known: Mapping[str, int] | None = None) -> dict[str, float]:
    """Mean closeness score per config across the report's instances."""
    best_known = best_known or {}
    totals = {c: 0.0 for c in report.configs}
    instances = report.instances()
    for name in instances:
        group = {r.config: r for r in report.rows_for(name)}
        costs = [group[c].cost if c in group else None for c in report.configs]
        scores = mse_score(best_known.get(name), costs)
        for c, s in zip(report.configs, scores):
            totals[c] += s
    count = max(len(instances), 1)
    return {c: totals[c] / count for c in report.configs}


# ---------------------------------------------------------------------------
# persistence

_CSV_FIELDS = [
    "instance", "config", "cost", "feasible",
    "t_first_feasible", "t_best", "steps",
]


def write_csv(report: BenchReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=_CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for r in report.rows:
            writer.writerow(asdict(r))


def write_json(report: BenchReport, path) -> None:
    payload = {
        "configs": report.configs,
        "skipped": report.skipped,
        "rows": [asdict(r) for r in report.rows],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=1)


def load_best_known(path) -> dict[str, int]:
    """Best-known-costs file: one ``<instance-name> <cost>`` per line."""
    out: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, cost = line.rsplit(None, 1)
            out[name] = int(cost)
    return out


# ---------------------------------------------------------------------------
# random instance generation

def generate_instance(
    rng,
    num_vars: int,
    num_hard: int,
    num_soft: int,
    clause_len_range: tuple[int, int] = (1, 3),
    weight_range: tuple[int, int] = (1, 1),
    force_hard_sat: bool = False,
) -> Instance:
    """Random clauses with distinct variables per clause; ``rng`` is a
    ``random.Random``.  With ``force_hard_sat`` a hidden assignment is
    drawn first and every hard clause gets at least one literal true
    under it, guaranteeing hard feasibility."""
    lo, hi = clause_len_range
    if not 1 <= lo <= hi <= num_vars:
        raise ValueError("clause_len_range must fit within 1..num_vars")
    if weight_range[0] < 1:
        raise ValueError("weights must be >= 1")

    hidden = [None] + [rng.getrandbits(1) for _ in range(num_vars)]

    def make_clause(force_sat: bool) -> list[int]:
        length = rng.randint(lo, hi)
        vs = rng.sample(range(1, num_vars + 1), length)
        lits = [v if rng.getrandbits(1) else -v for v in vs]
        if force_sat and not any((l > 0) == bool(hidden[abs(l)]) for l in lits):
            i = rng.randrange(length)
            v = abs(lits[i])
            lits[i] = v if hidden[v] else -v
        return lits

    hard = [make_clause(force_hard_sat) for _ in range(num_hard)]
    soft = [
        (rng.randint(*weight_range), make_clause(False)) for _ in range(num_soft)
    ]
    return Instance.build(num_vars, hard, soft)
