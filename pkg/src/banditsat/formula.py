"""WCNF formulas: types, DIMACS parsing/serialization, assignment evaluation.

Two WCNF dialects are supported:

* old format::

    p wcnf <num_vars> <num_clauses> <top>
    <weight> <lit> ... 0        (weight == top marks a hard clause)

* new format (MaxSAT Evaluation 2022 and later), which has no header::

    h <lit> ... 0               (hard clause)
    <weight> <lit> ... 0        (soft clause)

Comment lines start with ``c`` and may appear anywhere; blank lines are
ignored.  Parsing is line based: every clause must be terminated by ``0``
on its own line.  Duplicate literals inside a clause are dropped and
tautological clauses (containing both ``x`` and ``-x``) are removed; both
events are counted in the parse report so costs stay comparable with the
original file.

Literals are plain signed integers in DIMACS convention: ``v`` means
variable ``v`` is true, ``-v`` means it is false.  Assignments are
sequences of booleans of length ``num_vars + 1`` whose slot 0 is unused,
so that ``assignment[v]`` is the value of variable ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

# Weights and cost totals live in 64-bit integers inside the flip engine.
MAX_WEIGHT = 2**63 - 1


class WcnfError(ValueError):
    """Raised for malformed WCNF input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Clause:
    """A clause: tuple of signed literals, plus a weight for soft clauses.

    ``weight is None`` marks a hard clause (hard clauses carry no finite
    weight).  Soft clauses have weight >= 1.
    """

    lits: tuple[int, ...]
    weight: int | None = None

    @property
    def is_hard(self) -> bool:
        return self.weight is None

    def __post_init__(self):
        if not self.lits:
            raise ValueError("empty clause")
        if self.weight is not None and self.weight < 1:
            raise ValueError(f"soft clause weight must be >= 1, got {self.weight}")


@dataclass
class ParseReport:
    duplicate_literals_removed: int = 0
    tautologies_dropped: int = 0


@dataclass(eq=False)
class Instance:
    """A parsed (weighted) partial MaxSAT instance.

    ``hard`` and ``soft`` keep the clause order of the source.  Instances
    compare equal on (num_vars, hard, soft); the old-format top weight and
    the parse report are bookkeeping only.
    """

    num_vars: int
    hard: tuple[Clause, ...]
    soft: tuple[Clause, ...]
    top_weight: int | None = None
    report: ParseReport = field(default_factory=ParseReport)

    def __post_init__(self):
        self._compiled = None
        for c in self.hard:
            if not c.is_hard:
                raise ValueError("weighted clause in hard list")
        for c in self.soft:
            if c.is_hard:
                raise ValueError("hard clause in soft list")
        for c in self.hard + self.soft:
            for lit in c.lits:
                if not 1 <= abs(lit) <= self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")
        if self.total_soft_weight > MAX_WEIGHT:
            raise ValueError("total soft weight exceeds 64-bit range")

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.num_vars, self.hard, self.soft) == (
            other.num_vars,
            other.hard,
            other.soft,
        )

    @property
    def num_hard(self) -> int:
        return len(self.hard)

    @property
    def num_soft(self) -> int:
        return len(self.soft)

    @property
    def total_soft_weight(self) -> int:
        return sum(c.weight for c in self.soft)

    @classmethod
    def build(
        cls,
        num_vars: int,
        hard: Iterable[Sequence[int]] = (),
        soft: Iterable[tuple[int, Sequence[int]]] = (),
    ) -> "Instance":
        """Construct an instance from raw literal lists, normalizing clauses.

        ``soft`` takes (weight, literals) pairs.  Duplicate literals are
        dropped and tautologies removed, mirroring the parser.
        """
        report = ParseReport()
        hard_clauses = []
        for lits in hard:
            norm = _normalize_lits(lits, report)
            if norm is not None:
                hard_clauses.append(Clause(norm))
        soft_clauses = []
        for w, lits in soft:
            norm = _normalize_lits(lits, report)
            if norm is not None:
                soft_clauses.append(Clause(norm, w))
        return cls(num_vars, tuple(hard_clauses), tuple(soft_clauses), report=report)

    def occurrences(self) -> tuple[dict, dict]:
        """Literal occurrence maps: lit -> [(clause index, position)].

        Returns (hard_occ, soft_occ); indices are positions within the
        respective clause list.
        """
        hard_occ: dict[int, list[tuple[int, int]]] = {}
        soft_occ: dict[int, list[tuple[int, int]]] = {}
        for i, c in enumerate(self.hard):
            for p, lit in enumerate(c.lits):
                hard_occ.setdefault(lit, []).append((i, p))
        for i, c in enumerate(self.soft):
            for p, lit in enumerate(c.lits):
                soft_occ.setdefault(lit, []).append((i, p))
        return hard_occ, soft_occ


def _normalize_lits(lits: Sequence[int], report: ParseReport) -> tuple[int, ...] | None:
    """Dedup literals, drop tautologies; returns None for a dropped clause."""
    seen: dict[int, None] = {}
    for lit in lits:
        if lit == 0:
            raise ValueError("literal variable 0 inside a clause")
        if -lit in seen:
            report.tautologies_dropped += 1
            return None
        if lit in seen:
            report.duplicate_literals_removed += 1
        else:
            seen[lit] = None
    if not seen:
        raise ValueError("clause with no literals")
    return tuple(seen)


def parse_wcnf(source: str | TextIO) -> Instance:
    """Parse WCNF text in either dialect into an Instance.

    The dialect is decided by the first significant line: a ``p wcnf``
    header selects the old format, anything else the new one.  All
    structural problems raise :class:`WcnfError` with a line number.
    """
    text = source.read() if hasattr(source, "read") else source
    report = ParseReport()
    hard: list[Clause] = []
    soft: list[Clause] = []

    top: int | None = None
    declared_vars: int | None = None
    old_format: bool | None = None
    max_var = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()

        if tokens[0] == "p":
            if old_format is not None:
                raise WcnfError("unexpected extra 'p' header", lineno)
            if len(tokens) != 5 or tokens[1] != "wcnf":
                raise WcnfError(f"malformed header: {line!r}", lineno)
            try:
                declared_vars = int(tokens[2])
                int(tokens[3])  # declared clause count; not enforced
                top = int(tokens[4])
            except ValueError:
                raise WcnfError(f"malformed token in header: {line!r}", lineno) from None
            if declared_vars < 0 or top < 1:
                raise WcnfError("header requires num_vars >= 0 and top >= 1", lineno)
            if top > MAX_WEIGHT:
                raise WcnfError("top weight exceeds 64-bit range", lineno)
            old_format = True
            continue

        if old_format is None:
            old_format = False

        if tokens == ["0"]:
            raise WcnfError("clause with no literals before the terminating 0", lineno)
        if tokens[-1] != "0":
            raise WcnfError("missing terminating 0", lineno)

        is_hard = False
        if not old_format and tokens[0] == "h":
            is_hard = True
            body = tokens[1:-1]
        else:
            try:
                weight = int(tokens[0])
            except ValueError:
                raise WcnfError(f"malformed weight token {tokens[0]!r}", lineno) from None
            body = tokens[1:-1]
            if old_format:
                assert top is not None
                if weight > top:
                    raise WcnfError(f"clause weight {weight} exceeds top {top}", lineno)
                if weight == top:
                    is_hard = True
            if not is_hard and weight < 1:
                raise WcnfError(f"soft clause weight must be >= 1, got {weight}", lineno)

        if not body:
            raise WcnfError("clause with no literals before the terminating 0", lineno)
        try:
            lits = [int(t) for t in body]
        except ValueError:
            raise WcnfError("malformed literal token", lineno) from None
        for lit in lits:
            if lit == 0:
                raise WcnfError("literal variable 0 inside a clause", lineno)
            v = abs(lit)
            if old_format and declared_vars is not None and v > declared_vars:
                raise WcnfError(
                    f"variable {v} exceeds declared count {declared_vars}", lineno
                )
            max_var = max(max_var, v)

        try:
            norm = _normalize_lits(lits, report)
        except ValueError as exc:
            raise WcnfError(str(exc), lineno) from None
        if norm is None:
            continue
        if is_hard:
            hard.append(Clause(norm))
        else:
            soft.append(Clause(norm, weight))

    if old_format and not hard and not soft and declared_vars is None:
        raise WcnfError("empty input")

    num_vars = declared_vars if old_format else max_var
    total = sum(c.weight for c in soft)
    if total > MAX_WEIGHT:
        raise WcnfError("total soft weight exceeds 64-bit range")
    return Instance(
        num_vars or 0, tuple(hard), tuple(soft), top_weight=top, report=report
    )


def load_wcnf(path) -> Instance:
    with open(path, "r", encoding="utf-8") as f:
        return parse_wcnf(f)


def serialize_wcnf(inst: Instance, format: str = "new") -> str:
    """Serialize to WCNF text; re-parsing yields an equal Instance.

    Old format emits ``top = total_soft_weight + 1``.  Note that the new
    format has no variable-count header, so variables beyond the highest
    occurring index do not survive a new-format round trip; use the old
    format for instances with trailing unused variables.
    """
    lines = []
    if format == "old":
        top = inst.total_soft_weight + 1
        lines.append(f"p wcnf {inst.num_vars} {inst.num_hard + inst.num_soft} {top}")
        for c in inst.hard:
            lines.append(f"{top} " + " ".join(map(str, c.lits)) + " 0")
        for c in inst.soft:
            lines.append(f"{c.weight} " + " ".join(map(str, c.lits)) + " 0")
    elif format == "new":
        for c in inst.hard:
            lines.append("h " + " ".join(map(str, c.lits)) + " 0")
        for c in inst.soft:
            lines.append(f"{c.weight} " + " ".join(map(str, c.lits)) + " 0")
    else:
        raise ValueError(f"unknown format {format!r}")
    return "\n".join(lines) + "\n"


def clause_satisfied(clause: Clause, assignment: Sequence[bool]) -> bool:
    return any(
        (lit > 0) == bool(assignment[abs(lit)]) for lit in clause.lits
    )


def evaluate_cost(inst: Instance, assignment: Sequence[bool]) -> int:
    """Total weight of soft clauses with no satisfied literal.

    Defined for any complete assignment, feasible or not.
    """
    return sum(
        c.weight for c in inst.soft if not clause_satisfied(c, assignment)
    )


def falsified_hard_count(inst: Instance, assignment: Sequence[bool]) -> int:
    """Number of hard clauses with no satisfied literal."""
    return sum(1 for c in inst.hard if not clause_satisfied(c, assignment))
