"""
Three-literal CNF formulas: DIMACS files, random generators and exhaustive
satisfiability checks for the desk-scale reductions.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional, Sequence, Tuple

from pairnet.errors import BadFormula, ParseError

logger = logging.getLogger(__name__)

Clause = Tuple[int, int, int]
Assignment = Tuple[bool, ...]


class Flavor(str, Enum):
    THREE_SAT = "3sat"
    MONOTONE_ONE_IN_THREE = "1in3"


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: Tuple[Clause, ...]
    flavor: Flavor = Flavor.THREE_SAT

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if self.n_vars < 1:
            raise BadFormula("a formula needs at least one variable")
        for k, clause in enumerate(self.clauses):
            if len(clause) != 3:
                raise BadFormula(f"clause {k} has {len(clause)} literals, expected 3")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise BadFormula(f"clause {k} literal {lit} outside 1..{self.n_vars}")
                if lit < 0 and self.flavor is Flavor.MONOTONE_ONE_IN_THREE:
                    raise BadFormula(f"clause {k} negates x{-lit} in a monotone formula")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """Ordinary satisfaction for 3-SAT, exactly-one-true for 1-in-3."""
        for clause in self.clauses:
            true = sum(1 for lit in clause if assignment[abs(lit) - 1] == (lit > 0))
            if self.flavor is Flavor.MONOTONE_ONE_IN_THREE:
                if true != 1:
                    return False
            elif true == 0:
                return False
        return True


def satisfying_assignments(cnf: CnfFormula) -> Iterator[Assignment]:
    for bits in itertools.product((False, True), repeat=cnf.n_vars):
        if cnf.satisfied_by(bits):
            yield bits


def is_satisfiable(cnf: CnfFormula) -> bool:
    return next(satisfying_assignments(cnf), None) is not None


def random_3sat(n_vars: int, n_clauses: int, seed: int) -> CnfFormula:
    if n_vars < 3:
        raise BadFormula("random 3-SAT needs at least 3 variables")
    rng = random.Random(seed)
    clauses = []
    for _ in range(n_clauses):
        chosen = rng.sample(range(1, n_vars + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return CnfFormula(n_vars, tuple(clauses), Flavor.THREE_SAT)


def random_monotone_1in3(n_vars: int, n_clauses: int, seed: int) -> CnfFormula:
    if n_vars < 3:
        raise BadFormula("random 1-in-3 formulas need at least 3 variables")
    rng = random.Random(seed)
    clauses = [tuple(rng.sample(range(1, n_vars + 1), 3)) for _ in range(n_clauses)]
    return CnfFormula(n_vars, tuple(clauses), Flavor.MONOTONE_ONE_IN_THREE)


def read_dimacs(path, flavor: Flavor = Flavor.THREE_SAT) -> CnfFormula:
    """Read a DIMACS cnf file; clauses may span lines and end with 0."""
    n_vars: Optional[int] = None
    clauses = []
    pending = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("c") or line.startswith("%"):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise ParseError(path, "expected 'p cnf <vars> <clauses>'", line=lineno)
                try:
                    n_vars, _declared = int(parts[2]), int(parts[3])
                except ValueError as e:
                    raise ParseError(path, "non-integer header field", line=lineno) from e
                continue
            if n_vars is None:
                raise ParseError(path, "clause before the problem line", line=lineno)
            for token in line.split():
                try:
                    lit = int(token)
                except ValueError as e:
                    raise ParseError(path, f"bad literal {token!r}", line=lineno) from e
                if lit == 0:
                    if len(pending) != 3:
                        raise ParseError(path, f"clause has {len(pending)} literals, expected 3", line=lineno)
                    clauses.append(tuple(pending))
                    pending = []
                else:
                    pending.append(lit)
    if n_vars is None:
        raise ParseError(path, "missing problem line")
    if pending:
        raise ParseError(path, "last clause is not terminated by 0")
    try:
        return CnfFormula(n_vars, tuple(clauses), flavor)
    except BadFormula as e:
        raise ParseError(path, str(e)) from e


def write_dimacs(cnf: CnfFormula, path) -> None:
    lines = [f"c {cnf.flavor.value} formula", f"p cnf {cnf.n_vars} {cnf.n_clauses}"]
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in cnf.clauses]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
