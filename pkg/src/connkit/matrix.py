"""Clause matrices with multiplicities, paths, and the proof checker.

A matrix is an ordered clause sequence with flat literal-occurrence
addressing: occurrence k is the k-th literal scanning clauses left to
right.  A multiplicity assignment gives each clause a copy count; the
amplified matrix materialises each copy with variables renamed apart.
A connection joins two complementary literal occurrences tagged with copy
indices, and a certificate (multiplicity, connection set, substitution) is
accepted exactly when the connections are complementary under the
substitution and every path through the amplified matrix contains both
endpoints of some connection.  Path checking is exhaustive by design; a
cap turns oversized instances into an explicit indeterminate outcome
rather than a wrong verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

from . import _kernel
from .terms import (
    Clause,
    Literal,
    Substitution,
    Var,
    apply_to_clause,
    apply_to_literal,
    clause_text,
    clause_vars,
    fresh_variant,
    is_ground_clause,
    normalize,
    unify_raw,
)

DEFAULT_PATH_CAP = 2**20
DEFAULT_ATOM_BUDGET = 20

OccCopy = tuple[int, int]  # (flat occurrence index, copy index >= 1)
Path = dict[tuple[int, int], int]  # (clause index, copy index) -> literal index

MultiplicityAssignment = tuple[int, ...]


class PathCapExceeded(Exception):
    """Raised when a matrix has more paths than the configured cap."""


class AtomBudgetExceeded(Exception):
    """Raised when a ground clause set has too many distinct atoms."""


@dataclass(frozen=True)
class Matrix:
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        starts = []
        n = 0
        for c in self.clauses:
            starts.append(n)
            n += len(c)
        object.__setattr__(self, "_starts", tuple(starts))
        object.__setattr__(self, "_n_occ", n)

    @property
    def n_occurrences(self) -> int:
        return self._n_occ  # type: ignore[attr-defined]

    def occ_of(self, ci: int, li: int) -> int:
        return self._starts[ci] + li  # type: ignore[attr-defined]

    def occ_pair(self, occ: int) -> tuple[int, int]:
        """Flat occurrence index back to (clause index, literal index)."""
        starts = self._starts  # type: ignore[attr-defined]
        if not 0 <= occ < self._n_occ:  # type: ignore[attr-defined]
            raise IndexError(f"occurrence {occ} out of range")
        lo, hi = 0, len(starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if starts[mid] <= occ:
                lo = mid
            else:
                hi = mid - 1
        return lo, occ - starts[lo]

    def literal(self, occ: int) -> Literal:
        ci, li = self.occ_pair(occ)
        return self.clauses[ci][li]

    def text(self) -> list[str]:
        return [clause_text(c) for c in self.clauses]


def uniform_multiplicity(m: Matrix, k: int = 1) -> MultiplicityAssignment:
    return tuple(k for _ in m.clauses)


@dataclass(frozen=True)
class Connection:
    """Unordered pair of occurrence/copy endpoints, stored sorted."""

    a: OccCopy
    b: OccCopy

    @staticmethod
    def of(x: OccCopy, y: OccCopy) -> "Connection":
        if x == y:
            raise ValueError(f"connection endpoints must be distinct, got {x} twice")
        lo, hi = (x, y) if x <= y else (y, x)
        return Connection(lo, hi)

    def key(self):
        return (self.a, self.b)

    def __str__(self):
        return f"({self.a[0]}^{self.a[1]},{self.b[0]}^{self.b[1]})"


@dataclass(frozen=True)
class AmplifiedMatrix:
    """A matrix with each clause replicated per its multiplicity.

    Copies are listed clause-major: (clause 0, copy 1..mu0), (clause 1, ...).
    Copy k of a clause is ``fresh_variant(clause, k)``, so distinct copies
    never share variables.
    """

    matrix: Matrix
    mult: MultiplicityAssignment
    copies: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        if len(self.mult) != len(self.matrix.clauses):
            raise ValueError(
                f"multiplicity covers {len(self.mult)} clauses, matrix has {len(self.matrix.clauses)}"
            )
        for ci, k in enumerate(self.mult):
            if k < 1:
                raise ValueError(f"clause {ci} has multiplicity {k}; counts must be >= 1")
        object.__setattr__(
            self,
            "copies",
            tuple((ci, k) for ci in range(len(self.mult)) for k in range(1, self.mult[ci] + 1)),
        )

    @lru_cache(maxsize=None)
    def copy_clause(self, ci: int, k: int) -> Clause:
        return fresh_variant(self.matrix.clauses[ci], k)

    def literal_at(self, end: OccCopy) -> Literal:
        occ, k = end
        ci, li = self.matrix.occ_pair(occ)
        if not 1 <= k <= self.mult[ci]:
            raise ValueError(f"copy {k} out of range for clause {ci} (multiplicity {self.mult[ci]})")
        return self.copy_clause(ci, k)[li]

    def variables(self) -> set[Var]:
        out: set[Var] = set()
        for ci, k in self.copies:
            out.update(clause_vars(self.copy_clause(ci, k)))
        return out

    def path_count(self) -> int:
        n = 1
        for ci, _ in self.copies:
            n *= len(self.matrix.clauses[ci])
        return n

    def slot_encoding(self):
        """Widths plus the slot id of each (occ, copy) endpoint, for kernels."""
        widths = [len(self.matrix.clauses[ci]) for ci, _ in self.copies]
        slot_of: dict[OccCopy, int] = {}
        base = 0
        for idx, (ci, k) in enumerate(self.copies):
            for li in range(widths[idx]):
                slot_of[(self.matrix.occ_of(ci, li), k)] = base + li
            base += widths[idx]
        return widths, slot_of


def amplify(m: Matrix, mult: MultiplicityAssignment) -> AmplifiedMatrix:
    return AmplifiedMatrix(m, tuple(mult))


def enumerate_paths(am: AmplifiedMatrix, cap: int = DEFAULT_PATH_CAP) -> Iterator[Path]:
    """Yield every choice of one literal per clause copy, in slot order."""
    if am.path_count() > cap:
        raise PathCapExceeded(f"{am.path_count()} paths exceed cap {cap}")
    keys = list(am.copies)
    ranges = [range(len(am.matrix.clauses[ci])) for ci, _ in keys]
    for combo in itertools.product(*ranges):
        yield dict(zip(keys, combo))


@dataclass(frozen=True)
class ConnectionProof:
    """Certificate: matrix, multiplicity, connection set, substitution.

    ``dag`` optionally carries the derivation structure produced by search
    (see :mod:`connkit.search`); the checker ignores it.
    """

    matrix: Matrix
    mult: MultiplicityAssignment
    connections: tuple[Connection, ...]
    subst: tuple[tuple[Var, "object"], ...]
    dag: Optional["object"] = None

    @staticmethod
    def build(matrix, mult, connections, subst: Substitution, dag=None) -> "ConnectionProof":
        conns = tuple(sorted(set(connections), key=Connection.key))
        sig = tuple(sorted(normalize(subst).items(), key=lambda kv: (kv[0].name, kv[0].index)))
        return ConnectionProof(matrix, tuple(mult), conns, sig, dag)

    def substitution(self) -> Substitution:
        return dict(self.subst)

    def total_multiplicity(self) -> int:
        return sum(self.mult)

    def connection_count(self) -> int:
        return len(self.connections)


ACCEPTED = "accepted"
REJECTED = "rejected"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class CheckResult:
    status: str
    reason: str = ""
    open_path: Path | None = None

    def __bool__(self):
        return self.status == ACCEPTED


def check_proof(p: ConnectionProof, path_cap: int = DEFAULT_PATH_CAP) -> CheckResult:
    """Gold-standard certificate check.

    Accepts iff every connection joins complementary literals whose
    substitution instances agree, and every path through the amplified
    matrix contains both endpoints of some connection.  Rejections carry
    the first open path (in path enumeration order); oversize instances
    yield an indeterminate result instead of a verdict.
    """
    try:
        am = amplify(p.matrix, p.mult)
    except ValueError as e:
        return CheckResult(REJECTED, str(e))

    sigma = normalize(p.substitution())
    amp_vars = am.variables()
    stray = [v for v in sigma if v not in amp_vars]
    if stray:
        return CheckResult(REJECTED, f"substitution binds foreign variables: {sorted(map(str, stray))}")

    for conn in p.connections:
        try:
            la = am.literal_at(conn.a)
            lb = am.literal_at(conn.b)
        except (ValueError, IndexError) as e:
            return CheckResult(REJECTED, f"connection {conn}: {e}")
        ia = apply_to_literal(sigma, la)
        ib = apply_to_literal(sigma, lb)
        if ia.neg == ib.neg or ia.pred != ib.pred or ia.args != ib.args:
            return CheckResult(
                REJECTED,
                f"connection {conn} joins {ia} and {ib}, not complementary instances",
            )

    if am.path_count() > path_cap:
        return CheckResult(INDETERMINATE, f"{am.path_count()} paths exceed cap {path_cap}")

    widths, slot_of = am.slot_encoding()
    pairs = [(slot_of[c.a], slot_of[c.b]) for c in p.connections]
    open_choice = _kernel.find_open_path(widths, pairs)
    if open_choice is None:
        return CheckResult(ACCEPTED)
    path: Path = {key: li for key, li in zip(am.copies, open_choice)}
    return CheckResult(REJECTED, "open path not covered by any connection", path)


def connection_universe(am: AmplifiedMatrix) -> list[Connection]:
    """All candidate connections: complementary predicate pairs, sorted.

    Unifiability is not tested here; enumeration callers filter.
    """
    ends: list[tuple[OccCopy, Literal]] = []
    for ci, k in am.copies:
        clause = am.copy_clause(ci, k)
        for li, lit in enumerate(clause):
            ends.append(((am.matrix.occ_of(ci, li), k), lit))
    out = []
    for i in range(len(ends)):
        (ea, la) = ends[i]
        for j in range(i + 1, len(ends)):
            (eb, lb) = ends[j]
            if la.pred == lb.pred and la.neg != lb.neg and len(la.args) == len(lb.args):
                out.append(Connection.of(ea, eb))
    out.sort(key=Connection.key)
    return out


def unifier_for(am: AmplifiedMatrix, connections, base: Substitution | None = None) -> Substitution | None:
    """One substitution unifying every connection, or None."""
    s: Substitution | None = dict(base) if base else {}
    for conn in sorted(connections, key=Connection.key):
        la = am.literal_at(conn.a)
        lb = am.literal_at(conn.b).complement()
        s = unify_raw(la, lb, s)
        if s is None:
            return None
    return normalize(s)


def ground_unsat_oracle(clauses, atom_budget: int = DEFAULT_ATOM_BUDGET) -> bool:
    """Exhaustive truth-table unsatisfiability test for ground clauses."""
    atom_ids: dict[str, int] = {}
    pos_masks: list[int] = []
    neg_masks: list[int] = []
    for clause in clauses:
        if not is_ground_clause(clause):
            raise ValueError(f"clause {clause_text(clause)} is not ground")
        pos = neg = 0
        for lit in clause:
            key = lit.atom_text()
            if key not in atom_ids:
                if len(atom_ids) >= atom_budget:
                    raise AtomBudgetExceeded(f"more than {atom_budget} distinct atoms")
                atom_ids[key] = len(atom_ids)
            bit = 1 << atom_ids[key]
            if lit.neg:
                neg |= bit
            else:
                pos |= bit
        pos_masks.append(pos)
        neg_masks.append(neg)
    return _kernel.ground_unsat(pos_masks, neg_masks, len(atom_ids))


def proof_ground_instances(p: ConnectionProof) -> list[Clause] | None:
    """Substitution instances of all clause copies, when fully ground."""
    am = amplify(p.matrix, p.mult)
    sigma = p.substitution()
    out = []
    for ci, k in am.copies:
        inst = apply_to_clause(sigma, am.copy_clause(ci, k))
        if not is_ground_clause(inst):
            return None
        out.append(inst)
    return out


def clausify(f) -> Matrix:
    """Formula to matrix (CNF of the negated conjecture)."""
    from .clausify import clausify_clauses

    return Matrix(tuple(clausify_clauses(f)))
