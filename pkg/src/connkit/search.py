"""Connection-calculus proof search and the exhaustive minimal-proof oracle.

Two search modes share one engine.  With ``factorization=False`` the
calculus is extension-only with a fresh clause copy per entry (ground unit
clauses excepted), so subgoals are never shared and the found certificate
is tree-shaped; iterative deepening on extension count makes the first
find connection-minimal among tree certificates.  With
``factorization=True`` the calculus adds the reduction rule (close a
subgoal against a complementary ancestor) and the sharing rule (close a
subgoal by unifying it with an already-solved node of equal polarity,
recorded as a DAG edge).  Either way the result is a certificate the
matrix checker accepts, plus the derivation DAG that produced it.

``minimal_proof`` without the tree restriction follows the brute-force
recipe: list multiplicity assignments by total copy count, list connection
sets by cardinality, and keep the first spanning set with a unifier.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterator, Optional

from .matrix import (
    AmplifiedMatrix,
    Connection,
    ConnectionProof,
    Matrix,
    OccCopy,
    amplify,
    connection_universe,
    unifier_for,
)
from .terms import (
    Literal,
    Var,
    _occurs,
    _walk,
    apply_to_literal,
    fresh_variant,
    is_ground_clause,
    normalize,
)

DEFAULT_PATH_CAP = 2**20


@dataclass(frozen=True)
class SearchConfig:
    """Bounds for search and enumeration.

    ``max_depth`` caps the iterative-deepening extension count and doubles
    as the total-multiplicity cap of the enumeration oracle; ``node_budget``
    caps subgoal expansions (search) or candidate sets tested (oracle).
    """

    factorization: bool = True
    max_mult: int = 8
    max_depth: int = 400
    node_budget: int = 2_000_000
    path_cap: int = DEFAULT_PATH_CAP

    def __post_init__(self):
        for name in ("max_mult", "max_depth", "node_budget", "path_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class DagNode:
    """One solved subgoal: which rule closed it and what it spawned."""

    id: int
    end: OccCopy
    rule: str  # "extension" | "reduction" | "factorization"
    connection: Optional[Connection]
    children: tuple[int, ...] = ()
    target: Optional[int] = None


@dataclass(frozen=True)
class DerivationDag:
    start_clause: int
    start_copy: int
    roots: tuple[int, ...]
    nodes: tuple[DagNode, ...]

    def node(self, nid: int) -> DagNode:
        return self.nodes[nid]

    def resolve_shared(self, nid: int) -> DagNode:
        """Follow sharing edges to the node that actually closed the goal."""
        nd = self.nodes[nid]
        while nd.rule == "factorization":
            nd = self.nodes[nd.target]
        return nd


BOUND_EXHAUSTED = "bound_exhausted"
EXHAUSTED = "exhausted"


@dataclass
class SearchOutcome:
    proof: Optional[ConnectionProof]
    failure: Optional[str]  # BOUND_EXHAUSTED | EXHAUSTED when proof is None
    stats: dict

    def __bool__(self):
        return self.proof is not None


class _Budget(Exception):
    pass


class _Engine:
    def __init__(self, m: Matrix, cfg: SearchConfig):
        self.m = m
        self.cfg = cfg
        self.index: dict[tuple[str, bool, int], list[tuple[int, int]]] = defaultdict(list)
        for ci, clause in enumerate(m.clauses):
            for li, lit in enumerate(clause):
                self.index[(lit.pred, lit.neg, len(lit.args))].append((ci, li))
        self.unit_ground = [len(c) == 1 and is_ground_clause(c) for c in m.clauses]
        self.variants: dict[tuple[int, int], tuple[Literal, ...]] = {}
        self.nodes_expanded = 0
        self.unifications = 0
        self.cut = False

    def variant(self, ci: int, k: int):
        key = (ci, k)
        got = self.variants.get(key)
        if got is None:
            got = fresh_variant(self.m.clauses[ci], k)
            self.variants[key] = got
        return got

    # -- in-place unification with a trail ---------------------------------

    def _u_terms(self, a, b) -> bool:
        a = _walk(a, self.bindings)
        b = _walk(b, self.bindings)
        if a == b:
            return True
        if isinstance(a, Var):
            if _occurs(a, b, self.bindings):
                return False
            self.bindings[a] = b
            self.trail.append(a)
            return True
        if isinstance(b, Var):
            if _occurs(b, a, self.bindings):
                return False
            self.bindings[b] = a
            self.trail.append(b)
            return True
        if a.name != b.name or len(a.args) != len(b.args):
            return False
        return all(self._u_terms(x, y) for x, y in zip(a.args, b.args))

    def _u_atoms(self, a: Literal, b: Literal) -> bool:
        self.unifications += 1
        return all(self._u_terms(x, y) for x, y in zip(a.args, b.args))

    def _undo(self, mark: int):
        while len(self.trail) > mark:
            del self.bindings[self.trail.pop()]

    # -- the tableau -------------------------------------------------------

    def _commit(self, node: DagNode, sink: list, goals, i) -> bool:
        self.nodes.append(node)
        sink.append(node.id)
        if self._solve(goals, i):
            return True
        self.nodes.pop()
        sink.pop()
        return False

    def _solve(self, goals: list, i: int) -> bool:
        if i == len(goals):
            return True
        item = goals[i]
        if item[0] == "commit":
            _, end, conn, kids, sink = item
            node = DagNode(len(self.nodes), end, "extension", conn, tuple(kids))
            return self._commit(node, sink, goals, i + 1)

        _, lit, end, path, sink = item
        self.nodes_expanded += 1
        if self.nodes_expanded > self.cfg.node_budget:
            raise _Budget()

        if self.cfg.factorization:
            for plit, pend in path:
                if plit.pred == lit.pred and plit.neg != lit.neg and len(plit.args) == len(lit.args):
                    mark = len(self.trail)
                    if self._u_atoms(lit, plit):
                        node = DagNode(len(self.nodes), end, "reduction", Connection.of(end, pend))
                        if self._commit(node, sink, goals, i + 1):
                            return True
                    self._undo(mark)
            for tid in range(len(self.nodes)):
                tn = self.nodes[tid]
                tlit = self._lit_at(tn.end)
                if tlit.pred == lit.pred and tlit.neg == lit.neg and len(tlit.args) == len(lit.args):
                    mark = len(self.trail)
                    if self._u_atoms(lit, tlit):
                        node = DagNode(len(self.nodes), end, "factorization", None, (), tid)
                        if self._commit(node, sink, goals, i + 1):
                            return True
                    self._undo(mark)

        for ci, li in self.index.get((lit.pred, not lit.neg, len(lit.args)), ()):
            if self.ext_left == 0:
                self.cut = True
                break
            if self.unit_ground[ci]:
                k = 1
                fresh_alloc = self.copies[ci] == 0
            else:
                k = self.copies[ci] + 1
                if k > self.cfg.max_mult:
                    self.cut = True
                    continue
                fresh_alloc = True
            tlit = self.variant(ci, k)[li]
            mark = len(self.trail)
            if self._u_atoms(lit, tlit):
                if fresh_alloc:
                    self.copies[ci] = k
                self.ext_left -= 1
                conn = Connection.of(end, (self.m.occ_of(ci, li), k))
                kids: list[int] = []
                newpath = path + ((lit, end),)
                sub = [
                    ("goal", self.variant(ci, k)[lj], (self.m.occ_of(ci, lj), k), newpath, kids)
                    for lj in range(len(self.m.clauses[ci]))
                    if lj != li
                ]
                newgoals = sub + [("commit", end, conn, kids, sink)] + goals[i + 1 :]
                if self._solve(newgoals, 0):
                    return True
                self.ext_left += 1
                if fresh_alloc:
                    self.copies[ci] = 0 if self.unit_ground[ci] else k - 1
            self._undo(mark)
        return False

    def _lit_at(self, end: OccCopy) -> Literal:
        occ, k = end
        ci, li = self.m.occ_pair(occ)
        return self.variant(ci, k)[li]

    def attempt(self, start_ci: int, budget: int) -> Optional[ConnectionProof]:
        self.bindings: dict = {}
        self.trail: list = []
        self.copies = [0] * len(self.m.clauses)
        self.nodes: list[DagNode] = []
        self.ext_left = budget
        self.copies[start_ci] = 1
        roots: list[int] = []
        goals = [
            ("goal", self.variant(start_ci, 1)[lj], (self.m.occ_of(start_ci, lj), 1), (), roots)
            for lj in range(len(self.m.clauses[start_ci]))
        ]
        if not self._solve(goals, 0):
            return None
        return self._assemble(start_ci, roots)

    def _assemble(self, start_ci: int, roots: list[int]) -> ConnectionProof:
        mu = tuple(max(c, 1) for c in self.copies)
        conns: set[Connection] = set()
        for nd in self.nodes:
            if nd.rule == "factorization":
                t = nd.target
                while self.nodes[t].rule == "factorization":
                    t = self.nodes[t].target
                closing = self.nodes[t].connection
                other = closing.b if closing.a == self.nodes[t].end else closing.a
                conns.add(Connection.of(nd.end, other))
            else:
                conns.add(nd.connection)
        sigma = normalize(dict(self.bindings))
        amp_vars = amplify(self.m, mu).variables()
        sigma = {v: t for v, t in sigma.items() if v in amp_vars}
        dag = DerivationDag(start_ci, 1, tuple(roots), tuple(self.nodes))
        return ConnectionProof.build(self.m, mu, conns, sigma, dag)


def _start_order(m: Matrix) -> list[int]:
    positive = [ci for ci, c in enumerate(m.clauses) if all(not lit.neg for lit in c)]
    rest = [ci for ci in range(len(m.clauses)) if ci not in positive]
    return positive + rest


def prove(m: Matrix, cfg: SearchConfig = SearchConfig()) -> SearchOutcome:
    """Search for a connection proof by iterative deepening on extensions.

    Start clauses are tried in index order, positive clauses first.  A
    deepening round that finishes without hitting any bound settles the
    question: the failure is then reported as search-space exhaustion
    rather than bound exhaustion.
    """
    if not m.clauses:
        raise ValueError("matrix is empty")
    t0 = time.perf_counter()
    eng = _Engine(m, cfg)
    starts = _start_order(m)
    failure = BOUND_EXHAUSTED
    proof = None
    try:
        for budget in range(1, cfg.max_depth + 1):
            eng.cut = False
            for s in starts:
                proof = eng.attempt(s, budget)
                if proof is not None:
                    failure = None
                    break
            if proof is not None or not eng.cut:
                if proof is None:
                    failure = EXHAUSTED
                break
    except _Budget:
        failure = BOUND_EXHAUSTED
    stats = {
        "nodes_expanded": eng.nodes_expanded,
        "unifications": eng.unifications,
        "wall_ms": round((time.perf_counter() - t0) * 1000, 3),
    }
    return SearchOutcome(proof, None if proof else failure, stats)


def _compositions(total: int, parts: int, cap: int) -> Iterator[tuple[int, ...]]:
    """All assignments of ``total`` over ``parts`` slots, each 1..cap, lex order."""
    if parts == 1:
        if 1 <= total <= cap:
            yield (total,)
        return
    lo = max(1, total - cap * (parts - 1))
    hi = min(cap, total - (parts - 1))
    for first in range(lo, hi + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def minimal_proof(m: Matrix, bounds: SearchConfig = SearchConfig(), tree_shaped: bool = False) -> SearchOutcome:
    """Smallest certificate within bounds, by exhaustive enumeration.

    Unrestricted: multiplicity assignments are listed in nondecreasing
    total-copy order; for each total, connection sets are listed in
    nondecreasing cardinality and lexicographic order of their encoding,
    and the first spanning set admitting a unifier wins.  The result is
    minimal in total multiplicity first, then in connection count.

    ``tree_shaped=True`` restricts to tree certificates (no subgoal ever
    shared or closed against an ancestor); those are exactly what the
    extension-only calculus produces, so the minimum is computed by the
    deepening search, whose first find has minimal connection count.
    """
    if tree_shaped:
        return prove(m, replace(bounds, factorization=False))

    t0 = time.perf_counter()
    n = len(m.clauses)
    if n == 0:
        raise ValueError("matrix is empty")
    total_cap = min(bounds.max_depth, n * bounds.max_mult)
    tested = 0
    hit_cap = False
    from . import _kernel

    for total in range(n, total_cap + 1):
        layers: list[tuple[AmplifiedMatrix, list[Connection], list, dict]] = []
        for mu in _compositions(total, n, bounds.max_mult):
            am = amplify(m, mu)
            uni = connection_universe(am)
            widths, slot_of = am.slot_encoding()
            layers.append((am, uni, widths, slot_of))
        maxcard = max((len(u) for _, u, _, _ in layers), default=0)
        for card in range(1, maxcard + 1):
            for am, uni, widths, slot_of in layers:
                if card > len(uni):
                    continue
                for subset in combinations(uni, card):
                    tested += 1
                    if tested > bounds.node_budget:
                        hit_cap = True
                        break
                    pairs = [(slot_of[c.a], slot_of[c.b]) for c in subset]
                    if _kernel.find_open_path(widths, pairs) is not None:
                        continue
                    sigma = unifier_for(am, subset)
                    if sigma is None:
                        continue
                    proof = ConnectionProof.build(m, am.mult, subset, sigma)
                    stats = {
                        "candidates_tested": tested,
                        "wall_ms": round((time.perf_counter() - t0) * 1000, 3),
                    }
                    return SearchOutcome(proof, None, stats)
                if hit_cap:
                    break
            if hit_cap:
                break
        if hit_cap:
            break
    stats = {
        "candidates_tested": tested,
        "wall_ms": round((time.perf_counter() - t0) * 1000, 3),
    }
    return SearchOutcome(None, BOUND_EXHAUSTED, stats)


class ReplayError(Exception):
    """A checked certificate could not be rebuilt into a derivation DAG."""


def replay_dag(p: ConnectionProof) -> DerivationDag:
    """Reconstruct a derivation DAG for a certificate.

    Replays a tableau over the amplified matrix using only the
    certificate's connections under its fixed substitution, sharing
    already-solved subgoals where their ancestor assumptions allow.
    """
    am = amplify(p.matrix, p.mult)
    m = p.matrix
    by_end: dict[OccCopy, list[tuple[Connection, OccCopy]]] = defaultdict(list)
    for c in p.connections:
        by_end[c.a].append((c, c.b))
        by_end[c.b].append((c, c.a))
    for lst in by_end.values():
        lst.sort(key=lambda t: t[0].key())

    def copy_ends(ci: int, k: int) -> list[OccCopy]:
        return [(m.occ_of(ci, li), k) for li in range(len(m.clauses[ci]))]

    nodes: list[DagNode] = []
    solved: dict[OccCopy, tuple[int, frozenset]] = {}
    journal: list[OccCopy] = []

    def rollback(nmark: int, jmark: int):
        del nodes[nmark:]
        while len(journal) > jmark:
            del solved[journal.pop()]

    def solve(end: OccCopy, path: tuple[OccCopy, ...], entered: frozenset) -> Optional[frozenset]:
        # Assumption sets track which path ancestors a subtree's reductions
        # lean on; a solved subgoal is shareable only where those ancestors
        # are still on the path.  A node's own end is discharged on return
        # (its reduction partners sit below it) but kept in the memo entry.
        got = solved.get(end)
        if got is not None and got[1] <= set(path):
            nid = len(nodes)
            nodes.append(DagNode(nid, end, "factorization", None, (), got[0]))
            return got[1]
        for conn, other in by_end.get(end, ()):
            if other in path:
                nid = len(nodes)
                nodes.append(DagNode(nid, end, "reduction", conn))
                assume = frozenset({other})
                _remember(end, nid, assume)
                return assume
            oci, _oli = m.occ_pair(other[0])
            key = (oci, other[1])
            if key in entered:
                continue
            nmark, jmark = len(nodes), len(journal)
            kids: list[int] = []
            raw: frozenset = frozenset()
            ok = True
            newpath = path + (end,)
            newentered = entered | {key}
            for sib in copy_ends(oci, other[1]):
                if sib == other:
                    continue
                sub = solve(sib, newpath, newentered)
                if sub is None:
                    ok = False
                    break
                kids.append(len(nodes) - 1)
                raw = raw | sub
            if not ok:
                rollback(nmark, jmark)
                continue
            nid = len(nodes)
            nodes.append(DagNode(nid, end, "extension", conn, tuple(kids)))
            _remember(end, nid, raw)
            return frozenset(a for a in raw if a != end)
        return None

    def _remember(end: OccCopy, nid: int, assume: frozenset):
        if end not in solved:
            solved[end] = (nid, assume)
            journal.append(end)

    start_candidates = [(ci, k) for ci in _start_order(m) for k in range(1, p.mult[ci] + 1)]
    for sci, sk in start_candidates:
        nodes.clear()
        solved.clear()
        journal.clear()
        roots: list[int] = []
        ok = True
        for end in copy_ends(sci, sk):
            if solve(end, (), frozenset({(sci, sk)})) is None:
                ok = False
                break
            roots.append(len(nodes) - 1)
        if ok:
            return DerivationDag(sci, sk, tuple(roots), tuple(nodes))
    raise ReplayError("no tableau over the certificate's connections closes")


def with_dag(p: ConnectionProof) -> ConnectionProof:
    """The same proof, with a derivation DAG attached (replayed if absent)."""
    if p.dag is not None:
        return p
    return ConnectionProof(p.matrix, p.mult, p.connections, p.subst, replay_dag(p))
