"""Saturation-based resolution with proof recording, and a shortest-proof oracle.

The prover runs a given-clause loop with binary resolution and positive
factoring, no subsumption, smallest-clause-first selection with a
periodic oldest-first pick so unit chains cannot starve the queue.  Every
kept clause records how it was derived; on refutation the record is
pruned to the ancestors of the empty clause.

``minimal_resolution_proof`` computes a minimum-step refutation: a
depth-bounded forward closure collects derivations of each distinct
clause, then branch-and-bound picks the smallest set of derived clauses
that is closed under parenthood and contains the empty clause (steps are
counted once even when reused, so proofs are DAGs).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .matrix import Matrix
from .terms import (
    Clause,
    Literal,
    Substitution,
    Term,
    Var,
    apply_to_clause,
    apply_to_literal,
    clause_text,
    clause_vars,
    normalize,
    unify_raw,
)


@dataclass(frozen=True)
class ResStep:
    kind: str  # "input" | "resolve" | "factor"
    parents: tuple[int, ...]
    positions: tuple[int, ...]
    unifier: tuple[tuple[Var, Term], ...]
    clause: Clause

    @staticmethod
    def key_of(subst: Substitution) -> tuple[tuple[Var, Term], ...]:
        return tuple(sorted(subst.items(), key=lambda kv: (kv[0].name, kv[0].index)))


@dataclass(frozen=True)
class ResolutionProof:
    matrix: Matrix
    steps: tuple[ResStep, ...]

    def step_count(self) -> int:
        """Inference steps; input rows are free."""
        return sum(1 for s in self.steps if s.kind != "input")


def standardize_second(a: Clause, b: Clause) -> Clause:
    """Rename b's variables apart from a's by shifting their indices."""
    avars = clause_vars(a)
    if not avars:
        return b
    offset = 1 + max(v.index for v in avars)
    mapping: Substitution = {v: Var(v.name, v.index + offset) for v in clause_vars(b)}
    return apply_to_clause(mapping, b) if mapping else b


def resolve_at(a: Clause, b: Clause, i: int, j: int) -> Optional[tuple[Clause, Substitution]]:
    """Binary resolvent of a[i] against b[j] (b renamed apart), with its mgu."""
    b2 = standardize_second(a, b)
    la, lb = a[i], b2[j]
    if la.neg == lb.neg or la.pred != lb.pred or len(la.args) != len(lb.args):
        return None
    raw = unify_raw(la.complement(), lb, {})
    if raw is None:
        return None
    mgu = normalize(raw)
    rest = tuple(a[x] for x in range(len(a)) if x != i) + tuple(
        b2[x] for x in range(len(b2)) if x != j
    )
    return apply_to_clause(mgu, rest), mgu


def factor_at(a: Clause, i: int, j: int) -> Optional[tuple[Clause, Substitution]]:
    """Factor a[j] into a[i] (same polarity); keeps position i, drops j."""
    if i == j:
        return None
    la, lb = a[i], a[j]
    if la.neg != lb.neg or la.pred != lb.pred or len(la.args) != len(lb.args):
        return None
    raw = unify_raw(la, lb, {})
    if raw is None:
        return None
    mgu = normalize(raw)
    rest = tuple(a[x] for x in range(len(a)) if x != j)
    return apply_to_clause(mgu, rest), mgu


def _canonical_key(c: Clause) -> tuple[str, ...]:
    """Variant-insensitive clause key (multiset of literals, vars renumbered)."""
    mapping: Substitution = {}
    for v in clause_vars(c):
        mapping[v] = Var("V", len(mapping) + 1)
    renamed = apply_to_clause(mapping, c)
    return tuple(sorted(str(lit) for lit in renamed))


@dataclass
class SaturationResult:
    proof: Optional[ResolutionProof]
    verdict: str  # "refuted" | "saturated" | "budget"
    stats: dict

    def __bool__(self):
        return self.proof is not None


def saturate(m: Matrix, budget: int = 5000, pick_ratio: int = 3) -> SaturationResult:
    """Given-clause loop; returns the recorded proof pruned to the refutation.

    ``budget`` caps the number of kept derived clauses.  Every
    ``pick_ratio``-th selection takes the oldest passive clause instead of
    the smallest, which keeps goal clauses from starving behind derived
    unit chains.
    """
    t0 = time.perf_counter()
    kept: list[tuple[Clause, str, tuple[int, ...], tuple[int, ...], Substitution]] = []
    seen: set[tuple[str, ...]] = set()
    passive: list[int] = []
    usable: list[int] = []
    inferences = 0

    def keep(clause, kind, parents, positions, sub) -> Optional[int]:
        key = _canonical_key(clause)
        if key in seen:
            return None
        seen.add(key)
        kept.append((clause, kind, parents, positions, sub))
        kid = len(kept) - 1
        passive.append(kid)
        return kid

    empty_id: Optional[int] = None
    for clause in m.clauses:
        kid = keep(clause, "input", (), (), {})
        if kid is not None and not clause:
            empty_id = kid

    picks = 0
    while empty_id is None and passive:
        if len(kept) - len(m.clauses) > budget:
            return SaturationResult(
                None, "budget", {"kept": len(kept), "inferences": inferences,
                                 "wall_ms": round((time.perf_counter() - t0) * 1000, 3)}
            )
        picks += 1
        if picks % pick_ratio == 0:
            gi = min(passive)
        else:
            gi = min(passive, key=lambda k: (len(kept[k][0]), k))
        passive.remove(gi)
        usable.append(gi)
        g = kept[gi][0]

        new: list[tuple[Clause, str, tuple[int, ...], tuple[int, ...], Substitution]] = []
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                if not g[i].neg and not g[j].neg:
                    got = factor_at(g, i, j)
                    if got is not None:
                        new.append((got[0], "factor", (gi,), (i, j), got[1]))
        for ui in usable:
            u = kept[ui][0]
            for i in range(len(g)):
                for j in range(len(u)):
                    inferences += 1
                    got = resolve_at(g, u, i, j)
                    if got is not None:
                        new.append((got[0], "resolve", (gi, ui), (i, j), got[1]))
                    if ui != gi:
                        inferences += 1
                        got = resolve_at(u, g, j, i)
                        if got is not None:
                            new.append((got[0], "resolve", (ui, gi), (j, i), got[1]))
        for clause, kind, parents, positions, sub in new:
            kid = keep(clause, kind, parents, positions, sub)
            if kid is not None and not clause:
                empty_id = kid
                break

    stats = {"kept": len(kept), "inferences": inferences,
             "wall_ms": round((time.perf_counter() - t0) * 1000, 3)}
    if empty_id is None:
        return SaturationResult(None, "saturated", stats)

    ancestors: set[int] = set()
    stack = [empty_id]
    while stack:
        k = stack.pop()
        if k in ancestors:
            continue
        ancestors.add(k)
        stack.extend(kept[k][2])
    order = sorted(ancestors)
    renum = {k: n for n, k in enumerate(order)}
    steps = tuple(
        ResStep(
            kind=kept[k][1],
            parents=tuple(renum[p] for p in kept[k][2]),
            positions=kept[k][3],
            unifier=ResStep.key_of(kept[k][4]),
            clause=kept[k][0],
        )
        for k in order
    )
    return SaturationResult(ResolutionProof(m, steps), "refuted", stats)


@dataclass(frozen=True)
class ResCheck:
    status: str  # "accepted" | "rejected"
    reason: str = ""
    step: Optional[int] = None

    def __bool__(self):
        return self.status == "accepted"


def check_resolution_proof(rp: ResolutionProof) -> ResCheck:
    """Re-derive every step from its parents and confirm the refutation.

    Inputs must occur in the stated matrix; each inference's recorded
    unifier must actually unify the selected literals and reproduce the
    recorded clause; the last clause must be empty.
    """
    if not rp.steps:
        return ResCheck("rejected", "empty step sequence has no empty clause")
    for sid, s in enumerate(rp.steps):
        if s.kind == "input":
            if s.clause not in rp.matrix.clauses:
                return ResCheck("rejected", f"input clause {clause_text(s.clause)} not in matrix", sid)
            continue
        if any(p >= sid for p in s.parents):
            return ResCheck("rejected", "parent does not precede step", sid)
        sub = dict(s.unifier)
        if s.kind == "resolve":
            if len(s.parents) != 2 or len(s.positions) != 2:
                return ResCheck("rejected", "malformed resolution step", sid)
            a = rp.steps[s.parents[0]].clause
            b2 = standardize_second(a, rp.steps[s.parents[1]].clause)
            i, j = s.positions
            if not (0 <= i < len(a) and 0 <= j < len(b2)):
                return ResCheck("rejected", "literal position out of range", sid)
            la, lb = a[i], b2[j]
            if la.neg == lb.neg or la.pred != lb.pred:
                return ResCheck("rejected", "resolved literals are not complementary", sid)
            if apply_to_literal(sub, la.complement()) != apply_to_literal(sub, lb):
                return ResCheck("rejected", "recorded unifier does not unify the literals", sid)
            rest = tuple(a[x] for x in range(len(a)) if x != i) + tuple(
                b2[x] for x in range(len(b2)) if x != j
            )
            if apply_to_clause(sub, rest) != s.clause:
                return ResCheck("rejected", "clause is not the resolvent under the unifier", sid)
        elif s.kind == "factor":
            if len(s.parents) != 1 or len(s.positions) != 2:
                return ResCheck("rejected", "malformed factoring step", sid)
            a = rp.steps[s.parents[0]].clause
            i, j = s.positions
            if not (0 <= i < len(a) and 0 <= j < len(a)) or i == j:
                return ResCheck("rejected", "literal position out of range", sid)
            la, lb = a[i], a[j]
            if la.neg != lb.neg or la.pred != lb.pred:
                return ResCheck("rejected", "factored literals differ in predicate or polarity", sid)
            if apply_to_literal(sub, la) != apply_to_literal(sub, lb):
                return ResCheck("rejected", "recorded unifier does not unify the literals", sid)
            rest = tuple(a[x] for x in range(len(a)) if x != j)
            if apply_to_clause(sub, rest) != s.clause:
                return ResCheck("rejected", "clause is not the factor under the unifier", sid)
        else:
            return ResCheck("rejected", f"unknown step kind {s.kind!r}", sid)
    if rp.steps[-1].clause != ():
        return ResCheck("rejected", "last clause is not empty")
    return ResCheck("accepted")


class _Closure:
    """Depth-levelled forward closure recording how each clause arises.

    A derivation is recorded only at the level where its clause first
    appears and only when it reproduces the stored representative exactly,
    so recorded positions stay valid on replay and every recorded
    derivation strictly decreases depth towards the inputs (the chosen
    proof is therefore always well founded).
    """

    def __init__(self, m: Matrix, clause_cap: int):
        self.clause_cap = clause_cap
        self.rep: dict[tuple, Clause] = {}
        self.derivs: dict[tuple, list[tuple]] = {}
        self.depth: dict[tuple, int] = {}
        self.order: list[tuple] = []
        self.input_key_of: dict[tuple, int] = {}
        self.empty_key: Optional[tuple] = None
        self.level = 0
        self.saturated = False
        for ci, clause in enumerate(m.clauses):
            key = self._add(clause, 0, None)
            self.input_key_of.setdefault(key, ci)

    def _add(self, clause: Clause, level: int, deriv) -> tuple:
        key = _canonical_key(clause)
        if key not in self.rep:
            if len(self.rep) >= self.clause_cap:
                raise OverflowError("derived-clause cap exceeded")
            self.rep[key] = clause
            self.derivs[key] = []
            self.depth[key] = level
            self.order.append(key)
            if not clause:
                self.empty_key = key
        if deriv is not None and self.depth[key] == level and self.rep[key] == clause:
            if deriv not in self.derivs[key]:
                self.derivs[key].append(deriv)
        return key

    def grow_to(self, depth_cap: int):
        while self.level < depth_cap and not self.saturated:
            level = self.level + 1
            known = list(self.order)
            if not any(self.depth[k] == level - 1 for k in known):
                self.saturated = True
                return
            for ka in known:
                a = self.rep[ka]
                for kb in known:
                    if self.depth[ka] != level - 1 and self.depth[kb] != level - 1:
                        continue
                    b = self.rep[kb]
                    for i in range(len(a)):
                        for j in range(len(b)):
                            got = resolve_at(a, b, i, j)
                            if got is not None:
                                self._add(got[0], level, ("resolve", ka, kb, i, j))
                if self.depth[ka] == level - 1:
                    for i, j in itertools.permutations(range(len(a)), 2):
                        if a[i].neg or a[j].neg:
                            continue
                        got = factor_at(a, i, j)
                        if got is not None:
                            self._add(got[0], level, ("factor", ka, i, j))
            self.level = level


def _backward_min(closure: _Closure, cap: int) -> Optional[dict[tuple, tuple]]:
    """Smallest derivation-choice map deriving the empty clause.

    Minimises the number of derived clauses (each counted once however
    often it parents); derivations are tried in recorded order so ties
    break deterministically.
    """
    target = closure.empty_key
    if target is None or target in closure.input_key_of:
        return {} if target in closure.input_key_of else None
    best: list = [None, cap + 1]

    def rec(chosen: dict, pending: list):
        if len(chosen) >= best[1]:
            return
        if not pending:
            best[0] = dict(chosen)
            best[1] = len(chosen)
            return
        key = pending[-1]
        rest = pending[:-1]
        if key in chosen or key in closure.input_key_of:
            rec(chosen, rest)
            return
        for deriv in closure.derivs[key]:
            chosen[key] = deriv
            parents = [p for p in deriv[1:3] if isinstance(p, tuple)] if deriv[0] == "resolve" else [deriv[1]]
            rec(chosen, rest + [p for p in parents if p not in chosen and p not in closure.input_key_of])
            del chosen[key]

    rec({}, [target])
    return best[0]


def minimal_resolution_proof(
    m: Matrix, max_steps: int = 16, clause_cap: int = 20000
) -> Optional[ResolutionProof]:
    """Minimum-step refutation, or None when none exists within the caps.

    Raises OverflowError when the forward closure outgrows ``clause_cap``.
    """
    closure = _Closure(m, clause_cap)
    depth = 0
    while True:
        if closure.empty_key is not None:
            chosen = _backward_min(closure, max_steps)
            if chosen is not None:
                size = len(chosen)
                if size <= closure.level or closure.saturated:
                    return _emit_steps(m, closure, chosen)
                depth = size  # deeper closure may reveal smaller combinations
            else:
                depth = closure.level + 1
        else:
            depth = closure.level + 1
        if depth > max_steps or closure.saturated:
            return None
        closure.grow_to(depth)


def _emit_steps(m: Matrix, closure: _Closure, chosen: dict[tuple, tuple]) -> ResolutionProof:
    emitted: dict[tuple, int] = {}
    steps: list[ResStep] = []

    def emit(key: tuple) -> int:
        if key in emitted:
            return emitted[key]
        if key in closure.input_key_of:
            clause = m.clauses[closure.input_key_of[key]]
            steps.append(ResStep("input", (), (), (), clause))
        else:
            deriv = chosen[key]
            if deriv[0] == "resolve":
                _, ka, kb, i, j = deriv
                pa, pb = emit(ka), emit(kb)
                clause, mgu = resolve_at(steps[pa].clause, steps[pb].clause, i, j)
                steps.append(ResStep("resolve", (pa, pb), (i, j), ResStep.key_of(mgu), clause))
            else:
                _, ka, i, j = deriv
                pa = emit(ka)
                clause, mgu = factor_at(steps[pa].clause, i, j)
                steps.append(ResStep("factor", (pa,), (i, j), ResStep.key_of(mgu), clause))
        emitted[key] = len(steps) - 1
        return emitted[key]

    emit(closure.empty_key)
    return ResolutionProof(m, tuple(steps))
