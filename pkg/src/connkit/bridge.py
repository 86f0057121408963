"""Bidirectional proof translation between connection and resolution form.

Connection to resolution: walk the derivation DAG leaves first; each
solved subgoal yields a clause deriving its literal's complement, built by
chain-resolving the entered clause against the subgoals it spawned.
Reduction-closed subgoals contribute no step; their literal rides along
and is factored away where the matching ancestor was resolved.  Shared
subproofs are translated once and their clause is reused as a parent, so
the step count tracks the connection count (plus one factoring per
duplicate collapse).

Resolution to connection: replay the refutation on fresh clause copies,
one copy per use of an input clause with derived clauses shared, collect
one connection per resolution step between the literals it resolved
(factoring merges literal provenances instead), compose the unifiers, and
finish with copy merging at fixpoint.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Optional

from .factorize import factorization_fixpoint
from .matrix import Connection, ConnectionProof, Matrix, OccCopy, amplify, check_proof
from .resolution import (
    ResolutionProof,
    ResStep,
    check_resolution_proof,
    resolve_at,
    factor_at,
)
from .search import DerivationDag, with_dag
from .terms import (
    Literal,
    Substitution,
    Var,
    _occurs,
    _walk,
    apply_to_literal,
    fresh_variant,
    normalize,
)


class BridgeError(Exception):
    """A translation could not complete; treated as a defect, not a verdict."""


def cm_to_resolution(p: ConnectionProof) -> ResolutionProof:
    """One resolution step per connection, scheduled leaves-first.

    Proofs without a derivation DAG are replayed first; replay failure
    propagates as :class:`connkit.search.ReplayError`.
    """
    p = with_dag(p)
    dag: DerivationDag = p.dag
    m = p.matrix
    am = amplify(m, p.mult)
    sigma = p.substitution()

    steps: list[ResStep] = []
    input_step: dict[int, int] = {}

    def input_of(ci: int) -> int:
        if ci not in input_step:
            steps.append(ResStep("input", (), (), (), m.clauses[ci]))
            input_step[ci] = len(steps) - 1
        return input_step[ci]

    def sigma_image(end: OccCopy) -> Literal:
        return apply_to_literal(sigma, am.literal_at(end))

    def chain(entry_ci: int, entry_k: int, head_li: Optional[int], child_ids: tuple[int, ...]):
        """Resolve the entered clause against its solved subgoals.

        Returns (step id, clause, origins); ``origins`` maps each literal
        position to the amplified endpoint it descends from.
        """
        sid = input_of(entry_ci)
        clause = m.clauses[entry_ci]
        origins: list[OccCopy] = [(m.occ_of(entry_ci, li), entry_k) for li in range(len(clause))]
        for cid in child_ids:
            child = dag.nodes[cid]
            d = node_clause[cid]
            if d is None:
                continue  # discharged against an ancestor; literal rides along
            d_sid, d_clause, d_head, d_origins = d
            pos = origins.index(child.end)
            got = resolve_at(clause, d_clause, pos, d_head)
            if got is None:
                raise BridgeError(f"subproof clause for node {cid} does not resolve")
            clause, mgu = got
            steps.append(ResStep("resolve", (sid, d_sid), (pos, d_head), ResStep.key_of(mgu), clause))
            sid = len(steps) - 1
            origins = origins[:pos] + origins[pos + 1 :] + [o for x, o in enumerate(d_origins) if x != d_head]
        # collapse duplicates (equal substitution instances) by factoring
        changed = True
        while changed:
            changed = False
            for i in range(len(clause)):
                for j in range(i + 1, len(clause)):
                    if sigma_image(origins[i]) == sigma_image(origins[j]):
                        got = factor_at(clause, i, j)
                        if got is None:
                            raise BridgeError("substitution-equal literals fail to factor")
                        clause, mgu = got
                        steps.append(ResStep("factor", (sid,), (i, j), ResStep.key_of(mgu), clause))
                        sid = len(steps) - 1
                        origins = origins[:j] + origins[j + 1 :]
                        changed = True
                        break
                if changed:
                    break
        return sid, clause, origins

    # node id -> None (reduction-closed) or (step id, clause, head pos, origins)
    node_clause: dict[int, Optional[tuple]] = {}
    for nd in dag.nodes:
        if nd.rule == "reduction":
            node_clause[nd.id] = None
        elif nd.rule == "factorization":
            node_clause[nd.id] = node_clause[dag.resolve_shared(nd.id).id]
        else:
            tend = nd.connection.b if nd.connection.a == nd.end else nd.connection.a
            tci, tli = m.occ_pair(tend[0])
            sid, clause, origins = chain(tci, tend[1], tli, nd.children)
            try:
                head = origins.index(tend)
            except ValueError:
                raise BridgeError(f"entered literal vanished while translating node {nd.id}")
            node_clause[nd.id] = (sid, clause, head, origins)

    sid, clause, _ = chain(dag.start_clause, dag.start_copy, None, dag.roots)
    if clause != ():
        raise BridgeError(f"translation left an open clause: {clause}")
    rp = ResolutionProof(m, tuple(steps))
    verdict = check_resolution_proof(rp)
    if not verdict:
        raise BridgeError(f"translated proof rejected: {verdict.reason} at step {verdict.step}")
    return rp


def resolution_to_cm(rp: ResolutionProof) -> ConnectionProof:
    """Connections from resolution steps, multiplicities from input uses."""
    verdict = check_resolution_proof(rp)
    if not verdict:
        raise BridgeError(f"input proof rejected: {verdict.reason} at step {verdict.step}")
    m = rp.matrix

    needed: set[int] = set()
    stack = [len(rp.steps) - 1]
    while stack:
        sid = stack.pop()
        if sid in needed:
            continue
        needed.add(sid)
        stack.extend(rp.steps[sid].parents)

    copies = [0] * len(m.clauses)
    bindings: Substitution = {}

    def unify_lits(a: Literal, b: Literal) -> bool:
        def terms(x, y) -> bool:
            x = _walk(x, bindings)
            y = _walk(y, bindings)
            if x == y:
                return True
            if isinstance(x, Var):
                if _occurs(x, y, bindings):
                    return False
                bindings[x] = y
                return True
            if isinstance(y, Var):
                if _occurs(y, x, bindings):
                    return False
                bindings[y] = x
                return True
            if x.name != y.name or len(x.args) != len(y.args):
                return False
            return all(terms(u, v) for u, v in zip(x.args, y.args))

        if a.pred != b.pred or len(a.args) != len(b.args):
            return False
        return all(terms(u, v) for u, v in zip(a.args, b.args))

    # entry: (frozenset of amplified endpoints, representative literal)
    derived: dict[int, list[tuple[frozenset, Literal]]] = {}
    connections: set[Connection] = set()

    def use(sid: int) -> list[tuple[frozenset, Literal]]:
        step = rp.steps[sid]
        if step.kind == "input":
            ci = m.clauses.index(step.clause)
            copies[ci] += 1
            k = copies[ci]
            variant = fresh_variant(m.clauses[ci], k)
            return [
                (frozenset({(m.occ_of(ci, li), k)}), variant[li])
                for li in range(len(variant))
            ]
        return derived[sid]

    for sid in sorted(needed):
        step = rp.steps[sid]
        if step.kind == "input":
            continue
        if step.kind == "resolve":
            a = use(step.parents[0])
            b = use(step.parents[1])
            i, j = step.positions
            la, lb = a[i], b[j]
            if not unify_lits(la[1].complement(), lb[1]):
                raise BridgeError(f"replay unification failed at step {sid}")
            connections.update(
                Connection.of(x, y) for x in la[0] for y in lb[0]
            )
            derived[sid] = [e for x, e in enumerate(a) if x != i] + [
                e for x, e in enumerate(b) if x != j
            ]
        else:  # factor
            a = use(step.parents[0])
            i, j = step.positions
            if not unify_lits(a[i][1], a[j][1]):
                raise BridgeError(f"replay factoring failed at step {sid}")
            merged = (a[i][0] | a[j][0], a[i][1])
            out = list(a)
            out[i] = merged
            del out[j]
            derived[sid] = out

    mult = tuple(max(c, 1) for c in copies)
    sigma = normalize(bindings)
    amp_vars = amplify(m, mult).variables()
    sigma = {v: t for v, t in sigma.items() if v in amp_vars}
    proof = ConnectionProof.build(m, mult, connections, sigma)
    proof = factorization_fixpoint(proof)
    verdict = check_proof(proof)
    if not verdict:
        raise BridgeError(f"translated certificate rejected: {verdict.reason}")
    return proof


@dataclass(frozen=True)
class TranslationReport:
    label: str
    family: str
    direction: str  # "cm->res" | "res->cm"
    input_size: int
    output_size: int
    ratio: float
    verdict: str

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "family": self.family,
            "direction": self.direction,
            "input_size": self.input_size,
            "output_size": self.output_size,
            "ratio": self.ratio,
            "verdict": self.verdict,
        }


def measure_linearity(
    corpus: Iterable[tuple[str, str, ConnectionProof, ResolutionProof]]
) -> list[TranslationReport]:
    """Raw size ratios for both translation directions over a proof corpus.

    Reports only count when the target-side checker accepts, and a
    translation failure surfaces as an exception rather than a number.
    """
    reports = []
    for label, family, cm, res in corpus:
        rp = cm_to_resolution(cm)
        reports.append(
            TranslationReport(
                label,
                family,
                "cm->res",
                cm.connection_count(),
                rp.step_count(),
                round(rp.step_count() / max(cm.connection_count(), 1), 4),
                check_resolution_proof(rp).status,
            )
        )
        cp = resolution_to_cm(res)
        reports.append(
            TranslationReport(
                label,
                family,
                "res->cm",
                res.step_count(),
                cp.connection_count(),
                round(cp.connection_count() / max(res.step_count(), 1), 4),
                check_proof(cp).status,
            )
        )
    return reports


def linearity_summary(reports: list[TranslationReport]) -> dict:
    """Max observed ratio per family and direction; no fitting, raw values."""
    out: dict = {}
    for r in reports:
        key = f"{r.family}:{r.direction}"
        cur = out.get(key)
        if cur is None or r.ratio > cur:
            out[key] = r.ratio
    return dict(sorted(out.items()))
