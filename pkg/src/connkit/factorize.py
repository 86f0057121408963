"""Post-hoc copy merging on finished proofs, plus proof size metrics.

Two clause copies can merge when their substitution instances coincide
literal for literal; merging remaps connections onto the surviving
representative, drops duplicates, and shrinks the multiplicity.  Iterating
to a fixpoint turns tree-shaped certificates into their shared form.  The
size report compares the derivation DAG against its full tree unfolding,
where every shared subproof is counted once per reference.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrix import Connection, ConnectionProof, amplify
from .search import DerivationDag, replay_dag
from .terms import apply_to_clause, clause_text, clause_vars, normalize


@dataclass(frozen=True)
class FactorMap:
    """Per clause, a partition of its copy indices into merge groups.

    Groups are sorted tuples; the representative is the smallest member.
    """

    groups: tuple[tuple[tuple[int, ...], ...], ...]

    def is_identity(self) -> bool:
        return all(all(len(g) == 1 for g in clause_groups) for clause_groups in self.groups)

    def to_json(self) -> list[list[list[int]]]:
        return [[list(g) for g in clause_groups] for clause_groups in self.groups]


@dataclass(frozen=True)
class SizeReport:
    connections: int
    total_multiplicity: int
    tree_nodes: int
    dag_nodes: int

    def to_json(self) -> dict:
        return {
            "connections": self.connections,
            "total_multiplicity": self.total_multiplicity,
            "tree_nodes": self.tree_nodes,
            "dag_nodes": self.dag_nodes,
        }


def find_factorizations(p: ConnectionProof) -> FactorMap:
    """Group copies whose full substitution instances are equal.

    Copies of one clause land in the same group exactly when applying the
    proof's substitution to both yields the same literal sequence; the
    identity partition comes back when nothing merges.
    """
    am = amplify(p.matrix, p.mult)
    sigma = p.substitution()
    groups = []
    for ci in range(len(p.matrix.clauses)):
        buckets: dict[tuple, list[int]] = {}
        order: list[tuple] = []
        for k in range(1, p.mult[ci] + 1):
            inst = apply_to_clause(sigma, am.copy_clause(ci, k))
            key = tuple(str(lit) for lit in inst)
            if key not in buckets:
                buckets[key] = []
                order.append(key)
            buckets[key].append(k)
        groups.append(tuple(tuple(buckets[key]) for key in order))
    return FactorMap(tuple(groups))


def apply_factorization(p: ConnectionProof, fmap: FactorMap) -> ConnectionProof:
    """Merge copies per the map and renumber densely.

    Raises ValueError when a group contains copies with differing
    substitution instances (reporting the offending pair).  The identity
    map returns the proof object unchanged.
    """
    if len(fmap.groups) != len(p.matrix.clauses):
        raise ValueError("factor map does not cover the matrix")
    am = amplify(p.matrix, p.mult)
    sigma = p.substitution()

    for ci, clause_groups in enumerate(fmap.groups):
        seen = sorted(k for g in clause_groups for k in g)
        if seen != list(range(1, p.mult[ci] + 1)):
            raise ValueError(f"groups for clause {ci} do not partition copies 1..{p.mult[ci]}")
        for g in clause_groups:
            rep = min(g)
            rep_inst = apply_to_clause(sigma, am.copy_clause(ci, rep))
            for k in g:
                inst = apply_to_clause(sigma, am.copy_clause(ci, k))
                if inst != rep_inst:
                    raise ValueError(
                        f"clause {ci}: copies {rep} and {k} differ under the substitution "
                        f"({clause_text(rep_inst)} vs {clause_text(inst)})"
                    )

    if fmap.is_identity():
        return p

    # old copy -> new dense copy index, representatives ordered by smallest member
    remap: list[dict[int, int]] = []
    new_mult = []
    for ci, clause_groups in enumerate(fmap.groups):
        ordered = sorted(clause_groups, key=min)
        table = {}
        for new_k, g in enumerate(ordered, start=1):
            for k in g:
                table[k] = new_k
        remap.append(table)
        new_mult.append(len(ordered))

    def remap_end(end):
        occ, k = end
        ci, _li = p.matrix.occ_pair(occ)
        return (occ, remap[ci][k])

    new_conns = {Connection.of(remap_end(c.a), remap_end(c.b)) for c in p.connections}

    # Rebuild the substitution on the surviving copies' variables from the
    # instances of each group's representative.
    new_am = amplify(p.matrix, tuple(new_mult))
    new_sigma = {}
    for ci, clause_groups in enumerate(fmap.groups):
        ordered = sorted(clause_groups, key=min)
        for new_k, g in enumerate(ordered, start=1):
            rep = min(g)
            old_vars = clause_vars(am.copy_clause(ci, rep))
            new_vars = clause_vars(new_am.copy_clause(ci, new_k))
            for ov, nv in zip(old_vars, new_vars):
                if ov in sigma:
                    new_sigma[nv] = sigma[ov]

    out = ConnectionProof.build(p.matrix, tuple(new_mult), new_conns, normalize(new_sigma))
    try:
        out = ConnectionProof(out.matrix, out.mult, out.connections, out.subst, replay_dag(out))
    except Exception:
        pass
    return out


def factorization_fixpoint(p: ConnectionProof) -> ConnectionProof:
    """Apply find/apply rounds until nothing merges."""
    for _ in range(p.total_multiplicity()):
        fmap = find_factorizations(p)
        if fmap.is_identity():
            return p
        p = apply_factorization(p, fmap)
    return p


def size_report(p: ConnectionProof) -> SizeReport:
    """Connection count, total multiplicity, and DAG vs tree node counts.

    The tree count unfolds sharing: a subgoal closed by pointing at an
    already-solved node costs that node's whole subtree again.
    """
    dag: DerivationDag = p.dag if p.dag is not None else replay_dag(p)
    memo: dict[int, int] = {}

    def tree_size(nid: int) -> int:
        if nid in memo:
            return memo[nid]
        nd = dag.nodes[nid]
        if nd.rule == "factorization":
            size = tree_size(nd.target)
        else:
            size = 1 + sum(tree_size(c) for c in nd.children)
        memo[nid] = size
        return size

    tree_total = sum(tree_size(r) for r in dag.roots)
    # Pointer nodes collapse onto their targets, so the DAG size is the
    # count of genuinely solved nodes.
    pointer_nodes = sum(1 for nd in dag.nodes if nd.rule == "factorization")
    dag_total = len(dag.nodes) - pointer_nodes
    return SizeReport(
        connections=p.connection_count(),
        total_multiplicity=p.total_multiplicity(),
        tree_nodes=tree_total,
        dag_nodes=dag_total,
    )
