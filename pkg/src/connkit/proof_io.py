"""JSON exchange formats for connection and resolution proofs.

Field order is fixed so identical proofs serialize byte-identically:

connection proof::

    {"format": "connection-proof",
     "matrix": [["n(zero)"], ["~n(X)", "n(f(X))"], ...],
     "multiplicity": [1, 3, 1],
     "connections": [[[0, 1], [1, 1]], ...],
     "substitution": {"X_1": "zero", ...},
     "dag": {...},            # optional derivation structure
     "factorization": [...],  # optional per-clause copy groups
     "sizes": {...},          # optional size report
     "stats": {...}}          # optional search statistics

resolution proof::

    {"format": "resolution-proof",
     "matrix": [...],
     "steps": [{"kind": "input|resolve|factor", "parents": [...],
                "positions": [...], "unifier": {...}, "clause": [...]}]}

Literals and terms are strings in the input grammar; variable names of the
form ``base_<digits>`` decode to copy variants.
"""

from __future__ import annotations

import json
from typing import Any

from .matrix import Connection, ConnectionProof, Matrix
from .parser import parse_literal, parse_term
from .terms import Clause, Substitution, Var, subst_text


def _matrix_json(m: Matrix) -> list[list[str]]:
    return [[str(lit) for lit in clause] for clause in m.clauses]


def _matrix_from_json(data: list[list[str]]) -> Matrix:
    return Matrix(tuple(tuple(parse_literal(s) for s in clause) for clause in data))


def _subst_from_json(data: dict[str, str]) -> Substitution:
    out: Substitution = {}
    for k, v in data.items():
        var = parse_term(k)
        if not isinstance(var, Var):
            raise ValueError(f"substitution key {k!r} is not a variable")
        out[var] = parse_term(v)
    return out


def dag_json(dag) -> dict[str, Any]:
    return {
        "start": {"clause": dag.start_clause, "copy": dag.start_copy},
        "roots": list(dag.roots),
        "nodes": [
            {
                "id": n.id,
                "occ": n.end[0],
                "copy": n.end[1],
                "rule": n.rule,
                "connection": [list(n.connection.a), list(n.connection.b)] if n.connection else None,
                "children": list(n.children),
                "target": n.target,
            }
            for n in dag.nodes
        ],
    }


def dag_from_json(data) -> "Any":
    from .search import DagNode, DerivationDag

    nodes = tuple(
        DagNode(
            id=d["id"],
            end=(d["occ"], d["copy"]),
            rule=d["rule"],
            connection=(
                Connection.of(tuple(d["connection"][0]), tuple(d["connection"][1]))
                if d.get("connection")
                else None
            ),
            children=tuple(d.get("children", ())),
            target=d.get("target"),
        )
        for d in data["nodes"]
    )
    return DerivationDag(
        start_clause=data["start"]["clause"],
        start_copy=data["start"]["copy"],
        roots=tuple(data["roots"]),
        nodes=nodes,
    )


def connection_proof_json(
    p: ConnectionProof,
    factorization=None,
    sizes=None,
    stats=None,
    include_dag: bool = True,
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "format": "connection-proof",
        "matrix": _matrix_json(p.matrix),
        "multiplicity": list(p.mult),
        "connections": [[list(c.a), list(c.b)] for c in p.connections],
        "substitution": subst_text(p.substitution()),
    }
    if include_dag and p.dag is not None:
        doc["dag"] = dag_json(p.dag)
    if factorization is not None:
        doc["factorization"] = factorization
    if sizes is not None:
        doc["sizes"] = sizes
    if stats is not None:
        doc["stats"] = stats
    return doc


def connection_proof_from_json(doc: dict[str, Any]) -> ConnectionProof:
    if doc.get("format") != "connection-proof":
        raise ValueError(f"not a connection proof document: format={doc.get('format')!r}")
    matrix = _matrix_from_json(doc["matrix"])
    conns = [Connection.of(tuple(a), tuple(b)) for a, b in doc["connections"]]
    subst = _subst_from_json(doc.get("substitution", {}))
    dag = dag_from_json(doc["dag"]) if doc.get("dag") else None
    return ConnectionProof.build(matrix, tuple(doc["multiplicity"]), conns, subst, dag)


def resolution_proof_json(rp) -> dict[str, Any]:
    return {
        "format": "resolution-proof",
        "matrix": _matrix_json(rp.matrix),
        "steps": [
            {
                "kind": s.kind,
                "parents": list(s.parents),
                "positions": list(s.positions),
                "unifier": subst_text(dict(s.unifier)),
                "clause": [str(lit) for lit in s.clause],
            }
            for s in rp.steps
        ],
    }


def resolution_proof_from_json(doc: dict[str, Any]):
    from .resolution import ResolutionProof, ResStep

    if doc.get("format") != "resolution-proof":
        raise ValueError(f"not a resolution proof document: format={doc.get('format')!r}")
    matrix = _matrix_from_json(doc["matrix"])
    steps = []
    for d in doc["steps"]:
        unifier = tuple(
            sorted(_subst_from_json(d.get("unifier", {})).items(), key=lambda kv: (kv[0].name, kv[0].index))
        )
        clause: Clause = tuple(parse_literal(s) for s in d["clause"])
        steps.append(
            ResStep(
                kind=d["kind"],
                parents=tuple(d["parents"]),
                positions=tuple(d["positions"]),
                unifier=unifier,
                clause=clause,
            )
        )
    return ResolutionProof(matrix, tuple(steps))


def proof_to_text(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=1)


def load_proof(text: str):
    """Load either proof kind from JSON text, dispatching on its format tag."""
    doc = json.loads(text)
    fmt = doc.get("format")
    if fmt == "connection-proof":
        return connection_proof_from_json(doc)
    if fmt == "resolution-proof":
        return resolution_proof_from_json(doc)
    raise ValueError(f"unknown proof format {fmt!r}")
