"""Refutational clausification: a formula's proof task as a clause matrix.

The matrix of a conjecture F is the CNF of ~F, built by the plain
rename / NNF / Skolemize / distribute pipeline with no definitional
renaming, so clause and literal positions track the input left to right.
Free variables are read as universally quantified.
"""

from __future__ import annotations

from .formulas import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    free_vars,
    rename_apart,
)
from .terms import Clause, Fn, Literal, Substitution, Var, apply_to_literal, clause_vars

SKOLEM_PREFIX = "sk"


class _Nnf:
    """Negation-normal form over literals, quantifiers kept in place."""

    pass


def _expand_iff(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_expand_iff(f.sub))
    if isinstance(f, Iff):
        left = _expand_iff(f.left)
        right = _expand_iff(f.right)
        return And(Implies(left, right), Implies(right, left))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, _expand_iff(f.body))
    return type(f)(_expand_iff(f.left), _expand_iff(f.right))


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.sub, not neg)
    if isinstance(f, And):
        cls = Or if neg else And
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        cls = And if neg else Or
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Implies):
        if neg:
            return And(_nnf(f.left, False), _nnf(f.right, True))
        return Or(_nnf(f.left, True), _nnf(f.right, False))
    if isinstance(f, Forall):
        cls = Exists if neg else Forall
        return cls(f.var, _nnf(f.body, neg))
    if isinstance(f, Exists):
        cls = Forall if neg else Exists
        return cls(f.var, _nnf(f.body, neg))
    raise TypeError(f"unexpected formula node {f!r}")


def _skolemize(f: Formula, scope: tuple[Var, ...], env: dict[Var, "Fn | Var"], counter: list[int]) -> Formula:
    """Drop quantifiers; existential variables become Skolem applications."""
    if isinstance(f, Atom):
        sub: Substitution = dict(env)
        lit = apply_to_literal(sub, Literal(False, f.pred, f.args))
        return Atom(lit.pred, lit.args)
    if isinstance(f, Not):
        inner = _skolemize(f.sub, scope, env, counter)
        return Not(inner)
    if isinstance(f, (And, Or)):
        return type(f)(
            _skolemize(f.left, scope, env, counter),
            _skolemize(f.right, scope, env, counter),
        )
    if isinstance(f, Forall):
        return _skolemize(f.body, scope + (f.var,), env, counter)
    if isinstance(f, Exists):
        sk = Fn(f"{SKOLEM_PREFIX}{counter[0]}", tuple(env.get(v, v) for v in scope))
        counter[0] += 1
        return _skolemize(f.body, scope, {**env, f.var: sk}, counter)
    raise TypeError(f"unexpected node in NNF {f!r}")


def _distribute(f: Formula) -> list[Clause]:
    if isinstance(f, Atom):
        return [(Literal(False, f.pred, f.args),)]
    if isinstance(f, Not):
        assert isinstance(f.sub, Atom)
        return [(Literal(True, f.sub.pred, f.sub.args),)]
    if isinstance(f, And):
        return _distribute(f.left) + _distribute(f.right)
    if isinstance(f, Or):
        return [a + b for a in _distribute(f.left) for b in _distribute(f.right)]
    raise TypeError(f"unexpected node after skolemization {f!r}")


def _disjoint_clause_vars(clauses: list[Clause]) -> list[Clause]:
    """Rename so no two clauses share a variable name (copies stay readable)."""
    used: set[str] = set()
    out: list[Clause] = []
    for clause in clauses:
        mapping: Substitution = {}
        for v in clause_vars(clause):
            name = v.name
            if name in mapping or name in used:
                n = 1
                while f"{v.name}{n}" in used:
                    n += 1
                name = f"{v.name}{n}"
            mapping[v] = Var(name)
        used.update(w.name for w in mapping.values())  # type: ignore[union-attr]
        out.append(tuple(apply_to_literal(mapping, lit) for lit in clause))
    return out


def clausify_clauses(f: Formula) -> list[Clause]:
    """CNF clauses of the negated conjecture, in input order."""
    closed = f
    for v in reversed(free_vars(f)):
        closed = Forall(v, closed)
    g = rename_apart(_expand_iff(closed))
    nnf = _nnf(g, neg=True)
    nnf = rename_apart(nnf)
    counter = [0]
    sk = _skolemize(nnf, (), {}, counter)
    return _disjoint_clause_vars(_distribute(sk))
