"""First-order terms, literals, clauses, substitutions, and unification.

Terms are either variables or function applications; constants are 0-ary
applications.  A variable carries a base name plus a numeric index so that
clause copies can be renamed apart deterministically: ``X`` is index 0 and
prints as ``X``, the copy-3 variant prints as ``X_3``.  All values here are
immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, order=True)
class Var:
    name: str
    index: int = 0

    def __str__(self):
        return self.name if self.index == 0 else f"{self.name}_{self.index}"


@dataclass(frozen=True)
class Fn:
    name: str
    args: tuple["Term", ...] = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


Term = Union[Var, Fn]


@dataclass(frozen=True)
class Literal:
    """A possibly negated atom.  ``neg=True`` prints with a leading ``~``."""

    neg: bool
    pred: str
    args: tuple[Term, ...] = ()

    def complement(self) -> "Literal":
        return Literal(not self.neg, self.pred, self.args)

    def atom_text(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(str(a) for a in self.args)})"

    def __str__(self):
        return ("~" if self.neg else "") + self.atom_text()


Clause = tuple[Literal, ...]

# Substitutions are plain dicts from Var to Term; every substitution handed
# out by this module is normalized to idempotent form.
Substitution = dict[Var, Term]


def clause_text(clause: Clause) -> str:
    return " | ".join(str(lit) for lit in clause) if clause else "$false"


def term_vars(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    else:
        for a in t.args:
            yield from term_vars(a)


def literal_vars(lit: Literal) -> Iterator[Var]:
    for a in lit.args:
        yield from term_vars(a)


def clause_vars(clause: Clause) -> list[Var]:
    """Distinct variables of a clause in first-occurrence order."""
    seen: dict[Var, None] = {}
    for lit in clause:
        for v in literal_vars(lit):
            seen.setdefault(v, None)
    return list(seen)


def is_ground_clause(clause: Clause) -> bool:
    return not clause_vars(clause)


def _walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, Var):
        nxt = s.get(t)
        if nxt is None or nxt == t:
            return t
        t = nxt
    return t


def _occurs(v: Var, t: Term, s: Substitution) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t == v
    return any(_occurs(v, a, s) for a in t.args)


def apply_to_term(s: Substitution, t: Term) -> Term:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t
    return Fn(t.name, tuple(apply_to_term(s, a) for a in t.args))


def apply_to_literal(s: Substitution, lit: Literal) -> Literal:
    return Literal(lit.neg, lit.pred, tuple(apply_to_term(s, a) for a in lit.args))


def apply_to_clause(s: Substitution, clause: Clause) -> Clause:
    return tuple(apply_to_literal(s, lit) for lit in clause)


def apply_subst(s: Substitution, x):
    """Apply a substitution to a Term, Literal, or Clause."""
    if isinstance(x, (Var, Fn)):
        return apply_to_term(s, x)
    if isinstance(x, Literal):
        return apply_to_literal(s, x)
    return apply_to_clause(s, x)


def normalize(s: Substitution) -> Substitution:
    """Resolve binding chains so that applying the result twice equals once.

    Bindings are built in triangular form during unification; the occurs
    check guarantees the chains are acyclic, so full resolution terminates.
    Bindings that collapse to the variable itself are dropped.
    """
    out: Substitution = {}
    for v in s:
        t = apply_to_term(s, v)
        if t != v:
            out[v] = t
    return out


def unify_terms(a: Term, b: Term, s: Substitution) -> Substitution | None:
    """Extend triangular bindings ``s`` so that a and b become equal.

    Returns the extended (still triangular) bindings, or None on a symbol
    clash or occurs-check failure.  ``s`` itself is not mutated.
    """
    a = _walk(a, s)
    b = _walk(b, s)
    if a == b:
        return s
    if isinstance(a, Var):
        if _occurs(a, b, s):
            return None
        s = dict(s)
        s[a] = b
        return s
    if isinstance(b, Var):
        if _occurs(b, a, s):
            return None
        s = dict(s)
        s[b] = a
        return s
    if a.name != b.name or len(a.args) != len(b.args):
        return None
    for x, y in zip(a.args, b.args):
        s = unify_terms(x, y, s)
        if s is None:
            return None
    return s


def unify_raw(a: Literal, b: Literal, s: Substitution) -> Substitution | None:
    """Like :func:`unify` but leaves the result in triangular form."""
    if a.neg != b.neg or a.pred != b.pred or len(a.args) != len(b.args):
        return None
    for x, y in zip(a.args, b.args):
        s = unify_terms(x, y, s)
        if s is None:
            return None
    return s


def unify(a: Literal, b: Literal, s: Substitution | None = None) -> Substitution | None:
    """Most general unifier of two same-polarity literals, extending ``s``.

    The result is idempotent and satisfies apply(result, a) == apply(result, b).
    Callers matching complementary literals flip one polarity first.
    Returns None on clash or occurs-check failure.
    """
    raw = unify_raw(a, b, {} if s is None else s)
    return None if raw is None else normalize(raw)


def fresh_variant(clause: Clause, copy: int) -> Clause:
    """Rename the clause's variables to the variant unique to this copy.

    Each distinct variable is mapped injectively; for the usual case of
    index-0 variables the copy index simply becomes the variable index, so
    copies 1 and 2 of the same clause share no variables.
    """
    if copy < 1:
        raise ValueError(f"copy index must be >= 1, got {copy}")
    mapping: dict[Var, Var] = {}
    taken: set[Var] = set()
    for v in clause_vars(clause):
        nv = Var(v.name, copy) if v.index == 0 else Var(f"{v.name}_{v.index}", copy)
        while nv in taken:
            nv = Var(nv.name + "x", copy)
        mapping[v] = nv
        taken.add(nv)
    sub: Substitution = dict(mapping)
    return apply_to_clause(sub, clause)


def subst_text(s: Substitution) -> dict[str, str]:
    """Substitution as sorted printable mapping, for reports and JSON."""
    return {str(v): str(t) for v, t in sorted(s.items(), key=lambda kv: (kv[0].name, kv[0].index))}
