"""Formula trees over first-order atoms, with a TPTP-flavoured printer.

Connectives: ~, &, |, =>, <=> plus universal and existential quantifiers.
After parsing (see :mod:`connkit.parser`) every quantifier binds a distinct
variable name; :func:`rename_apart` establishes that invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import Literal, Term, Var, apply_to_term


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Atom | Not | And | Or | Implies | Iff | Forall | Exists

# Binding strength, loosest first.  Binary connectives print their operands
# at the next tighter level, so re-parsing yields the identical tree.
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def formula_text(f: Formula) -> str:
    return _fmt(f, 0)


def _fmt(f: Formula, outer: int) -> str:
    if isinstance(f, Atom):
        return str(Literal(False, f.pred, f.args))
    if isinstance(f, Not):
        return "~" + _fmt(f.sub, 9)
    if isinstance(f, (Forall, Exists)):
        q = "!" if isinstance(f, Forall) else "?"
        body = f.body
        inner = _fmt(body, 0)
        if not isinstance(body, (Atom, Not, Forall, Exists)):
            inner = f"({inner})"
        text = f"{q}[{f.var}]: {inner}"
        return f"({text})" if outer > 0 else text
    op = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}[type(f)]
    prec = _PREC[type(f)]
    # Right-nested chains of one connective print flat; the parser rebuilds
    # the same right-leaning tree.
    left = _fmt(f.left, prec + 1)
    right = _fmt(f.right, prec)
    text = f"{left} {op} {right}"
    return f"({text})" if outer >= prec else text


def formula_atoms(f: Formula):
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from formula_atoms(f.sub)
    elif isinstance(f, (Forall, Exists)):
        yield from formula_atoms(f.body)
    else:
        yield from formula_atoms(f.left)
        yield from formula_atoms(f.right)


def free_vars(f: Formula) -> list[Var]:
    """Free variables in first-occurrence order."""
    out: dict[Var, None] = {}

    def go(g: Formula, bound: frozenset[Var]):
        if isinstance(g, Atom):
            from .terms import term_vars

            for a in g.args:
                for v in term_vars(a):
                    if v not in bound:
                        out.setdefault(v, None)
        elif isinstance(g, Not):
            go(g.sub, bound)
        elif isinstance(g, (Forall, Exists)):
            go(g.body, bound | {g.var})
        else:
            go(g.left, bound)
            go(g.right, bound)

    go(f, frozenset())
    return list(out)


def rename_apart(f: Formula) -> Formula:
    """Rename bound variables so every quantifier binds a distinct name.

    Names already distinct are kept, so the pass is the identity on its own
    output.  Clashing binders get the first free numeric suffix (X, X1, X2...).
    """
    used: set[str] = {v.name for v in free_vars(f)}

    def fresh(name: str) -> str:
        if name not in used:
            return name
        n = 1
        while f"{name}{n}" in used:
            n += 1
        return f"{name}{n}"

    def go(g: Formula, env: dict[Var, Var]) -> Formula:
        if isinstance(g, Atom):
            sub = {v: w for v, w in env.items()}
            return Atom(g.pred, tuple(apply_to_term(sub, a) for a in g.args))
        if isinstance(g, Not):
            return Not(go(g.sub, env))
        if isinstance(g, (Forall, Exists)):
            name = fresh(g.var.name)
            used.add(name)
            nv = Var(name)
            body = go(g.body, {**env, g.var: nv})
            return (Forall if isinstance(g, Forall) else Exists)(nv, body)
        cls = type(g)
        return cls(go(g.left, env), go(g.right, env))

    return go(f, {})
