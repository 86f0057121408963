"""Parser for the TPTP-flavoured input grammar.

Grammar sketch (loosest binding first)::

    formula  := iff
    iff      := impl ("<=>" iff)?
    impl     := disj ("=>" impl)?
    disj     := conj ("|" disj)?
    conj     := unit ("&" conj)?
    unit     := "~" unit | "![X]:" unit | "?[X]:" unit | "(" formula ")" | atom
    atom     := lower_word ("(" term ("," term)* ")")?
    term     := UPPER_WORD | lower_word ("(" term ("," term)* ")")?

Lower-case identifiers are predicate/function/constant symbols, upper-case
ones are variables.  A quantifier governs the following unit, so
``n(zero) & ![X]: (n(X) => n(f(X))) => goal`` groups as
``(n(zero) & ![X]:(...)) => goal``.  Names ending in ``_<digits>`` are
reserved for machine-generated clause-copy variants.

Parsing checks that every symbol is used at one arity and in one role
(predicate vs function), and renames bound variables apart; printing via
:func:`connkit.formulas.formula_text` round-trips to the identical tree.
"""

from __future__ import annotations

import re

from .formulas import And, Atom, Exists, Forall, Formula, Iff, Implies, Not, Or, rename_apart
from .terms import Fn, Literal, Term, Var

_WORD = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_VARIANT = re.compile(r"^([A-Za-z][A-Za-z0-9_]*?)_([0-9]+)$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Lexer:
    def __init__(self, text: str):
        self.tokens: list[tuple[str, int, int]] = []
        pos = 0
        while pos < len(text):
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            line, col = _linecol(text, pos)
            m = _WORD.match(text, pos)
            if m:
                self.tokens.append((m.group(), line, col))
                pos = m.end()
                continue
            if text.startswith("<=>", pos):
                op = "<=>"
            elif text.startswith("=>", pos):
                op = "=>"
            elif ch in "~&|!?[]:(),":
                op = ch
            else:
                raise ParseError(f"unexpected character {ch!r}", line, col)
            self.tokens.append((op, line, col))
            pos += len(op)
        self.tokens.append(("", *_linecol(text, len(text))))
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def next(self) -> str:
        tok = self.tokens[self.i]
        if tok[0]:
            self.i += 1
        return tok[0]

    def expect(self, want: str):
        tok, line, col = self.tokens[self.i]
        if tok != want:
            got = repr(tok) if tok else "end of input"
            raise ParseError(f"expected {want!r}, found {got}", line, col)
        self.i += 1

    def error(self, message: str):
        _, line, col = self.tokens[self.i]
        raise ParseError(message, line, col)


class _Symbols:
    """Tracks each symbol's arity and role, rejecting inconsistent uses."""

    def __init__(self):
        self.seen: dict[str, tuple[str, int]] = {}

    def note(self, name: str, role: str, arity: int, lx: _Lexer):
        prev = self.seen.get(name)
        if prev is None:
            self.seen[name] = (role, arity)
        elif prev != (role, arity):
            lx.error(
                f"symbol {name!r} used as {role}/{arity} but earlier as {prev[0]}/{prev[1]}"
            )


def _is_var_name(name: str) -> bool:
    return name[0].isupper()


def _parse_term(lx: _Lexer, syms: _Symbols) -> Term:
    name = lx.peek()
    if not name or not name[0].isalpha():
        lx.error("expected a term")
    lx.next()
    if _is_var_name(name):
        return Var(name)
    if lx.peek() == "(":
        lx.next()
        args = [_parse_term(lx, syms)]
        while lx.peek() == ",":
            lx.next()
            args.append(_parse_term(lx, syms))
        lx.expect(")")
        syms.note(name, "function", len(args), lx)
        return Fn(name, tuple(args))
    syms.note(name, "function", 0, lx)
    return Fn(name)


def _parse_atom(lx: _Lexer, syms: _Symbols) -> Atom:
    name = lx.peek()
    if not name or not name[0].isalpha():
        lx.error("expected an atom")
    if _is_var_name(name):
        lx.error(f"predicate symbols must be lower-case, found variable {name!r}")
    lx.next()
    args: list[Term] = []
    if lx.peek() == "(":
        lx.next()
        args.append(_parse_term(lx, syms))
        while lx.peek() == ",":
            lx.next()
            args.append(_parse_term(lx, syms))
        lx.expect(")")
    syms.note(name, "predicate", len(args), lx)
    return Atom(name, tuple(args))


def _parse_unit(lx: _Lexer, syms: _Symbols) -> Formula:
    tok = lx.peek()
    if tok == "~":
        lx.next()
        return Not(_parse_unit(lx, syms))
    if tok in ("!", "?"):
        lx.next()
        lx.expect("[")
        name = lx.peek()
        if not name or not _is_var_name(name):
            lx.error("expected a variable after quantifier")
        lx.next()
        lx.expect("]")
        lx.expect(":")
        body = _parse_unit(lx, syms)
        return (Forall if tok == "!" else Exists)(Var(name), body)
    if tok == "(":
        lx.next()
        f = _parse_formula(lx, syms)
        lx.expect(")")
        return f
    return _parse_atom(lx, syms)


def _parse_formula(lx: _Lexer, syms: _Symbols) -> Formula:
    f = _parse_conj(lx, syms)
    while True:
        tok = lx.peek()
        if tok == "|":
            lx.next()
            f = Or(f, _parse_conj(lx, syms))
        elif tok == "=>":
            lx.next()
            return Implies(f, _parse_formula(lx, syms))
        elif tok == "<=>":
            lx.next()
            return Iff(f, _parse_formula(lx, syms))
        else:
            return f


def _parse_conj(lx: _Lexer, syms: _Symbols) -> Formula:
    f = _parse_unit(lx, syms)
    while lx.peek() == "&":
        lx.next()
        f = And(f, _parse_unit(lx, syms))
    return f


def parse_formula(text: str) -> Formula:
    """Parse a formula, rename bound variables apart, and return the tree.

    Raises :class:`ParseError` with line/column on malformed input or when a
    symbol is used at two different arities.
    """
    lx = _Lexer(text)
    syms = _Symbols()
    f = _parse_formula(lx, syms)
    if lx.peek():
        lx.error(f"trailing input {lx.peek()!r}")
    return rename_apart(f)


def parse_term(text: str) -> Term:
    """Parse a bare term; names like X_3 decode to copy-variant variables."""
    lx = _Lexer(text)
    t = _parse_term(lx, _Symbols())
    if lx.peek():
        lx.error(f"trailing input {lx.peek()!r}")
    return _decode_variants_term(t)


def parse_literal(text: str) -> Literal:
    """Parse ``p(...)`` or ``~p(...)``; decodes copy-variant variables."""
    lx = _Lexer(text)
    syms = _Symbols()
    neg = False
    if lx.peek() == "~":
        lx.next()
        neg = True
    atom = _parse_atom(lx, syms)
    if lx.peek():
        lx.error(f"trailing input {lx.peek()!r}")
    args = tuple(_decode_variants_term(a) for a in atom.args)
    return Literal(neg, atom.pred, args)


def _decode_variants_term(t: Term) -> Term:
    if isinstance(t, Var):
        m = _VARIANT.match(t.name)
        return Var(m.group(1), int(m.group(2))) if m else t
    return Fn(t.name, tuple(_decode_variants_term(a) for a in t.args))
