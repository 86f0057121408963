"""Deterministic benchmark families.

linear-chain(n): a base fact, one successor rule, and a two-part goal
n(f^n(zero)) & n(f^(n-1)(zero)); the second conjunct re-derives a prefix
of the first, so copy merging always has something to collapse.

doubling-chain(n): ground clauses {p0}, {~pi | qi}, {~pi | ri},
{~qi | ~ri | p(i+1)} for i < n with goal pn; tree-shaped proofs re-derive
each pi once per branch and double in size per level, while proofs that
share subgoals stay linear.

nontheorem-chain(n): linear-chain(n) with the base fact removed; invalid,
so every prover must come back empty-handed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import Formula
from .parser import parse_formula

FAMILY_NAMES = ("linear-chain", "doubling-chain", "nontheorem-chain")
MAX_N = 12


@dataclass(frozen=True)
class FamilySpec:
    name: str
    n: int

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise ValueError(f"unknown family {self.name!r}; pick one of {FAMILY_NAMES}")
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"family parameter n={self.n} outside 1..{MAX_N}")

    @property
    def label(self) -> str:
        return f"{self.name}:{self.n}"


def _fpow(k: int) -> str:
    term = "zero"
    for _ in range(k):
        term = f"f({term})"
    return term


def gen_family(spec: FamilySpec) -> Formula:
    """The family member as a formula; deterministic in (name, n)."""
    n = spec.n
    if spec.name == "linear-chain":
        text = (
            f"n(zero) & ![X]: (n(X) => n(f(X))) => n({_fpow(n)}) & n({_fpow(n - 1)})"
        )
    elif spec.name == "nontheorem-chain":
        text = f"![X]: (n(X) => n(f(X))) => n({_fpow(n)}) & n({_fpow(n - 1)})"
    else:
        parts = ["p0"]
        for i in range(n):
            parts.append(f"(p{i} => q{i})")
            parts.append(f"(p{i} => r{i})")
            parts.append(f"((q{i} & r{i}) => p{i + 1})")
        text = " & ".join(parts) + f" => p{n}"
    return parse_formula(text)


def parse_family(arg: str) -> list[FamilySpec]:
    """Parse ``name:n`` or ``name:a..b`` into family specs."""
    name, _, rng = arg.partition(":")
    if not rng:
        raise ValueError(f"expected name:n or name:a..b, got {arg!r}")
    if ".." in rng:
        lo, _, hi = rng.partition("..")
        return [FamilySpec(name, k) for k in range(int(lo), int(hi) + 1)]
    return [FamilySpec(name, int(rng))]
