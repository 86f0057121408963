"""Pure-Python kernel backend; semantics match ``_speedups`` exactly."""

from __future__ import annotations

from typing import Sequence


def find_open_path(
    widths: Sequence[int], connections: Sequence[tuple[int, int]]
) -> list[int] | None:
    """First path through the copy columns avoiding every connection.

    A column i contributes ``widths[i]`` literal slots; slot ids run flat
    across columns in order.  A path picks one slot per column and is open
    when it never contains both endpoints of a connection.  Columns are
    scanned left to right with ascending slot choices, so the returned list
    of per-column choices is the lexicographically first open path; None
    means the connections span every path.
    """
    m = len(widths)
    base = [0] * (m + 1)
    for i, w in enumerate(widths):
        base[i + 1] = base[i] + w
    nslots = base[m]
    # Adjacency: for each slot, the opposite endpoints of its connections.
    touch: list[list[int]] = [[] for _ in range(nslots)]
    for a, b in connections:
        touch[a].append(b)
        touch[b].append(a)

    chosen = bytearray(nslots)
    pick = [0] * m
    col = 0
    nxt = 0
    while True:
        if col == m:
            return pick[:]
        w = widths[col]
        placed = False
        for li in range(nxt, w):
            slot = base[col] + li
            if any(chosen[o] for o in touch[slot]):
                continue
            chosen[slot] = 1
            pick[col] = li
            placed = True
            break
        if placed:
            col += 1
            nxt = 0
            continue
        col -= 1
        if col < 0:
            return None
        slot = base[col] + pick[col]
        chosen[slot] = 0
        nxt = pick[col] + 1


def ground_unsat(pos_masks: Sequence[int], neg_masks: Sequence[int], n_atoms: int) -> bool:
    """True when no assignment of the n_atoms atoms satisfies every clause.

    Clause i is satisfied by assignment ``a`` (bit k set = atom k true) when
    it has a true positive literal (``a & pos``) or a false negated one
    (``~a & neg``).  Exhaustive sweep; callers enforce the atom budget.
    """
    full = (1 << n_atoms) - 1
    clauses = list(zip(pos_masks, neg_masks))
    for a in range(1 << n_atoms):
        inv = a ^ full
        for pos, neg in clauses:
            if not (a & pos) and not (inv & neg):
                break
        else:
            return False
    return True
