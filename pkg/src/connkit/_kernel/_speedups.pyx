# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend; semantics match ``pure`` exactly."""

from libc.stdlib cimport free, malloc


def find_open_path(widths, connections):
    """See ``connkit._kernel.pure.find_open_path``."""
    cdef int m = len(widths)
    cdef int ncon = len(connections)
    cdef int i, j, w, col, nxt, li, slot, o, placed
    cdef int nslots = 0

    cdef int *cwidths = <int *> malloc(m * sizeof(int))
    cdef int *base = <int *> malloc((m + 1) * sizeof(int))
    if cwidths == NULL or base == NULL:
        free(cwidths); free(base)
        raise MemoryError()
    base[0] = 0
    for i in range(m):
        w = widths[i]
        cwidths[i] = w
        base[i + 1] = base[i] + w
    nslots = base[m]

    # CSR adjacency slot -> opposite endpoints.
    cdef int *deg = <int *> malloc((nslots + 1) * sizeof(int))
    cdef int *ends = <int *> malloc((2 * ncon if ncon else 1) * sizeof(int))
    cdef int *off = <int *> malloc((nslots + 1) * sizeof(int))
    cdef char *chosen = <char *> malloc(nslots if nslots else 1)
    cdef int *pick = <int *> malloc((m if m else 1) * sizeof(int))
    if deg == NULL or ends == NULL or off == NULL or chosen == NULL or pick == NULL:
        free(cwidths); free(base); free(deg); free(ends); free(off); free(chosen); free(pick)
        raise MemoryError()

    try:
        for i in range(nslots + 1):
            deg[i] = 0
        for a, b in connections:
            deg[<int> a + 1] += 1
            deg[<int> b + 1] += 1
        for i in range(nslots):
            deg[i + 1] += deg[i]
        for i in range(nslots + 1):
            off[i] = deg[i]
        for a, b in connections:
            i = <int> a
            j = <int> b
            ends[off[i]] = j
            off[i] += 1
            ends[off[j]] = i
            off[j] += 1

        for i in range(nslots):
            chosen[i] = 0

        col = 0
        nxt = 0
        while True:
            if col == m:
                return [pick[i] for i in range(m)]
            placed = 0
            for li in range(nxt, cwidths[col]):
                slot = base[col] + li
                o = 0
                for j in range(deg[slot], deg[slot + 1]):
                    if chosen[ends[j]]:
                        o = 1
                        break
                if o:
                    continue
                chosen[slot] = 1
                pick[col] = li
                placed = 1
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
    finally:
        free(cwidths); free(base); free(deg); free(ends); free(off); free(chosen); free(pick)


def ground_unsat(pos_masks, neg_masks, int n_atoms):
    """See ``connkit._kernel.pure.ground_unsat``."""
    cdef int n = len(pos_masks)
    cdef int i
    cdef unsigned long long a, inv, full
    cdef unsigned long long *pos = <unsigned long long *> malloc((n if n else 1) * sizeof(unsigned long long))
    cdef unsigned long long *neg = <unsigned long long *> malloc((n if n else 1) * sizeof(unsigned long long))
    if pos == NULL or neg == NULL:
        free(pos); free(neg)
        raise MemoryError()
    cdef bint sat_all
    try:
        for i in range(n):
            pos[i] = pos_masks[i]
            neg[i] = neg_masks[i]
        full = (<unsigned long long> 1 << n_atoms) - 1
        a = 0
        while True:
            inv = a ^ full
            sat_all = True
            for i in range(n):
                if not (a & pos[i]) and not (inv & neg[i]):
                    sat_all = False
                    break
            if sat_all:
                return False
            if a == full:
                return True
            a += 1
    finally:
        free(pos); free(neg)
