"""GF(2) linear algebra on integer-bitmask rows.

Rows are Python ints, bit ``j`` = column ``j``.  Arbitrary-precision ints give
word-packed XOR row operations for free.  Elimination only pivots on columns
below the stated width, so callers may carry extra bookkeeping bits above it
(e.g. an identity augmentation to recover the row-operation matrix).
"""

from __future__ import annotations

__all__ = [
    "gf2_rref",
    "gf2_rank",
    "gf2_kernel_basis",
    "gf2_reduce_against",
    "gf2_in_rowspan",
]


def gf2_rref(rows, ncols):
    """Reduced row echelon form.

    Returns ``(reduced, pivot_cols)`` where ``reduced`` keeps only nonzero
    rows ordered by pivot column (lowest column index wins the pivot) and
    ``pivot_cols[i]`` is the pivot column of ``reduced[i]``.
    """
    work = list(rows)
    reduced = []
    pivot_cols = []
    for col in range(ncols):
        mask = 1 << col
        src = None
        for i, r in enumerate(work):
            if r & mask:
                src = work.pop(i)
                break
        if src is None:
            continue
        for i, r in enumerate(work):
            if r & mask:
                work[i] = r ^ src
        for i, r in enumerate(reduced):
            if r & mask:
                reduced[i] = r ^ src
        reduced.append(src)
        pivot_cols.append(col)
        if not work:
            break
    # rows are appended in pivot discovery order, which is ascending by column
    return reduced, pivot_cols


def gf2_rank(rows, ncols):
    return len(gf2_rref(rows, ncols)[0])


def gf2_kernel_basis(rows, ncols):
    """Canonical basis of the right null space.

    Construct one vector per free column from the rref, then rref those
    vectors again so the returned basis only depends on the row span.
    """
    reduced, pivot_cols = gf2_rref(rows, ncols)
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = 1 << free
        fmask = 1 << free
        for row, pc in zip(reduced, pivot_cols):
            if row & fmask:
                v |= 1 << pc
        basis.append(v)
    return gf2_rref(basis, ncols)[0]


def gf2_reduce_against(v, pivot_rows):
    """Eliminate ``v`` against ``(pivot_col, row)`` pairs; returns the residue."""
    for pc, row in pivot_rows:
        if v & (1 << pc):
            v ^= row
    return v


def gf2_in_rowspan(v, rows, ncols):
    reduced, pivot_cols = gf2_rref(rows, ncols)
    return gf2_reduce_against(v, zip(pivot_cols, reduced)) == 0
