"""Exact sparse Gaussian elimination over the rationals."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

from gmpy2 import mpq


def rref(rows: list[dict[int, object]], num_cols: int) -> tuple[list[dict[int, object]], list[int]]:
    """Reduced row echelon form of a sparse matrix, pivoting on the leftmost column.

    ``rows`` are dicts ``{column: value}``; the last column may be an
    augmented right-hand side.  Returns the nonzero reduced rows and the
    pivot column of each.
    """
    rows = [{c: mpq(v) for c, v in r.items() if v} for r in rows]
    rows = [r for r in rows if r]
    pivots: list[int] = []
    done: list[dict] = []
    for col in range(num_cols):
        idx = next((i for i, r in enumerate(rows) if col in r), None)
        if idx is None:
            continue
        prow = rows.pop(idx)
        inv = 1 / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        rest = []
        for r in rows:
            f = r.get(col)
            if f:
                r = dict(r)
                for c, v in prow.items():
                    nv = r.get(c, 0) - f * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
            if r:
                rest.append(r)
        rows = rest
        for k, r in enumerate(done):
            f = r.get(col)
            if f:
                r = dict(r)
                for c, v in prow.items():
                    nv = r.get(c, 0) - f * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
                done[k] = r
        done.append(prow)
        pivots.append(col)
    # anything left has no pivot among the first num_cols columns
    done.extend(rows)
    pivots.extend([num_cols] * len(rows))
    return done, pivots


def solve_rref(columns: Sequence[Mapping[int, object]], rhs: Mapping[int, object],
               num_rows: int) -> Optional[dict[int, mpq]]:
    """Solve ``A x = b`` exactly; ``A`` given column-wise as sparse dicts.

    Returns the solution with every free unknown set to zero (as a sparse
    dict ``{unknown: value}``), or ``None`` when the system is inconsistent.
    """
    n = len(columns)
    rows: list[dict[int, object]] = [{} for _ in range(num_rows)]
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows[i][j] = v
    for i, v in rhs.items():
        rows[i][n] = v
    red, piv = rref(rows, n)
    sol = {}
    for r, p in zip(red, piv):
        if p >= n:
            if r.get(n):
                return None
            continue
        v = r.get(n, 0)
        if v:
            sol[p] = mpq(v)
    return sol
