"""Exact rank of rational matrices by fraction-free (Bareiss) elimination."""

from __future__ import annotations

from fractions import Fraction
from math import lcm


def _integer_rows(rows):
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        den = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * den) for x in row])
    return out


def rank(matrix) -> int:
    """Rank over Q.  Rows are scaled to integers first, so every pivot step
    stays in Z and the Bareiss division is exact."""
    m = _integer_rows(matrix)
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        for i in range(r + 1, n_rows):
            a = m[i][c]
            for j in range(c + 1, n_cols):
                m[i][j] = (p * m[i][j] - a * m[r][j]) // prev
            m[i][c] = 0
        prev = p
        r += 1
        if r == n_rows:
            break
    return r
