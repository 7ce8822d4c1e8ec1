"""Tiny dense linear algebra that works on duals.

``numpy.linalg`` cannot differentiate through a matrix inverse built
from :class:`~algham.dual.Dual` entries, so the handful of small (r <= 4)
solves the geometry needs are done here with plain Gaussian elimination.
Pivoting compares value parts only.
"""

from __future__ import annotations

from .dual import value_of
from .errors import SingularMorphismError


def mat_solve(a, b):
    """Solve a x = b for square list-of-lists a and list b."""
    n = len(a)
    m = [list(row) + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(value_of(m[r][col])))
        if abs(value_of(m[piv][col])) < 1e-300:
            raise SingularMorphismError("matrix is singular to working precision")
        m[col], m[piv] = m[piv], m[col]
        inv = 1.0 / m[col][col]
        m[col] = [e * inv for e in m[col]]
        for r in range(n):
            if r != col:
                f = m[r][col]
                if isinstance(f, (int, float)) and f == 0.0:
                    continue
                m[r] = [er - f * ec for er, ec in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def mat_inv(a):
    """Inverse of a square list-of-lists matrix, dual-safe."""
    n = len(a)
    cols = []
    for j in range(n):
        e = [1.0 if i == j else 0.0 for i in range(n)]
        cols.append(mat_solve(a, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def mat_vec(a, v):
    return [sum(aij * vj for aij, vj in zip(row, v)) for row in a]
