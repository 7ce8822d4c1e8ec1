"""Smooth scalar / matrix fields with exact forward-mode derivatives.

Every geometric object downstream (anchors, connections, Hamiltonians)
is built from the field classes here.  Evaluation functions must accept
:class:`~algham.dual.Dual` coordinates; derivatives are then exact, and
the central-difference helpers exist only as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dual import derivative, value_of
from .errors import NumericalDomainError, ShapeError


def _check_finite(v):
    x = value_of(v)
    if not math.isfinite(x):
        raise NumericalDomainError(f"field evaluation produced {x!r}")
    return v


@dataclass(frozen=True)
class BasePoint:
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        for v in self.x:
            if not math.isfinite(v):
                raise NumericalDomainError("non-finite base coordinate")


@dataclass(frozen=True)
class PhasePoint:
    x: tuple
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        for v in self.x + self.p:
            if not math.isfinite(v):
                raise NumericalDomainError("non-finite phase coordinate")


class BaseField:
    """Scalar field on the base manifold: fn(x) with x a coordinate list."""

    def __init__(self, fn):
        self.fn = fn

    def value(self, x):
        return _check_finite(self.fn(list(x)))

    def d(self, x, i):
        return derivative(self.fn, list(x), i)

    def grad(self, x):
        return [self.d(x, i) for i in range(len(x))]

    def __add__(self, other):
        o = other.fn if isinstance(other, BaseField) else (lambda x, c=other: c)
        return BaseField(lambda x, f=self.fn, g=o: f(x) + g(x))

    def __mul__(self, other):
        o = other.fn if isinstance(other, BaseField) else (lambda x, c=other: c)
        return BaseField(lambda x, f=self.fn, g=o: f(x) * g(x))

    __rmul__ = __mul__

    def __sub__(self, other):
        o = other.fn if isinstance(other, BaseField) else (lambda x, c=other: c)
        return BaseField(lambda x, f=self.fn, g=o: f(x) - g(x))

    def compose(self, diffeo):
        """The pull-back x -> f(phi(x))."""
        return BaseField(lambda x, f=self.fn, phi=diffeo: f(phi(x)))

    @staticmethod
    def constant(c):
        return BaseField(lambda x: c)


class ScalarField:
    """Scalar field on the phase space: fn(x, p)."""

    def __init__(self, fn):
        self.fn = fn

    def value(self, pt):
        return _check_finite(self.fn(list(pt.x), list(pt.p)))

    def raw(self, x, p):
        return self.fn(list(x), list(p))

    def dx(self, pt, i):
        x, p = list(pt.x), list(pt.p)
        return derivative(lambda xs: self.fn(xs, p), x, i)

    def dp(self, pt, a):
        x, p = list(pt.x), list(pt.p)
        return derivative(lambda ps: self.fn(x, ps), p, a)

    def grad_x(self, pt):
        return [self.dx(pt, i) for i in range(len(pt.x))]

    def grad_p(self, pt):
        return [self.dp(pt, a) for a in range(len(pt.p))]

    def d2pp(self, pt, a, b):
        x, p = list(pt.x), list(pt.p)

        def inner(ps):
            return derivative(lambda qs: self.fn(x, qs), ps, a)
        return derivative(inner, p, b)

    def d2xp(self, pt, i, a):
        x, p = list(pt.x), list(pt.p)

        def inner(ps):
            return derivative(lambda xs: self.fn(xs, ps), x, i)
        return derivative(inner, p, a)

    def __add__(self, other):
        o = other.fn if isinstance(other, ScalarField) else (lambda x, p, c=other: c)
        return ScalarField(lambda x, p, f=self.fn, g=o: f(x, p) + g(x, p))

    def __sub__(self, other):
        o = other.fn if isinstance(other, ScalarField) else (lambda x, p, c=other: c)
        return ScalarField(lambda x, p, f=self.fn, g=o: f(x, p) - g(x, p))

    def __mul__(self, other):
        o = other.fn if isinstance(other, ScalarField) else (lambda x, p, c=other: c)
        return ScalarField(lambda x, p, f=self.fn, g=o: f(x, p) * g(x, p))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(lambda x, p, f=self.fn: -f(x, p))

    @staticmethod
    def constant(c):
        return ScalarField(lambda x, p: c)

    @staticmethod
    def from_base(bf):
        return ScalarField(lambda x, p, f=bf.fn: f(x))

    @staticmethod
    def momentum(a):
        return ScalarField(lambda x, p: p[a])

    @staticmethod
    def coordinate(i):
        return ScalarField(lambda x, p: x[i])


class MatrixField:
    """Matrix-valued field on the base: fn(x) -> list of rows."""

    def __init__(self, fn, shape=None):
        self.fn = fn
        self.shape = shape

    def value(self, x):
        rows = self.fn(list(x))
        if self.shape is not None and (len(rows), len(rows[0])) != self.shape:
            raise ShapeError(f"expected {self.shape}, got {(len(rows), len(rows[0]))}")
        for row in rows:
            for v in row:
                _check_finite(v)
        return rows

    def entry(self, i, j):
        return BaseField(lambda x, f=self.fn: f(x)[i][j])

    def d(self, x, i):
        n_rows = len(self.fn(list(x)))
        n_cols = len(self.fn(list(x))[0])
        return [[derivative(lambda xs, r=r, c=c: self.fn(xs)[r][c], list(x), i)
                 for c in range(n_cols)] for r in range(n_rows)]

    def compose(self, diffeo):
        return MatrixField(lambda x, f=self.fn, phi=diffeo: f(phi(x)), self.shape)

    @staticmethod
    def identity(n):
        rows = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        return MatrixField(lambda x, r=rows: r, (n, n))

    @staticmethod
    def constant(rows):
        return MatrixField(lambda x, r=rows: r, (len(rows), len(rows[0])))


class Structure3Field:
    """Cubic array field L[c][a][b] on the base, for structure functions."""

    def __init__(self, fn, r):
        self.fn = fn
        self.r = r

    def value(self, x):
        return self.fn(list(x))

    @staticmethod
    def zero(r):
        z = [[[0.0] * r for _ in range(r)] for _ in range(r)]
        return Structure3Field(lambda x, v=z: v, r)

    @staticmethod
    def constant(arr):
        return Structure3Field(lambda x, v=arr: v, len(arr))


class DiffeoMap:
    """A smooth invertible map of the base with a declared inverse."""

    def __init__(self, fwd, inv):
        self.fwd = fwd
        self.inv = inv

    def __call__(self, x):
        return self.fwd(list(x))

    def inverse(self, y):
        return self.inv(list(y))

    def jacobian(self, x):
        """J[k][i] = d(fwd^k)/dx^i, dual-safe in x."""
        n = len(x)
        return [[derivative(lambda xs, k=k: self.fwd(xs)[k], list(x), i)
                 for i in range(n)] for k in range(n)]

    @staticmethod
    def identity():
        return DiffeoMap(lambda x: list(x), lambda y: list(y))

    @staticmethod
    def translation(tau):
        t = [float(v) for v in tau]
        return DiffeoMap(lambda x: [xi + ti for xi, ti in zip(x, t)],
                         lambda y: [yi - ti for yi, ti in zip(y, t)])


# ---------------------------------------------------------------------------
# derivative oracles


def dual_eval(field, at, direction):
    """Exact (value, directional derivative) of a phase field.

    ``direction`` indexes the concatenated coordinates (x then p).
    """
    m = len(at.x)
    v = field.value(at)
    if direction < m:
        return v, field.dx(at, direction)
    return v, field.dp(at, direction - m)


def fd_derivative(field, at, direction, step=None):
    """Central-difference derivative, independent of the dual machinery."""
    m = len(at.x)
    coords = list(at.x) + list(at.p)
    if step is None:
        step = (7.0e-6) * max(1.0, abs(coords[direction]))
    hi = list(coords)
    lo = list(coords)
    hi[direction] += step
    lo[direction] -= step
    f_hi = field.raw(hi[:m], hi[m:])
    f_lo = field.raw(lo[:m], lo[m:])
    return (value_of(f_hi) - value_of(f_lo)) / (2.0 * step)


def probe_points(m, r, n=100, seed=42):
    """Seeded probe set on [-1, 1]^m x [-1, 1]^r, momenta kept off the
    zero section (|p| >= 0.1)."""
    import numpy as np
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        x = rng.uniform(-1, 1, size=m)
        p = rng.uniform(-1, 1, size=r)
        if np.linalg.norm(p) < 0.1:
            continue
        pts.append(PhasePoint(tuple(x), tuple(p)))
    return pts
