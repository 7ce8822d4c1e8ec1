"""Geometry of the dual phase space.

Generalized vectors carry a bundle block Z (r components) and a momentum
block Y (r components).  The realization map sends (Z, Y) to the tangent
vector (rho(h(x)) Z, Y) on the phase space; every derivation, bracket and
curvature below is built from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import derivative
from .errors import ShapeError
from .fields import PhasePoint, ScalarField
from .linalg import mat_inv


# ---------------------------------------------------------------------------
# vectors and vector fields


@dataclass
class GeneralizedVector:
    Z: np.ndarray
    Y: np.ndarray
    at: PhasePoint


@dataclass
class GeneralizedCovector:
    """Coefficients (omega_alpha, mu^a) against the bases dz and dp."""

    omega: np.ndarray
    mu: np.ndarray
    at: PhasePoint


def pairing(cov, vec):
    return float(np.dot(cov.omega, vec.Z) + np.dot(cov.mu, vec.Y))


class GeneralizedVectorField:
    """A field of generalized vectors: 2r coefficient functions of (x, p)."""

    def __init__(self, Z, Y):
        self.Z = list(Z)   # callables (x, p) -> value
        self.Y = list(Y)

    @property
    def r(self):
        return len(self.Z)

    def at(self, pt):
        x, p = list(pt.x), list(pt.p)
        return GeneralizedVector(
            np.array([f(x, p) for f in self.Z], dtype=float),
            np.array([f(x, p) for f in self.Y], dtype=float),
            pt)

    @staticmethod
    def constant(zvec, yvec):
        def c(v):
            return lambda x, p, v=float(v): v
        return GeneralizedVectorField([c(v) for v in zvec], [c(v) for v in yvec])

    @staticmethod
    def basis_horizontal(alpha, r):
        return GeneralizedVectorField.constant(
            [1.0 if a == alpha else 0.0 for a in range(r)], [0.0] * r)

    @staticmethod
    def basis_vertical(a, r):
        return GeneralizedVectorField.constant(
            [0.0] * r, [1.0 if b == a else 0.0 for b in range(r)])

    def scalar_fields(self):
        return ([ScalarField(f) for f in self.Z], [ScalarField(f) for f in self.Y])


# ---------------------------------------------------------------------------
# realization and derivations


def rho_h(model):
    """rho read off at h(x), as a dual-safe function of x."""
    return lambda x: model.rho.fn(model.h(list(x)))


def L_h(model):
    return lambda x: model.L.fn(model.h(list(x)))


def realize(model, field, pt):
    """Tangent vector (xdot, pdot) of the realized field at a point."""
    x, p = list(pt.x), list(pt.p)
    rho = rho_h(model)(x)
    z = [f(x, p) for f in field.Z]
    xdot = [sum(rho[i][a] * z[a] for a in range(model.r)) for i in range(model.m)]
    pdot = [f(x, p) for f in field.Y]
    return np.array(xdot, dtype=float), np.array(pdot, dtype=float)


def realized_derivative(model, field, fn):
    """The realized field of `field` applied to a phase function, dual-safe."""
    rho = rho_h(model)

    def out(x, p):
        rv = rho(x)
        acc = 0.0
        for i in range(model.m):
            coef = 0.0
            for a in range(model.r):
                coef = coef + rv[i][a] * field.Z[a](x, p)
            acc = acc + coef * derivative(lambda xs: fn(xs, p), list(x), i)
        for a in range(model.r):
            acc = acc + field.Y[a](x, p) * derivative(lambda ps: fn(x, ps), list(p), a)
        return acc
    return out


# ---------------------------------------------------------------------------
# nonlinear connections


class PhaseConnection:
    """Connection coefficients Gamma[b][alpha](x, p), r x r."""

    def __init__(self, fn, r):
        self.fn = fn
        self.r = r

    def value(self, pt):
        rows = self.fn(list(pt.x), list(pt.p))
        if len(rows) != self.r or len(rows[0]) != self.r:
            raise ShapeError("connection coefficients must be r x r")
        return np.array([[float(v) for v in row] for row in rows])

    def dp(self, pt, a):
        """d Gamma[b][gamma] / d p_a at a point."""
        x, p = list(pt.x), list(pt.p)
        rows = [[derivative(lambda ps, b=b, g=g: self.fn(x, ps)[b][g], p, a)
                 for g in range(self.r)] for b in range(self.r)]
        return np.array(rows)

    def __add__(self, other):
        return PhaseConnection(
            lambda x, p, f=self.fn, g=other.fn:
                [[fa + ga for fa, ga in zip(fr, gr)]
                 for fr, gr in zip(f(x, p), g(x, p))], self.r)

    @staticmethod
    def zero(r):
        z = [[0.0] * r for _ in range(r)]
        return PhaseConnection(lambda x, p, v=z: v, r)


def adapted_horizontal(model, conn, alpha):
    """The adapted frame field: bundle block e_alpha, momentum block the
    alpha-column of the connection."""
    r = conn.r

    def y(b):
        return lambda x, p, b=b: conn.fn(x, p)[b][alpha]
    return GeneralizedVectorField(
        [lambda x, p, v=(1.0 if a == alpha else 0.0): v for a in range(r)],
        [y(b) for b in range(r)])


def dual_adapted(conn, a, pt):
    """Covector dual to the adapted frame: -Gamma_{a,alpha} dz + dp_a."""
    gv = conn.value(pt)
    mu = np.zeros(conn.r)
    mu[a] = 1.0
    return GeneralizedCovector(-gv[a, :], mu, pt)


def adapted_derivative(model, conn, alpha, fn):
    """Realized adapted-frame derivative of a phase function, dual-safe."""
    rho = rho_h(model)

    def out(x, p):
        rv = rho(x)
        gv = conn.fn(x, p)
        acc = 0.0
        for i in range(model.m):
            acc = acc + rv[i][alpha] * derivative(lambda xs: fn(xs, p), list(x), i)
        for a in range(model.r):
            acc = acc + gv[a][alpha] * derivative(lambda ps: fn(x, ps), list(p), a)
        return acc
    return out


# ---------------------------------------------------------------------------
# endomorphism fields (projectors and structures)


class EndomorphismField:
    """Pointwise linear map on generalized vectors, in block form

        (Z, Y) -> (A Z + B Y, C Z + D Y)

    with each block a dual-safe function (x, p) -> r x r rows."""

    def __init__(self, A, B, C, D, r):
        self.A, self.B, self.C, self.D = A, B, C, D
        self.r = r

    def blocks(self, x, p):
        return self.A(x, p), self.B(x, p), self.C(x, p), self.D(x, p)

    def apply_vector(self, vec):
        x, p = list(vec.at.x), list(vec.at.p)
        A, B, C, D = self.blocks(x, p)
        A, B, C, D = (np.array(A, dtype=float), np.array(B, dtype=float),
                      np.array(C, dtype=float), np.array(D, dtype=float))
        return GeneralizedVector(A @ vec.Z + B @ vec.Y,
                                 C @ vec.Z + D @ vec.Y, vec.at)

    def apply_field(self, field):
        r = self.r

        def zc(g):
            def fn(x, p):
                A, B, _, _ = self.blocks(x, p)
                acc = 0.0
                for a in range(r):
                    acc = acc + A[g][a] * field.Z[a](x, p)
                    acc = acc + B[g][a] * field.Y[a](x, p)
                return acc
            return fn

        def yc(b):
            def fn(x, p):
                _, _, C, D = self.blocks(x, p)
                acc = 0.0
                for a in range(r):
                    acc = acc + C[b][a] * field.Z[a](x, p)
                    acc = acc + D[b][a] * field.Y[a](x, p)
                return acc
            return fn
        return GeneralizedVectorField([zc(g) for g in range(r)],
                                      [yc(b) for b in range(r)])

    def compose(self, other):
        """self after other, as block-matrix product."""
        r = self.r

        def mk(pick):
            def fn(x, p):
                a1, b1, c1, d1 = self.blocks(x, p)
                a2, b2, c2, d2 = other.blocks(x, p)
                return pick(a1, b1, c1, d1, a2, b2, c2, d2)
            return fn

        def mul(m, n):
            return [[sum(m[i][k] * n[k][j] for k in range(r)) for j in range(r)]
                    for i in range(r)]

        def add(m, n):
            return [[m[i][j] + n[i][j] for j in range(r)] for i in range(r)]

        return EndomorphismField(
            mk(lambda a1, b1, c1, d1, a2, b2, c2, d2: add(mul(a1, a2), mul(b1, c2))),
            mk(lambda a1, b1, c1, d1, a2, b2, c2, d2: add(mul(a1, b2), mul(b1, d2))),
            mk(lambda a1, b1, c1, d1, a2, b2, c2, d2: add(mul(c1, a2), mul(d1, c2))),
            mk(lambda a1, b1, c1, d1, a2, b2, c2, d2: add(mul(c1, b2), mul(d1, d2))),
            r)

    def matrix(self, pt):
        x, p = list(pt.x), list(pt.p)
        A, B, C, D = self.blocks(x, p)
        top = np.hstack([np.array(A, dtype=float), np.array(B, dtype=float)])
        bot = np.hstack([np.array(C, dtype=float), np.array(D, dtype=float)])
        return np.vstack([top, bot])


def _zero_block(r):
    z = [[0.0] * r for _ in range(r)]
    return lambda x, p: z


def _id_block(r, scale=1.0):
    m = [[scale if i == j else 0.0 for j in range(r)] for i in range(r)]
    return lambda x, p: m


def vertical_projector(model, conn):
    r = conn.r
    return EndomorphismField(
        _zero_block(r), _zero_block(r),
        lambda x, p: [[-v for v in row] for row in conn.fn(x, p)],
        _id_block(r), r)


def horizontal_projector(model, conn):
    r = conn.r
    return EndomorphismField(
        _id_block(r), _zero_block(r),
        lambda x, p: conn.fn(x, p),
        _zero_block(r), r)


def almost_product(model, conn):
    """H - V: squares to the identity."""
    r = conn.r
    return EndomorphismField(
        _id_block(r), _zero_block(r),
        lambda x, p: [[2.0 * v for v in row] for row in conn.fn(x, p)],
        _id_block(r, -1.0), r)


def almost_tangent(model, gh):
    """(Z, Y) -> (0, gtilde(h(x)) Z); squares to zero."""
    r = model.r
    return EndomorphismField(
        _zero_block(r), _zero_block(r),
        lambda x, p: gh.gtilde_at_h(x),
        _zero_block(r), r)


# ---------------------------------------------------------------------------
# brackets, torsion of endomorphisms, curvature


def gt_bracket(model, U, V):
    """Bracket of generalized vector fields.

    Bundle block: structure functions at h(x) contracted with both bundle
    blocks, plus the realized derivative of each side's coefficients by
    the other field.  Momentum block: the commutator of the realized
    fields acting on the momentum coefficients.
    """
    r = model.r
    lh = L_h(model)

    def zc(c):
        def fn(x, p):
            lv = lh(x)
            acc = 0.0
            for a in range(r):
                za = U.Z[a](x, p)
                for b in range(r):
                    la = lv[c][a][b]
                    if isinstance(la, float) and la == 0.0:
                        continue
                    acc = acc + za * V.Z[b](x, p) * la
            acc = acc + realized_derivative(model, U, V.Z[c])(x, p)
            acc = acc - realized_derivative(model, V, U.Z[c])(x, p)
            return acc
        return fn

    def yc(b):
        def fn(x, p):
            return realized_derivative(model, U, V.Y[b])(x, p) \
                - realized_derivative(model, V, U.Y[b])(x, p)
        return fn
    return GeneralizedVectorField([zc(c) for c in range(r)],
                                  [yc(b) for b in range(r)])


def nijenhuis(model, e, U, V, pt):
    """Torsion of an endomorphism field on a pair of vector fields:

        N_e(U, V) = [eU, eV] + e e [U, V] - e [eU, V] - e [U, eV]
    """
    eU = e.apply_field(U)
    eV = e.apply_field(V)
    t1 = gt_bracket(model, eU, eV).at(pt)
    t2 = e.apply_vector(e.apply_vector(gt_bracket(model, U, V).at(pt)))
    t3 = e.apply_vector(gt_bracket(model, eU, V).at(pt))
    t4 = e.apply_vector(gt_bracket(model, U, eV).at(pt))
    return GeneralizedVector(t1.Z + t2.Z - t3.Z - t4.Z,
                             t1.Y + t2.Y - t3.Y - t4.Y, pt)


def connection_curvature(model, conn, pt):
    """Curvature R[b][alpha][beta] of a nonlinear connection.

    Antisymmetrized adapted derivatives of the coefficients minus the
    structure-function term; it is the purely vertical part left of the
    bracket of two adapted frame fields once their horizontal part (the
    structure functions contracted with the frame) is split off.
    """
    r = conn.r
    x, p = list(pt.x), list(pt.p)
    lh = L_h(model)(x)
    out = np.zeros((r, r, r))
    for b in range(r):
        for alpha in range(r):
            for beta in range(alpha + 1, r):
                da = adapted_derivative(
                    model, conn, alpha,
                    lambda xs, ps, b=b, beta=beta: conn.fn(xs, ps)[b][beta])(x, p)
                db = adapted_derivative(
                    model, conn, beta,
                    lambda xs, ps, b=b, alpha=alpha: conn.fn(xs, ps)[b][alpha])(x, p)
                lterm = 0.0
                gv = conn.fn(x, p)
                for g in range(r):
                    lterm += lh[g][alpha][beta] * gv[b][g]
                val = da - db - lterm
                out[b][alpha][beta] = val
                out[b][beta][alpha] = -val
    return out


def curvature_literal(model, conn, pt):
    """Curvature variant with a symmetric '+' between the two adapted
    derivatives.  It fails the bracket oracle; kept separately so reports
    can flag the sign."""
    r = conn.r
    x, p = list(pt.x), list(pt.p)
    lh = L_h(model)(x)
    gv = conn.fn(x, p)
    out = np.zeros((r, r, r))
    for b in range(r):
        for alpha in range(r):
            for beta in range(r):
                da = adapted_derivative(
                    model, conn, alpha,
                    lambda xs, ps, b=b, beta=beta: conn.fn(xs, ps)[b][beta])(x, p)
                db = adapted_derivative(
                    model, conn, beta,
                    lambda xs, ps, b=b, alpha=alpha: conn.fn(xs, ps)[b][alpha])(x, p)
                lterm = sum(lh[g][alpha][beta] * gv[b][g] for g in range(r))
                out[b][alpha][beta] = db + da - lterm
    return out


# ---------------------------------------------------------------------------
# fibre frame changes


@dataclass
class FiberChange:
    """x-dependent change of the bundle frame.

    ``lam``(x)[new][old] rescales bundle blocks (read off at h(x) when it
    acts on phase objects); momenta change with the inverse transpose so
    the pairing is preserved: p'_new = Mf p with Mf = (lam(h(x))^{-1})^T.
    """

    lam: object  # MatrixField
    model: object

    def lam_at_h(self, x):
        return self.lam.fn(self.model.h(list(x)))

    def laminv_at_h(self, x):
        return mat_inv(self.lam_at_h(x))

    def mf(self, x):
        inv = self.laminv_at_h(x)
        n = len(inv)
        return [[inv[j][i] for j in range(n)] for i in range(n)]

    def mf_inv(self, x):
        lam = self.lam_at_h(x)
        n = len(lam)
        return [[lam[j][i] for j in range(n)] for i in range(n)]

    def push_point(self, pt):
        mf = np.array([[float(v) for v in row] for row in self.mf(list(pt.x))])
        return PhasePoint(pt.x, tuple(mf @ np.array(pt.p)))

    def pull_point(self, pt_new):
        mi = np.array([[float(v) for v in row] for row in self.mf_inv(list(pt_new.x))])
        return PhasePoint(pt_new.x, tuple(mi @ np.array(pt_new.p)))


def transform_model(model, change):
    """The same anchored bundle described in the new frame.

    The anchor contracts with the inverse frame matrix; the structure
    functions pick up derivative terms because the frame change is
    x-dependent.
    """
    from .algebroid import AlgebroidModel, Section, theta_apply
    from .fields import BaseField, MatrixField, Structure3Field
    r = model.r

    def laminv(x):
        return mat_inv(change.lam.fn(list(x)))

    def rho_fn(x):
        rho = model.rho.fn(list(x))
        li = laminv(x)
        return [[sum(rho[i][a] * li[a][ap] for a in range(r)) for ap in range(r)]
                for i in range(model.m)]

    def basis_theta(model, alpha, fn, x):
        # derivation of a base function by the alpha-th frame section
        e = Section.constant([1.0 if a == alpha else 0.0 for a in range(r)])
        return theta_apply(model, e, BaseField(fn)).fn(list(x))

    def L_fn(x):
        lam = change.lam.fn(list(x))
        li = laminv(x)
        lv = model.L.fn(list(x))
        out = [[[0.0] * r for _ in range(r)] for _ in range(r)]
        for gp in range(r):
            for ap in range(r):
                for bp in range(ap + 1, r):
                    acc = 0.0
                    for g in range(r):
                        core = 0.0
                        for a in range(r):
                            for b in range(r):
                                core = core + li[a][ap] * li[b][bp] * lv[g][a][b]
                        for a in range(r):
                            core = core + li[a][ap] * basis_theta(
                                model, a, lambda xs, g=g, bp=bp:
                                    mat_inv(change.lam.fn(xs))[g][bp], x)
                            core = core - li[a][bp] * basis_theta(
                                model, a, lambda xs, g=g, ap=ap:
                                    mat_inv(change.lam.fn(xs))[g][ap], x)
                        acc = acc + lam[gp][g] * core
                    out[gp][ap][bp] = acc
                    out[gp][bp][ap] = -acc
        return out

    return AlgebroidModel(model.m, r, MatrixField(rho_fn, (model.m, r)),
                          Structure3Field(L_fn, r), model.h, model.eta,
                          model.name + "'")


def transform_connection(model, conn, change):
    """Connection coefficients in the new frame, as a function of the new
    fibre coordinates.

    Derived by pushing the realized adapted frame through the coordinate
    change (x, p) -> (x, Mf(x) p) and re-reading the momentum block
    against the new frame; equivalent to the coefficient transformation
    law stated for PhaseConnection.
    """
    r = conn.r
    rho = rho_h(model)

    def fn(x, pnew):
        mf = change.mf(x)
        mfi = change.mf_inv(x)
        pold = [sum(mfi[a][ap] * pnew[ap] for ap in range(r)) for a in range(r)]
        gv = conn.fn(x, pold)
        rv = rho(x)
        laminv = change.laminv_at_h(x)
        # d Mf[b'][a] / dx^i, dual-safe in x
        out = [[0.0] * r for _ in range(r)]
        for bp in range(r):
            dmf = [[derivative(lambda xs, bpp=bp, a=a: change.mf(xs)[bpp][a],
                               list(x), i) for a in range(r)]
                   for i in range(model.m)]
            for ap in range(r):
                acc = 0.0
                for g in range(r):
                    inner = 0.0
                    for i in range(model.m):
                        s = 0.0
                        for a in range(r):
                            s = s + dmf[i][a] * pold[a]
                        inner = inner + rv[i][g] * s
                    bsum = 0.0
                    for b in range(r):
                        bsum = bsum + mf[bp][b] * gv[b][g]
                    acc = acc + laminv[g][ap] * (inner + bsum)
                out[bp][ap] = acc
        return out
    return PhaseConnection(fn, r)
