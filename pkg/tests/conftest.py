"""Shared model builders and probe points for the test suite."""

import numpy as np

from algham.dual import sin, cos, value_of
from algham.fields import (MatrixField, Structure3Field, DiffeoMap,
                           PhasePoint)
from algham.algebroid import AlgebroidModel
from algham.morphism import MorphismGH
from algham.phase import PhaseConnection, FiberChange, transform_model
from algham.dynamics import Semispray
from algham.hamilton import HamiltonianField, HamiltonSystem


def ident_model(m=2, r=2, name="trivial"):
    return AlgebroidModel(m, r, MatrixField.identity(r),
                          Structure3Field.zero(r),
                          DiffeoMap.identity(), DiffeoMap.identity(), name)


def const_L(r=2):
    arr = [[[0.0] * r for _ in range(r)] for _ in range(r)]
    arr[0][0][1] = 1.0
    arr[0][1][0] = -1.0
    return Structure3Field.constant(arr)


def g_sym():
    def fn(x):
        return [[1.0 + 0.3 * sin(x[0]), 0.1 * x[1]],
                [0.1 * x[1], 1.2 + 0.2 * cos(x[1])]]
    return MatrixField(fn, (2, 2))


def rho_affine():
    return MatrixField(lambda x: [[1.0, x[0]], [0.0, 0.0]], (2, 2))


def rho_diag():
    return MatrixField(lambda x: [[1.0 + 0.25 * sin(x[0]), 0.0],
                                  [0.0, 1.0 - 0.25 * cos(x[1])]], (2, 2))


def make_configs():
    """Axiom-valid (model, gh) pairs spanning the structural features:
    nontrivial metric, structure functions, x-dependent anchor, affine
    anchor with bracket, and a translated base map."""
    cfgs = {}
    idd = DiffeoMap.identity()
    cfgs["trivial"] = (ident_model(), MorphismGH(MatrixField.identity(2), idd))
    cfgs["gx"] = (ident_model(name="gx"), MorphismGH(g_sym(), idd))
    cfgs["L"] = (AlgebroidModel(2, 2, MatrixField.identity(2), const_L(),
                                idd, idd, "L"),
                 MorphismGH(g_sym(), idd))
    cfgs["rho-diag"] = (AlgebroidModel(2, 2, rho_diag(),
                                       Structure3Field.zero(2),
                                       idd, idd, "rho-diag"),
                        MorphismGH(g_sym(), idd))
    cfgs["affine"] = (AlgebroidModel(2, 2, rho_affine(), const_L(),
                                     idd, idd, "affine"),
                      MorphismGH(g_sym(), idd))
    tr = DiffeoMap.translation([0.3, -0.2])
    cfgs["h-translate"] = (AlgebroidModel(2, 2, rho_diag(), const_L(),
                                          tr, tr, "h-translate"),
                           MorphismGH(g_sym(), tr))
    return cfgs


def spray_generic(model, gh):
    """Inhomogeneous semispray coefficients (quadratic + linear + base)."""
    def gm0(x, p):
        return (0.5 * p[0] * p[0] + 0.2 * p[0] * p[1] * cos(x[0])
                + 0.1 * p[1] + 0.05 * x[1])

    def gm1(x, p):
        return (0.3 * p[1] * p[1] * (1.0 + 0.1 * x[0]) + 0.15 * p[0]
                + 0.07 * sin(x[1]))
    return Semispray(model, gh, [gm0, gm1])


def spray_2homog(model, gh):
    def gm0(x, p):
        return (0.5 * p[0] * p[0] + 0.2 * p[0] * p[1] * cos(x[0])
                + 0.12 * p[1] * p[1])

    def gm1(x, p):
        return (0.3 * p[1] * p[1] * (1.0 + 0.1 * x[0])
                + 0.08 * p[0] * p[0] * sin(x[1]))
    return Semispray(model, gh, [gm0, gm1])


def conn_1homog():
    def fn(x, p):
        return [[0.2 * p[0] + 0.1 * p[1] * sin(x[0]), 0.05 * p[1]],
                [0.07 * p[0] * x[1], 0.3 * p[1] + 0.02 * p[0]]]
    return PhaseConnection(fn, 2)


def conn_generic():
    def fn(x, p):
        return [[0.2 + 0.1 * sin(x[0]) + 0.05 * p[1], 0.3 * x[1]],
                [0.07 * p[0] * p[0], 0.4 + 0.02 * p[0] + 0.1 * cos(x[1])]]
    return PhaseConnection(fn, 2)


PTS = [PhasePoint((0.3, -0.4), (0.7, 0.5)),
       PhasePoint((-0.2, 0.6), (0.4, -0.9)),
       PhasePoint((0.1, 0.1), (1.1, 0.3))]


def conn_eval(conn, pt):
    return np.array([[value_of(v) for v in row]
                     for row in conn.fn(list(pt.x), list(pt.p))])


def H_generic(m, r):
    """Regular, inhomogeneous Hamiltonian with x-dependence everywhere."""
    def fn(x, p):
        return (0.5 * (1.0 + 0.3 * sin(x[0])) * p[0] * p[0]
                + 0.2 * p[0] * p[1] * cos(x[1])
                + 0.5 * (1.2 + 0.2 * cos(x[0])) * p[1] * p[1]
                + 0.1 * p[0] + 0.3 * sin(x[1]) + 0.05 * x[0] * x[0])
    return HamiltonianField(fn, m, r)


def H_quadratic(m=2, r=2):
    """Two-homogeneous Hamiltonian whose Hessian is used as the metric."""
    def fn(x, p):
        return 0.5 * ((1.0 + 0.3 * sin(x[0])) * p[0] * p[0]
                      + 2.0 * 0.2 * cos(x[1]) * p[0] * p[1]
                      + (1.2 + 0.2 * cos(x[0])) * p[1] * p[1])
    return HamiltonianField(fn, m, r)


def hessian_morphism(H, h=None):
    """MorphismGH whose g is the momentum Hessian of a quadratic H."""
    def g(x):
        return H.hessian(list(x), [0.0] * H.r)
    return MorphismGH(MatrixField(g, (H.r, H.r)),
                      h if h is not None else DiffeoMap.identity())


def fiber_change_pair(model, gh):
    """A generic x-dependent frame change plus the transformed model and
    morphism (g transforms congruently)."""
    r = model.r
    lam = MatrixField(lambda x: [[1.0 + 0.2 * sin(x[0]), 0.1 * x[1]],
                                 [0.05 * x[0], 1.1 + 0.1 * cos(x[0])]],
                      (r, r))
    ch = FiberChange(lam, model)
    model2 = transform_model(model, ch)

    def g2fn(x):
        lv = lam.fn(list(x))
        gv = gh.g.fn(list(x))
        return [[sum(lv[a][c] * gv[c][d] * lv[b][d]
                     for c in range(r) for d in range(r))
                 for b in range(r)] for a in range(r)]
    gh2 = MorphismGH(MatrixField(g2fn, (r, r)), model.h)
    return ch, model2, gh2


def system_of(model, gh, H, force=None):
    return HamiltonSystem(model, gh, H, force)
