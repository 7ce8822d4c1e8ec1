"""Anchored vector bundles with structure functions and deformed base maps.

A model consists of an anchor matrix rho (m x r), antisymmetric structure
functions L[c][a][b], and two base diffeomorphisms h and eta.  Structure
coefficients are read off at the target of h and base-function derivatives
are chained through h, which is what makes the bracket a derivation in the
required twisted sense.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dual import derivative
from .errors import ShapeError
from .fields import BaseField, DiffeoMap, MatrixField, Structure3Field


@dataclass
class Section:
    """A section of the bundle: r component fields on the base."""

    comps: list  # list[BaseField]

    @property
    def r(self):
        return len(self.comps)

    def value(self, x):
        return [c.value(x) for c in self.comps]

    def raw(self, x):
        return [c.fn(list(x)) for c in self.comps]

    @staticmethod
    def constant(vec):
        return Section([BaseField.constant(float(v)) for v in vec])


@dataclass
class AlgebroidModel:
    m: int
    r: int
    rho: MatrixField            # rho[i][alpha], m x r
    L: Structure3Field          # L[c][a][b], antisymmetric in (a, b)
    h: DiffeoMap
    eta: DiffeoMap
    name: str = ""

    def __post_init__(self):
        probe = [0.1] * self.m
        rows = self.rho.value(probe)
        if (len(rows), len(rows[0])) != (self.m, self.r):
            raise ShapeError("anchor must be m x r")
        l = self.L.value(probe)
        if len(l) != self.r or len(l[0]) != self.r or len(l[0][0]) != self.r:
            raise ShapeError("structure functions must be r x r x r")

    def rho_at(self, x):
        return self.rho.value(x)

    def L_at(self, x):
        return self.L.value(x)


def realized_base_vector(model, u):
    """Components of the vector field the section induces on the base.

    At x the anchor is contracted with the section and pushed through the
    jacobian of h taken at h^{-1}(x); equivalently the derivation below
    applies d(f o h)/dx at h^{-1}(x).
    """
    def comps(x):
        rho = model.rho.fn(list(x))
        uval = u.raw(x)
        jac = model.h.jacobian(model.h.inverse(x))
        out = []
        for k in range(model.m):
            acc = 0.0
            for i in range(model.m):
                for a in range(model.r):
                    acc = acc + jac[k][i] * rho[i][a] * uval[a]
            out.append(acc)
        return out
    return comps


def theta_apply(model, u, f):
    """Derivation of a base function by a section."""
    vec = realized_base_vector(model, u)

    def fn(x):
        comps = vec(x)
        acc = 0.0
        for k in range(model.m):
            acc = acc + comps[k] * derivative(f.fn, list(x), k)
        return acc
    return BaseField(fn)


def bracket(model, u, v):
    """Bracket of two sections.

    Components: u^a v^b L^c_{ab} plus the derivation of each side's
    components by the other section.
    """
    def comp(c):
        def fn(x):
            uval = u.raw(x)
            vval = v.raw(x)
            lv = model.L.fn(list(x))
            acc = 0.0
            for a in range(model.r):
                for b in range(model.r):
                    la = lv[c][a][b]
                    if isinstance(la, float) and la == 0.0:
                        continue
                    acc = acc + uval[a] * vval[b] * la
            acc = acc + theta_apply(model, u, v.comps[c]).fn(x)
            acc = acc - theta_apply(model, v, u.comps[c]).fn(x)
            return acc
        return BaseField(fn)
    return Section([comp(c) for c in range(model.r)])


def composed_anchor(model, u, f, at):
    """Value of the induced derivation, evaluated through both base maps.

    Returns sum_i (rho o h)(u o h) d(f o h)/dx^i at eta(at).
    """
    y = model.eta(list(at))
    hy = model.h(y)
    rho = model.rho.fn(hy)
    uval = u.raw(hy)
    acc = 0.0
    fh = lambda x: f.fn(model.h(x))
    for i in range(model.m):
        dfh = derivative(fh, y, i)
        for a in range(model.r):
            acc = acc + rho[i][a] * uval[a] * dfh
    return acc


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class AxiomReport:
    leibniz: float
    jacobi: float
    anchor_morphism: float
    antisymmetry: float
    tol: float

    @property
    def passed(self):
        return max(self.leibniz, self.jacobi,
                   self.anchor_morphism, self.antisymmetry) <= self.tol


def _random_base_field(rng, m):
    c0 = rng.uniform(-1, 1)
    c1 = rng.uniform(-1, 1, size=m)
    c2 = rng.uniform(-0.5, 0.5, size=(m, m))

    def fn(x):
        acc = c0
        for i in range(m):
            acc = acc + c1[i] * x[i]
            for j in range(m):
                acc = acc + c2[i][j] * x[i] * x[j]
        return acc
    return BaseField(fn)


def _random_section(rng, model):
    return Section([_random_base_field(rng, model.m) for _ in range(model.r)])


def check_axioms(model, n_probes=20, seed=42, tol=1e-7):
    """Numeric residuals of the three structure axioms plus antisymmetry.

    Leibniz: [u, f v] - f [u, v] - (theta(u) f) v = 0.
    Jacobi: cyclic sum of double brackets (with constant-coefficient
    combinations of random polynomial sections).
    Anchor morphism: the realized field of [u, v] equals the commutator
    of the realized fields of u and v.
    """
    import numpy as np
    rng = np.random.default_rng(seed)
    res_leib = res_jac = res_anchor = res_anti = 0.0
    for _ in range(n_probes):
        x = [float(v) for v in rng.uniform(-1, 1, size=model.m)]
        u = _random_section(rng, model)
        v = _random_section(rng, model)
        w = _random_section(rng, model)
        f = _random_base_field(rng, model.m)

        # antisymmetry
        uv = bracket(model, u, v)
        vu = bracket(model, v, u)
        for c in range(model.r):
            res_anti = max(res_anti, abs(uv.comps[c].value(x) + vu.comps[c].value(x)))

        # Leibniz
        fv = Section([f * vc for vc in v.comps])
        lhs = bracket(model, u, fv)
        thf = theta_apply(model, u, f)
        for c in range(model.r):
            r = lhs.comps[c].value(x) - f.value(x) * uv.comps[c].value(x) \
                - thf.value(x) * v.comps[c].value(x)
            res_leib = max(res_leib, abs(r))

        # Jacobi
        t1 = bracket(model, u, bracket(model, v, w))
        t2 = bracket(model, v, bracket(model, w, u))
        t3 = bracket(model, w, bracket(model, u, v))
        for c in range(model.r):
            r = t1.comps[c].value(x) + t2.comps[c].value(x) + t3.comps[c].value(x)
            res_jac = max(res_jac, abs(r))

        # anchor morphism: theta([u,v]) f = theta(u) theta(v) f - theta(v) theta(u) f
        r1 = theta_apply(model, uv, f).value(x)
        r2 = theta_apply(model, u, theta_apply(model, v, f)).value(x) \
            - theta_apply(model, v, theta_apply(model, u, f)).value(x)
        res_anchor = max(res_anchor, abs(r1 - r2))

    return AxiomReport(res_leib, res_jac, res_anchor, res_anti, tol)
