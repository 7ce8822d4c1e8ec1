"""Semisprays, induced connections and integration of mechanical systems.

A dual mechanical system couples an algebroid model with a fiber metric
morphism (g, h), an external force and a phase connection.  The canonical
semispray stores the combined coefficients G_b - F_b / 4 as its primitive
data, so trajectories do not depend on how a given right hand side is
split between G and F.
"""

import numpy as np

from .dual import derivative, value_of
from .errors import IntegrationBlowupError, ShapeError
from .fields import PhasePoint
from .phase import (
    GeneralizedVectorField,
    PhaseConnection,
    adapted_derivative,
    adapted_horizontal,
    almost_tangent,
    gt_bracket,
)


class ExternalForce:
    """Covariant force components F_b(x, p) acting on the momentum fiber."""

    def __init__(self, comps):
        self.comps = list(comps)

    @property
    def r(self):
        return len(self.comps)

    def raw(self, x, p):
        return [c(x, p) for c in self.comps]

    def value(self, pt):
        return np.array([value_of(c(list(pt.x), list(pt.p))) for c in self.comps])

    def dp(self, x, p, b, a):
        return derivative(lambda ps: self.comps[b](x, ps), list(p), a)

    @staticmethod
    def zero(r):
        return ExternalForce([(lambda x, p: 0.0) for _ in range(r)])


class Semispray:
    """Second order phase vector field for a dual mechanical system.

    gminus holds the callables (x, p) -> G_b - F_b / 4.  The force is kept
    alongside only so that the force-free coefficients G_b can be recovered.
    """

    def __init__(self, model, gh, gminus, force=None):
        self.model = model
        self.gh = gh
        self.gminus = list(gminus)
        self.force = force if force is not None else ExternalForce.zero(len(gminus))
        if self.force.r != len(self.gminus):
            raise ShapeError("force components do not match spray rank")

    @property
    def r(self):
        return len(self.gminus)

    def gminus_raw(self, x, p):
        return [c(x, p) for c in self.gminus]

    def g_raw(self, x, p):
        f = self.force.raw(x, p)
        return [c(x, p) + 0.25 * f[b] for b, c in enumerate(self.gminus)]

    def as_field(self):
        gh = self.gh

        def zc(a):
            def fn(x, p):
                row = gh.g_at_h(x)[a]
                return sum(row[e] * p[e] for e in range(len(p)))
            return fn

        def yc(b):
            def fn(x, p):
                return -2.0 * self.gminus[b](x, p)
            return fn

        r = self.r
        return GeneralizedVectorField([zc(a) for a in range(r)],
                                      [yc(b) for b in range(r)])


def liouville_field(r):
    """The vertical field whose momentum components are the momenta."""
    def yc(b):
        def fn(x, p):
            return p[b]
        return fn
    return GeneralizedVectorField([(lambda x, p: 0.0)] * r,
                                  [yc(b) for b in range(r)])


def semispray_derivation(model, spray):
    """[C, S] - S with C the Liouville field; zero exactly for sprays."""
    s_field = spray.as_field()
    br = gt_bracket(model, liouville_field(spray.r), s_field)

    def zc(a):
        def fn(x, p):
            return br.Z[a](x, p) - s_field.Z[a](x, p)
        return fn

    def yc(b):
        def fn(x, p):
            return br.Y[b](x, p) - s_field.Y[b](x, p)
        return fn

    r = spray.r
    return GeneralizedVectorField([zc(a) for a in range(r)],
                                  [yc(b) for b in range(r)])


def semispray_from_connection(model, gh, conn, force=None):
    """Canonical semispray of a dual mechanical system with connection conn.

    The momentum coefficients are assembled from the connection contracted
    with the fiber velocity together with the structure and metric terms.
    """
    r = model.r

    def gminus_c(b):
        def fn(x, p):
            gm = gh.g_at_h(x)
            gt = gh.gtilde_at_h(x)
            lv = model.L_at(gh.h(list(x)))
            gp = [sum(gm[c][f] * p[f] for f in range(r)) for c in range(r)]
            gam = conn.fn(x, p)
            rho = model.rho_at(gh.h(list(x)))
            dg = [derivative(lambda xs: gh.g_at_h(xs), list(x), j)
                  for j in range(model.m)]
            dgt = [derivative(lambda xs: gh.gtilde_at_h(xs), list(x), i)
                   for i in range(model.m)]
            total = -sum(gam[b][c] * gp[c] for c in range(r))
            for c in range(r):
                for d in range(r):
                    for a in range(r):
                        total = total + 0.5 * gp[d] * lv[a][d][c] * gt[a][b] * gp[c]
            for c in range(r):
                for j in range(model.m):
                    for a in range(r):
                        acc = sum(dg[j][a][e] * p[e] for e in range(r))
                        total = total - 0.5 * rho[j][c] * acc * gt[a][b] * gp[c]
            for c in range(r):
                for a in range(r):
                    for i in range(model.m):
                        total = total - 0.5 * gp[a] * rho[i][a] * dgt[i][c][b] * gp[c]
            return 0.5 * total
        return fn

    return Semispray(model, gh, [gminus_c(b) for b in range(r)], force=force)


def connection_from_semispray(model, gh, spray, include_force=True):
    """Connection induced by a semispray.

    With include_force the momentum coefficients G - F / 4 are
    differentiated; without it the force-free coefficients G are used and
    the result is the force-free connection of the system.
    """
    r = model.r

    def fn(x, p):
        gm = gh.g_at_h(x)
        gt = gh.gtilde_at_h(x)
        lv = model.L_at(gh.h(list(x)))
        rho = model.rho_at(gh.h(list(x)))
        if include_force:
            coeff = spray.gminus_raw
        else:
            coeff = spray.g_raw
        dG = [derivative(lambda ps: coeff(x, ps), list(p), a)
              for a in range(r)]
        gp = [sum(gm[d][e] * p[e] for e in range(r)) for d in range(r)]
        dg = [derivative(lambda xs: gh.g_at_h(xs), list(x), j)
              for j in range(model.m)]
        dgt = [derivative(lambda xs: gh.gtilde_at_h(xs), list(x), i)
               for i in range(model.m)]
        gpx = [[sum(dg[j][a][e] * p[e] for e in range(r)) for a in range(r)]
               for j in range(model.m)]
        out = []
        for b in range(r):
            row = []
            for c in range(r):
                total = sum(gt[c][a] * dG[a][b] for a in range(r))
                for d in range(r):
                    for f in range(r):
                        total = total - 0.5 * gp[d] * lv[f][d][c] * gt[f][b]
                for j in range(model.m):
                    for a in range(r):
                        total = total + 0.5 * rho[j][c] * gpx[j][a] * gt[a][b]
                for d in range(r):
                    for i in range(model.m):
                        total = total + 0.5 * gp[d] * rho[i][d] * dgt[i][c][b]
                row.append(-total)
            out.append(row)
        return out

    return PhaseConnection(fn, r)


def connection_from_semispray_bracket(model, gh, spray, pt):
    """Bracket based oracle for the induced connection at a single point.

    Projects the horizontal basis fields with the vertical projector built
    from the almost tangent structure and the semispray commutators.
    """
    r = model.r
    s_field = spray.as_field()
    jmap = almost_tangent(model, gh)
    out = np.zeros((r, r))
    for c in range(r):
        xfield = GeneralizedVectorField.basis_horizontal(c, r)
        jx = jmap.apply_field(xfield)
        b1 = gt_bracket(model, s_field, xfield)
        jb1 = jmap.apply_field(b1)
        b2 = gt_bracket(model, s_field, jx)
        xv = xfield.at(pt)
        v1 = jb1.at(pt)
        v2 = b2.at(pt)
        yv = 0.5 * (xv.Y - v1.Y + v2.Y)
        out[:, c] = -yv
    return out


def force_deviation(gh, force, pt):
    """Fiber tensor measuring how the force shifts the induced connection."""
    r = force.r
    x = list(pt.x)
    gt = [[value_of(v) for v in row] for row in gh.gtilde_at_h(x)]
    out = np.zeros((r, r))
    for b in range(r):
        for c in range(r):
            out[b][c] = -sum(gt[c][a] * value_of(force.dp(x, list(pt.p), b, a))
                             for a in range(r))
    return out


def force_free_connection(model, gh, conn, force):
    """Connection of the system with the force removed: conn + phi / 4."""
    r = conn.r

    def phi_fn(x, p):
        gt = gh.gtilde_at_h(x)
        out = []
        for b in range(r):
            row = []
            for c in range(r):
                row.append(-sum(gt[c][a] * force.dp(x, p, b, a)
                                for a in range(r)))
            row = [0.25 * v for v in row]
            out.append(row)
        return out

    return conn + PhaseConnection(phi_fn, r)


def ring_curvature(model, gh, conn, force, pt):
    """Curvature of the force-free connection, expanded around conn.

    Assembles the correction terms produced by the shift conn -> conn +
    phi / 4 where phi is the force deviation tensor.
    """
    from .phase import connection_curvature

    r = conn.r
    x = list(pt.x)
    p = list(pt.p)

    def phi_raw(xs, ps):
        gt = gh.gtilde_at_h(xs)
        return [[-sum(gt[c][a] * force.dp(xs, ps, b, a) for a in range(r))
                 for c in range(r)] for b in range(r)]

    base = connection_curvature(model, conn, pt)
    lv = [[[value_of(v) for v in row] for row in blk]
          for blk in model.L_at(gh.h(x))]
    phi = np.array([[value_of(v) for v in row] for row in phi_raw(x, p)])
    dphi_p = np.zeros((r, r, r))
    dgam_p = np.zeros((r, r, r))
    for f in range(r):
        for b in range(r):
            for c in range(r):
                dphi_p[f][b][c] = value_of(derivative(
                    lambda ps: phi_raw(x, ps)[b][c], p, f))
                dgam_p[f][b][c] = value_of(derivative(
                    lambda ps: conn.fn(x, ps)[b][c], p, f))
    dphi_h = np.zeros((r, r, r))
    for c in range(r):
        for b in range(r):
            for d in range(r):
                dfn = adapted_derivative(
                    model, conn, c,
                    lambda xs, ps, b=b, d=d: phi_raw(xs, ps)[b][d])
                dphi_h[c][b][d] = value_of(dfn(x, p))
    out = np.array(base, dtype=float)
    for b in range(r):
        for c in range(r):
            for d in range(r):
                val = 0.25 * (dphi_h[c][b][d] - dphi_h[d][b][c])
                val += 0.25 * sum(phi[f][c] * dgam_p[f][b][d]
                                  - phi[f][d] * dgam_p[f][b][c]
                                  for f in range(r))
                val += (1.0 / 16.0) * sum(phi[f][c] * dphi_p[f][b][d]
                                          - phi[f][d] * dphi_p[f][b][c]
                                          for f in range(r))
                val -= 0.25 * sum(lv[e][c][d] * phi[b][e] for e in range(r))
                out[b][c][d] += val
    return out


class DistinguishedConnection:
    """Linear connection on the split phase bundle.

    hor and vert are callables (x, p) -> nested (r, r, r) lists giving the
    horizontal and vertical coefficient blocks; the two lower blocks vanish
    for the Berwald case and are optional.
    """

    def __init__(self, r, hor, vert, v_hor=None, v_vert=None):
        self.r = r
        self.hor = hor
        self.vert = vert
        zero = lambda x, p: [[[0.0] * r for _ in range(r)] for _ in range(r)]
        self.v_hor = v_hor if v_hor is not None else zero
        self.v_vert = v_vert if v_vert is not None else zero


def berwald_connection(conn):
    """Normal linear connection whose blocks are momentum derivatives of conn."""
    r = conn.r

    def blocks(x, p):
        out = []
        for a in range(r):
            blk = []
            for b in range(r):
                row = [derivative(lambda ps: conn.fn(x, ps)[b][c], list(p), a)
                       for c in range(r)]
                blk.append(row)
            out.append(blk)
        return out

    return DistinguishedConnection(r, blocks, blocks)


class DTensor:
    """Distinguished tensor field with one block of components.

    index_types is a tuple over {"alpha", "beta", "a", "b"}: alpha marks a
    horizontal frame slot, beta a horizontal coframe slot, b a vertical
    frame slot and a a vertical coframe slot.  comps maps (x, p) to a
    nested list with one axis per slot.
    """

    def __init__(self, comps, index_types, r):
        self.comps = comps
        self.index_types = tuple(index_types)
        self.r = r


def _restore_axis(ndim, k):
    """Axis order that moves the contracted leading axis back to slot k."""
    order = list(range(1, ndim))
    order.insert(k, 0)
    return order


def covariant_derivative_h(model, conn, dconn, tensor, gamma, pt):
    """Horizontal covariant derivative of a distinguished tensor field."""
    x, p = list(pt.x), list(pt.p)
    base0 = np.array(tensor.comps(x, p), dtype=float)
    lead = np.zeros_like(base0)
    for multi in np.ndindex(base0.shape):
        dfn = adapted_derivative(
            model, conn, gamma,
            lambda xs, ps, multi=multi: _pick(tensor.comps(xs, ps), multi))
        lead[multi] = value_of(dfn(x, p))
    hor = [[[value_of(v) for v in row] for row in blk]
           for blk in dconn.hor(x, p)]
    vert = [[[value_of(v) for v in row] for row in blk]
            for blk in dconn.vert(x, p)]
    r = tensor.r
    hmat = np.array([[hor[a][b][gamma] for b in range(r)] for a in range(r)])
    vmat = np.array([[vert[a][b][gamma] for b in range(r)] for a in range(r)])
    out = lead.copy()
    base = np.array(tensor.comps(x, p), dtype=float)
    for k, kind in enumerate(tensor.index_types):
        co = hmat if kind in ("alpha", "beta") else vmat
        if kind == "alpha":
            corr = np.tensordot(co, base, axes=([1], [k]))
        elif kind == "beta":
            corr = -np.tensordot(co.T, base, axes=([1], [k]))
        elif kind == "a":
            corr = -np.tensordot(co, base, axes=([1], [k]))
        else:
            corr = np.tensordot(co.T, base, axes=([1], [k]))
        out += corr.transpose(_restore_axis(base.ndim, k))
    return out


def covariant_derivative_v(model, dconn, tensor, c, pt):
    """Vertical covariant derivative of a distinguished tensor field."""
    x, p = list(pt.x), list(pt.p)
    base = np.array(tensor.comps(x, p), dtype=float)
    lead = np.zeros_like(base)
    flat = lead.reshape(-1)
    shape = base.shape
    for idx in range(flat.size):
        multi = np.unravel_index(idx, shape) if shape else ()
        flat[idx] = value_of(derivative(
            lambda ps: _pick(tensor.comps(x, ps), multi), p, c))
    vh = [[[value_of(v) for v in row] for row in blk]
          for blk in dconn.v_hor(x, p)]
    vv = [[[value_of(v) for v in row] for row in blk]
          for blk in dconn.v_vert(x, p)]
    r = tensor.r
    hmat = np.array([[vh[a][b][c] for b in range(r)] for a in range(r)])
    vmat = np.array([[vv[a][b][c] for b in range(r)] for a in range(r)])
    out = lead.copy()
    for k, kind in enumerate(tensor.index_types):
        co = hmat if kind in ("alpha", "beta") else vmat
        if kind == "alpha":
            corr = np.tensordot(co, base, axes=([1], [k]))
        elif kind == "beta":
            corr = -np.tensordot(co.T, base, axes=([1], [k]))
        elif kind == "a":
            corr = -np.tensordot(co, base, axes=([1], [k]))
        else:
            corr = np.tensordot(co.T, base, axes=([1], [k]))
        out += corr.transpose(_restore_axis(base.ndim, k))
    return out


def _pick(nested, multi):
    v = nested
    for i in multi:
        v = v[i]
    return v


def spray_coefficients(model, gh, conn, pt):
    """Momentum coefficients -2 (G - F / 4) of the canonical spray at a point."""
    spray = semispray_from_connection(model, gh, conn)
    x, p = list(pt.x), list(pt.p)
    return np.array([-2.0 * value_of(c(x, p)) for c in spray.gminus])


def _flow_rhs(model, gh, gminus, x, p):
    gm = [[value_of(v) for v in row] for row in gh.g_at_h(list(x))]
    rho = [[value_of(v) for v in row] for row in model.rho_at(gh.h(list(x)))]
    gp = [sum(gm[a][e] * p[e] for e in range(len(p))) for a in range(len(p))]
    dx = [sum(rho[i][a] * gp[a] for a in range(len(p))) for i in range(model.m)]
    dp = [-2.0 * value_of(c(list(x), list(p))) for c in gminus]
    return np.array(dx), np.array(dp)


def rk4_step(f, x, p, dt):
    k1x, k1p = f(x, p)
    k2x, k2p = f(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p)
    k3x, k3p = f(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p)
    k4x, k4p = f(x + dt * k3x, p + dt * k3p)
    xn = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    pn = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return xn, pn


class Trajectory:
    def __init__(self, ts, xs, ps):
        self.ts = np.asarray(ts)
        self.xs = np.asarray(xs)
        self.ps = np.asarray(ps)


def integrate_semispray(model, gh, spray, pt0, t_final, dt=1e-3,
                        blowup=1e6):
    """Fixed step integration of the base flow of a semispray."""
    x = np.array(pt0.x, dtype=float)
    p = np.array(pt0.p, dtype=float)
    f = lambda xs, ps: _flow_rhs(model, gh, spray.gminus, xs, ps)
    n = int(round(t_final / dt))
    ts = [0.0]
    xs = [x.copy()]
    ps = [p.copy()]
    for k in range(n):
        x, p = rk4_step(f, x, p, dt)
        bad = None
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            bad = "state became non-finite at t=%g" % ((k + 1) * dt)
        elif max(np.max(np.abs(x)), np.max(np.abs(p))) > blowup:
            bad = ("state norm exceeded %g at t=%g"
                   % (blowup, (k + 1) * dt))
        if bad is not None:
            err = IntegrationBlowupError(bad)
            err.partial = Trajectory(ts, xs, ps)
            raise err
        ts.append((k + 1) * dt)
        xs.append(x.copy())
        ps.append(p.copy())
    return Trajectory(ts, xs, ps)


def parallel_lift(model, gh, conn, curve, u0, t_final, dt=1e-3):
    """Transport momenta along a base curve with the given connection.

    curve maps t to base coordinates.  The transported components satisfy
    du_b / dt = Gamma_b_alpha(c(t), u) g^{alpha a}(h(c(t))) u_a.
    """
    r = conn.r
    u = np.array(u0, dtype=float)

    def f(t, uv):
        x = list(curve(t))
        gm = [[value_of(v) for v in row] for row in gh.g_at_h(x)]
        gam = [[value_of(v) for v in row] for row in conn.fn(x, list(uv))]
        gu = [sum(gm[al][a] * uv[a] for a in range(r)) for al in range(r)]
        return np.array([sum(gam[b][al] * gu[al] for al in range(r))
                         for b in range(r)])

    n = int(round(t_final / dt))
    ts = [0.0]
    us = [u.copy()]
    for k in range(n):
        t = k * dt
        k1 = f(t, u)
        k2 = f(t + 0.5 * dt, u + 0.5 * dt * k1)
        k3 = f(t + 0.5 * dt, u + 0.5 * dt * k2)
        k4 = f(t + dt, u + dt * k3)
        u = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise IntegrationBlowupError("transport became non-finite")
        ts.append(t + dt)
        us.append(u.copy())
    return np.asarray(ts), np.asarray(us)


def lift_residual(model, gh, x, dx, p):
    """Defect of the lift condition relating base velocity and momenta."""
    gm = [[value_of(v) for v in row] for row in gh.g_at_h(list(x))]
    rho = [[value_of(v) for v in row] for row in model.rho_at(gh.h(list(x)))]
    r = len(p)
    pred = [sum(rho[i][a] * sum(gm[a][e] * p[e] for e in range(r))
                for a in range(r)) for i in range(model.m)]
    return np.array(dx, dtype=float) - np.array(pred)


def gh_lift(model, gh, x, dx):
    """Momenta whose lift best reproduces the base velocity dx at x."""
    gm = np.array([[value_of(v) for v in row] for row in gh.g_at_h(list(x))])
    rho = np.array([[value_of(v) for v in row]
                    for row in model.rho_at(gh.h(list(x)))])
    mat = rho @ gm
    sol, *_ = np.linalg.lstsq(mat, np.array(dx, dtype=float), rcond=None)
    return sol


def transform_semispray(model, gh, spray, change):
    """Semispray coefficients pushed to a new fiber frame.

    The pushed coefficients pick up a derivative term from the base
    dependence of the frame change in addition to the pointwise factor.
    """
    r = spray.r

    def gminus_c(bp):
        def fn(x_new, p_new):
            x = list(x_new)
            mi = change.mf_inv(x)
            p = [sum(mi[a][b] * p_new[b] for b in range(r)) for a in range(r)]
            mfv = change.mf(x)
            gm = gh.g_at_h(x)
            rho = model.rho_at(gh.h(x))
            base = sum(2.0 * spray.gminus[b](x, p) * mfv[bp][b]
                       for b in range(r))
            corr = 0.0
            for a in range(r):
                acc = sum(gm[a][e] * p[e] for e in range(r))
                for i in range(model.m):
                    dmf = derivative(lambda xs: change.mf(xs)[bp], x, i)
                    dpb = sum(dmf[c] * p[c] for c in range(r))
                    corr = corr + acc * rho[i][a] * dpb
            return 0.5 * (base - corr)
        return fn

    return [gminus_c(bp) for bp in range(r)]
