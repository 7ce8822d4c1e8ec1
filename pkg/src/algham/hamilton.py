"""Hamiltonian formalism on the dual bundle.

Regular Hamiltonians and Cartan functions, Poincare-Cartan forms, energy,
the canonical semispray of a Hamilton system (closed form and a
symplectic linear-solve oracle), the induced nonlinear connection, and
the Hamilton-Jacobi flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dual import derivative, value_of
from .errors import SingularHessianError, DegenerateSymplecticError
from .fields import PhasePoint, probe_points
from .linalg import mat_inv
from .phase import (GeneralizedVector, GeneralizedCovector,
                    GeneralizedVectorField, gt_bracket, realized_derivative)
from .dynamics import Semispray, integrate_semispray


class HamiltonianField:
    """A smooth function of (x, p) on the dual bundle with exact
    derivative accessors.  All partials are dual-safe so they can be
    differentiated again."""

    def __init__(self, fn, m, r):
        self.fn = fn
        self.m = m
        self.r = r

    def value(self, x, p):
        return self.fn(list(x), list(p))

    def dx(self, x, p, i):
        return derivative(lambda xs: self.fn(xs, list(p)), list(x), i)

    def dp(self, x, p, a):
        return derivative(lambda ps: self.fn(list(x), ps), list(p), a)

    def dpx(self, x, p, a, i):
        return derivative(lambda xs: self.dp(xs, p, a), list(x), i)

    def dp_all(self, x, p):
        return [self.dp(x, p, a) for a in range(self.r)]

    def hessian(self, x, p):
        """Momentum Hessian H^{ab}."""
        return [derivative(lambda ps: self.dp_all(x, ps), list(p), a)
                for a in range(self.r)]

    def hessian_inv(self, x, p):
        h = self.hessian(x, p)
        hv = np.array([[value_of(v) for v in row] for row in h])
        if abs(np.linalg.det(hv)) < 1e-12:
            raise SingularHessianError(
                "momentum Hessian is singular at x=%s p=%s" % (x, p))
        return mat_inv(h)


class CartanFunction:
    """A positive fiberwise 1-homogeneous function on the dual bundle."""

    def __init__(self, fn, m, r):
        self.fn = fn
        self.m = m
        self.r = r

    def value(self, x, p):
        return self.fn(list(x), list(p))

    def dp(self, x, p, a):
        return derivative(lambda ps: self.fn(list(x), ps), list(p), a)


@dataclass
class HamiltonSystem:
    """A dual bundle with a regular Hamiltonian, a fiber morphism and an
    optional external force."""

    model: object
    gh: object
    H: HamiltonianField
    force: object = None


# ---------------------------------------------------------------------------
# regularity and Cartan reports


@dataclass
class RegularityReport:
    min_det: float
    max_inverse_residual: float
    probes: int
    ok: bool


def regularity_check(H, probes=100, seed=42, tol=1e-10):
    """Probes the momentum Hessian for full rank off the zero section."""
    pts = probe_points(H.m, H.r, probes, seed)
    min_det = float("inf")
    max_res = 0.0
    ok = True
    for pt in pts:
        x, p = list(pt.x), list(pt.p)
        hv = np.array([[value_of(v) for v in row] for row in H.hessian(x, p)])
        d = abs(np.linalg.det(hv))
        min_det = min(min_det, d)
        if d < tol:
            ok = False
            continue
        hi = np.array([[value_of(v) for v in row]
                       for row in H.hessian_inv(x, p)])
        max_res = max(max_res, float(np.max(np.abs(hv @ hi - np.eye(H.r)))))
    if max_res > tol:
        ok = False
    return RegularityReport(min_det, max_res, probes, ok)


@dataclass
class CartanReport:
    homogeneity: float
    euler: float
    min_eigenvalue: float
    probes: int
    ok: bool


def cartan_check(K, probes=100, seed=42, tol=1e-10):
    """Checks 1-homogeneity, the Euler identity and positive definiteness
    of the induced quadratic Hessian at seeded probe points."""
    pts = probe_points(K.m, K.r, probes, seed)
    H2 = hamiltonian_from_cartan(K)
    hom = 0.0
    euler = 0.0
    min_eig = float("inf")
    for pt in pts:
        x, p = list(pt.x), list(pt.p)
        base = value_of(K.value(x, p))
        for lam in (0.5, 2.0, 7.0):
            hom = max(hom, abs(value_of(K.value(x, [lam * v for v in p]))
                               - lam * base))
        euler = max(euler, abs(sum(p[a] * value_of(K.dp(x, p, a))
                                   for a in range(K.r)) - base))
        hv = np.array([[value_of(v) for v in row] for row in H2.hessian(x, p)])
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(
            0.5 * (hv + hv.T)))))
    ok = hom <= tol and euler <= tol and min_eig > 0.0
    return CartanReport(hom, euler, min_eig, probes, ok)


def hamiltonian_from_cartan(K):
    """The quadratic Hamiltonian of a Cartan fundamental function."""
    return HamiltonianField(lambda x, p: 0.5 * K.fn(x, p) ** 2, K.m, K.r)


# ---------------------------------------------------------------------------
# Poincare-Cartan forms and energy


def theta_coefficients(gh, H):
    """Coefficient functions of the Poincare-Cartan one form: theta_a =
    gtilde_{ae}(h(x)) H^e.  The form pairs only against the bundle block."""
    r = H.r

    def theta_a(a):
        def fn(x, p):
            gt = gh.gtilde_at_h(x)
            return sum(gt[a][e] * H.dp(x, p, e) for e in range(r))
        return fn
    return [theta_a(a) for a in range(r)]


def pc_one_form(sys, at):
    """The Poincare-Cartan one form at a point, as a covector that
    annihilates the vertical block."""
    theta = theta_coefficients(sys.gh, sys.H)
    x, p = list(at.x), list(at.p)
    z = np.array([value_of(t(x, p)) for t in theta])
    return GeneralizedCovector(z, np.zeros(sys.H.r), at)


def one_form_apply(theta, field):
    """theta contracted with the bundle block of a phase vector field."""
    def fn(x, p):
        return sum(t(x, p) * z(x, p) for t, z in zip(theta, field.Z))
    return fn


def pc_two_form(sys, U, V, at):
    """The exterior derivative of the Poincare-Cartan one form evaluated
    on two phase vector fields at a point.

    The natural frame covectors are not coordinate differentials, so the
    exterior derivative is taken through the invariant formula with the
    bracket correction rather than coordinatewise.
    """
    model, gh, H = sys.model, sys.gh, sys.H
    theta = theta_coefficients(gh, H)
    x, p = list(at.x), list(at.p)
    tU = one_form_apply(theta, U)
    tV = one_form_apply(theta, V)
    term1 = realized_derivative(model, U, tV)(x, p)
    term2 = realized_derivative(model, V, tU)(x, p)
    term3 = one_form_apply(theta, gt_bracket(model, U, V))(x, p)
    return value_of(term1 - term2 - term3)


def energy_function(H):
    """The energy p_a H^a - H of a regular Hamiltonian, as a function."""
    def fn(x, p):
        return sum(p[a] * H.dp(x, p, a) for a in range(H.r)) - H.value(x, p)
    return fn


def energy(sys, at):
    """The energy of the system at a phase point."""
    return value_of(energy_function(sys.H)(list(at.x), list(at.p)))


# ---------------------------------------------------------------------------
# the canonical semispray, two ways


def _natural_basis(r):
    return ([GeneralizedVectorField.basis_horizontal(a, r) for a in range(r)]
            + [GeneralizedVectorField.basis_vertical(a, r) for a in range(r)])


def omega_matrix(sys, at):
    """The two form on the natural frame: a 2r x 2r antisymmetric matrix."""
    r = sys.H.r
    basis = _natural_basis(r)
    out = np.zeros((2 * r, 2 * r))
    for i in range(2 * r):
        for j in range(i + 1, 2 * r):
            v = pc_two_form(sys, basis[i], basis[j], at)
            out[i][j] = v
            out[j][i] = -v
    return out


def energy_differential(sys, at):
    """The realized derivative of the energy along each natural frame field."""
    r = sys.H.r
    efn = energy_function(sys.H)
    basis = _natural_basis(r)
    x, p = list(at.x), list(at.p)
    return np.array([value_of(realized_derivative(sys.model, b, efn)(x, p))
                     for b in basis])


def canonical_semispray_linear_solve(sys, at):
    """Solve the symplectic equation for the semispray at one point.

    Returns the unique phase vector S with i_S omega = -dE as a
    generalized vector at `at`.  This is the authoritative cross-check
    for the closed-form coefficients.
    """
    om = omega_matrix(sys, at)
    de = energy_differential(sys, at)
    if np.linalg.cond(om) > 1e12:
        raise DegenerateSymplecticError(
            "phase two form is degenerate at x=%s p=%s" % (at.x, at.p))
    # contracting S into the first slot of the antisymmetric matrix flips
    # the sign: sum_I s_I om[I][J] = -de_J  <=>  om s = de
    s = np.linalg.solve(om, de)
    r = sys.H.r
    return GeneralizedVector(s[:r], s[r:], at)


def e_vector(model, gh, H):
    """The source coefficients E_b of the canonical semispray, all at once.

    Five terms per component: the base derivative of H, the base
    derivative of its fiber-linear part, two anchor-weighted derivatives
    of the lowered momentum gradient, and a structure-function term.
    """
    r, m = H.r, model.m

    def theta_and_hp(x, p):
        # returns theta_1..theta_r followed by H^1..H^r, sharing one
        # momentum-gradient evaluation
        gt = gh.gtilde_at_h(x)
        hp = H.dp_all(x, p)
        return [sum(gt[b][e] * hp[e] for e in range(r))
                for b in range(r)] + hp

    def fn(x, p):
        gm = gh.g_at_h(x)
        rho = model.rho_at(gh.h(list(x)))
        lv = model.L_at(gh.h(list(x)))
        gt = gh.gtilde_at_h(x)
        gp = [sum(gm[d][f] * p[f] for f in range(r)) for d in range(r)]
        hp = [H.dp(x, p, e) for e in range(r)]
        # every anchor-weighted term drops when rho vanishes identically
        flat = all(isinstance(v, (int, float)) and v == 0.0
                   for row in rho for v in row)
        if not flat:
            hx = [H.dx(x, p, i) for i in range(m)]
            # one x-derivative pass per direction gives both d theta_b / dx^i
            # and the mixed partials of H
            both = [derivative(lambda xs: theta_and_hp(xs, list(p)),
                               list(x), i) for i in range(m)]
            dth = [both[i][:r] for i in range(m)]
            hpx = [both[i][r:] for i in range(m)]
        out = []
        for b in range(r):
            acc = 0.0
            for i in range(m):
                if flat:
                    break
                acc = acc + rho[i][b] * hx[i]
                acc = acc - rho[i][b] * sum(p[a] * hpx[i][a] for a in range(r))
                for d in range(r):
                    acc = acc - gp[d] * rho[i][d] * dth[i][b]
                    acc = acc + gp[d] * rho[i][b] * dth[i][d]
            for d in range(r):
                for c in range(r):
                    acc = acc + gp[d] * lv[c][d][b] * sum(
                        gt[c][e] * hp[e] for e in range(r))
            out.append(acc)
        return out
    return fn


def canonical_semispray_closed_form(sys):
    """Canonical semispray of the Hamilton system in closed form.

    The momentum coefficients are -2 (G_a - F_a / 4) =
    E_b Htilde_{ae} g^{eb}(h(x)); the force only affects how they split
    into G and F, never the dynamics.
    """
    model, gh, H = sys.model, sys.gh, sys.H
    r = H.r
    evec = e_vector(model, gh, H)
    cache = {"key": None, "val": None}

    def all_gminus(x, p):
        ev = evec(x, p)
        hinv = H.hessian_inv(x, p)
        gm = gh.g_at_h(x)
        out = []
        for a in range(r):
            total = 0.0
            for b in range(r):
                for e in range(r):
                    total = total + ev[b] * hinv[a][e] * gm[e][b]
            out.append(-0.5 * total)
        return out

    def gminus_a(a):
        def fn(x, p):
            plain = all(isinstance(v, float) for v in list(x) + list(p))
            if plain:
                key = (tuple(x), tuple(p))
                if cache["key"] != key:
                    cache["key"] = key
                    cache["val"] = all_gminus(x, p)
                return cache["val"][a]
            return all_gminus(x, p)[a]
        return fn
    return Semispray(model, gh, [gminus_a(a) for a in range(r)],
                     force=sys.force)


def connection_from_hamiltonian(sys):
    """Nonlinear connection induced by the Hamilton system.

    Built by differentiating the canonical semispray coefficients in the
    momenta.
    """
    from .dynamics import connection_from_semispray
    spray = canonical_semispray_closed_form(sys)
    return connection_from_semispray(sys.model, sys.gh, spray,
                                     include_force=True)


# ---------------------------------------------------------------------------
# the Hamilton-Jacobi flow


def integrate_hamilton_jacobi(sys, x0, p0, t_end, dt=1e-3, blowup=1e6):
    """Integrate the Hamilton-Jacobi flow of the system.

    Returns a trajectory with the energy recorded at every step.
    """
    spray = canonical_semispray_closed_form(sys)
    traj = integrate_semispray(sys.model, sys.gh, spray,
                               PhasePoint(tuple(x0), tuple(p0)),
                               t_end, dt=dt, blowup=blowup)
    traj.energies = energy_values(sys.H, traj)
    return traj


def hamilton_jacobi_residual(sys, traj):
    """Max defect of the momentum equation along a trajectory.

    Uses centered differences of the stored momenta against the
    closed-form right hand side, skipping the endpoints.
    """
    spray = canonical_semispray_closed_form(sys)
    worst = 0.0
    ts, xs, ps = traj.ts, traj.xs, traj.ps
    for k in range(1, len(ts) - 1):
        dtm = ts[k + 1] - ts[k - 1]
        dp = (ps[k + 1] - ps[k - 1]) / dtm
        rhs = np.array([-2.0 * value_of(c(list(xs[k]), list(ps[k])))
                        for c in spray.gminus])
        worst = max(worst, float(np.max(np.abs(dp - rhs))))
    return worst


def energy_values(H, traj):
    """The energy along a trajectory."""
    efn = energy_function(H)
    return np.array([value_of(efn(list(x), list(p)))
                     for x, p in zip(traj.xs, traj.ps)])


def energy_drift(H, traj):
    ev = energy_values(H, traj)
    return float(np.max(np.abs(ev - ev[0])))
