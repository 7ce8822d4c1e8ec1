"""Regular Hamiltonians, Cartan functions, the two-form and the flow."""

import numpy as np
import pytest

from algham.dual import value_of, sin, cos, sqrt
from algham.fields import PhasePoint, MatrixField, DiffeoMap
from algham.morphism import MorphismGH
from algham.phase import GeneralizedVectorField
from algham.hamilton import (HamiltonianField, CartanFunction, HamiltonSystem,
                             regularity_check, cartan_check,
                             hamiltonian_from_cartan, pc_one_form,
                             pc_two_form, energy, energy_function,
                             omega_matrix, energy_differential,
                             canonical_semispray_closed_form,
                             canonical_semispray_linear_solve,
                             connection_from_hamiltonian,
                             integrate_hamilton_jacobi,
                             hamilton_jacobi_residual, energy_drift)
from algham.errors import SingularHessianError

from conftest import (make_configs, PTS, H_generic, H_quadratic,
                      hessian_morphism, conn_eval)


CFGS = make_configs()


def test_regularity_pass_and_fail():
    ok = regularity_check(HamiltonianField(
        lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2), 2, 2), probes=20)
    assert ok.ok and ok.max_inverse_residual < 1e-12

    inertia = (1.0, 2.0, 3.0)
    H = HamiltonianField(
        lambda x, p: 0.5 * sum(p[a] ** 2 / inertia[a] for a in range(3)),
        3, 3)
    rep = regularity_check(H, probes=10)
    assert rep.ok
    hinv = H.hessian_inv([0.0] * 3, [1.0, 1.0, 1.0])
    assert np.allclose(hinv, np.diag(inertia), atol=1e-12)

    degenerate = HamiltonianField(lambda x, p: p[0], 2, 2)
    assert not regularity_check(degenerate, probes=5).ok
    with pytest.raises(SingularHessianError):
        degenerate.hessian_inv([0.0, 0.0], [1.0, 0.5])


def test_cartan_checks():
    norm = CartanFunction(lambda x, p: sqrt(p[0] ** 2 + p[1] ** 2), 2, 2)
    rep = cartan_check(norm, probes=20)
    assert rep.ok
    assert rep.homogeneity < 1e-12 and rep.euler < 1e-12
    assert rep.min_eigenvalue > 0.0

    metric_k = CartanFunction(
        lambda x, p: sqrt((1.0 + 0.25 * (x[0] ** 2 + x[1] ** 2))
                          * (p[0] ** 2 + p[1] ** 2)), 2, 2)
    assert cartan_check(metric_k, probes=20).ok

    quad = CartanFunction(lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2), 2, 2)
    assert not cartan_check(quad, probes=5).ok


def test_energy_examples():
    model, gh = CFGS["trivial"]
    free = HamiltonSystem(model, gh, HamiltonianField(
        lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2), 2, 2))
    pt = PTS[0]
    assert energy(free, pt) == pytest.approx(
        0.5 * (pt.p[0] ** 2 + pt.p[1] ** 2), abs=1e-14)

    # potential term flips sign in the energy
    withv = HamiltonSystem(model, gh, HamiltonianField(
        lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2) + sin(x[0]), 2, 2))
    want = 0.5 * (pt.p[0] ** 2 + pt.p[1] ** 2) - np.sin(pt.x[0])
    assert energy(withv, pt) == pytest.approx(want, abs=1e-14)


def test_energy_of_cartan_square_is_itself():
    K = CartanFunction(
        lambda x, p: sqrt((1.0 + 0.25 * (x[0] ** 2 + x[1] ** 2))
                          * (p[0] ** 2 + p[1] ** 2)), 2, 2)
    H = hamiltonian_from_cartan(K)
    efn = energy_function(H)
    for pt in PTS:
        x, p = list(pt.x), list(pt.p)
        assert value_of(efn(x, p)) == pytest.approx(
            0.5 * value_of(K.value(x, p)) ** 2, abs=1e-12)


def test_one_form_values():
    model, gh = CFGS["trivial"]
    free = HamiltonSystem(model, gh, HamiltonianField(
        lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2), 2, 2))
    for pt in PTS:
        th = pc_one_form(free, pt)
        assert np.allclose(th.omega, pt.p, atol=1e-14)
        assert np.allclose(th.mu, 0.0)

    gh2 = MorphismGH(MatrixField.constant([[2.0, 0.0], [0.0, 2.0]]),
                     DiffeoMap.identity())
    scaled = HamiltonSystem(model, gh2, free.H)
    th = pc_one_form(scaled, PTS[0])
    assert np.allclose(th.omega, 0.5 * np.array(PTS[0].p), atol=1e-14)


def test_two_form_classical_blocks_and_antisymmetry():
    model, gh = CFGS["trivial"]
    free = HamiltonSystem(model, gh, HamiltonianField(
        lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2), 2, 2))
    pt = PTS[0]
    for a in range(2):
        ha = GeneralizedVectorField.basis_horizontal(a, 2)
        for b in range(2):
            vb = GeneralizedVectorField.basis_vertical(b, 2)
            want = -1.0 if a == b else 0.0
            assert pc_two_form(free, ha, vb, pt) == pytest.approx(
                want, abs=1e-12)
    # antisymmetry on a generic system
    model, gh = CFGS["affine"]
    sys_ = HamiltonSystem(model, gh, H_generic(2, 2))
    rng = np.random.default_rng(2)
    for pt in PTS:
        U = GeneralizedVectorField.constant(rng.uniform(-1, 1, 2),
                                            rng.uniform(-1, 1, 2))
        W = GeneralizedVectorField.constant(rng.uniform(-1, 1, 2),
                                            rng.uniform(-1, 1, 2))
        assert pc_two_form(sys_, U, W, pt) + pc_two_form(sys_, W, U, pt) \
            == pytest.approx(0.0, abs=1e-12)
        assert pc_two_form(sys_, U, U, pt) == pytest.approx(0.0, abs=1e-12)


def test_so3_two_form_has_bracket_block():
    from algham.models import make_system
    sys_ = make_system("poisson-so3")
    pt = PhasePoint((0.0, 0.0, 0.0), (0.4, -0.3, 0.8))
    # omega(h_a, h_b) = -theta([h_a, h_b]) since rho = 0
    h0 = GeneralizedVectorField.basis_horizontal(0, 3)
    h1 = GeneralizedVectorField.basis_horizontal(1, 3)
    got = pc_two_form(sys_, h0, h1, pt)
    # [h0, h1] = e2, theta_2 = gtilde_{2e} H^e = I_2 * p_2 / I_2 = p_2
    assert got == pytest.approx(-pt.p[2], abs=1e-12)


def test_closed_form_equals_linear_solve():
    for name, (model, gh) in CFGS.items():
        sys_ = HamiltonSystem(model, gh, H_generic(2, 2))
        spray = canonical_semispray_closed_form(sys_)
        fld = spray.as_field()
        for pt in PTS:
            sv = canonical_semispray_linear_solve(sys_, pt)
            cf = fld.at(pt)
            assert np.allclose(sv.Z, cf.Z, atol=1e-10), name
            assert np.allclose(sv.Y, cf.Y, atol=1e-10), name


def test_defining_equation_residual():
    """omega(S, B) + dE(B) = 0 on the natural frame."""
    for name in ("gx", "affine", "h-translate"):
        model, gh = CFGS[name]
        sys_ = HamiltonSystem(model, gh, H_generic(2, 2))
        for pt in PTS:
            om = omega_matrix(sys_, pt)
            de = energy_differential(sys_, pt)
            sv = canonical_semispray_linear_solve(sys_, pt)
            s = np.concatenate([sv.Z, sv.Y])
            # contraction in the first slot: sum_I s_I om[I][J]
            assert np.max(np.abs(s @ om + de)) < 1e-10, name


def test_classical_reduction_momentum_equation():
    """With g equal to the momentum Hessian of a quadratic H the momentum
    equation reduces to pdot = -dH/dx exactly."""
    model, _ = CFGS["trivial"]
    H = H_quadratic()
    gh = hessian_morphism(H)
    sys_ = HamiltonSystem(model, gh, H)
    spray = canonical_semispray_closed_form(sys_)
    for pt in PTS:
        x, p = list(pt.x), list(pt.p)
        y = np.array([-2.0 * value_of(c(x, p)) for c in spray.gminus])
        hx = np.array([value_of(H.dx(x, p, i)) for i in range(2)])
        assert np.allclose(y, -hx, atol=1e-12)


def test_potential_sign_is_preserved():
    """For H = kinetic + V with the identity morphism the flow drives the
    momenta along +dV/dx.  This asymmetry is intentional; the formalism
    only reduces to textbook mechanics when g matches the momentum
    Hessian (see test_classical_reduction_momentum_equation)."""
    model, gh = CFGS["trivial"]
    H = HamiltonianField(
        lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2) + sin(x[0]) + 0.3 * x[1],
        2, 2)
    sys_ = HamiltonSystem(model, gh, H)
    spray = canonical_semispray_closed_form(sys_)
    for pt in PTS:
        x, p = list(pt.x), list(pt.p)
        y = np.array([-2.0 * value_of(c(x, p)) for c in spray.gminus])
        dv = np.array([np.cos(x[0]), 0.3])
        assert np.allclose(y, dv, atol=1e-12)


def test_energy_conserved_and_flow_residual():
    model, gh = CFGS["affine"]
    sys_ = HamiltonSystem(model, gh, H_generic(2, 2))
    traj = integrate_hamilton_jacobi(sys_, list(PTS[0].x), list(PTS[0].p),
                                     1.0, dt=1e-3)
    assert energy_drift(sys_.H, traj) < 1e-10
    assert hamilton_jacobi_residual(sys_, traj) < 1e-4


def test_free_flow_is_straight():
    model, gh = CFGS["trivial"]
    free = HamiltonSystem(model, gh, HamiltonianField(
        lambda x, p: 0.5 * (p[0] ** 2 + p[1] ** 2), 2, 2))
    traj = integrate_hamilton_jacobi(free, [0.0, 0.0], [1.0, 2.0], 1.0,
                                     dt=1e-3)
    assert np.allclose(traj.xs[-1], [1.0, 2.0], atol=1e-10)
    assert np.allclose(traj.ps[-1], [1.0, 2.0], atol=1e-12)
    assert energy_drift(free.H, traj) < 1e-12


def test_connection_from_free_hamiltonian_vanishes():
    from algham.models import make_system
    sys_ = make_system("classical-free")
    conn = connection_from_hamiltonian(sys_)
    for pt in PTS:
        assert np.allclose(conn_eval(conn, pt), 0.0, atol=1e-14)
