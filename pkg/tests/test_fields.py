"""Field wrappers, diffeomorphisms and the probe point policy."""

import numpy as np
import pytest

from algham.fields import (PhasePoint, ScalarField, MatrixField,
                           DiffeoMap, fd_derivative, probe_points)


def test_phase_point_coerces_and_freezes():
    pt = PhasePoint((1, 2), (3, 4))
    assert all(isinstance(v, float) for v in pt.x + pt.p)
    with pytest.raises(Exception):
        pt.x = (0.0, 0.0)


def test_phase_point_rejects_non_finite():
    with pytest.raises(Exception):
        PhasePoint((float("nan"), 0.0), (1.0, 1.0))


def test_diffeo_translation_roundtrip_and_jacobian():
    tr = DiffeoMap.translation([0.3, -0.7])
    x = [1.0, 2.0]
    assert tr.inverse(tr(x)) == pytest.approx(x)
    jac = tr.jacobian(x)
    assert np.allclose(jac, np.eye(2))


def test_matrix_field_identity_constant():
    eye = MatrixField.identity(3)
    assert np.allclose(eye.fn([0.1, 0.2, 0.3]), np.eye(3))
    cm = MatrixField.constant([[1.0, 2.0], [3.0, 4.0]])
    assert cm.fn([9.0, 9.0])[1][0] == 3.0


def test_fd_derivative_agrees_with_exact():
    f = ScalarField(lambda x, p: x[0] ** 2 * p[1] + p[0] * p[1])
    pt = PhasePoint((0.5, 1.0), (0.3, 0.7))
    # directions index the concatenated (x, p) coordinates
    fd = fd_derivative(f, pt, 0)
    assert fd == pytest.approx(2 * 0.5 * 0.7, rel=1e-6)
    fd = fd_derivative(f, pt, 2)
    assert fd == pytest.approx(0.7, rel=1e-6)


def test_probe_points_deterministic_and_off_zero_section():
    a = probe_points(2, 2, n=50, seed=7)
    b = probe_points(2, 2, n=50, seed=7)
    assert a == b
    assert all(np.linalg.norm(pt.p) >= 0.1 for pt in a)
    assert all(max(abs(v) for v in pt.x + pt.p) <= 1.0 for pt in a)
    c = probe_points(2, 2, n=50, seed=8)
    assert a != c
