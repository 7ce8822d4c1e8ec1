"""Builtin model registry.

Four families: free motion, a conformally flat metric Hamiltonian, the
rigid body on the dual of so(3), and a translated/deformed base exercising
every composition-through-h path.  User models are parameterizations of
these families.
"""

from __future__ import annotations

import numpy as np

from .dual import sin, cos
from .errors import ConfigError
from .fields import (MatrixField, Structure3Field, DiffeoMap, probe_points)
from .algebroid import AlgebroidModel
from .morphism import MorphismGH
from .hamilton import HamiltonianField, HamiltonSystem
from .dynamics import ExternalForce


def _identity_model(m, r, name):
    return AlgebroidModel(m, r, MatrixField.identity(r),
                          Structure3Field.zero(r),
                          DiffeoMap.identity(), DiffeoMap.identity(), name)


def _classical_free(params):
    m = r = 2
    model = _identity_model(m, r, "classical-free")
    gh = MorphismGH(MatrixField.identity(r), DiffeoMap.identity())
    H = HamiltonianField(lambda x, p: 0.5 * sum(v * v for v in p), m, r)
    return HamiltonSystem(model, gh, H, force=_make_force(params, r))


def _classical_metric(params):
    m = r = 2
    scale = float(params.get("metric_scale", 0.25))
    model = _identity_model(m, r, "classical-metric")

    def a(x):
        s = 1.0 + scale * sum(v * v for v in x)
        return [[s if i == j else 0.0 for j in range(r)] for i in range(r)]

    gh = MorphismGH(MatrixField(a, (r, r)), DiffeoMap.identity())

    def hfn(x, p):
        av = a(x)
        return 0.5 * sum(av[i][j] * p[i] * p[j]
                         for i in range(r) for j in range(r))
    return HamiltonSystem(model, gh, HamiltonianField(hfn, m, r),
                          force=_make_force(params, r))


def _poisson_so3(params):
    m = r = 3
    inertia = params.get("inertia", (1.0, 2.0, 3.0))
    if len(inertia) != 3 or min(inertia) <= 0:
        raise ConfigError("inertia must be three positive values")
    inertia = [float(v) for v in inertia]
    eps = [[[0.0] * 3 for _ in range(3)] for _ in range(3)]
    for c in range(3):
        for a in range(3):
            for b in range(3):
                s = (a - c) * (b - c) * (b - a)
                if s != 0:
                    eps[c][a][b] = s / abs(s)
    zero_rho = MatrixField(lambda x: [[0.0] * r for _ in range(m)], (m, r))
    model = AlgebroidModel(m, r, zero_rho, Structure3Field.constant(eps),
                           DiffeoMap.identity(), DiffeoMap.identity(),
                           "poisson-so3")
    gmat = [[1.0 / inertia[i] if i == j else 0.0 for j in range(3)]
            for i in range(3)]
    gh = MorphismGH(MatrixField.constant(gmat), DiffeoMap.identity())
    H = HamiltonianField(
        lambda x, p: 0.5 * sum(p[a] * p[a] / inertia[a] for a in range(3)),
        m, r)
    return HamiltonSystem(model, gh, H, force=_make_force(params, r))


def _deformed_translate(params):
    m = r = 2
    tau = params.get("tau", (0.3, -0.7))
    if len(tau) != m:
        raise ConfigError("tau must have %d components" % m)
    tr = DiffeoMap.translation(tau)

    def rho(x):
        return [[1.0 + 0.25 * sin(x[0]), 0.0],
                [0.0, 1.0 - 0.25 * sin(x[1])]]

    def g(x):
        return [[1.0 + 0.2 * cos(x[0]), 0.0],
                [0.0, 1.2 + 0.1 * sin(x[1])]]

    model = AlgebroidModel(m, r, MatrixField(rho, (m, r)),
                           Structure3Field.zero(r), tr, tr,
                           "deformed-translate")
    gh = MorphismGH(MatrixField(g, (r, r)), tr)
    H = HamiltonianField(
        lambda x, p: 0.5 * (p[0] * p[0] + p[1] * p[1])
        + 0.1 * p[0] * p[1] * cos(x[0]), m, r)
    return HamiltonSystem(model, gh, H, force=_make_force(params, r))


def _make_force(params, r):
    name = params.get("force", "none")
    strength = float(params.get("force_strength", 0.3))
    if name == "none":
        return None
    if name == "linear-drag":
        def comp(b):
            return lambda x, p, b=b: strength * p[b]
        return ExternalForce([comp(b) for b in range(r)])
    if name == "constant":
        return ExternalForce([(lambda x, p, s=strength: s)] * r)
    raise ConfigError("unknown force %r" % name)


_REGISTRY = {
    "classical-free": _classical_free,
    "classical-metric": _classical_metric,
    "poisson-so3": _poisson_so3,
    "deformed-translate": _deformed_translate,
}


def builtin_models():
    """Descriptors of the builtin model families."""
    out = []
    for name in sorted(_REGISTRY):
        sys = _REGISTRY[name]({})
        out.append({
            "name": name,
            "m": sys.model.m,
            "r": sys.model.r,
        })
    return out


def make_system(name, params=None):
    """Instantiate a builtin Hamilton system by name."""
    if name not in _REGISTRY:
        raise ConfigError("unknown model %r (available: %s)"
                          % (name, ", ".join(sorted(_REGISTRY))))
    return _REGISTRY[name](dict(params or {}))


def model_probe_points(sys, n=100, seed=42):
    """Seeded probe set matching the system's dimensions."""
    return probe_points(sys.model.m, sys.model.r, n, seed)
