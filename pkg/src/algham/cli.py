"""Command line entry points: config parsing, the invariant-suite runner
and trajectory serialization.

Config files are flat JSON objects with a strict key set.  Output files
are plain CSV with 17 significant digits and LF line endings so reruns
with the same seed diff byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (AlghamError, ConfigError, IntegrationBlowupError)
from .dual import value_of
from .fields import PhasePoint, Structure3Field
from .algebroid import AlgebroidModel, check_axioms
from .phase import (GeneralizedVectorField,
                    vertical_projector, horizontal_projector, almost_product,
                    almost_tangent, gt_bracket, nijenhuis,
                    connection_curvature, curvature_literal)
from .dynamics import (connection_from_semispray, force_free_connection,
                       force_deviation)
from .hamilton import (HamiltonSystem, regularity_check, omega_matrix,
                       canonical_semispray_closed_form,
                       canonical_semispray_linear_solve,
                       connection_from_hamiltonian, integrate_hamilton_jacobi,
                       energy_values, e_vector)
from .models import builtin_models, make_system, model_probe_points


# ---------------------------------------------------------------------------
# configuration


_SCALAR_KEYS = {"model", "force", "output", "metric_scale", "force_strength",
                "t_end", "dt", "seed", "probes", "corrupt_structure"}
_VECTOR_KEYS = {"inertia", "tau", "x0", "p0"}
_ALLOWED_KEYS = _SCALAR_KEYS | _VECTOR_KEYS
_PARAM_KEYS = {"metric_scale", "force_strength", "inertia", "tau", "force"}


@dataclass
class ModelConfig:
    model_name: str
    parameters: dict = field(default_factory=dict)
    x0: list | None = None
    p0: list | None = None
    t_end: float = 1.0
    dt: float = 1e-3
    seed: int = 42
    probes: int = 10
    output_path: str = "trajectory.csv"
    corrupt_structure: float = 0.0


def _require_number(key, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("key %r must be a number" % key)
    return float(v)


def _require_vector(key, v):
    if not isinstance(v, list) or not v:
        raise ConfigError("key %r must be a non-empty list of numbers" % key)
    return [_require_number(key, c) for c in v]


def parse_config(data):
    """Validate a flat JSON object into a ModelConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - _ALLOWED_KEYS)
    if unknown:
        raise ConfigError("unknown config keys: %s" % ", ".join(unknown))
    if "model" not in data:
        raise ConfigError("config key 'model' is required")
    if not isinstance(data["model"], str):
        raise ConfigError("key 'model' must be a string")

    params = {}
    for k in _PARAM_KEYS & set(data):
        if k == "force":
            if not isinstance(data[k], str):
                raise ConfigError("key 'force' must be a string")
            params[k] = data[k]
        elif k in _VECTOR_KEYS:
            params[k] = _require_vector(k, data[k])
        else:
            params[k] = _require_number(k, data[k])

    cfg = ModelConfig(model_name=data["model"], parameters=params)
    if "x0" in data:
        cfg.x0 = _require_vector("x0", data["x0"])
    if "p0" in data:
        cfg.p0 = _require_vector("p0", data["p0"])
    if "t_end" in data:
        cfg.t_end = _require_number("t_end", data["t_end"])
    if "dt" in data:
        cfg.dt = _require_number("dt", data["dt"])
    if "seed" in data:
        if isinstance(data["seed"], bool) or not isinstance(data["seed"], int):
            raise ConfigError("key 'seed' must be an integer")
        cfg.seed = data["seed"]
    if "probes" in data:
        if isinstance(data["probes"], bool) or not isinstance(data["probes"], int):
            raise ConfigError("key 'probes' must be an integer")
        cfg.probes = data["probes"]
    if "output" in data:
        if not isinstance(data["output"], str):
            raise ConfigError("key 'output' must be a string")
        cfg.output_path = data["output"]
    if "corrupt_structure" in data:
        cfg.corrupt_structure = _require_number("corrupt_structure",
                                                data["corrupt_structure"])

    if cfg.dt <= 0:
        raise ConfigError("dt must be > 0")
    if cfg.t_end <= 0:
        raise ConfigError("t_end must be > 0")
    if cfg.probes < 1:
        raise ConfigError("probes must be >= 1")

    env_seed = os.environ.get("ALGH_SEED")
    if env_seed is not None:
        try:
            cfg.seed = int(env_seed)
        except ValueError:
            raise ConfigError("ALGH_SEED must be an integer, got %r"
                              % env_seed)
    return cfg


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s is not valid JSON: %s" % (path, exc))
    return parse_config(data)


def build_system(cfg):
    sys_ = make_system(cfg.model_name, cfg.parameters)
    model = sys_.model
    if cfg.x0 is not None and len(cfg.x0) != model.m:
        raise ConfigError("x0 must have %d components" % model.m)
    if cfg.p0 is not None and len(cfg.p0) != model.r:
        raise ConfigError("p0 must have %d components" % model.r)
    if cfg.corrupt_structure != 0.0:
        sys_ = _corrupt(sys_, cfg.corrupt_structure)
    return sys_


def _corrupt(sys_, eps):
    """Perturb one structure function entry; used to exercise failure paths."""
    base = sys_.model.L
    r = sys_.model.r

    def lfn(x, base=base, eps=eps):
        arr = [[list(row) for row in blk] for blk in base.value(x)]
        arr[0][0][min(1, r - 1)] += eps
        return arr

    model = AlgebroidModel(sys_.model.m, r, sys_.model.rho,
                           Structure3Field(lfn, r), sys_.model.h,
                           sys_.model.eta, sys_.model.name + "-corrupted")
    return HamiltonSystem(model, sys_.gh, sys_.H, sys_.force)


def default_initial(sys_):
    x0 = [0.0] * sys_.model.m
    p0 = [1.0 / (1.0 + a) for a in range(sys_.model.r)]
    return x0, p0


# ---------------------------------------------------------------------------
# the invariant suite


@dataclass
class CheckResult:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self):
        return np.isfinite(self.residual) and self.residual <= self.threshold


@dataclass
class RunReport:
    model_name: str
    checks: list
    flags: dict
    elapsed: float

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


def _vec_norm(v):
    return float(max(np.max(np.abs(np.asarray(v.Z, dtype=float))),
                     np.max(np.abs(np.asarray(v.Y, dtype=float)))))


def _mat(rows):
    return np.array([[value_of(v) for v in row] for row in rows])


def run_check(config):
    """Run the full invariant suite on the configured model."""
    t0 = time.perf_counter()
    sys_ = build_system(config)
    model, gh, H = sys_.model, sys_.gh, sys_.H
    r = model.r
    checks = []
    flags = {"adapted-bracket-sign-variant-fails": False,
             "closed-form-mismatch": False}

    # structure axioms
    ax = check_axioms(model, n_probes=min(config.probes, 20),
                      seed=config.seed)
    checks.append(CheckResult("axiom-antisymmetry", ax.antisymmetry, 1e-12))
    checks.append(CheckResult("axiom-leibniz", ax.leibniz, 1e-8))
    checks.append(CheckResult("axiom-jacobi", ax.jacobi, 1e-7))
    checks.append(CheckResult("axiom-anchor-morphism", ax.anchor_morphism,
                              1e-8))

    # regularity of the Hamiltonian
    reg = regularity_check(H, probes=config.probes, seed=config.seed)
    checks.append(CheckResult("hessian-regularity",
                              reg.max_inverse_residual
                              if reg.ok else float("inf"), 1e-10))

    pts = model_probe_points(sys_, config.probes, config.seed)
    conn = connection_from_hamiltonian(sys_)
    rng = np.random.default_rng(config.seed + 1)

    # projector and structure-endomorphism identities
    V = vertical_projector(model, conn)
    Hp = horizontal_projector(model, conn)
    P = almost_product(model, conn)
    J = almost_tangent(model, gh)
    w_proj = w_prod = w_tan = 0.0
    eye = np.eye(2 * r)
    for pt in pts:
        mv = V.matrix(pt)
        mh = Hp.matrix(pt)
        mp = P.matrix(pt)
        mj = J.matrix(pt)
        w_proj = max(w_proj,
                     float(np.max(np.abs(mv @ mv - mv))),
                     float(np.max(np.abs(mh @ mh - mh))),
                     float(np.max(np.abs(mh + mv - eye))),
                     float(np.max(np.abs(mh @ mv))),
                     float(np.max(np.abs(mv @ mh))))
        w_prod = max(w_prod,
                     float(np.max(np.abs(mp @ mp - eye))),
                     float(np.max(np.abs(mp - (mh - mv)))))
        w_tan = max(w_tan,
                    float(np.max(np.abs(mj @ mj))),
                    float(np.max(np.abs(mj @ mh - mj))),
                    float(np.max(np.abs(mv @ mj - mj))))
    checks.append(CheckResult("projector-identities", w_proj, 1e-10))
    checks.append(CheckResult("almost-product-identities", w_prod, 1e-10))
    checks.append(CheckResult("almost-tangent-identities", w_tan, 1e-10))

    # Nijenhuis torsion of the almost tangent structure
    w = 0.0
    for pt in pts[:min(5, len(pts))]:
        zc = rng.uniform(-1, 1, size=(2, r))
        yc = rng.uniform(-1, 1, size=(2, r))
        U = GeneralizedVectorField.constant(zc[0], yc[0])
        W = GeneralizedVectorField.constant(zc[1], yc[1])
        w = max(w, _vec_norm(nijenhuis(model, J, U, W, pt)))
    checks.append(CheckResult("nijenhuis-almost-tangent", w, 1e-8))

    # natural-basis brackets against the structure functions
    w = 0.0
    for pt in pts[:min(5, len(pts))]:
        x = list(pt.x)
        lv = _mat3(model.L_at(model.h(x)))
        for al in range(r):
            ha = GeneralizedVectorField.basis_horizontal(al, r)
            va = GeneralizedVectorField.basis_vertical(al, r)
            for be in range(r):
                hb = GeneralizedVectorField.basis_horizontal(be, r)
                vb = GeneralizedVectorField.basis_vertical(be, r)
                bv = gt_bracket(model, ha, hb).at(pt)
                w = max(w, float(np.max(np.abs(bv.Z - lv[:, al, be]))),
                        float(np.max(np.abs(bv.Y))))
                w = max(w, _vec_norm(gt_bracket(model, ha, vb).at(pt)))
                w = max(w, _vec_norm(gt_bracket(model, va, vb).at(pt)))
    checks.append(CheckResult("natural-basis-brackets", w, 1e-8))

    # adapted-frame bracket against the connection curvature
    w = 0.0
    w_lit = 0.0
    for pt in pts[:min(3, len(pts))]:
        x = list(pt.x)
        lv = _mat3(model.L_at(model.h(x)))
        gam = _mat(conn.fn(x, list(pt.p)))
        cur = connection_curvature(model, conn, pt)
        lit = curvature_literal(model, conn, pt)
        for al in range(r):
            da = adapted_horizontal_field(model, conn, al)
            for be in range(al + 1, r):
                db = adapted_horizontal_field(model, conn, be)
                bv = gt_bracket(model, da, db).at(pt)
                # the bracket splits over the adapted frame, so its
                # momentum block carries the frame coefficients as well
                vert = bv.Y - gam @ lv[:, al, be]
                w = max(w, float(np.max(np.abs(bv.Z - lv[:, al, be]))),
                        float(np.max(np.abs(vert - cur[:, al, be]))))
                w_lit = max(w_lit,
                            float(np.max(np.abs(vert - lit[:, al, be]))))
    checks.append(CheckResult("adapted-bracket-curvature", w, 1e-8))
    flags["adapted-bracket-sign-variant-fails"] = w_lit > 1e-8
    flags["adapted-bracket-sign-variant-residual"] = w_lit

    # symplectic-type two-form and the canonical semispray
    w_om = 0.0
    w_spray = 0.0
    w_def = 0.0
    spray = canonical_semispray_closed_form(sys_)
    for pt in pts:
        om = omega_matrix(sys_, pt)
        w_om = max(w_om, float(np.max(np.abs(om + om.T))))
        x, p = list(pt.x), list(pt.p)
        sv = canonical_semispray_linear_solve(sys_, pt)
        fld = spray.as_field()
        cf = fld.at(pt)
        w_spray = max(w_spray,
                      float(np.max(np.abs(sv.Z - cf.Z))),
                      float(np.max(np.abs(sv.Y - cf.Y))))
        jv = J.apply_vector(cf)
        w_def = max(w_def, float(np.max(np.abs(jv.Y - np.asarray(p)))),
                    float(np.max(np.abs(jv.Z))))
    checks.append(CheckResult("two-form-antisymmetry", w_om, 1e-10))
    checks.append(CheckResult("semispray-closed-vs-solve", w_spray, 1e-8))
    checks.append(CheckResult("semispray-defining-property", w_def, 1e-10))
    flags["closed-form-mismatch"] = w_spray > 1e-8

    # force split: the deviation between the two connections is a quarter
    # of the momentum gradient of the force pulled through the metric
    if sys_.force is not None:
        ring = connection_from_semispray(model, gh, spray,
                                         include_force=False)
        ff = force_free_connection(model, gh, conn, sys_.force)
        w = 0.0
        for pt in pts[:min(10, len(pts))]:
            a = _mat(ring.fn(list(pt.x), list(pt.p)))
            b = _mat(ff.fn(list(pt.x), list(pt.p)))
            c = _mat(conn.fn(list(pt.x), list(pt.p)))
            phi = force_deviation(gh, sys_.force, pt)
            w = max(w, float(np.max(np.abs(a - b))),
                    float(np.max(np.abs(a - c - 0.25 * phi))))
        checks.append(CheckResult("force-split-relation", w, 1e-10))

    # energy conservation over a unit of time
    x0, p0 = default_initial(sys_)
    if config.x0 is not None:
        x0 = config.x0
    if config.p0 is not None:
        p0 = config.p0
    traj = integrate_hamilton_jacobi(sys_, x0, p0, 1.0, dt=1e-3)
    drift = float(np.max(np.abs(traj.energies - traj.energies[0])))
    checks.append(CheckResult("energy-drift-unit-time", drift, 1e-9))

    elapsed = time.perf_counter() - t0
    return RunReport(sys_.model.name, checks, flags, elapsed)


def _mat3(blk):
    return np.array([[[value_of(v) for v in row] for row in b] for b in blk])


def adapted_horizontal_field(model, conn, alpha):
    r = conn.r
    zc = [(lambda x, p, v=1.0 if c == alpha else 0.0: v) for c in range(r)]
    yc = [(lambda x, p, b=b: conn.fn(x, p)[b][alpha]) for b in range(r)]
    return GeneralizedVectorField(zc, yc)


def print_report(report, out=None):
    out = out or sys.stdout
    out.write("model: %s\n" % report.model_name)
    out.write("%-32s %-12s %-10s %s\n"
              % ("check", "residual", "threshold", "status"))
    for c in report.checks:
        out.write("%-32s %-12.3e %-10.1e %s\n"
                  % (c.name, c.residual, c.threshold,
                     "PASS" if c.passed else "FAIL"))
    out.write("flag adapted-bracket-sign-variant-fails: %s (residual %.3e)\n"
              % (report.flags["adapted-bracket-sign-variant-fails"],
                 report.flags["adapted-bracket-sign-variant-residual"]))
    out.write("flag closed-form-mismatch: %s\n"
              % report.flags["closed-form-mismatch"])
    out.write("overall: %s\n" % ("PASS" if report.passed else "FAIL"))


# ---------------------------------------------------------------------------
# trajectory output


def _fmt(v):
    if v == 0.0:
        v = 0.0
    return "%.17g" % v


def write_trajectory(path, sys_, traj):
    m = sys_.model.m
    r = sys_.model.r
    energies = getattr(traj, "energies", None)
    if energies is None:
        energies = energy_values(sys_.H, traj)
    header = ["t"] + ["x%d" % (i + 1) for i in range(m)] \
        + ["p%d" % (a + 1) for a in range(r)] + ["E_H"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(len(traj.ts)):
            row = [traj.ts[k]] + list(traj.xs[k]) + list(traj.ps[k]) \
                + [energies[k]]
            fh.write(",".join(_fmt(float(v)) for v in row) + "\n")


def run_integrate(config, out=None):
    """Integrate the configured system and serialize the trajectory.

    Returns the exit code; on blowup the partial trajectory is still
    written before returning 4.
    """
    out = out or sys.stdout
    sys_ = build_system(config)
    x0, p0 = default_initial(sys_)
    if config.x0 is not None:
        x0 = config.x0
    if config.p0 is not None:
        p0 = config.p0
    try:
        traj = integrate_hamilton_jacobi(sys_, x0, p0, config.t_end,
                                         dt=config.dt)
    except IntegrationBlowupError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            write_trajectory(config.output_path, sys_, partial)
            out.write("blowup: %s (partial trajectory written to %s)\n"
                      % (exc, config.output_path))
        else:
            out.write("blowup: %s\n" % exc)
        return 4
    write_trajectory(config.output_path, sys_, traj)
    drift = float(np.max(np.abs(traj.energies - traj.energies[0])))
    out.write("wrote %s (%d rows)\n" % (config.output_path, len(traj.ts)))
    out.write("final t=%s x=[%s] p=[%s]\n"
              % (_fmt(float(traj.ts[-1])),
                 " ".join(_fmt(float(v)) for v in traj.xs[-1]),
                 " ".join(_fmt(float(v)) for v in traj.ps[-1])))
    out.write("max |dE_H| = %.3e\n" % drift)
    return 0


# ---------------------------------------------------------------------------
# point inspection commands


def parse_at(text, m, r):
    """Parse 'x1,..,xm:p1,..,pr' into a phase point."""
    parts = text.replace(";", ":").split(":")
    if len(parts) != 2:
        raise ConfigError("--at expects 'x1,..,xm:p1,..,pr'")
    try:
        x = [float(v) for v in parts[0].split(",")]
        p = [float(v) for v in parts[1].split(",")]
    except ValueError:
        raise ConfigError("--at components must be numbers")
    if len(x) != m or len(p) != r:
        raise ConfigError("--at expects %d base and %d momentum components"
                          % (m, r))
    return PhasePoint(tuple(x), tuple(p))


def cmd_semispray(config, at_text, out=None):
    out = out or sys.stdout
    sys_ = build_system(config)
    pt = parse_at(at_text, sys_.model.m, sys_.model.r)
    x, p = list(pt.x), list(pt.p)
    spray = canonical_semispray_closed_form(sys_)
    gvals = [value_of(c(x, p)) for c in spray.gminus]
    conn = connection_from_hamiltonian(sys_)
    gam = _mat(conn.fn(x, p))
    evals = e_vector(sys_.model, sys_.gh, sys_.H)(x, p)
    out.write("model: %s at x=[%s] p=[%s]\n"
              % (sys_.model.name, " ".join(_fmt(v) for v in x),
                 " ".join(_fmt(v) for v in p)))
    out.write("G: %s\n" % " ".join(_fmt(v) for v in gvals))
    for b in range(sys_.model.r):
        out.write("Gamma[%d]: %s\n" % (b, " ".join(_fmt(v) for v in gam[b])))
    out.write("E: %s\n" % " ".join(_fmt(value_of(v)) for v in evals))
    return 0


def cmd_curvature(config, at_text, out=None):
    out = out or sys.stdout
    sys_ = build_system(config)
    pt = parse_at(at_text, sys_.model.m, sys_.model.r)
    conn = connection_from_hamiltonian(sys_)
    cur = connection_curvature(sys_.model, conn, pt)
    out.write("model: %s at x=[%s] p=[%s]\n"
              % (sys_.model.name, " ".join(_fmt(v) for v in pt.x),
                 " ".join(_fmt(v) for v in pt.p)))
    r = sys_.model.r
    for b in range(r):
        for al in range(r):
            for be in range(al + 1, r):
                out.write("R[%d][%d][%d] = %s\n"
                          % (b, al, be, _fmt(float(cur[b][al][be]))))
    return 0


def cmd_models(out=None):
    out = out or sys.stdout
    for desc in builtin_models():
        out.write("%-20s m=%d r=%d\n" % (desc["name"], desc["m"], desc["r"]))
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="algham",
        description="Hamiltonian dynamics on dual bundles: model checks "
                    "and trajectory integration.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("models", help="list builtin models")
    for name, hlp in [("check", "run the invariant suite"),
                      ("integrate", "integrate a trajectory to CSV"),
                      ("semispray", "print semispray data at a point"),
                      ("curvature", "print connection curvature at a point")]:
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--config", required=True, metavar="F")
        if name in ("semispray", "curvature"):
            sp.add_argument("--at", required=True, metavar="x,..:p,..")
    return ap


def main(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "models":
            return cmd_models()
        cfg = load_config(args.config)
        if args.command == "check":
            report = run_check(cfg)
            print_report(report)
            sys.stderr.write("elapsed: %.2f s\n" % report.elapsed)
            return 0 if report.passed else 1
        if args.command == "integrate":
            return run_integrate(cfg)
        if args.command == "semispray":
            return cmd_semispray(cfg, args.at)
        if args.command == "curvature":
            return cmd_curvature(cfg, args.at)
    except ConfigError as exc:
        sys.stderr.write("config error: %s\n" % exc)
        return 2
    except OSError as exc:
        sys.stderr.write("i/o error: %s\n" % exc)
        return 3
    except IntegrationBlowupError as exc:
        sys.stderr.write("blowup: %s\n" % exc)
        return 4
    except AlghamError as exc:
        sys.stderr.write("invariant failure: %s\n" % exc)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
