"""Tour of the phase-space geometry behind a regular Hamiltonian.

Starting from the builtin "classical-metric" model this walks through the
objects the engine builds on the dual bundle: the canonical semispray, the
induced nonlinear connection, the projectors it splits the space with, the
almost tangent endomorphism, and the curvature that measures how far the
horizontal distribution is from being integrable.

Run: python3 demos/geometry_tour.py
"""

import numpy as np

from algham import (make_system, PhasePoint, value_of,
                    canonical_semispray_closed_form,
                    canonical_semispray_linear_solve,
                    connection_from_hamiltonian,
                    vertical_projector, horizontal_projector,
                    almost_tangent, connection_curvature)


def main():
    sys_ = make_system("classical-metric")
    model, gh = sys_.model, sys_.gh
    pt = PhasePoint((0.4, -0.3), (0.8, 0.5))

    print("model: classical-metric  (m = %d base, r = %d fiber)"
          % (model.m, model.r))
    print("phase point: x = %s, p = %s" % (list(pt.x), list(pt.p)))

    spray = canonical_semispray_closed_form(sys_)
    sv = spray.as_field().at(pt)
    ls = canonical_semispray_linear_solve(sys_, pt)
    print("\ncanonical semispray (closed form):")
    print("  base block     :", np.round(sv.Z, 6))
    print("  momentum block :", np.round(sv.Y, 6))
    print("  max deviation from the direct linear solve: %.2e"
          % max(np.max(np.abs(sv.Z - ls.Z)), np.max(np.abs(sv.Y - ls.Y))))

    conn = connection_from_hamiltonian(sys_)
    gam = np.array([[value_of(v) for v in row]
                    for row in conn.fn(list(pt.x), list(pt.p))])
    print("\ninduced nonlinear connection coefficients:")
    print(np.round(gam, 6))

    V = vertical_projector(model, conn)
    H = horizontal_projector(model, conn)
    J = almost_tangent(model, gh)
    mv, mh, mj = V.matrix(pt), H.matrix(pt), J.matrix(pt)
    eye = np.eye(2 * model.r)
    print("\nprojector identities at the point:")
    print("  |V^2 - V|      = %.2e" % np.max(np.abs(mv @ mv - mv)))
    print("  |H^2 - H|      = %.2e" % np.max(np.abs(mh @ mh - mh)))
    print("  |H + V - id|   = %.2e" % np.max(np.abs(mh + mv - eye)))
    print("  |J^2|          = %.2e" % np.max(np.abs(mj @ mj)))
    print("  |J H - J|      = %.2e" % np.max(np.abs(mj @ mh - mj)))

    cur = connection_curvature(model, conn, pt)
    print("\nconnection curvature R[b][alpha][beta] (alpha < beta):")
    for al in range(model.r):
        for be in range(al + 1, model.r):
            print("  R[:, %d, %d] =" % (al, be), np.round(cur[:, al, be], 6))


if __name__ == "__main__":
    main()
