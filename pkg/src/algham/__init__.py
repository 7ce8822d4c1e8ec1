"""Numerical Hamiltonian mechanics on duals of anchored vector bundles.

The library builds anchored bundle models with bracket structure functions
and deformed base maps, equips their duals with nonlinear connections and
symplectic-type forms, and integrates the resulting canonical dynamics.
"""

from .errors import (AlghamError, NumericalDomainError, ShapeError,
                     SingularMorphismError, SingularHessianError,
                     DegenerateSymplecticError, IntegrationBlowupError,
                     ConfigError)
from .dual import Dual, derivative, value_of
from .fields import (BasePoint, PhasePoint, BaseField, ScalarField,
                     MatrixField, Structure3Field, DiffeoMap, probe_points)
from .algebroid import (AlgebroidModel, Section, bracket, theta_apply,
                        check_axioms, AxiomReport)
from .morphism import MorphismGH
from .phase import (GeneralizedVector, GeneralizedCovector,
                    GeneralizedVectorField, PhaseConnection,
                    EndomorphismField, FiberChange, adapted_horizontal,
                    dual_adapted, adapted_derivative, vertical_projector,
                    horizontal_projector, almost_product, almost_tangent,
                    gt_bracket, nijenhuis, connection_curvature,
                    transform_model, transform_connection)
from .dynamics import (ExternalForce, Semispray, Trajectory,
                       semispray_from_connection, connection_from_semispray,
                       semispray_derivation, force_deviation,
                       force_free_connection, ring_curvature,
                       berwald_connection, integrate_semispray,
                       parallel_lift, transform_semispray)
from .hamilton import (HamiltonianField, CartanFunction, HamiltonSystem,
                       regularity_check, cartan_check,
                       hamiltonian_from_cartan, pc_one_form, pc_two_form,
                       energy, energy_function, omega_matrix,
                       canonical_semispray_closed_form,
                       canonical_semispray_linear_solve,
                       connection_from_hamiltonian,
                       integrate_hamilton_jacobi, hamilton_jacobi_residual,
                       energy_values, energy_drift)
from .models import builtin_models, make_system, model_probe_points

__version__ = "0.1.0"
