"""Parallel transport, holonomy amplitude and curvature on trivial bundles over R^m."""
from .amplitude import (AmplitudeValue, VerificationReport, abelian_amplitude_integral,
                        check_conjugation_invariance, check_gauge_invariance, check_subadditivity)
from .connection import (Chart, Connection, GaugeField, curvature, eval_form, gauge_transform,
                         make_connection)
from .gauge_axial import axial_gauge, axial_residual
from .lie import (SO, SU2, U1, AlgebraElement, GroupElement, GroupKind, algebra_norm, exp_map,
                  geodesic_distance, log_map, project_to_group)
from .transport import (Path, circle_transport, concatenate, holonomy, parallel_transport,
                        reverse)
from .verify import (Surface, check_corollary_planar, check_derivative_lemma, check_radial_estimate,
                     check_theorem, curvature_mass, pullback_curvature, sweep_radius)

__version__ = "0.1.0"
