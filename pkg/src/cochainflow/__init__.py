"""Structure-preserving fluid flows on finite cochain complexes.

Simplicial cochains with a cup product and a choice of inner product (the
combinatorial "toy" metric or the Whitney L^2 metric) carry a projected
quadratic flow whose energy law, steady states, and refinement behaviour
mirror the incompressible Navier-Stokes equations.
"""

__version__ = "0.1.0"

from .analytic import AnalyticForm, FormError, parse_form, taylor_green_form
from .cochains import (Cochain, CochainError, coboundary, cup, get_cup_table,
                       toy_inner_product)
from .complexes import (MeshError, SimplicialComplex, build_flat_torus,
                        build_icosahedron_sphere, load_complex, save_complex,
                        subdivide)
from .experiments import (RefinementStudy, SteadyScanReport,
                          WeakConvergenceReport, converge_cup,
                          converge_weak_flow, converge_wr, steady_state_scan)
from .flow import (Diagnostics, FlowBlowupError, FlowParams, FlowState,
                   apply_T_nu, default_dt, euler_orthogonality_defect,
                   flow_vector, run, steady_residual, step)
from .hodge import (HarmonicReport, HodgeDecomposition, InnerProductModel,
                    SolverError, harmonic_basis, hodge_decompose, toy_model,
                    whitney_model)
from .whitney import (PiecewisePolyForm, QuadratureError, de_rham_map,
                      l2_distance, l2_pairing, whitney_map,
                      whitney_mass_matrix)

__all__ = [
    "AnalyticForm", "FormError", "parse_form", "taylor_green_form",
    "Cochain", "CochainError", "coboundary", "cup", "get_cup_table",
    "toy_inner_product",
    "MeshError", "SimplicialComplex", "build_flat_torus",
    "build_icosahedron_sphere", "load_complex", "save_complex", "subdivide",
    "RefinementStudy", "SteadyScanReport", "WeakConvergenceReport",
    "converge_cup", "converge_weak_flow", "converge_wr", "steady_state_scan",
    "Diagnostics", "FlowBlowupError", "FlowParams", "FlowState", "apply_T_nu",
    "default_dt", "euler_orthogonality_defect", "flow_vector", "run",
    "steady_residual", "step",
    "HarmonicReport", "HodgeDecomposition", "InnerProductModel", "SolverError",
    "harmonic_basis", "hodge_decompose", "toy_model", "whitney_model",
    "PiecewisePolyForm", "QuadratureError", "de_rham_map", "l2_distance",
    "l2_pairing", "whitney_map", "whitney_mass_matrix",
]
