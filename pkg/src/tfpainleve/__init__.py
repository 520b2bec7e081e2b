"""Numerical toolkit for the boundary layer of harmonically trapped ground states.

The package solves the Painleve-II connection problem that governs the layer
profile near the classical turning surface, builds the correction hierarchy on
top of it, assembles composite approximations of the full ground state, and
studies the small-eigenvalue scaling of the linearized operator, with
Bohr-Sommerfeld quadrature as an independent cross-check.
"""

__version__ = "0.1.0"

from .grids import (
    SingularPivotError,
    Grid1D,
    TridiagonalOperator,
    make_operator,
    solve_tridiagonal,
    first_difference,
    second_difference,
    to_boundary_layer,
    from_boundary_layer,
    uniform_grid,
    graded_grid,
)
from .painleve import (
    ConvergenceError,
    TailSeries,
    PainleveSolution,
    bn_coefficients,
    tail_plus,
    tail_minus,
    solve_hastings_mcleod,
    w0_eval,
    w0_min,
)
from .corrections import (
    CorrectionSet,
    nu0_second_derivative,
    assemble_F1,
    assemble_Fn,
    solve_correction_1,
    solve_correction_n,
    build_corrections,
    composite_nu,
    tail_fit_window,
)
from .groundstate import (
    GroundState,
    RemainderTable,
    thomas_fermi,
    default_grid,
    solve_ground_state,
    energy,
    energy_of,
    composite_eta,
    remainder_study,
)
from .spectrum import (
    SpectrumReport,
    ScalingTable,
    DecayCertificate,
    assemble_M0,
    m0_nodes,
    assemble_Lplus,
    operator_nodes,
    eig_smallest,
    scaling_study,
    decay_check,
    w_eps,
)
from .semiclassics import (
    PotentialProfile,
    from_function,
    from_solution,
    simplified,
    harmonic,
    turning_points,
    action,
    bs_eigenvalue,
    bs_rule_x,
)

__all__ = [
    "SingularPivotError",
    "Grid1D",
    "TridiagonalOperator",
    "make_operator",
    "solve_tridiagonal",
    "first_difference",
    "second_difference",
    "to_boundary_layer",
    "from_boundary_layer",
    "uniform_grid",
    "graded_grid",
    "ConvergenceError",
    "TailSeries",
    "PainleveSolution",
    "bn_coefficients",
    "tail_plus",
    "tail_minus",
    "solve_hastings_mcleod",
    "w0_eval",
    "w0_min",
    "CorrectionSet",
    "nu0_second_derivative",
    "assemble_F1",
    "assemble_Fn",
    "solve_correction_1",
    "solve_correction_n",
    "build_corrections",
    "composite_nu",
    "tail_fit_window",
    "GroundState",
    "RemainderTable",
    "thomas_fermi",
    "default_grid",
    "solve_ground_state",
    "energy",
    "energy_of",
    "composite_eta",
    "remainder_study",
    "SpectrumReport",
    "ScalingTable",
    "DecayCertificate",
    "assemble_M0",
    "m0_nodes",
    "assemble_Lplus",
    "operator_nodes",
    "eig_smallest",
    "scaling_study",
    "decay_check",
    "w_eps",
    "PotentialProfile",
    "from_function",
    "from_solution",
    "simplified",
    "harmonic",
    "turning_points",
    "action",
    "bs_eigenvalue",
    "bs_rule_x",
]
