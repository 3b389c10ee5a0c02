"""Ground states of fractional Schrodinger problems and their s -> 1 limit."""

from fraclab.constants import (
    A_const,
    B_const,
    C_const,
    ConstantsReport,
    constants_report,
    interpolation_theta,
    sobolev_constant,
)
from fraclab.discretization import (
    FracOperator,
    GridSpec,
    assemble_operator,
    lebesgue_norm,
    norm_s_squared,
    operator_convergence_gap,
    stencil_weights,
)
from fraclab.exceptions import FracLabError, NoBracket, NonConvergence
from fraclab.model import Nonlinearity, Potential, F_integral, check_assumptions
from fraclab.nehari import (
    EnergyContext,
    energy,
    energy_derivative,
    fiber_project,
    nehari_energy,
)
from fraclab.solver import GroundState, SolverConfig, continuation_sweep_init, solve_ground_state
from fraclab.transition import SweepConfig, SweepResult, run_sweep

__version__ = "0.1.0"
