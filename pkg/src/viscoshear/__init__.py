"""viscoshear: spectral stability of diffusing shear flows.

A closed-form family of shear profiles spreads under heat diffusion; this
package computes the critical wave number and neutral mode of the associated
Rayleigh problem, calibrates the amplitude to prescribed targets, locates the
purely imaginary unstable eigenvalue through the Wronskian of the Rayleigh
equation, and packages end-to-end stability-transition scenarios behind a
small CLI.
"""

from .errors import (
    BracketFailure,
    ConfigError,
    ConsistencyFailure,
    MultipleRoots,
    NonConvergence,
    ParseError,
    PVFailure,
    StepFailure,
    TailDominance,
    ValidationError,
    ViscoshearError,
    ZeroNorm,
)
from .flow import (
    FlowParams,
    FlowState,
    H1Diagnostics,
    eval_b,
    eval_b_derivs,
    eval_potential,
    h1_diagnostics,
    heat_residual,
)
from .spectrum import (
    Grid,
    SpectralResult,
    critical_wavenumber,
    lowest_eigenpair,
    profile_check,
    rayleigh_quotient,
)
from .calibrate import (
    CalibrationResult,
    KstarCurve,
    find_critical_M0,
    kstar_time_sweep,
    tune_M_for_kstar,
)
from .rayleigh import (
    EigenCurve,
    Phi1Solution,
    Phi2Solution,
    WronskianValue,
    assemble_phi,
    eigencurve,
    eigenvalue_for_k,
    neutral_mode_phiB,
    solve_phi1,
    solve_phi2,
    wronskian,
    wronskian_boundary,
    wronskian_det_check,
    wronskian_partials,
)
from .scenario import ScenarioReport, nu_sweep, run_line_scenario, run_torus_scenario
from .config import Config, load_config, parse_config

__version__ = "0.1.0"
