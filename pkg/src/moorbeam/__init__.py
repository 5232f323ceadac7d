"""moorbeam: finite-volume geometrically exact beam solver for mooring lines
coupled to a six-degree-of-freedom floating body."""

__version__ = "0.1.0"

from .blocktri import BACKEND as SOLVER_BACKEND
from .blocktri import BlockTriDiagSystem, SingularBlockError, solve_block_tridiagonal
from .assembly import assemble_system, compute_strain, internal_loads
from .catenary import CatenaryError, elastic_catenary, elastic_catenary_oracle
from .coupling import (
    CoupledSystem,
    CouplingConfig,
    InitResult,
    LineProperties,
    LineSpec,
    MotionSignal,
    SimulationState,
    build_system,
    coupling_step,
    initialize_line,
    initialize_system,
    run_simulation,
    simulate,
)
from .hydro import BoxHydroModel, NoHydro, StokesWave
from .loads import (
    CellKinematics,
    LoadEnvironment,
    added_mass_force,
    buoyancy_force,
    drag_force,
    seabed_force,
    total_external,
)
from .morph import MorphConfig, blend_weight, blended_rotation, box_distance, point_displacement
from .newton import (
    EndReactions,
    NewtonConvergenceError,
    NewtonError,
    NumericalBlowUpError,
    advance_step,
    newton_solve,
    solve_static,
)
from .postprocess import amplitude_peak_to_trough, fft_dominant_amplitude
from .rigidbody import (
    BodyLoads,
    RigidBodyState,
    aggregate_loads,
    fairlead_kinematics,
    integrate_6dof,
)
from .scenario import Scenario, ScenarioError, parse_scenario, render_scenario
from .section import CrossSection, circular_section
from .state import BeamBC, BeamState, StrainState, straight_line_state
from .timeseries import TimeSeries, read_timeseries, write_timeseries

__all__ = [name for name in dir() if not name.startswith("_")]
