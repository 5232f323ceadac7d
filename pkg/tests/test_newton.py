import numpy as np
import pytest

from moorbeam.blocktri import SingularBlockError
from moorbeam.catenary import elastic_catenary
from moorbeam.loads import LoadEnvironment
from moorbeam.newton import (
    NewtonConvergenceError,
    newton_solve,
    solve_static,
)
from moorbeam.section import circular_section
from moorbeam.state import BeamBC, straight_line_state

GRAVITY = LoadEnvironment(rho_fluid=0.0, gravity=(0, 0, -9.81))
NO_LOADS = LoadEnvironment(rho_fluid=0.0, gravity=(0, 0, 0))


def cable_section(EA=100.0, mpl=0.1):
    return circular_section(diameter=0.005, EA=EA, mass_per_length=mpl,
                            EI=1e-8, GJ=1e-8)


def test_consistent_state_converges_immediately():
    sec = cable_section()
    state = straight_line_state([0, 0, 0], [1, 0, 0], 1.0, 12)
    bc = (BeamBC.pinned(state.positions[0] - [1.0 / 24, 0, 0]),
          BeamBC.pinned(state.positions[-1] + [1.0 / 24, 0, 0]))
    out, reactions, info = newton_solve(state, None, NO_LOADS, sec, bc, dt=None)
    assert info.iterations <= 1
    assert np.array_equal(out.positions, state.positions)
    assert np.allclose(reactions.west, 0.0, atol=1e-10)
    assert np.allclose(reactions.east, 0.0, atol=1e-10)


def test_hanging_catenary_matches_oracle_within_one_percent():
    sec = cable_section()
    anchor = np.zeros(3)
    fairlead = np.array([0.8, 0.0, 0.3])
    from moorbeam.coupling import LineProperties, initialize_line

    result = initialize_line(anchor, fairlead, LineProperties(sec, 1.0, 30), GRAVITY)
    oracle = elastic_catenary(fairlead - anchor, 1.0, 0.1 * 9.81, 100.0)
    t_beam = np.linalg.norm(result.fairlead_reaction)
    t_oracle = np.linalg.norm(oracle.fairlead_tension)
    assert abs(t_beam - t_oracle) / t_oracle < 0.01
    t_anchor = result.pretension
    assert abs(t_anchor - np.linalg.norm(oracle.anchor_tension)) / t_anchor < 0.01
    # horizontal component against the oracle's horizontal tension
    h_beam = np.linalg.norm(result.anchor_reaction[0:2])
    assert abs(h_beam - oracle.horizontal_tension) / oracle.horizontal_tension < 0.01


def test_reaction_forces_balance_external_load():
    """Static equilibrium of the whole line: the support forces (negatives of
    the returned pulls) plus the integrated distributed load vanish."""
    sec = cable_section()
    state = straight_line_state([0, 0, 0], [1, 0, 0], 1.0, 24)
    bc = (BeamBC.pinned([0, 0, 0]), BeamBC.pinned([0.92, 0, 0]))
    converged, reactions, _ = solve_static(state, GRAVITY, sec, bc, tol=1e-11)
    weight = sec.mass_per_length * 9.81 * 1.0
    total_load = np.array([0.0, 0.0, -weight])
    balance = reactions.west + reactions.east - total_load
    assert np.abs(balance).max() < 1e-8 * weight


def test_quaternion_norms_preserved():
    sec = cable_section()
    state = straight_line_state([0, 0, 0], [1, 0, 0], 1.0, 16)
    bc = (BeamBC.pinned([0, 0, 0]), BeamBC.pinned([0.9, 0, 0]))
    converged, _, _ = solve_static(state, GRAVITY, sec, bc)
    norms = np.linalg.norm(converged.orientations, axis=1)
    assert np.abs(norms - 1.0).max() < 1e-10


def test_max_iterations_error_carries_residual():
    sec = cable_section()
    state = straight_line_state([0, 0, 0], [1, 0, 0], 1.0, 16)
    bc = (BeamBC.pinned([0, 0, 0]), BeamBC.pinned([0.9, 0, 0]))
    with pytest.raises(NewtonConvergenceError) as err:
        solve_static(state, GRAVITY, sec, bc, max_iter=1, tol=1e-14)
    assert err.value.residual_norm > 0.0


def test_free_free_statics_is_singular():
    sec = cable_section()
    state = straight_line_state([0, 0, 0], [1, 0, 0], 1.0, 8)
    bc = (BeamBC.free(), BeamBC.free())
    with pytest.raises((SingularBlockError, NewtonConvergenceError)):
        solve_static(state, GRAVITY, sec, bc)


def test_invalid_tolerance_rejected():
    sec = cable_section()
    state = straight_line_state([0, 0, 0], [1, 0, 0], 1.0, 8)
    bc = (BeamBC.free(), BeamBC.free())
    with pytest.raises(ValueError):
        newton_solve(state, None, NO_LOADS, sec, bc, dt=None, tol=-1.0)
    with pytest.raises(ValueError):
        newton_solve(state, None, NO_LOADS, sec, bc, dt=None, max_iter=0)
