"""Six-degree-of-freedom rigid floating body.

Translations integrate in the inertial frame; angular velocity and the
inertia tensor live in the body frame (Euler's equations).  Acceleration
under-relaxation across outer coupling iterations stabilises the partitioned
exchange with the mooring solver.
"""

from dataclasses import dataclass, field

import numpy as np

from .quaternions import (
    quat_from_rotvec,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
)


@dataclass
class RigidBodyState:
    position: np.ndarray                   # COM, inertial frame (m)
    orientation: np.ndarray                # unit quaternion
    velocity: np.ndarray                   # COM velocity, inertial (m/s)
    angular_velocity: np.ndarray           # body frame (rad/s)
    mass: float
    inertia: np.ndarray                    # (3,3) about COM, body frame
    fairlead_points: np.ndarray            # (F,3) body frame, relative to COM

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.orientation = np.asarray(self.orientation, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.angular_velocity = np.asarray(self.angular_velocity, dtype=float)
        self.inertia = np.asarray(self.inertia, dtype=float)
        self.fairlead_points = np.atleast_2d(np.asarray(self.fairlead_points, dtype=float))
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if not np.allclose(self.inertia, self.inertia.T):
            raise ValueError("inertia tensor must be symmetric")
        if np.any(np.linalg.eigvalsh(self.inertia) <= 0.0):
            raise ValueError("inertia tensor must be positive definite")

    def copy(self) -> "RigidBodyState":
        return RigidBodyState(
            self.position.copy(), self.orientation.copy(), self.velocity.copy(),
            self.angular_velocity.copy(), self.mass, self.inertia.copy(),
            self.fairlead_points.copy())


@dataclass
class BodyLoads:
    """Total force/moment on the body with a per-source breakdown.

    Moments are about the COM in the inertial frame."""

    force: np.ndarray
    moment: np.ndarray
    hydro_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    hydro_moment: np.ndarray = field(default_factory=lambda: np.zeros(3))
    mooring_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    mooring_moment: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gravity_force: np.ndarray = field(default_factory=lambda: np.zeros(3))


def fairlead_kinematics(body: RigidBodyState):
    """Inertial position and velocity of every fairlead attachment point."""
    R = quat_to_matrix(body.orientation)
    offsets = body.fairlead_points @ R.T
    positions = body.position[None, :] + offsets
    omega_spatial = R @ body.angular_velocity
    velocities = body.velocity[None, :] + np.cross(omega_spatial[None, :], offsets)
    return positions, velocities


def aggregate_loads(body: RigidBodyState, fairlead_forces, hydro=(None, None),
                    gravity=(0.0, 0.0, -9.81)) -> BodyLoads:
    """Total force and moment: hydro model output + mooring pulls at the
    fairleads + gravity through the COM."""
    gravity = np.asarray(gravity, dtype=float)
    f_hydro, m_hydro = hydro
    f_hydro = np.zeros(3) if f_hydro is None else np.asarray(f_hydro, dtype=float)
    m_hydro = np.zeros(3) if m_hydro is None else np.asarray(m_hydro, dtype=float)

    R = quat_to_matrix(body.orientation)
    offsets = body.fairlead_points @ R.T
    f_moor = np.zeros(3)
    m_moor = np.zeros(3)
    for arm, force in zip(offsets, fairlead_forces):
        if force is None:
            continue
        f_moor += force
        m_moor += np.cross(arm, force)
    f_grav = body.mass * gravity

    return BodyLoads(
        force=f_hydro + f_moor + f_grav,
        moment=m_hydro + m_moor,
        hydro_force=f_hydro,
        hydro_moment=m_hydro,
        mooring_force=f_moor,
        mooring_moment=m_moor,
        gravity_force=f_grav,
    )


def body_accelerations(body: RigidBodyState, loads: BodyLoads,
                       extra_mass=None, extra_inertia=None):
    """Linear (inertial) and angular (body-frame) accelerations.

    extra_mass / extra_inertia: optional constant added mass (scalar or
    3-vector diagonal) standing in for radiation added mass."""
    m_eff = body.mass + (np.zeros(3) if extra_mass is None else np.asarray(extra_mass))
    accel = loads.force / m_eff
    R = quat_to_matrix(body.orientation)
    m_body = R.T @ loads.moment
    inertia = body.inertia
    if extra_inertia is not None:
        inertia = inertia + np.diag(np.broadcast_to(np.asarray(extra_inertia, dtype=float), (3,)))
    w = body.angular_velocity
    alpha = np.linalg.solve(inertia, m_body - np.cross(w, inertia @ w))
    return accel, alpha


def integrate_6dof(body: RigidBodyState, loads: BodyLoads, dt: float,
                   relax: float = 1.0, prev_accel=None,
                   extra_mass=None, extra_inertia=None):
    """Semi-implicit Euler step from the given state.

    relax blends the new accelerations with prev_accel (tuple of linear,
    angular) from the previous outer coupling iteration; with relax = 1 the
    update is independent of iteration history.  Returns (new state,
    (accel, alpha) as used)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if not 0.0 < relax <= 1.0:
        raise ValueError("relaxation factor must be in (0, 1]")
    accel, alpha = body_accelerations(body, loads, extra_mass, extra_inertia)
    if prev_accel is not None and relax < 1.0:
        accel = relax * accel + (1.0 - relax) * np.asarray(prev_accel[0])
        alpha = relax * alpha + (1.0 - relax) * np.asarray(prev_accel[1])

    new = body.copy()
    new.velocity = body.velocity + dt * accel
    new.angular_velocity = body.angular_velocity + dt * alpha
    new.position = body.position + dt * new.velocity
    spin = quat_from_rotvec(quat_rotate(body.orientation, dt * new.angular_velocity))
    new.orientation = quat_normalize(quat_multiply(spin, body.orientation))
    return new, (accel, alpha)
