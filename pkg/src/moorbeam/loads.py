"""Distributed external loads on a submerged line: quadratic drag, added
mass, net buoyancy (weight minus displaced fluid) and seabed contact with
Coulomb friction.

All evaluations are pure functions of (kinematics, section, environment).
The scalar API delegates to the vectorised batch routines used by the beam
assembly, so there is a single source of truth for every formula.

Sign conventions: drag opposes the line velocity relative to the fluid, and
the added-mass force resists relative acceleration of the line through the
fluid (it augments the inertia operator in the implicit solve).
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .section import CrossSection

GRAVITY_DEFAULT = (0.0, 0.0, -9.81)


@dataclass
class LoadEnvironment:
    """Fluid, gravity and seabed parameters.

    seabed_stiffness K_n has units N/m^2 (multiplied by diameter and
    penetration depth to give N/m); seabed_damping C is N s/m^2; the
    tangential stiffness K_t yields a stick force -K_t d V_t per unit length.
    fluid_velocity / fluid_acceleration are optional callables (position
    array (N,3), time) -> (N,3); quiescent fluid when omitted.
    """

    rho_fluid: float = 1000.0
    gravity: np.ndarray = field(default_factory=lambda: np.array(GRAVITY_DEFAULT))
    drag_tangential: float = 0.0
    drag_normal: float = 0.0
    added_mass_tangential: float = 0.0
    added_mass_normal: float = 0.0
    seabed_z: float = -1e30
    seabed_stiffness: float = 0.0
    seabed_damping: float = 0.0
    seabed_tangent_stiffness: float = 0.0
    friction_coefficient: float = 0.0
    fluid_velocity: Callable | None = None
    fluid_acceleration: Callable | None = None

    def __post_init__(self):
        self.gravity = np.asarray(self.gravity, dtype=float)
        if self.rho_fluid < 0.0:
            raise ValueError("rho_fluid must be non-negative")
        for name in ("seabed_stiffness", "seabed_damping",
                     "seabed_tangent_stiffness", "friction_coefficient"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class CellKinematics:
    """Kinematic sample of one beam cell for load evaluation."""

    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    tangent: np.ndarray
    axial_strain: float = 0.0
    fluid_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    fluid_acceleration: np.ndarray = field(default_factory=lambda: np.zeros(3))


def _split(vectors, tangents):
    """Tangential / normal decomposition of (N,3) vectors."""
    vt = np.sum(vectors * tangents, axis=-1, keepdims=True) * tangents
    return vt, vectors - vt


def drag_force_batch(velocities, tangents, axial_strain, section, env,
                     fluid_velocities=None):
    """Morison quadratic drag per unit length, (N,3)."""
    eps = np.asarray(axial_strain, dtype=float)
    if np.any(eps < -1.0):
        raise ValueError("invalid axial strain: epsilon < -1")
    v_rel = velocities if fluid_velocities is None else velocities - fluid_velocities
    vt, vn = _split(v_rel, tangents)
    st = np.linalg.norm(vt, axis=-1, keepdims=True)
    sn = np.linalg.norm(vn, axis=-1, keepdims=True)
    scale = 0.5 * env.rho_fluid * section.diameter * np.sqrt(1.0 + eps)[..., None]
    # diverging Newton iterates can overflow the quadratic term; the solver
    # detects the non-finite residual and backs off, so no warning here
    with np.errstate(over="ignore"):
        return -scale * (env.drag_tangential * st * vt + env.drag_normal * sn * vn)


def added_mass_matrix_batch(tangents, section, env):
    """Per-unit-length added-mass operator rho_f A (Cmt t t^T + Cmn (I - t t^T))."""
    outer = tangents[..., :, None] * tangents[..., None, :]
    eye = np.broadcast_to(np.eye(3), outer.shape)
    return env.rho_fluid * section.area * (
        env.added_mass_tangential * outer + env.added_mass_normal * (eye - outer)
    )


def added_mass_force_batch(accelerations, tangents, section, env,
                           fluid_accelerations=None):
    """Added-mass force per unit length, (N,3).

    Resists relative acceleration through the fluid; with prescribed fluid
    acceleration a_f the forcing rho_f A a_f rides on top (Froude-Krylov part
    of the Morison inertia term)."""
    m_add = added_mass_matrix_batch(tangents, section, env)
    if fluid_accelerations is None:
        a_rel = -accelerations
        extra = 0.0
    else:
        a_rel = fluid_accelerations - accelerations
        extra = env.rho_fluid * section.area * fluid_accelerations
    return np.einsum("...ij,...j->...i", m_add, a_rel) + extra


def buoyancy_force_batch(n, section, env):
    """Net weight per unit length (rho_b - rho_f) A g, (N,3)."""
    f = (section.rho - env.rho_fluid) * section.area * env.gravity
    return np.broadcast_to(f, (n, 3)).copy()


def seabed_force_batch(positions, velocities, section, env):
    """Seabed penalty reaction plus Coulomb friction per unit length, (N,3)."""
    n = positions.shape[0]
    out = np.zeros((n, 3))
    pen = env.seabed_z - positions[:, 2]
    contact = pen > 0.0
    if not np.any(contact):
        return out
    d = section.diameter
    vz = velocities[contact, 2]
    normal = env.seabed_stiffness * d * pen[contact] - env.seabed_damping * d * vz
    normal = np.maximum(normal, 0.0)
    out[contact, 2] = normal
    vt = velocities[contact].copy()
    vt[:, 2] = 0.0
    vt_mag = np.linalg.norm(vt, axis=-1)
    stick_mag = env.seabed_tangent_stiffness * d * vt_mag
    slip_mag = env.friction_coefficient * normal
    slipping = stick_mag >= slip_mag
    moving = vt_mag > 0.0
    friction = np.zeros_like(vt)
    idx = slipping & moving
    friction[idx] = -slip_mag[idx, None] * vt[idx] / vt_mag[idx, None]
    idx = ~slipping & moving
    friction[idx] = -env.seabed_tangent_stiffness * d * vt[idx]
    out[contact, 0:2] += friction[:, 0:2]
    return out


def explicit_force_batch(positions, velocities, tangents, axial_strain,
                         section, env, time=0.0):
    """Drag + buoyancy + seabed force per unit length (N,3).

    Added mass is excluded here; it enters the solver implicitly through
    added_mass_matrix_batch, with any prescribed fluid acceleration applied
    as the (1 + C_M) forcing term."""
    fluid_v = env.fluid_velocity(positions, time) if env.fluid_velocity else None
    f = drag_force_batch(velocities, tangents, axial_strain, section, env, fluid_v)
    f += buoyancy_force_batch(positions.shape[0], section, env)
    f += seabed_force_batch(positions, velocities, section, env)
    if env.fluid_acceleration is not None:
        a_f = env.fluid_acceleration(positions, time)
        m_add = added_mass_matrix_batch(tangents, section, env)
        f += np.einsum("...ij,...j->...i", m_add, a_f)
        f += env.rho_fluid * section.area * a_f
    return f


# -- scalar API ---------------------------------------------------------------

def _one(batch_result):
    return np.asarray(batch_result)[0]


def drag_force(kin: CellKinematics, section: CrossSection, env: LoadEnvironment):
    return _one(drag_force_batch(
        kin.velocity[None], kin.tangent[None], np.array([kin.axial_strain]),
        section, env, kin.fluid_velocity[None]))


def added_mass_force(kin: CellKinematics, section: CrossSection, env: LoadEnvironment):
    return _one(added_mass_force_batch(
        kin.acceleration[None], kin.tangent[None], section, env,
        kin.fluid_acceleration[None]))


def buoyancy_force(section: CrossSection, env: LoadEnvironment):
    return _one(buoyancy_force_batch(1, section, env))


def seabed_force(kin: CellKinematics, section: CrossSection, env: LoadEnvironment):
    return _one(seabed_force_batch(kin.position[None], kin.velocity[None], section, env))


def total_external(kin: CellKinematics, section: CrossSection, env: LoadEnvironment):
    """Sum of the four contributions f_d + f_a + f_b + f_gc."""
    return (drag_force(kin, section, env)
            + added_mass_force(kin, section, env)
            + buoyancy_force(section, env)
            + seabed_force(kin, section, env))
