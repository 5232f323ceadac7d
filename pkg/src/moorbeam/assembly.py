"""Cell-centred finite-volume assembly of the geometrically exact beam.

Per cell the residual enforces balance of linear and angular momentum:

    F_i = n_e - n_w + f_ext,i L_i - (rho A I + M_add) L_i a_i
    M_i = m_e - m_w + (r_e - r_i) x n_e - (r_w - r_i) x n_w - L_i d(I w)/dt

with face forces/moments from the material laws n = R C_F (R^T r' - e1) and
m = R C_M kappa.  Interior face orientations are slerp midpoints; kappa is
the relative-rotation vector over the undeformed spacing, which coincides
with the face-frame material curvature.  Inertia uses backward Euler.

The Jacobian is analytic, including the slerp and log-map sensitivities via
the left Jacobian of SO(3).  Distributed loads and the added-mass operator
are passed in evaluated at the current iterate and held fixed, so residual
and Jacobian of one assembly call are exactly consistent (quasi-Newton with
respect to load updates across iterations).
"""

import numpy as np

from .blocktri import BlockTriDiagSystem
from .quaternions import (
    quat_conjugate,
    quat_from_rotvec,
    quat_multiply,
    quat_to_matrix,
    quat_to_rotvec,
    quat_rotate,
    skew,
    so3_left_jacobian,
    so3_left_jacobian_inv,
)
from .section import CrossSection
from .state import BeamState, StrainState

E1 = np.array([1.0, 0.0, 0.0])


def _cross(a, b):
    """np.cross without its axis-juggling overhead (hot path)."""
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def _face_geometry(state: BeamState):
    """Spacing, gradient and orientation data at the N-1 interior faces."""
    r = state.positions
    q = state.orientations
    ds = state.face_spacings()
    seg = r[1:] - r[:-1]
    seg_len = np.linalg.norm(seg, axis=-1)
    if np.any(seg_len < 1e-14):
        k = int(np.argmin(seg_len))
        raise ValueError(f"zero-length segment between cells {k} and {k + 1}")
    r_prime = seg / ds[:, None]
    q_l, q_r = q[:-1], q[1:]
    q_rel = quat_multiply(quat_conjugate(q_l), q_r)
    theta = quat_to_rotvec(q_rel)
    q_face = quat_multiply(q_l, quat_from_rotvec(0.5 * theta))
    return ds, seg, r_prime, theta, q_face


def compute_strain(state: BeamState) -> StrainState:
    """Strain measures at interior faces: stretch, material strain Gamma and
    material curvature kappa."""
    if state.n_cells < 2:
        raise ValueError("need at least 2 cells to compute face strains")
    ds, _, r_prime, theta, q_face = _face_geometry(state)
    R = quat_to_matrix(q_face)
    axial = np.linalg.norm(r_prime, axis=-1) - 1.0
    gamma = np.einsum("fji,fj->fi", R, r_prime) - E1
    kappa = theta / ds[:, None]
    return StrainState(axial=axial, strain=gamma, curvature=kappa)


def internal_loads(strain: StrainState, section: CrossSection, state: BeamState):
    """Spatial internal force n and moment m at interior faces, from the
    diagonal material laws applied to the given strain state."""
    q_face = state.interior_face_orientations()
    R = quat_to_matrix(q_face)
    n = np.einsum("fij,fj->fi", R, strain.strain @ section.force_stiffness.T)
    m = np.einsum("fij,fj->fi", R, strain.curvature @ section.moment_stiffness.T)
    return n, m


def cell_tangents(state: BeamState) -> np.ndarray:
    """Unit tangent of each cell, R(q_c) e1."""
    return quat_rotate(state.orientations, np.broadcast_to(E1, (state.n_cells, 3)))


def cell_axial_strain(state: BeamState, bc: tuple) -> np.ndarray:
    """Per-cell stretch: mean of the adjacent face values; boundary faces
    contribute only when the end is position-constrained."""
    n = state.n_cells
    ds, _, r_prime, _, _ = _face_geometry(state) if n > 1 else (None, None, None, None, None)
    eps_faces = np.linalg.norm(r_prime, axis=-1) - 1.0 if n > 1 else np.zeros(0)
    west, east = bc
    total = np.zeros(n)
    count = np.zeros(n)
    if n > 1:
        total[:-1] += eps_faces
        total[1:] += eps_faces
        count[:-1] += 1
        count[1:] += 1
    if west is not None:
        rp = (state.positions[0] - west) / (0.5 * state.cell_lengths[0])
        total[0] += np.linalg.norm(rp) - 1.0
        count[0] += 1
    if east is not None:
        rp = (east - state.positions[-1]) / (0.5 * state.cell_lengths[-1])
        total[-1] += np.linalg.norm(rp) - 1.0
        count[-1] += 1
    count[count == 0] = 1
    return total / count


def _boundary_face(position, point, q_cell, section, sign, ds_half):
    """One-sided boundary face force for a position-constrained end.

    sign=+1: east end (gradient toward the point); sign=-1: west end."""
    rp = sign * (point - position) / ds_half
    R = quat_to_matrix(q_cell)
    gamma = R.T @ rp - E1
    n = R @ (section.force_stiffness @ gamma)
    S = R @ section.force_stiffness @ R.T
    dn_dth = -skew(n) + S @ skew(rp)
    dn_dr = -sign * S / ds_half
    return n, dn_dr, dn_dth


def assemble(
    state: BeamState,
    section: CrossSection,
    loads: np.ndarray,
    bc_points: tuple,
    prev: BeamState | None = None,
    dt: float | None = None,
    added_mass: np.ndarray | None = None,
    with_jacobian: bool = True,
):
    """Assemble the per-cell residual and (optionally) the Newton system.

    loads: (N,3) distributed external force per unit length, held fixed.
    bc_points: (west, east) boundary-face positions, None for a free end.
    prev/dt: previous state and step for backward-Euler inertia; dt=None
    assembles the static problem.
    added_mass: optional (N,3,3) per-unit-length added-mass operator.

    Returns (residual (N,6), BlockTriDiagSystem | None); the system rhs is
    the negated residual so that the solve yields Newton increments.
    """
    n_cells = state.n_cells
    if dt is not None:
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        if prev is None or prev.n_cells != n_cells:
            raise ValueError("prev state with matching cell count required for dynamics")
    if loads.shape != (n_cells, 3):
        raise ValueError("loads must have shape (N, 3)")

    L = state.cell_lengths
    r = state.positions
    res = np.zeros((n_cells, 6))
    res[:, 0:3] = loads * L[:, None]

    Aw = np.zeros((n_cells, 6, 6))
    Ac = np.zeros((n_cells, 6, 6))
    Ae = np.zeros((n_cells, 6, 6))

    # interior faces ---------------------------------------------------------
    if n_cells > 1:
        ds, seg, r_prime, theta, q_face = _face_geometry(state)
        R = quat_to_matrix(q_face)
        C_F = section.force_stiffness
        C_M = section.moment_stiffness
        gamma = np.einsum("fji,fj->fi", R, r_prime) - E1
        n_f = np.einsum("fij,fj->fi", R, gamma @ C_F.T)
        m_f = np.einsum("fij,fj->fi", R, (theta / ds[:, None]) @ C_M.T)
        half_seg = 0.5 * seg

        res[:-1, 0:3] += n_f
        res[1:, 0:3] -= n_f
        arm = _cross(half_seg, n_f)
        res[:-1, 3:6] += m_f + arm
        # west face of cell R: -m_f - (r_f - r_R) x n_f = -m_f + arm
        res[1:, 3:6] += arm - m_f

        if with_jacobian:
            S = R @ C_F @ np.swapaxes(R, 1, 2)
            A_nth = -skew(n_f) + S @ skew(r_prime)
            R_l = quat_to_matrix(state.orientations[:-1])
            Jl_half = so3_left_jacobian(0.5 * theta)
            Jl_inv = so3_left_jacobian_inv(theta)
            P = Jl_inv @ np.swapaxes(R_l, 1, 2)
            G = 0.5 * R_l @ Jl_half @ P
            eye = np.broadcast_to(np.eye(3), G.shape)
            IG = eye - G

            dn_drL = -S / ds[:, None, None]
            dn_drR = -dn_drL
            dn_dthL = A_nth @ IG
            dn_dthR = A_nth @ G

            CM_ds = (R @ C_M) / ds[:, None, None]
            sk_m = skew(m_f)
            dm_dthL = -sk_m @ IG - CM_ds @ P
            dm_dthR = -sk_m @ G + CM_ds @ P

            sk_n = skew(n_f)
            sk_d = skew(half_seg)
            # cell L: east-face contribution (+n, +m, +d x n), d = +half_seg
            dT_drL = 0.5 * sk_n + sk_d @ dn_drL
            dT_drR = -0.5 * sk_n + sk_d @ dn_drR
            dT_dthL = sk_d @ dn_dthL
            dT_dthR = sk_d @ dn_dthR
            Ac[:-1, 0:3, 0:3] += dn_drL
            Ae[:-1, 0:3, 0:3] += dn_drR
            Ac[:-1, 0:3, 3:6] += dn_dthL
            Ae[:-1, 0:3, 3:6] += dn_dthR
            Ac[:-1, 3:6, 0:3] += dT_drL
            Ae[:-1, 3:6, 0:3] += dT_drR
            Ac[:-1, 3:6, 3:6] += dm_dthL + dT_dthL
            Ae[:-1, 3:6, 3:6] += dm_dthR + dT_dthR
            # cell R: west-face contribution (-n, -m, -d_w x n), d_w = -half_seg
            dTw_drL = 0.5 * sk_n + sk_d @ dn_drL
            dTw_drR = -0.5 * sk_n + sk_d @ dn_drR
            Aw[1:, 0:3, 0:3] -= dn_drL
            Ac[1:, 0:3, 0:3] -= dn_drR
            Aw[1:, 0:3, 3:6] -= dn_dthL
            Ac[1:, 0:3, 3:6] -= dn_dthR
            Aw[1:, 3:6, 0:3] += dTw_drL
            Ac[1:, 3:6, 0:3] += dTw_drR
            Aw[1:, 3:6, 3:6] += -dm_dthL + sk_d @ dn_dthL
            Ac[1:, 3:6, 3:6] += -dm_dthR + sk_d @ dn_dthR

    # boundary faces ---------------------------------------------------------
    west, east = bc_points
    if west is not None:
        n_b, dn_dr, dn_dth = _boundary_face(
            r[0], west, state.orientations[0], section, -1.0, 0.5 * L[0])
        d = west - r[0]
        res[0, 0:3] -= n_b
        res[0, 3:6] -= _cross(d, n_b)
        if with_jacobian:
            sk_d = skew(d)
            Ac[0, 0:3, 0:3] -= dn_dr
            Ac[0, 0:3, 3:6] -= dn_dth
            Ac[0, 3:6, 0:3] += -skew(n_b) - sk_d @ dn_dr
            Ac[0, 3:6, 3:6] += -sk_d @ dn_dth
    if east is not None:
        n_b, dn_dr, dn_dth = _boundary_face(
            r[-1], east, state.orientations[-1], section, +1.0, 0.5 * L[-1])
        d = east - r[-1]
        res[-1, 0:3] += n_b
        res[-1, 3:6] += _cross(d, n_b)
        if with_jacobian:
            sk_d = skew(d)
            Ac[-1, 0:3, 0:3] += dn_dr
            Ac[-1, 0:3, 3:6] += dn_dth
            Ac[-1, 3:6, 0:3] += skew(n_b) + sk_d @ dn_dr
            Ac[-1, 3:6, 3:6] += sk_d @ dn_dth

    # inertia (backward Euler) -----------------------------------------------
    if dt is not None:
        accel = (r - prev.positions - dt * prev.velocities) / dt**2
        mass_op = section.mass_per_length * np.broadcast_to(np.eye(3), (n_cells, 3, 3))
        if added_mass is not None:
            mass_op = mass_op + added_mass
        res[:, 0:3] -= L[:, None] * np.einsum("cij,cj->ci", mass_op, accel)

        phi = quat_to_rotvec(quat_multiply(state.orientations, quat_conjugate(prev.orientations)))
        omega = phi / dt
        R_c = quat_to_matrix(state.orientations)
        I_mat = section.rotary_inertia
        I_sp = R_c @ I_mat @ np.swapaxes(R_c, 1, 2)
        h = np.einsum("cij,cj->ci", I_sp, omega)
        R_p = quat_to_matrix(prev.orientations)
        h_prev = np.einsum("cij,cj->ci", R_p @ I_mat @ np.swapaxes(R_p, 1, 2),
                           prev.angular_velocities)
        res[:, 3:6] -= L[:, None] * (h - h_prev) / dt

        if with_jacobian:
            Ac[:, 0:3, 0:3] -= (L[:, None, None] / dt**2) * mass_op
            dh_dth = -skew(h) + I_sp @ skew(omega) + (I_sp @ so3_left_jacobian_inv(phi)) / dt
            Ac[:, 3:6, 3:6] -= (L[:, None, None] / dt) * dh_dth

    system = BlockTriDiagSystem(Aw, Ac, Ae, -res) if with_jacobian else None
    return res, system


def resolve_bc_points(bc_pair: tuple, time: float | None = None):
    """Boundary-face positions (west, east) from a BeamBC pair; None = free."""
    out = []
    for bc in bc_pair:
        if bc.constrained:
            pos, _ = bc.at_time(0.0 if time is None else time)
            out.append(np.asarray(pos, dtype=float))
        else:
            out.append(None)
    return tuple(out)


def assemble_system(
    state: BeamState,
    prev: BeamState | None,
    loads: np.ndarray,
    section: CrossSection,
    bc_pair: tuple,
    dt: float | None,
    added_mass: np.ndarray | None = None,
    time: float | None = None,
) -> BlockTriDiagSystem:
    """Spec-level wrapper: assemble the Newton system for one iterate."""
    points = resolve_bc_points(bc_pair, time)
    _, system = assemble(state, section, loads, points, prev=prev, dt=dt,
                         added_mass=added_mass, with_jacobian=True)
    return system


def boundary_forces(state: BeamState, section: CrossSection, bc_points: tuple):
    """Internal force at each constrained boundary face (None when free).

    The west value is the pull of the line on its west support; the east
    value negated is the pull on the east support (fairlead)."""
    west, east = bc_points
    n_w = n_e = None
    if west is not None:
        n_w, _, _ = _boundary_face(state.positions[0], west, state.orientations[0],
                                   section, -1.0, 0.5 * state.cell_lengths[0])
    if east is not None:
        n_e, _, _ = _boundary_face(state.positions[-1], east, state.orientations[-1],
                                   section, +1.0, 0.5 * state.cell_lengths[-1])
    return n_w, n_e
