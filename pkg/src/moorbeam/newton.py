"""Newton-Raphson driver for the beam: static solves and one implicit
backward-Euler time step.

Convergence is measured on the infinity norm of the whole residual scaled by
one reference force, max(line weight, pretension hint, 1 N); moment rows are
numerically tiny for thin lines, so this acts as a force criterion.
"""

from dataclasses import dataclass

import numpy as np

from .assembly import (
    assemble,
    cell_axial_strain,
    cell_tangents,
    boundary_forces,
    resolve_bc_points,
)
from .blocktri import solve_block_tridiagonal
from .loads import LoadEnvironment, added_mass_matrix_batch, explicit_force_batch
from .quaternions import quat_conjugate, quat_from_rotvec, quat_multiply, quat_normalize, quat_to_rotvec
from .section import CrossSection
from .state import BeamState


class NewtonError(RuntimeError):
    pass


class NewtonConvergenceError(NewtonError):
    def __init__(self, iterations, residual_norm):
        super().__init__(
            f"Newton did not converge in {iterations} iterations "
            f"(scaled residual {residual_norm:.3e})")
        self.iterations = iterations
        self.residual_norm = residual_norm


class NumericalBlowUpError(NewtonError):
    def __init__(self):
        super().__init__("numerical blow-up: non-finite residual")


@dataclass
class EndReactions:
    """Force the line exerts on each constrained support (None if free)."""

    west: np.ndarray | None
    east: np.ndarray | None


@dataclass
class SolveInfo:
    iterations: int
    residual_norm: float


def reference_force(section: CrossSection, total_length: float, env: LoadEnvironment,
                    pretension_hint: float = 0.0) -> float:
    weight = section.mass_per_length * np.linalg.norm(env.gravity) * total_length
    return max(weight, pretension_hint, 1.0)


def _scaled_norm(res, f_ref):
    return float(np.abs(res).max() / f_ref)


def newton_solve(
    state: BeamState,
    prev: BeamState | None,
    env: LoadEnvironment,
    section: CrossSection,
    bc_pair: tuple,
    dt: float | None,
    tol: float = 1e-6,
    max_iter: int = 25,
    time: float = 0.0,
    pretension_hint: float = 0.0,
    step_limit: float | None = None,
):
    """Iterate the current state to residual convergence.

    dt=None solves the static problem (no inertia, zero velocities in the
    load evaluation).  Static solves regularise the rotational diagonal of
    the Jacobian only: isotropic sections with moment-free ends have an
    energy-neutral spin mode about the line axis, and the converged residual
    (hence the equilibrium) is unaffected.  step_limit caps the infinity norm
    of each position increment (damped Newton for far-from-solution starts).

    Returns (converged state, EndReactions, SolveInfo).
    """
    if tol <= 0.0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter >= 1")
    dynamic = dt is not None
    cur = state.copy()
    points = resolve_bc_points(bc_pair, time)
    f_ref = reference_force(section, cur.total_length, env, pretension_hint)

    def evaluate(candidate, with_jacobian):
        if dynamic:
            velocities = (candidate.positions - prev.positions) / dt
        else:
            velocities = np.zeros_like(candidate.positions)
        tangents = cell_tangents(candidate)
        eps = cell_axial_strain(candidate, points)
        loads = explicit_force_batch(candidate.positions, velocities, tangents,
                                     eps, section, env, time)
        added = added_mass_matrix_batch(tangents, section, env) if dynamic else None
        return assemble(candidate, section, loads, points, prev=prev, dt=dt,
                        added_mass=added, with_jacobian=with_jacobian)

    def apply(base, dx, alpha):
        out = base.copy()
        out.positions = base.positions + alpha * dx[:, 0:3]
        out.orientations = quat_normalize(quat_multiply(
            quat_from_rotvec(alpha * dx[:, 3:6]), base.orientations))
        return out

    iterations = 0
    norm = np.inf
    for it in range(max_iter + 1):
        res, system = evaluate(cur, with_jacobian=True)
        if not np.all(np.isfinite(res)):
            raise NumericalBlowUpError()
        norm = _scaled_norm(res, f_ref)
        if norm <= tol:
            break
        if it == max_iter:
            raise NewtonConvergenceError(max_iter, norm)
        if dynamic:
            # lift exactly-singular twist pivots (spin modes with negligible
            # rotary inertia); small enough not to distort the direction
            delta = 1e-8 * (np.abs(system.diag[:, 3:6, 3:6]).max() + 1e-30)
        else:
            # Damp the quasi-indeterminate twist/spin modes of near-zero-GJ
            # sections (isotropic, moment-free ends): without this the static
            # Newton direction chases tiny moment residuals with huge
            # rotations.  Levenberg-Marquardt style scheduling (damping
            # proportional to the current residual) avoids a limit cycle at
            # the damping scale and restores exact Newton close to the
            # solution.  Jacobian-only: the converged state is unaffected.
            delta = (0.1 * max(section.GA2, section.GA3)
                     * float(np.mean(cur.cell_lengths)) * min(1.0, norm / 1e-2))
        system.diag[:, 3:6, 3:6] += delta * np.eye(3)
        dx = solve_block_tridiagonal(system)
        if step_limit is not None:
            biggest = np.abs(dx[:, 0:3]).max()
            if biggest > step_limit:
                dx[:, 0:3] *= step_limit / biggest
            biggest_rot = np.abs(dx[:, 3:6]).max()
            if biggest_rot > 0.5:
                dx[:, 3:6] *= 0.5 / biggest_rot
        if dynamic:
            cur = apply(cur, dx, 1.0)
        else:
            # backtracking line search on the scaled residual keeps the
            # floppy low-tension cases from oscillating around equilibrium
            alpha, accepted = 1.0, None
            for _ in range(8):
                candidate = apply(cur, dx, alpha)
                res_c, _ = evaluate(candidate, with_jacobian=False)
                if np.all(np.isfinite(res_c)) and _scaled_norm(res_c, f_ref) < norm:
                    accepted = candidate
                    break
                alpha *= 0.5
            cur = accepted if accepted is not None else apply(cur, dx, alpha)
        iterations += 1

    if dynamic:
        cur.velocities = (cur.positions - prev.positions) / dt
        cur.angular_velocities = quat_to_rotvec(
            quat_multiply(cur.orientations, quat_conjugate(prev.orientations))) / dt
    else:
        cur.velocities = np.zeros_like(cur.positions)
        cur.angular_velocities = np.zeros_like(cur.positions)

    n_w, n_e = boundary_forces(cur, section, points)
    reactions = EndReactions(
        west=n_w if n_w is not None else None,
        east=-n_e if n_e is not None else None,
    )
    return cur, reactions, SolveInfo(iterations=iterations, residual_norm=norm)


def solve_static(state, env, section, bc_pair, tol=1e-8, max_iter=80, time=0.0,
                 pretension_hint=0.0, step_limit=None):
    """Static equilibrium solve.  The damped twist modes converge linearly
    (see the regularisation note in newton_solve), so statics gets a larger
    iteration budget than a dynamic step; iterations are cheap."""
    if step_limit is None:
        step_limit = 0.25 * state.total_length
    return newton_solve(state, None, env, section, bc_pair, dt=None, tol=tol,
                        max_iter=max_iter, time=time,
                        pretension_hint=pretension_hint, step_limit=step_limit)


def advance_step(
    state: BeamState,
    env: LoadEnvironment,
    section: CrossSection,
    bc_pair: tuple,
    dt: float,
    time_new: float = 0.0,
    tol: float = 1e-6,
    max_iter: int = 25,
    pretension_hint: float = 0.0,
):
    """Advance one backward-Euler step to time_new = t + dt.

    The initial guess is the explicit predictor (positions advanced by the
    current velocities), which costs nothing and saves Newton iterations."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    guess = state.copy()
    guess.positions = state.positions + dt * state.velocities
    guess.orientations = quat_normalize(quat_multiply(
        quat_from_rotvec(dt * state.angular_velocities), state.orientations))
    return newton_solve(guess, state, env, section, bc_pair, dt, tol=tol,
                        max_iter=max_iter, time=time_new,
                        pretension_hint=pretension_hint)
