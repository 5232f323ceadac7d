"""Discretised beam state and boundary conditions for the cell-centred
finite-volume beam.

A line of undeformed length L is split into N cells along the arc coordinate
s.  Unknowns live at cell centres: position, orientation (unit quaternion),
velocity and angular velocity.  Faces sit between cells; interior face values
are interpolated (midpoint for positions, slerp at 0.5 for orientations).
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quaternions import quat_slerp, rotation_between


@dataclass
class BeamState:
    positions: np.ndarray            # (N, 3) cell-centre positions
    orientations: np.ndarray         # (N, 4) unit quaternions
    velocities: np.ndarray           # (N, 3)
    angular_velocities: np.ndarray   # (N, 3), spatial frame
    cell_lengths: np.ndarray         # (N,) undeformed lengths

    @property
    def n_cells(self) -> int:
        return self.positions.shape[0]

    @property
    def total_length(self) -> float:
        return float(np.sum(self.cell_lengths))

    @property
    def arc_coordinates(self) -> np.ndarray:
        """Undeformed arc-length coordinate of each cell centre."""
        ends = np.cumsum(self.cell_lengths)
        return ends - 0.5 * self.cell_lengths

    def face_spacings(self) -> np.ndarray:
        """Undeformed centre-to-centre distance across each interior face."""
        L = self.cell_lengths
        return 0.5 * (L[:-1] + L[1:])

    def interior_face_positions(self) -> np.ndarray:
        return 0.5 * (self.positions[:-1] + self.positions[1:])

    def interior_face_orientations(self) -> np.ndarray:
        return quat_slerp(self.orientations[:-1], self.orientations[1:], 0.5)

    def copy(self) -> "BeamState":
        return BeamState(
            self.positions.copy(),
            self.orientations.copy(),
            self.velocities.copy(),
            self.angular_velocities.copy(),
            self.cell_lengths.copy(),
        )


def straight_line_state(start, direction, length: float, n_cells: int) -> BeamState:
    """Undeformed straight beam from `start` along `direction` at rest."""
    if n_cells < 1:
        raise ValueError("need at least one cell")
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    start = np.asarray(start, dtype=float)
    L_c = np.full(n_cells, length / n_cells)
    s = np.cumsum(L_c) - 0.5 * L_c
    positions = start[None, :] + s[:, None] * direction[None, :]
    q = rotation_between(np.array([1.0, 0.0, 0.0]), direction)
    orientations = np.tile(q, (n_cells, 1))
    return BeamState(
        positions=positions,
        orientations=orientations,
        velocities=np.zeros((n_cells, 3)),
        angular_velocities=np.zeros((n_cells, 3)),
        cell_lengths=L_c,
    )


@dataclass
class StrainState:
    """Strain measures at the N-1 interior faces (material frame)."""

    axial: np.ndarray      # (N-1,) stretch epsilon = |dr/ds| - 1
    strain: np.ndarray     # (N-1, 3) Gamma
    curvature: np.ndarray  # (N-1, 3) kappa (1/m)


@dataclass
class BeamBC:
    """End condition of a beam.  Position-type ends (pinned / prescribed
    motion) fix the boundary-face position and transmit force but no moment;
    free ends carry zero face force and moment."""

    kind: str                                   # "pinned" | "prescribed" | "free"
    position: np.ndarray | None = None
    velocity: np.ndarray | None = None
    motion: Callable[[float], tuple] | None = field(default=None, repr=False)

    @classmethod
    def pinned(cls, position) -> "BeamBC":
        return cls("pinned", np.asarray(position, dtype=float), np.zeros(3))

    @classmethod
    def prescribed(cls, motion: Callable[[float], tuple]) -> "BeamBC":
        """motion(t) must return (position, velocity)."""
        return cls("prescribed", motion=motion)

    @classmethod
    def free(cls) -> "BeamBC":
        return cls("free")

    @property
    def constrained(self) -> bool:
        return self.kind in ("pinned", "prescribed")

    def at_time(self, t: float) -> tuple:
        """Resolved (position, velocity) of a constrained end at time t."""
        if self.kind == "pinned":
            return self.position, self.velocity
        if self.kind == "prescribed":
            if self.motion is not None:
                pos, vel = self.motion(t)
                return np.asarray(pos, dtype=float), np.asarray(vel, dtype=float)
            return self.position, self.velocity
        raise ValueError("free end has no prescribed position")
