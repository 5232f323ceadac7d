"""Mesh-morphing point displacement field around a moving body.

Points inside an inner radius follow the body rigidly; the rotation blends
to zero across an interpolation shell via a fractional quaternion power, and
translations are scaled per axis so surge/heave can be accommodated over
wider zones than the rotation.  Pure geometry; operates on points relative
to the rotation centre in the initial configuration.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quaternions import (
    quat_conjugate,
    quat_identity,
    quat_multiply,
    quat_normalize,
    quat_pow,
    quat_rotate,
)


def box_distance(points, centre, dimensions):
    """Minimum distance from points to the surface of an axis-aligned box
    (zero inside)."""
    points = np.atleast_2d(points)
    half = 0.5 * np.asarray(dimensions, dtype=float)
    d = np.abs(points - np.asarray(centre, dtype=float)) - half
    outside = np.linalg.norm(np.maximum(d, 0.0), axis=-1)
    return outside


@dataclass
class MorphConfig:
    """inner_radius / outer_radius bound the rotation-blending shell;
    translation_zones gives the per-axis outer distance of the translation
    ramp (defaults to outer_radius); distance is W(P), the distance from a
    point to the body surface."""

    inner_radius: float
    outer_radius: float
    distance: Callable
    translation_zones: np.ndarray | None = None
    initial_orientation: np.ndarray = field(default_factory=lambda: quat_identity())

    def __post_init__(self):
        if not 0.0 < self.inner_radius < self.outer_radius:
            raise ValueError("need 0 < inner_radius < outer_radius")
        if self.translation_zones is None:
            self.translation_zones = np.full(3, self.outer_radius)
        self.translation_zones = np.asarray(self.translation_zones, dtype=float)
        self.initial_orientation = np.asarray(self.initial_orientation, dtype=float)
        if abs(np.linalg.norm(self.initial_orientation) - 1.0) > 1e-10:
            raise ValueError("initial orientation must be a unit quaternion")


def blend_weight(points, cfg: MorphConfig):
    """Rotation interpolation weight: 1 inside the inner radius, linear ramp
    down to 0 at the outer radius."""
    w = np.asarray(cfg.distance(points), dtype=float)
    beta = 1.0 - (w - cfg.inner_radius) / (cfg.outer_radius - cfg.inner_radius)
    return np.clip(beta, 0.0, 1.0)


def translation_weight(points, cfg: MorphConfig):
    """Per-axis translation scaling: 1 inside the inner radius, linear ramp
    to 0 at each axis zone edge; shape (..., 3)."""
    w = np.asarray(cfg.distance(points), dtype=float)[..., None]
    zones = cfg.translation_zones[None, :] if w.ndim == 2 else cfg.translation_zones
    alpha = 1.0 - (w - cfg.inner_radius) / np.maximum(zones - cfg.inner_radius, 1e-300)
    return np.clip(alpha, 0.0, 1.0)


def blended_rotation(q, q0, beta):
    """Fractional blend (q q0^-1)^beta q0 between the initial and current
    orientation; unit for any beta."""
    rel = quat_multiply(q, quat_conjugate(q0))
    return quat_normalize(quat_multiply(quat_pow(rel, beta), q0))


def point_displacement(points, translation, orientation, cfg: MorphConfig):
    """Displacement of mesh points for a body pose (translation b, quaternion
    q).  Points are positions relative to the rotation centre in the initial
    configuration; the rotational part applies the beta-blended net rotation
    relative to the initial orientation, so the identity pose (b = 0,
    q = q0) gives exactly zero displacement."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    translation = np.asarray(translation, dtype=float)
    beta = blend_weight(points, cfg)
    alpha = translation_weight(points, cfg)
    rel = quat_multiply(np.asarray(orientation, dtype=float),
                        quat_conjugate(cfg.initial_orientation))
    q_beta = quat_pow(np.broadcast_to(rel, points.shape[:-1] + (4,)), beta)
    rotated = quat_rotate(q_beta, points)
    return alpha * translation + rotated - points
