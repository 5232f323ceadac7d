"""Simplified hydrodynamics for the floating box: incident-wave (Stokes
second order) pressure integrated over the wetted panels of the box in its
instantaneous pose, plus a linear radiation damping matrix.  This replaces a
resolved free-surface flow solver; it supplies hydrostatic restoring in all
degrees of freedom and Froude-Krylov wave excitation, which is enough to
drive the partitioned mooring coupling at desk scale.

A hydro model is any callable (body, time) -> (force, moment about COM,
inertial frame).
"""

from dataclasses import dataclass

import numpy as np

from .quaternions import quat_to_matrix
from .rigidbody import RigidBodyState


def _dispersion(omega: float, depth: float, gravity: float) -> float:
    """Wavenumber from omega^2 = g k tanh(k h) (Newton iteration)."""
    k = max(omega**2 / gravity, 1e-12)
    for _ in range(60):
        t = np.tanh(k * depth)
        f = gravity * k * t - omega**2
        df = gravity * t + gravity * k * depth * (1.0 - t**2)
        dk = f / df
        k -= dk
        if abs(dk) < 1e-14 * k:
            break
    return k


@dataclass
class StokesWave:
    """Regular second-order Stokes wave travelling along +x.

    The amplitude ramps linearly over ramp_periods wave periods from t = 0
    to avoid startup transients."""

    height: float
    period: float
    depth: float
    gravity: float = 9.81
    rho: float = 1000.0
    ramp_periods: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        self.omega = 2.0 * np.pi / self.period
        self.wavenumber = _dispersion(self.omega, self.depth, self.gravity)

    @property
    def wavelength(self) -> float:
        return 2.0 * np.pi / self.wavenumber

    def _amplitude(self, t: float) -> float:
        a = 0.5 * self.height
        if self.ramp_periods > 0.0:
            a *= min(t / (self.ramp_periods * self.period), 1.0) if t > 0.0 else 0.0
        return a

    def elevation(self, x, t: float):
        """Free-surface elevation about z = 0."""
        a = self._amplitude(t)
        k, h = self.wavenumber, self.depth
        theta = k * np.asarray(x) - self.omega * t + self.phase
        second = (a**2 * k * np.cosh(k * h) * (2.0 + np.cosh(2.0 * k * h))
                  / (4.0 * np.sinh(k * h) ** 3))
        return a * np.cos(theta) + second * np.cos(2.0 * theta)

    def gauge_pressure(self, points, t: float):
        """Incident-wave gauge pressure at (N,3) points; zero above the
        instantaneous surface, hydrostatic to the surface above z = 0."""
        points = np.atleast_2d(points)
        x, z = points[:, 0], points[:, 2]
        rho_g = self.rho * self.gravity
        eta = self.elevation(x, t)
        a = self._amplitude(t)
        k, h = self.wavenumber, self.depth
        theta = k * x - self.omega * t + self.phase
        zc = np.clip(z, -h, 0.0)
        p_dyn = rho_g * a * np.cosh(k * (zc + h)) / np.cosh(k * h) * np.cos(theta)
        if a > 0.0:
            s2, sh2 = np.sinh(k * h) ** 2, np.sinh(2.0 * k * h)
            c2 = np.cosh(2.0 * k * (zc + h))
            p_dyn += 0.75 * rho_g * a**2 * k * (c2 / (sh2 * s2) - 1.0 / (3.0 * sh2)) * np.cos(2.0 * theta)
            p_dyn -= 0.25 * rho_g * a**2 * k * (c2 - 1.0) / sh2
        p = np.where(z <= 0.0, -rho_g * z + p_dyn, rho_g * (eta - z))
        return np.where(z < eta, np.maximum(p, 0.0), 0.0)


class NoHydro:
    """Zero hydrodynamic loads (dry runs, prescribed-motion tests)."""

    added_mass = None
    added_inertia = None

    def __call__(self, body: RigidBodyState, t: float):
        return np.zeros(3), np.zeros(3)


class BoxHydroModel:
    """Wetted-panel pressure integration over a rectangular box.

    dimensions: box edge lengths (body axes); centre_offset: geometric centre
    of the box relative to the COM in the body frame; damping: diagonal
    radiation damping (3 linear inertial-frame + 3 rotational body-frame
    entries); added_mass / added_inertia: diagonal entries handed to the
    6-DOF integrator.  wave=None gives still water (pure hydrostatics)."""

    def __init__(self, dimensions, centre_offset=(0.0, 0.0, 0.0), rho=1000.0,
                 gravity=9.81, wave: StokesWave | None = None,
                 damping=(0.0,) * 6, added_mass=(0.0,) * 3,
                 added_inertia=(0.0,) * 3, panels_per_edge: int = 8):
        self.dimensions = np.asarray(dimensions, dtype=float)
        self.centre_offset = np.asarray(centre_offset, dtype=float)
        self.rho = float(rho)
        self.gravity = float(gravity)
        self.wave = wave
        self.damping = np.asarray(damping, dtype=float)
        self.added_mass = np.asarray(added_mass, dtype=float)
        self.added_inertia = np.asarray(added_inertia, dtype=float)
        self._build_panels(int(panels_per_edge))

    def _build_panels(self, n: int):
        lx, ly, lz = self.dimensions
        centres = []
        normals = []
        areas = []
        u = (np.arange(n) + 0.5) / n - 0.5
        for axis, (da, db), sign in (
            (0, (1, 2), +1), (0, (1, 2), -1),
            (1, (0, 2), +1), (1, (0, 2), -1),
            (2, (0, 1), +1), (2, (0, 1), -1),
        ):
            dims = self.dimensions
            ga, gb = np.meshgrid(u * dims[da], u * dims[db], indexing="ij")
            c = np.zeros((n * n, 3))
            c[:, axis] = sign * 0.5 * dims[axis]
            c[:, da] = ga.ravel()
            c[:, db] = gb.ravel()
            nrm = np.zeros(3)
            nrm[axis] = sign
            centres.append(c)
            normals.append(np.tile(nrm, (n * n, 1)))
            areas.append(np.full(n * n, dims[da] * dims[db] / n**2))
        self._panel_centres = np.vstack(centres) + self.centre_offset
        self._panel_normals = np.vstack(normals)
        self._panel_areas = np.concatenate(areas)

    def surface_elevation(self, x, t: float):
        return self.wave.elevation(x, t) if self.wave is not None else np.zeros_like(np.asarray(x, dtype=float))

    def _pressure(self, points, t: float):
        if self.wave is not None:
            return self.wave.gauge_pressure(points, t)
        z = points[:, 2]
        return np.where(z < 0.0, -self.rho * self.gravity * z, 0.0)

    def __call__(self, body: RigidBodyState, t: float):
        R = quat_to_matrix(body.orientation)
        offsets = self._panel_centres @ R.T
        points = body.position[None, :] + offsets
        normals = self._panel_normals @ R.T
        p = self._pressure(points, t)
        df = -(p * self._panel_areas)[:, None] * normals
        force = df.sum(axis=0)
        moment = np.cross(offsets, df).sum(axis=0)

        force = force - self.damping[0:3] * body.velocity
        m_damp_body = -self.damping[3:6] * body.angular_velocity
        moment = moment + R @ m_damp_body
        return force, moment
