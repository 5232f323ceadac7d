"""Planar elastic catenary boundary-value problem, solved by shooting on the
anchor tension components.  Serves as the independent oracle for static line
solutions; it shares no code with the finite-volume solver.

Closed-form profile for a line of unstretched length L, weight per unit
length w and axial stiffness EA, hanging between two points (Irvine's elastic
catenary).  With H the horizontal and V the vertical tension component at the
anchor (s = 0):

    x(s) = H s / EA + (H/w) [asinh((V + w s)/H) - asinh(V/H)]
    z(s) = (V s + w s^2/2) / EA + (1/w) [sqrt(H^2 + (V + w s)^2) - sqrt(H^2 + V^2)]

The internal tension vector at arc coordinate s is (H, V + w s).
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import root


class CatenaryError(RuntimeError):
    pass


def _profile(s, H, V, w, EA):
    t = V + w * s
    x = H * s / EA + (H / w) * (np.arcsinh(t / H) - np.arcsinh(V / H))
    z = (V * s + 0.5 * w * s**2) / EA + (np.hypot(H, t) - np.hypot(H, V)) / w
    return x, z


@dataclass
class CatenaryResult:
    """Solution of the planar problem mapped back to 3-D.

    anchor_tension / fairlead_tension are the internal tension vectors at the
    two ends (the anchor reaction is +anchor_tension; the pull of the line on
    the fairlead support is -fairlead_tension)."""

    anchor_tension: np.ndarray
    fairlead_tension: np.ndarray
    horizontal_tension: float
    anchor_vertical: float
    weight_per_length: float
    stiffness: float
    length: float
    _plane: tuple
    _span_x: float = 0.0
    _span_z: float = 0.0

    def sample(self, n: int = 101) -> np.ndarray:
        """Positions of n points along the stretched line (3-D)."""
        origin, u_h, u_v = self._plane
        s = np.linspace(0.0, self.length, n)
        if self.weight_per_length == 0.0:
            t = np.linspace(0.0, 1.0, n)
            x = t * self._span_x
            z = t * self._span_z
        else:
            x, z = _profile(s, self.horizontal_tension, self.anchor_vertical,
                            self.weight_per_length, self.stiffness)
        return origin[None, :] + x[:, None] * u_h[None, :] + z[:, None] * u_v[None, :]


def elastic_catenary(span, length, weight_per_length, EA):
    """Solve the elastic catenary for a 3-D span vector (fairlead - anchor).

    span: 3-vector; length: unstretched length (m); weight_per_length: net
    weight magnitude (N/m, acting along -z); EA: axial stiffness (N, may be
    np.inf for the inextensible limit).  Returns CatenaryResult.
    """
    span = np.asarray(span, dtype=float)
    if length <= 0.0:
        raise CatenaryError("length must be positive")
    horizontal = span.copy()
    horizontal[2] = 0.0
    X = float(np.linalg.norm(horizontal))
    Z = float(span[2])
    if X < 1e-9 * length:
        raise CatenaryError("degenerate vertical span")
    u_h = horizontal / X
    u_v = np.array([0.0, 0.0, 1.0])
    origin = np.zeros(3)

    w = float(weight_per_length)
    if w < 0.0:
        raise CatenaryError("weight_per_length must be non-negative")
    if w == 0.0:
        # weightless: straight line, tension only if stretched
        D = float(np.hypot(X, Z))
        T = EA * max(D / length - 1.0, 0.0) if np.isfinite(EA) else 0.0
        direction = (X * u_h + Z * u_v) / D
        vec = T * direction
        return CatenaryResult(vec, vec, T * X / D, T * Z / D, 0.0, EA, length,
                              (origin, u_h, u_v), X, Z)

    def residual(p):
        H = np.exp(p[0])
        V = p[1]
        x, z = _profile(length, H, V, w, EA)
        return [x - X, z - Z]

    W = w * length
    guesses = [(np.log(max(W, 1e-12)), -0.5 * W)]
    D = float(np.hypot(X, Z))
    if np.isfinite(EA) and D > length:
        T0 = max(EA * (D / length - 1.0), 1e-6 * W)
        guesses.insert(0, (np.log(max(T0 * X / D, 1e-12)), T0 * Z / D - 0.5 * W))
    for scale in (0.1, 1.0, 10.0, 100.0, 0.01, 1000.0):
        for vfrac in (-0.5, 0.0, -1.0, 0.5, 1.0):
            guesses.append((np.log(scale * W), vfrac * W))

    for guess in guesses:
        sol = root(residual, np.asarray(guess), method="hybr", tol=1e-14)
        if not sol.success:
            continue
        if np.linalg.norm(residual(sol.x)) < 1e-9 * max(length, 1.0):
            H = float(np.exp(sol.x[0]))
            V = float(sol.x[1])
            t_a = H * u_h + V * u_v
            t_f = H * u_h + (V + W) * u_v
            return CatenaryResult(t_a, t_f, H, V, w, EA, length,
                                  (origin, u_h, u_v), X, Z)
    raise CatenaryError("no catenary solution found in the shooting bracket")


def elastic_catenary_oracle(span, length, weight_per_length, EA):
    """Anchor/fairlead tension vectors and sampled shape.

    Thin convenience wrapper returning (anchor_tension, fairlead_tension,
    shape (101,3))."""
    res = elastic_catenary(span, length, weight_per_length, EA)
    return res.anchor_tension, res.fairlead_tension, res.sample()
