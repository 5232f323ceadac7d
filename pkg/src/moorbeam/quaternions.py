"""Quaternion and SO(3) helpers used throughout the solver.

Quaternions are stored as (w, x, y, z) arrays; all routines broadcast over
leading axes so they can be applied to whole beams at once.  Rotation vectors
follow the axis-angle convention (direction = axis, norm = angle in radians).

Small-angle branches switch to series expansions below ``ANGLE_EPS`` since the
closed forms become 0/0 as the angle vanishes.
"""

import numpy as np

ANGLE_EPS = 1e-8


def quat_identity(shape=()):
    q = np.zeros(shape + (4,))
    q[..., 0] = 1.0
    return q


def quat_normalize(q):
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_conjugate(q):
    out = q.copy()
    out[..., 1:] = -out[..., 1:]
    return out


def quat_multiply(q1, q2):
    w1, x1, y1, z1 = (q1[..., i] for i in range(4))
    w2, x2, y2, z2 = (q2[..., i] for i in range(4))
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def _cross(a, b):
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def quat_rotate(q, v):
    """Rotate vectors v by unit quaternions q (q v q*)."""
    qv = q[..., 1:]
    w = q[..., 0:1]
    t = 2.0 * _cross(qv, v)
    return v + w * t + _cross(qv, t)


def quat_to_matrix(q):
    """Rotation matrices of shape (..., 3, 3) from unit quaternions."""
    w, x, y, z = (q[..., i] for i in range(4))
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    m = np.empty(q.shape[:-1] + (3, 3))
    m[..., 0, 0] = 1.0 - 2.0 * (yy + zz)
    m[..., 0, 1] = 2.0 * (xy - wz)
    m[..., 0, 2] = 2.0 * (xz + wy)
    m[..., 1, 0] = 2.0 * (xy + wz)
    m[..., 1, 1] = 1.0 - 2.0 * (xx + zz)
    m[..., 1, 2] = 2.0 * (yz - wx)
    m[..., 2, 0] = 2.0 * (xz - wy)
    m[..., 2, 1] = 2.0 * (yz + wx)
    m[..., 2, 2] = 1.0 - 2.0 * (xx + yy)
    return m


def quat_from_rotvec(phi):
    """Unit quaternion exp(phi/2) for rotation vectors phi."""
    angle = np.linalg.norm(phi, axis=-1, keepdims=True)
    half = 0.5 * angle
    small = angle < ANGLE_EPS
    # sin(a/2)/a -> 1/2 - a^2/48 as a -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(small, 0.5 - angle * angle / 48.0, np.sin(half) / np.where(small, 1.0, angle))
    q = np.concatenate([np.cos(half), k * phi], axis=-1)
    return q


def quat_to_rotvec(q):
    """Rotation vector (shortest arc) of unit quaternions q."""
    q = np.where(q[..., 0:1] < 0.0, -q, q)
    vec = q[..., 1:]
    sin_half = np.linalg.norm(vec, axis=-1, keepdims=True)
    angle = 2.0 * np.arctan2(sin_half[..., 0], q[..., 0])[..., None]
    small = sin_half < ANGLE_EPS
    # angle/sin(angle/2) -> 2 + angle^2/12 as angle -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(small, 2.0 + angle * angle / 12.0, angle / np.where(small, 1.0, sin_half))
    return k * vec


def quat_pow(q, beta):
    """Fractional quaternion power via axis-angle scaling (shortest arc)."""
    return quat_from_rotvec(np.asarray(beta)[..., None] * quat_to_rotvec(q))


def quat_slerp(q1, q2, t):
    """Spherical interpolation q1 (q1* q2)^t along the shortest arc."""
    rel = quat_multiply(quat_conjugate(q1), q2)
    return quat_multiply(q1, quat_pow(rel, t))


def skew(v):
    """Skew-symmetric matrices [v x] of shape (..., 3, 3)."""
    m = np.zeros(v.shape[:-1] + (3, 3))
    m[..., 0, 1] = -v[..., 2]
    m[..., 0, 2] = v[..., 1]
    m[..., 1, 0] = v[..., 2]
    m[..., 1, 2] = -v[..., 0]
    m[..., 2, 0] = -v[..., 1]
    m[..., 2, 1] = v[..., 0]
    return m


def so3_left_jacobian(phi):
    """Left Jacobian J_l of SO(3): Exp(phi + d) = Exp(J_l(phi) d) Exp(phi)."""
    angle = np.linalg.norm(phi, axis=-1)
    s = skew(phi)
    s2 = s @ s
    small = angle < ANGLE_EPS
    a = np.where(small, 1.0, angle)
    # (1-cos a)/a^2 and (a-sin a)/a^3 with series fallbacks
    c1 = np.where(small, 0.5 - angle**2 / 24.0, (1.0 - np.cos(a)) / a**2)
    c2 = np.where(small, 1.0 / 6.0 - angle**2 / 120.0, (a - np.sin(a)) / a**3)
    eye = np.broadcast_to(np.eye(3), s.shape)
    return eye + c1[..., None, None] * s + c2[..., None, None] * s2


def so3_left_jacobian_inv(phi):
    """Inverse of the left Jacobian of SO(3)."""
    angle = np.linalg.norm(phi, axis=-1)
    s = skew(phi)
    s2 = s @ s
    small = angle < ANGLE_EPS
    a = np.where(small, 1.0, angle)
    # 1/a^2 - (1+cos a)/(2 a sin a), series 1/12 + a^2/720
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(
            small,
            1.0 / 12.0 + angle**2 / 720.0,
            1.0 / a**2 - (1.0 + np.cos(a)) / (2.0 * a * np.sin(a)),
        )
    eye = np.broadcast_to(np.eye(3), s.shape)
    return eye - 0.5 * s + c[..., None, None] * s2


def rotation_between(a, b):
    """Minimal-rotation unit quaternion mapping direction a onto direction b."""
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    c = np.cross(a, b)
    d = float(np.dot(a, b))
    if d < -1.0 + 1e-12:
        # antiparallel: rotate pi about any axis orthogonal to a
        axis = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-6:
            axis = np.cross(a, [0.0, 1.0, 0.0])
        axis /= np.linalg.norm(axis)
        return np.concatenate([[0.0], axis])
    q = np.concatenate([[1.0 + d], c])
    return q / np.linalg.norm(q)
