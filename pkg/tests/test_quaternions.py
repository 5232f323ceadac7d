import numpy as np

from moorbeam.quaternions import (
    quat_conjugate,
    quat_from_rotvec,
    quat_multiply,
    quat_normalize,
    quat_pow,
    quat_rotate,
    quat_slerp,
    quat_to_matrix,
    quat_to_rotvec,
    rotation_between,
    skew,
    so3_left_jacobian,
    so3_left_jacobian_inv,
)

RNG = np.random.default_rng(20240601)


def random_rotvecs(n, scale=1.5):
    v = scale * RNG.normal(size=(n, 3))
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    # keep angles below pi so the shortest-arc log is the exact inverse
    factor = np.minimum(1.0, 0.95 * np.pi / np.maximum(norms, 1e-300))
    return v * factor


def test_exp_log_roundtrip():
    phi = random_rotvecs(200)
    back = quat_to_rotvec(quat_from_rotvec(phi))
    assert np.allclose(back, phi, atol=1e-12)


def test_exp_log_small_angles():
    phi = 1e-11 * RNG.normal(size=(50, 3))
    q = quat_from_rotvec(phi)
    assert np.allclose(np.linalg.norm(q, axis=-1), 1.0, atol=1e-14)
    assert np.allclose(quat_to_rotvec(q), phi, atol=1e-16)


def test_rotation_matrix_consistency():
    phi = random_rotvecs(50)
    q = quat_from_rotvec(phi)
    v = RNG.normal(size=(50, 3))
    via_matrix = np.einsum("nij,nj->ni", quat_to_matrix(q), v)
    assert np.allclose(quat_rotate(q, v), via_matrix, atol=1e-13)


def test_multiply_matches_matrix_product():
    q1 = quat_from_rotvec(random_rotvecs(30))
    q2 = quat_from_rotvec(random_rotvecs(30))
    R = quat_to_matrix(quat_multiply(q1, q2))
    assert np.allclose(R, quat_to_matrix(q1) @ quat_to_matrix(q2), atol=1e-13)


def test_slerp_endpoints_and_midpoint():
    q1 = quat_from_rotvec(random_rotvecs(20))
    q2 = quat_from_rotvec(random_rotvecs(20))
    assert np.allclose(quat_slerp(q1, q2, 0.0), q1, atol=1e-13)
    end = quat_slerp(q1, q2, 1.0)
    # endpoint matches up to quaternion sign (same rotation)
    assert np.allclose(np.minimum(np.linalg.norm(end - q2, axis=-1),
                                  np.linalg.norm(end + q2, axis=-1)), 0.0, atol=1e-12)
    mid = quat_slerp(q1, q2, 0.5)
    # midpoint is equidistant from both ends
    d1 = np.linalg.norm(quat_to_rotvec(quat_multiply(quat_conjugate(q1), mid)), axis=-1)
    d2 = np.linalg.norm(quat_to_rotvec(quat_multiply(quat_conjugate(mid), q2)), axis=-1)
    assert np.allclose(d1, d2, atol=1e-12)


def test_pow_half_rotation():
    q = quat_from_rotvec(np.array([0.0, 0.0, np.pi / 2]))
    half = quat_pow(q, 0.5)
    assert np.allclose(quat_to_rotvec(half), [0.0, 0.0, np.pi / 4], atol=1e-13)


def test_left_jacobian_identity():
    # Exp(phi + J_l(phi) . d)  ~  Exp(d') Exp(phi) with d' = J_l d  (first order)
    for phi in random_rotvecs(20):
        J = so3_left_jacobian(phi)
        h = 1e-7
        for k in range(3):
            d = np.zeros(3)
            d[k] = h
            left = quat_to_matrix(quat_from_rotvec(phi + d))
            right = quat_to_matrix(quat_from_rotvec(J @ d)) @ quat_to_matrix(quat_from_rotvec(phi))
            assert np.allclose(left, right, atol=1e-12)


def test_left_jacobian_inverse():
    phi = random_rotvecs(50)
    prod = so3_left_jacobian(phi) @ so3_left_jacobian_inv(phi)
    assert np.allclose(prod, np.eye(3), atol=1e-10)


def test_skew_cross_equivalence():
    a = RNG.normal(size=(20, 3))
    b = RNG.normal(size=(20, 3))
    assert np.allclose(np.einsum("nij,nj->ni", skew(a), b), np.cross(a, b), atol=1e-14)


def test_rotation_between():
    a = np.array([1.0, 0.0, 0.0])
    for target in ([0.0, 1.0, 0.0], [0.0, 0.0, -1.0], [1.0, 1.0, 1.0], [-1.0, 1e-8, 0.0]):
        b = np.asarray(target, dtype=float)
        q = rotation_between(a, b)
        rotated = quat_rotate(q, a)
        assert np.allclose(rotated, b / np.linalg.norm(b), atol=1e-7)
        assert abs(np.linalg.norm(q) - 1.0) < 1e-12


def test_normalize():
    q = RNG.normal(size=(10, 4))
    n = quat_normalize(q)
    assert np.allclose(np.linalg.norm(n, axis=-1), 1.0, atol=1e-14)
