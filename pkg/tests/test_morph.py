import numpy as np
import pytest

from moorbeam.morph import (
    MorphConfig,
    blend_weight,
    blended_rotation,
    box_distance,
    point_displacement,
    translation_weight,
)
from moorbeam.quaternions import quat_from_rotvec, quat_rotate, quat_to_rotvec


def sphere_cfg(r_in=0.05, r_out=0.45, zones=None, q0=None):
    kwargs = {}
    if q0 is not None:
        kwargs["initial_orientation"] = np.asarray(q0, dtype=float)
    return MorphConfig(
        inner_radius=r_in, outer_radius=r_out,
        distance=lambda p: np.linalg.norm(np.atleast_2d(p), axis=-1),
        translation_zones=zones, **kwargs)


def point_at_distance(w):
    return np.array([[w, 0.0, 0.0]])


class TestBlendWeight:
    def test_inner_boundary(self):
        assert blend_weight(point_at_distance(0.05), sphere_cfg())[0] == 1.0

    def test_outer_boundary(self):
        assert blend_weight(point_at_distance(0.45), sphere_cfg())[0] == 0.0

    def test_midpoint_exact_half(self):
        assert blend_weight(point_at_distance(0.25), sphere_cfg())[0] == 0.5

    def test_clipped_outside(self):
        assert blend_weight(point_at_distance(0.9), sphere_cfg())[0] == 0.0
        assert blend_weight(point_at_distance(0.01), sphere_cfg())[0] == 1.0

    def test_continuous_piecewise_linear(self):
        w = np.linspace(0.0, 0.6, 400)
        beta = blend_weight(np.stack([w, np.zeros_like(w), np.zeros_like(w)], axis=1),
                            sphere_cfg())
        jumps = np.abs(np.diff(beta))
        assert jumps.max() < 2.0 * (w[1] - w[0]) / 0.4 + 1e-12


class TestBlendedRotation:
    def test_beta_one_returns_current(self):
        q = quat_from_rotvec([0.2, -0.4, 0.7])
        q0 = quat_from_rotvec([0.1, 0.3, -0.2])
        out = blended_rotation(q, q0, 1.0)
        assert min(np.linalg.norm(out - q), np.linalg.norm(out + q)) < 1e-12

    def test_beta_zero_returns_initial(self):
        q = quat_from_rotvec([0.2, -0.4, 0.7])
        q0 = quat_from_rotvec([0.1, 0.3, -0.2])
        out = blended_rotation(q, q0, 0.0)
        assert min(np.linalg.norm(out - q0), np.linalg.norm(out + q0)) < 1e-12

    def test_half_of_90_degrees_is_45(self):
        q = quat_from_rotvec([0.0, 0.0, np.pi / 2])
        q0 = np.array([1.0, 0.0, 0.0, 0.0])
        out = blended_rotation(q, q0, 0.5)
        assert np.allclose(quat_to_rotvec(out), [0.0, 0.0, np.pi / 4], atol=1e-13)

    def test_unit_norm_for_all_beta(self):
        q = quat_from_rotvec([0.5, -0.8, 0.3])
        q0 = quat_from_rotvec([-0.2, 0.1, 0.9])
        for beta in np.linspace(0.0, 1.0, 21):
            out = blended_rotation(q, q0, beta)
            assert abs(np.linalg.norm(out) - 1.0) < 1e-12


class TestPointDisplacement:
    def test_rigid_zone_full_transform(self):
        cfg = sphere_cfg()
        p = np.array([[0.03, 0.01, -0.02]])
        b = np.array([0.07, -0.02, 0.04])
        q = quat_from_rotvec([0.1, 0.2, -0.3])
        dp = point_displacement(p, b, q, cfg)
        expected = b + quat_rotate(q, p[0]) - p[0]
        assert np.allclose(dp[0], expected, atol=1e-13)

    def test_static_zone_zero(self):
        cfg = sphere_cfg()
        p = point_at_distance(0.6)
        dp = point_displacement(p, [0.1, 0.0, 0.0], quat_from_rotvec([0, 0, 0.4]), cfg)
        assert np.allclose(dp, 0.0, atol=1e-15)

    def test_mid_ramp_translation_scaling(self):
        # alpha_x = 0.5 at the zone midpoint: pure translation halves
        cfg = sphere_cfg()
        p = point_at_distance(0.25)
        dp = point_displacement(p, [0.1, 0.0, 0.0], np.array([1.0, 0, 0, 0]), cfg)
        assert np.allclose(dp[0], [0.05, 0.0, 0.0], atol=1e-14)

    def test_per_axis_zones(self):
        # wider x-zone than z-zone: at W = 0.25 the x-ramp is less decayed
        cfg = sphere_cfg(zones=(0.9, 0.45, 0.1))
        p = point_at_distance(0.25)
        alpha = translation_weight(p, cfg)[0]
        assert alpha[0] > alpha[1] > alpha[2] == 0.0
        dp = point_displacement(p, [0.1, 0.1, 0.1], np.array([1.0, 0, 0, 0]), cfg)
        assert dp[0, 0] > dp[0, 1] > dp[0, 2] == 0.0

    def test_identity_pose_zero_displacement(self):
        q0 = quat_from_rotvec([0.3, -0.1, 0.2])
        cfg = sphere_cfg(q0=q0)
        pts = np.random.default_rng(0).normal(scale=0.3, size=(50, 3))
        dp = point_displacement(pts, np.zeros(3), q0, cfg)
        assert np.abs(dp).max() < 1e-14

    def test_rigid_zone_preserves_distances(self):
        cfg = sphere_cfg()
        rng = np.random.default_rng(1)
        pts = 0.04 * rng.normal(size=(40, 3))
        pts /= np.maximum(np.linalg.norm(pts, axis=1, keepdims=True) / 0.04, 1.0)
        b = np.array([0.05, 0.02, -0.03])
        q = quat_from_rotvec([0.4, -0.2, 0.5])
        moved = pts + point_displacement(pts, b, q, cfg)
        d_before = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        d_after = np.linalg.norm(moved[:, None, :] - moved[None, :, :], axis=-1)
        assert np.abs(d_after - d_before).max() < 1e-12

    def test_displacement_continuous_in_space(self):
        cfg = sphere_cfg()
        b = np.array([0.05, 0.0, 0.02])
        q = quat_from_rotvec([0.0, 0.3, 0.0])
        r = np.linspace(0.02, 0.55, 800)
        pts = np.stack([r, np.zeros_like(r), np.zeros_like(r)], axis=1)
        dp = point_displacement(pts, b, q, cfg)
        steps = np.linalg.norm(np.diff(dp, axis=0), axis=1)
        assert steps.max() < 5e-3


def test_box_distance():
    centre = np.zeros(3)
    dims = (0.2, 0.2, 0.132)
    assert box_distance([[0.0, 0.0, 0.0]], centre, dims)[0] == 0.0
    assert abs(box_distance([[0.3, 0.0, 0.0]], centre, dims)[0] - 0.2) < 1e-14
    d = box_distance([[0.2, 0.2, 0.0]], centre, dims)[0]
    assert abs(d - np.hypot(0.1, 0.1)) < 1e-14


def test_invalid_config():
    with pytest.raises(ValueError):
        MorphConfig(inner_radius=0.5, outer_radius=0.4, distance=lambda p: 0.0)
