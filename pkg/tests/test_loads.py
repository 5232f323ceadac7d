import math

import numpy as np
import pytest

from moorbeam.loads import (
    CellKinematics,
    LoadEnvironment,
    added_mass_force,
    buoyancy_force,
    drag_force,
    seabed_force,
    total_external,
)
from moorbeam.section import circular_section

D = 0.003656
AREA = math.pi * D**2 / 4.0


def chain_env(**overrides):
    params = dict(rho_fluid=1000.0, gravity=(0.0, 0.0, -9.81),
                  drag_tangential=0.5, drag_normal=1.6,
                  added_mass_tangential=0.0, added_mass_normal=1.6,
                  seabed_z=0.0, seabed_stiffness=1000.0, seabed_damping=1.0,
                  seabed_tangent_stiffness=100.0, friction_coefficient=0.3)
    params.update(overrides)
    return LoadEnvironment(**params)


def chain_section(rho=None):
    mpl = rho * AREA if rho is not None else 0.05668
    return circular_section(diameter=D, EA=19.0, mass_per_length=mpl)


def kin(position=(0, 0, 1.0), velocity=(0, 0, 0), acceleration=(0, 0, 0),
        tangent=(1, 0, 0), eps=0.0):
    return CellKinematics(
        position=np.asarray(position, dtype=float),
        velocity=np.asarray(velocity, dtype=float),
        acceleration=np.asarray(acceleration, dtype=float),
        tangent=np.asarray(tangent, dtype=float),
        axial_strain=eps)


class TestDrag:
    def test_zero_relative_velocity(self):
        f = drag_force(kin(), chain_section(), chain_env())
        assert np.allclose(f, 0.0, atol=1e-15)

    def test_normal_unit_velocity_hand_value(self):
        # 0.5 * 1000 * 0.003656 * 1.6 = 2.9248 N/m, opposing the motion
        f = drag_force(kin(velocity=(0, 0, 1.0)), chain_section(), chain_env())
        assert abs(np.linalg.norm(f) - 2.9248) < 1e-12
        assert f[2] < 0.0

    def test_quadratic_scaling(self):
        f1 = drag_force(kin(velocity=(0, 0.7, 0.4)), chain_section(), chain_env())
        f2 = drag_force(kin(velocity=(0, 1.4, 0.8)), chain_section(), chain_env())
        assert np.allclose(f2, 4.0 * f1, atol=1e-13)

    def test_stretch_factor(self):
        f0 = drag_force(kin(velocity=(0, 1, 0)), chain_section(), chain_env())
        f1 = drag_force(kin(velocity=(0, 1, 0), eps=0.21), chain_section(), chain_env())
        assert np.allclose(f1, f0 * math.sqrt(1.21), atol=1e-13)

    def test_dissipative_for_random_states(self):
        rng = np.random.default_rng(42)
        sec, env = chain_section(), chain_env()
        for _ in range(200):
            v = rng.normal(size=3)
            t = rng.normal(size=3)
            t /= np.linalg.norm(t)
            f = drag_force(kin(velocity=v, tangent=t, eps=abs(rng.normal())), sec, env)
            assert f @ v <= 1e-14

    def test_invalid_strain_raises(self):
        with pytest.raises(ValueError, match="epsilon"):
            drag_force(kin(velocity=(1, 0, 0), eps=-1.5), chain_section(), chain_env())

    def test_pure_function_bit_identical(self):
        k = kin(velocity=(0.3, -0.2, 0.9), tangent=(0, 1, 0), eps=0.05)
        f1 = drag_force(k, chain_section(), chain_env())
        f2 = drag_force(k, chain_section(), chain_env())
        assert np.array_equal(f1, f2)


class TestAddedMass:
    def test_zero_acceleration(self):
        f = added_mass_force(kin(), chain_section(), chain_env())
        assert np.allclose(f, 0.0, atol=1e-15)

    def test_tangential_coefficient_zero(self):
        # benchmark sets the tangential coefficient to zero
        f = added_mass_force(kin(acceleration=(1.0, 0, 0)), chain_section(), chain_env())
        assert np.allclose(f, 0.0, atol=1e-15)

    def test_normal_hand_value(self):
        f = added_mass_force(kin(acceleration=(0, 0, 1.0)), chain_section(), chain_env())
        expected = 1000.0 * AREA * 1.6
        assert abs(np.linalg.norm(f) - expected) < 1e-12
        assert abs(expected - 0.0168) < 2e-4   # quoted rounded value


class TestBuoyancy:
    def test_neutral(self):
        sec = chain_section(rho=1000.0)
        assert np.allclose(buoyancy_force(sec, chain_env()), 0.0, atol=1e-15)

    def test_double_density(self):
        sec = chain_section(rho=2000.0)
        f = buoyancy_force(sec, chain_env())
        assert np.allclose(f, 1000.0 * AREA * np.array([0, 0, -9.81]), atol=1e-14)

    def test_steel_hand_value(self):
        sec = chain_section(rho=7800.0)
        f = buoyancy_force(sec, chain_env())
        expected = 6800.0 * AREA * 9.81
        assert abs(np.linalg.norm(f) - expected) < 1e-12
        assert f[2] < 0.0
        assert abs(expected - 0.7004) < 2e-3   # quoted rounded value


class TestSeabed:
    def test_no_contact(self):
        f = seabed_force(kin(position=(0, 0, 0.01)), chain_section(), chain_env())
        assert np.allclose(f, 0.0, atol=1e-15)

    def test_penetration_hand_value(self):
        f = seabed_force(kin(position=(0, 0, -0.001)), chain_section(), chain_env())
        assert abs(f[2] - 1000.0 * D * 0.001) < 1e-12
        assert abs(f[2] - 3.656e-3) < 1e-12
        assert np.allclose(f[0:2], 0.0, atol=1e-15)

    def test_no_attraction(self):
        rng = np.random.default_rng(3)
        sec, env = chain_section(), chain_env()
        for _ in range(200):
            k = kin(position=(0, 0, rng.normal(scale=0.01)),
                    velocity=rng.normal(scale=0.5, size=3))
            f = seabed_force(k, sec, env)
            assert f[2] >= 0.0
            if k.position[2] > 0.0:
                assert np.allclose(f, 0.0, atol=1e-15)

    def test_upward_velocity_reduces_reaction(self):
        sec, env = chain_section(), chain_env()
        f_still = seabed_force(kin(position=(0, 0, -0.01)), sec, env)
        f_up = seabed_force(kin(position=(0, 0, -0.01), velocity=(0, 0, 1.0)), sec, env)
        f_down = seabed_force(kin(position=(0, 0, -0.01), velocity=(0, 0, -1.0)), sec, env)
        assert f_up[2] < f_still[2] < f_down[2]

    def test_friction_magnitude_capped(self):
        rng = np.random.default_rng(4)
        sec, env = chain_section(), chain_env()
        for _ in range(200):
            k = kin(position=(0, 0, -abs(rng.normal(scale=0.01))),
                    velocity=(rng.normal(), rng.normal(), 0.0))
            f = seabed_force(k, sec, env)
            normal = f[2]
            tangential = np.hypot(f[0], f[1])
            assert tangential <= env.friction_coefficient * normal + 1e-12

    def test_stick_slip_continuity(self):
        sec, env = chain_section(), chain_env()
        pen = 0.004
        normal = env.seabed_stiffness * D * pen
        v_star = env.friction_coefficient * normal / (env.seabed_tangent_stiffness * D)
        f_lo = seabed_force(kin(position=(0, 0, -pen),
                            velocity=(v_star * (1 - 1e-12), 0, 0)), sec, env)
        f_hi = seabed_force(kin(position=(0, 0, -pen),
                            velocity=(v_star * (1 + 1e-12), 0, 0)), sec, env)
        assert abs(np.hypot(*f_lo[:2]) - np.hypot(*f_hi[:2])) < 1e-12

    def test_friction_opposes_motion(self):
        sec, env = chain_section(), chain_env()
        f = seabed_force(kin(position=(0, 0, -0.005), velocity=(0.3, -0.1, 0)), sec, env)
        assert f[0] < 0.0 and f[1] > 0.0


class TestTotal:
    def test_stationary_neutral_above_bed(self):
        sec = chain_section(rho=1000.0)
        f = total_external(kin(position=(0, 0, 1.0)), sec, chain_env())
        assert np.allclose(f, 0.0, atol=1e-15)

    def test_dense_stationary_equals_buoyancy(self):
        sec = chain_section(rho=3000.0)
        env = chain_env()
        f = total_external(kin(position=(0, 0, 1.0)), sec, env)
        assert np.allclose(f, buoyancy_force(sec, env), atol=1e-14)

    def test_sum_of_parts(self):
        sec = chain_section(rho=3000.0)
        env = chain_env()
        k = kin(position=(0, 0, -0.002), velocity=(0.4, 0.1, -0.2),
                acceleration=(0.5, -1.0, 0.3), tangent=(0, 0, 1), eps=0.02)
        total = total_external(k, sec, env)
        parts = (drag_force(k, sec, env) + added_mass_force(k, sec, env)
                 + buoyancy_force(sec, env) + seabed_force(k, sec, env))
        assert np.allclose(total, parts, atol=1e-14)
