"""Shared fixtures: the benchmark moored-box configuration and an energy
audit used by the dissipativity checks."""

import os

import numpy as np

from moorbeam.assembly import compute_strain
from moorbeam.quaternions import quat_to_matrix
from moorbeam.scenario import parse_scenario

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "scenarios")

# benchmark moored box: geometry and line properties shared by many tests
BOX_MASS = 3.16
BOX_DIMENSIONS = (0.2, 0.2, 0.132)
BOX_INERTIA = (0.015, 0.015, 0.021)
COM_INITIAL = np.array([0.0, 0.0, -0.0126])
LINE_LENGTH = 1.455
LINE_DIAMETER = 0.003656
LINE_EA = 19.0
LINE_MASS_PER_LENGTH = 0.05668   # calibrated against the 0.38 N pretension
ANCHORS = np.array([
    [-1.385, 0.423, -0.5],
    [-1.385, -0.423, -0.5],
    [1.385, 0.423, -0.5],
    [1.385, -0.423, -0.5],
])
FAIRLEADS = np.array([
    [-0.1, 0.1, -0.0736],
    [-0.1, -0.1, -0.0736],
    [0.1, 0.1, -0.0736],
    [0.1, -0.1, -0.0736],
])


def load_scenario(name: str):
    with open(os.path.join(SCENARIO_DIR, name)) as fh:
        return parse_scenario(fh.read())


def benchmark_environment():
    from moorbeam.loads import LoadEnvironment

    return LoadEnvironment(
        rho_fluid=1000.0, gravity=(0.0, 0.0, -9.81),
        drag_tangential=0.5, drag_normal=1.6,
        added_mass_tangential=0.0, added_mass_normal=1.6,
        seabed_z=-0.5, seabed_stiffness=1000.0, seabed_damping=1.0,
        seabed_tangent_stiffness=100.0, friction_coefficient=0.01)


def benchmark_section():
    from moorbeam.section import circular_section

    return circular_section(diameter=LINE_DIAMETER, EA=LINE_EA,
                            mass_per_length=LINE_MASS_PER_LENGTH)


def beam_elastic_energy(state, section, bc_points):
    """Strain energy of the line including the constrained boundary faces."""
    energy = 0.0
    if state.n_cells > 1:
        strain = compute_strain(state)
        ds = state.face_spacings()
        cf = np.array([section.EA, section.GA2, section.GA3])
        cm = np.array([section.GJ, section.EI2, section.EI3])
        energy += 0.5 * np.sum((strain.strain**2 @ cf + strain.curvature**2 @ cm) * ds)
    for point, idx, sign in ((bc_points[0], 0, -1.0), (bc_points[1], -1, +1.0)):
        if point is None:
            continue
        half = 0.5 * state.cell_lengths[idx]
        rp = sign * (point - state.positions[idx]) / half
        R = quat_to_matrix(state.orientations[idx])
        gamma = R.T @ rp - np.array([1.0, 0.0, 0.0])
        cf = np.array([section.EA, section.GA2, section.GA3])
        energy += 0.5 * float(gamma**2 @ cf) * half
    return energy


def system_energy(state, system):
    """Total mechanical energy of the coupled system (beam elastic + kinetic
    + gravitational PE + body KE/PE + hydrostatic spring PE + seabed PE).
    The hydrostatic term uses the axis-aligned submerged-depth approximation,
    adequate for the small heave perturbations the decay tests use."""
    env = system.env
    g = env.gravity
    total = 0.0
    for spec, line in zip(system.lines, state.lines):
        sec = spec.properties.section
        from moorbeam.rigidbody import fairlead_kinematics

        fl_pos, _ = fairlead_kinematics(state.body)
        points = (spec.anchor, fl_pos[spec.fairlead_index])
        total += beam_elastic_energy(line, sec, points)
        mass = sec.mass_per_length * line.cell_lengths
        total += 0.5 * np.sum(mass * np.sum(line.velocities**2, axis=1))
        net_w = (sec.mass_per_length - env.rho_fluid * sec.area) * line.cell_lengths
        total += -np.sum(net_w * (line.positions @ g))
        pen = np.maximum(env.seabed_z - line.positions[:, 2], 0.0)
        total += 0.5 * env.seabed_stiffness * sec.diameter * np.sum(pen**2 * line.cell_lengths)
    body = state.body
    total += 0.5 * body.mass * body.velocity @ body.velocity
    total += 0.5 * body.angular_velocity @ body.inertia @ body.angular_velocity
    total += -body.mass * body.position @ g
    dims = system.hydro.dimensions
    bottom = body.position[2] + system.hydro.centre_offset[2] - 0.5 * dims[2]
    h_sub = np.clip(-bottom, 0.0, dims[2])
    area = dims[0] * dims[1]
    total += 0.5 * env.rho_fluid * np.linalg.norm(g) * area * h_sub**2
    return float(total)


def make_benchmark_system(mode="free-decay", dt=0.005, end_time=1.0, **cfg_overrides):
    """Benchmark moored box as a CoupledSystem (hydro stand-in parameters as
    in the shipped scenarios)."""
    import numpy as np

    from moorbeam.coupling import CoupledSystem, CouplingConfig, LineProperties, LineSpec
    from moorbeam.hydro import BoxHydroModel
    from moorbeam.rigidbody import RigidBodyState

    env = benchmark_environment()
    sec = benchmark_section()
    body = RigidBodyState(
        position=COM_INITIAL, orientation=[1, 0, 0, 0],
        velocity=np.zeros(3), angular_velocity=np.zeros(3),
        mass=BOX_MASS, inertia=np.diag(BOX_INERTIA),
        fairlead_points=FAIRLEADS - COM_INITIAL)
    hydro = BoxHydroModel(dimensions=BOX_DIMENSIONS, rho=1000.0,
                          damping=(2.0, 2.0, 10.0, 0.05, 0.05, 0.05),
                          added_mass=(1.5, 1.5, 2.5),
                          added_inertia=(0.003, 0.003, 0.003))
    lines = [LineSpec(f"line{i + 1}", ANCHORS[i], i,
                      LineProperties(sec, LINE_LENGTH, 60)) for i in range(4)]
    cfg = CouplingConfig(dt=dt, end_time=end_time, mode=mode, **cfg_overrides)
    return CoupledSystem(body=body, lines=lines, env=env, hydro=hydro, config=cfg)
