"""Command-line interface.

Subcommands:
  run <scenario> -o DIR      run the simulation, write one CSV per channel
                             plus manifest.json
  init-check <scenario>      initialise each line, print pretension vs the
                             elastic-catenary oracle
  morph POINTS.csv -o OUT    displace a point cloud for a given body pose
  postprocess CSV            amplitude of a channel (peak-to-trough or FFT)
  validate <scenario>        parse and validate only
"""

import argparse
import json
import os
import sys

import numpy as np

from .catenary import CatenaryError, elastic_catenary
from .coupling import build_system, initialize_line, run_simulation
from .morph import MorphConfig, box_distance, point_displacement
from .postprocess import amplitude_peak_to_trough, default_window, fft_dominant_amplitude
from .scenario import ScenarioError, parse_scenario
from .timeseries import read_timeseries, write_timeseries


def _load_scenario(path):
    with open(path, "r") as fh:
        return parse_scenario(fh.read())


def _cmd_validate(args):
    _load_scenario(args.scenario)
    print(f"{args.scenario}: ok")
    return 0


def _cmd_run(args):
    scenario = _load_scenario(args.scenario)
    if args.end_time is not None:
        scenario.coupling.end_time = args.end_time
    records = run_simulation(scenario)
    os.makedirs(args.output, exist_ok=True)
    manifest = {"scenario": os.path.basename(args.scenario), "channels": {}}
    for name in sorted(records):
        filename = f"{name}.csv"
        write_timeseries(records[name], os.path.join(args.output, filename))
        manifest["channels"][name] = {
            "file": filename, "samples": int(records[name].times.size)}
    manifest_path = os.path.join(args.output, "manifest.json")
    tmp = manifest_path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, manifest_path)
    print(f"wrote {len(records)} channels to {args.output}")
    return 0


def _cmd_init_check(args):
    scenario = _load_scenario(args.scenario)
    system = build_system(scenario)
    env = system.env
    gravity = float(np.linalg.norm(env.gravity))
    from .rigidbody import fairlead_kinematics

    fl_pos, _ = fairlead_kinematics(system.body)
    status = 0
    for spec in system.lines:
        fair = fl_pos[spec.fairlead_index]
        result = initialize_line(spec.anchor, fair, spec.properties, env)
        sec = spec.properties.section
        w = max((sec.mass_per_length - env.rho_fluid * sec.area) * gravity, 0.0)
        try:
            oracle = elastic_catenary(fair - spec.anchor, spec.properties.length,
                                      w, sec.EA)
            oracle_t = np.linalg.norm(oracle.anchor_tension)
            note = f"oracle (no seabed) {oracle_t:.4f} N"
        except CatenaryError as exc:
            note = f"oracle unavailable: {exc}"
        print(f"{spec.name}: pretension {result.pretension:.4f} N  [{note}]")
    return status


def _cmd_morph(args):
    points = np.loadtxt(args.points, delimiter=",", ndmin=2)
    if points.shape[1] != 3:
        print("error: point cloud must have 3 columns (x,y,z)", file=sys.stderr)
        return 2
    centre = np.asarray(args.box_centre)
    cfg = MorphConfig(
        inner_radius=args.inner, outer_radius=args.outer,
        distance=lambda p: box_distance(p, centre, args.box),
        translation_zones=args.zones,
        initial_orientation=np.asarray(args.initial_orientation))
    pose = np.asarray(args.pose)
    displaced = points + point_displacement(points, pose[0:3], pose[3:7], cfg)
    np.savetxt(args.output, displaced, delimiter=",", fmt="%.17g")
    print(f"wrote {displaced.shape[0]} points to {args.output}")
    return 0


def _cmd_postprocess(args):
    series = read_timeseries(args.csv)
    window = tuple(args.window) if args.window else default_window(series.name)
    if args.method == "p2t":
        amp = amplitude_peak_to_trough(series, window)
        print(f"{series.name}: peak-to-trough amplitude {amp:.6g}")
    else:
        freq, amp = fft_dominant_amplitude(series, window)
        print(f"{series.name}: dominant frequency {freq:.6g} Hz amplitude {amp:.6g}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="moorbeam",
        description="Mooring-line dynamics: finite-volume beams coupled to a "
                    "six-DOF floating body")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write channel CSVs")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--end-time", type=float, default=None,
                   help="override the scenario end time (s)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("init-check", help="line pretension vs catenary oracle")
    p.add_argument("scenario")
    p.set_defaults(func=_cmd_init_check)

    p = sub.add_parser("morph", help="displace a CSV point cloud for a body pose")
    p.add_argument("points", help="input CSV with x,y,z columns")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--pose", type=float, nargs=7, required=True,
                   metavar=("BX", "BY", "BZ", "QW", "QX", "QY", "QZ"),
                   help="body translation and orientation quaternion")
    p.add_argument("--inner", type=float, default=0.05)
    p.add_argument("--outer", type=float, default=0.45)
    p.add_argument("--zones", type=float, nargs=3, default=None,
                   metavar=("ZX", "ZY", "ZZ"),
                   help="per-axis translation zone outer distances")
    p.add_argument("--box", type=float, nargs=3, default=(0.2, 0.2, 0.132),
                   metavar=("LX", "LY", "LZ"), help="body box dimensions")
    p.add_argument("--box-centre", type=float, nargs=3, default=(0.0, 0.0, 0.0),
                   metavar=("CX", "CY", "CZ"))
    p.add_argument("--initial-orientation", type=float, nargs=4,
                   default=(1.0, 0.0, 0.0, 0.0), metavar=("QW", "QX", "QY", "QZ"))
    p.set_defaults(func=_cmd_morph)

    p = sub.add_parser("postprocess", help="amplitude of a channel CSV")
    p.add_argument("csv")
    p.add_argument("--window", type=float, nargs=2, default=None,
                   metavar=("T0", "T1"))
    p.add_argument("--method", choices=("p2t", "fft"), default="p2t")
    p.set_defaults(func=_cmd_postprocess)

    p = sub.add_parser("validate", help="parse and validate a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, CatenaryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
