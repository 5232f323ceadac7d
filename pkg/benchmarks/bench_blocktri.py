"""Benchmark the block tri-diagonal kernel: compiled extension vs the pure
numpy fallback, plus the end-to-end effect on one implicit line step.

Usage: python benchmarks/bench_blocktri.py
"""

import time

import numpy as np

from moorbeam.blocktri import BACKEND, BlockTriDiagSystem, solve_block_tridiagonal


def bench_kernel():
    rng = np.random.default_rng(0)
    print(f"compiled backend available: {BACKEND == 'compiled'}")
    print(f"{'N':>6} {'python (us)':>14} {'compiled (us)':>14} {'speedup':>9}")
    for n in (15, 60, 240, 960):
        lower = rng.normal(size=(n, 6, 6))
        upper = rng.normal(size=(n, 6, 6))
        diag = rng.normal(size=(n, 6, 6)) + 8.0 * np.eye(6)
        rhs = rng.normal(size=(n, 6))
        lower[0] = upper[-1] = 0.0
        system = BlockTriDiagSystem(lower, diag, upper, rhs)
        times = {}
        for backend in ("python", "compiled") if BACKEND == "compiled" else ("python",):
            reps = 200 if backend == "compiled" else 30
            solve_block_tridiagonal(system, backend=backend)  # warm up
            start = time.perf_counter()
            for _ in range(reps):
                solve_block_tridiagonal(system, backend=backend)
            times[backend] = (time.perf_counter() - start) / reps * 1e6
        if "compiled" in times:
            print(f"{n:>6} {times['python']:>14.1f} {times['compiled']:>14.1f} "
                  f"{times['python'] / times['compiled']:>8.1f}x")
        else:
            print(f"{n:>6} {times['python']:>14.1f} {'-':>14} {'-':>9}")


def bench_line_step():
    import os

    from moorbeam.loads import LoadEnvironment
    from moorbeam.newton import advance_step
    from moorbeam.section import circular_section
    from moorbeam.state import BeamBC, straight_line_state

    sec = circular_section(diameter=0.003656, EA=19.0, mass_per_length=0.05668)
    env = LoadEnvironment(rho_fluid=1000.0, gravity=(0, 0, -9.81),
                          drag_tangential=0.5, drag_normal=1.6,
                          added_mass_normal=1.6)
    print("\nimplicit line step (60 cells, 3 Newton-ish iterations):")
    for label, env_flag in (("compiled", "0"), ("python", "1")):
        os.environ["MOORBEAM_PURE_PYTHON"] = env_flag
        import importlib

        import moorbeam.blocktri
        importlib.reload(moorbeam.blocktri)
        import moorbeam.newton
        importlib.reload(moorbeam.newton)
        state = straight_line_state([0, 0, -0.4], [1, 0, 0.2], 1.455, 60)
        bc = (BeamBC.pinned(state.positions[0]),
              BeamBC.pinned(state.positions[-1] + [0.01, 0, 0]))
        t, reps = 0.0, 100
        moorbeam.newton.advance_step(state, env, sec, bc, 0.005, time_new=0.005)
        start = time.perf_counter()
        s = state
        for k in range(reps):
            s, _, _ = moorbeam.newton.advance_step(s, env, sec, bc, 0.005,
                                                   time_new=0.005 * (k + 2))
        per_step = (time.perf_counter() - start) / reps * 1e3
        print(f"  {label:>9}: {per_step:.2f} ms/step")
    os.environ.pop("MOORBEAM_PURE_PYTHON", None)


if __name__ == "__main__":
    bench_kernel()
    bench_line_step()
