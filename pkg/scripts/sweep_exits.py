"""Compare closed-form costs with the simulator over a sweep of exit positions."""

import argparse
import math

import numpy as np

from disk_evacuation import REFERENCE_C, SimConfig, simulate
from disk_evacuation.costmodel import closed_form_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--dt", type=float, default=1e-4)
    args = ap.parse_args()

    ys = np.linspace(1e-3, math.pi, args.points)
    cfg = SimConfig(dt=args.dt)
    worst = 0.0
    print("y,closed_form,simulated,abs_diff")
    for out in closed_form_sweep(ys, REFERENCE_C):
        sim, _ = simulate(REFERENCE_C, "C", out.exit_angle, cfg)
        diff = abs(sim - out.total_cost)
        worst = max(worst, diff)
        print(f"{out.y:.6f},{out.total_cost:.9f},{sim:.9f},{diff:.3e}")
    print(f"# max |diff| = {worst:.3e}")


if __name__ == "__main__":
    main()
