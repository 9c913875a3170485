"""Search the detour parameters and print the equalized phase suprema."""

import argparse
import json
import time
from dataclasses import asdict

from disk_evacuation import SearchSpec, equalization_report, optimize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", choices=["C", "B"], default="B")
    ap.add_argument("--grid", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    make = SearchSpec.full if args.family == "C" else SearchSpec.b_family
    spec = make(grid=args.grid, jobs=args.jobs)
    start = time.perf_counter()
    params, rep = optimize(spec)
    print(json.dumps({
        "params": asdict(params),
        "sup_cost": rep.sup_cost,
        "gaps": equalization_report(params, "C"),
        "seconds": round(time.perf_counter() - start, 1),
    }, indent=2))


if __name__ == "__main__":
    main()
