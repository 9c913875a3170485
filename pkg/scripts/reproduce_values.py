"""Print the headline worst-case values for the three detour strategies."""

import json

from disk_evacuation import REFERENCE_B_CHI, REFERENCE_C, AlgorithmParams, critical_arc, worst_case
from disk_evacuation.costmodel import cost_A
from disk_evacuation.solvers import solve_f


def main():
    x0 = critical_arc()
    rows = {
        "A": worst_case(AlgorithmParams(x0, 0.0, 0.0), "A", 20_000),
        "B": worst_case(AlgorithmParams.for_b(REFERENCE_B_CHI), "B", 20_000),
        "C": worst_case(REFERENCE_C, "C", 20_000),
    }
    out = {k: r.to_dict() for k, r in rows.items()}
    out["A_at_critical_arc"] = cost_A(x0 - solve_f(x0)).total_cost
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
