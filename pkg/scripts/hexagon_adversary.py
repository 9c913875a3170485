"""Run the vertex adversary against every strategy in the hexagon zoo."""

from disk_evacuation.hexagon import HEX_BOUND, adversary, algorithm_zoo


def main():
    print(f"bound 2 + sqrt(3) = {HEX_BOUND:.9f}")
    for name, alg in algorithm_zoo().items():
        rep = adversary(alg)
        print(f"{name:28s} worst={rep.worst_time:.9f} exit={rep.worst_input} "
              f"fifth={rep.fifth_vertex}@{rep.fifth_visit_time:.4f}")


if __name__ == "__main__":
    main()
