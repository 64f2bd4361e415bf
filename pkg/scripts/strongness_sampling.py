"""Compare random short arcs of a k-turn geodesic with the bounded-depth oracle."""
import argparse
import random

from polygeo.nonconvex import (
    build_seven_cubes, k_turn_geodesic, local_shortest_oracle, point_at_arclength,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-k", type=int, default=2)
    ap.add_argument("--arcs", type=int, default=50)
    ap.add_argument("--max-arc", type=float, default=2.0, help="in cube edges")
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    mesh = build_seven_cubes(1.0)
    path = k_turn_geodesic(mesh, args.k).path
    rng = random.Random(args.seed)
    worst = 0.0
    for _ in range(args.arcs):
        ell = rng.uniform(0.05, args.max_arc)
        s0 = rng.uniform(0.0, path.length - ell)
        p, q = point_at_arclength(mesh, path, s0), point_at_arclength(mesh, path, s0 + ell)
        res = local_shortest_oracle(mesh, p, q, args.depth)
        worst = max(worst, abs(res.length - ell))
        if abs(res.length - ell) > 1e-9:
            print(f"mismatch at s={s0:.4f}, arc {ell:.4f}: oracle {res.length:.12f}")
    print(f"{args.arcs} arcs, max |oracle - arc| = {worst:.2e}")


if __name__ == "__main__":
    main()
