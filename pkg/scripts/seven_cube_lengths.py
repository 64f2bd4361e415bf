"""Lengths, increments and vertex splits of the k-turn seven-cube geodesics."""
import argparse
import math

from polygeo.nonconvex import build_seven_cubes, k_turn_geodesic, k_turn_length


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-k", type=int, default=10)
    ap.add_argument("--edge", type=float, default=1.0)
    args = ap.parse_args()
    mesh = build_seven_cubes(args.edge)
    prev = None
    print(f"{'k':>3} {'length':>14} {'closed form':>14} {'increment':>12} verified  min split/pi")
    for k in range(1, args.max_k + 1):
        kp = k_turn_geodesic(mesh, k, args.edge)
        inc = "" if prev is None else f"{kp.length - prev:12.9f}"
        split = min(min(p) for _, _, p, _ in kp.report.vertex_nodes) / math.pi
        print(f"{k:3d} {kp.length:14.9f} {k_turn_length(k, args.edge):14.9f} {inc:>12} "
              f"{str(kp.report.accepted):>8}  {split:.6f}")
        prev = kp.length


if __name__ == "__main__":
    main()
