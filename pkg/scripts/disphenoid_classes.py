"""Fold every (n, m) class on a disphenoid and check nodes, length and reflection."""
import argparse

from polygeo.disphenoid import (
    class_length, enumerate_classes, geodesic_from_class, node_counts, per_edge_counts,
)
from polygeo.mesh import disphenoid
from polygeo.unfold import verify_geodesic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--triangle", type=float, nargs=3, default=(2.0, 2.5, 3.0))
    ap.add_argument("--max-total", type=int, default=10)
    ap.add_argument("--offset", type=float, default=0.5)
    args = ap.parse_args()
    tri = tuple(args.triangle)
    mesh = disphenoid(*tri)
    for c in enumerate_classes(args.max_total):
        path = geodesic_from_class(tri, c, args.offset, mesh)
        counts = per_edge_counts(mesh, path)
        rep = verify_geodesic(mesh, path)
        ok = all(counts[k] == v for k, v in node_counts(c).items())
        print(f"({c.n:2d},{c.m:2d})  length {class_length(tri, c):12.6f}  nodes {counts['total']:3d}"
              f"  counts ok {ok}  accepted {rep.accepted}  max dev {rep.max_deviation:.1e}")


if __name__ == "__main__":
    main()
