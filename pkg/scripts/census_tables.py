"""Squared-length census of closed simple geodesics on the built-in solids.

Dodecahedron values are also written as a + b*phi.
"""
import argparse
import math
import time

from polygeo.mesh import builtin
from polygeo.search import enumerate_closed, squared_lengths

PHI = (1 + math.sqrt(5)) / 2
DEFAULTS = [("regular_tetrahedron", 24), ("cube", 8), ("octahedron", 8),
            ("icosahedron", 12), ("dodecahedron", 12), ("right_pyramid", 12)]


def golden(x, tol=1e-6):
    for b in range(200):
        a = x - b * PHI
        if abs(a - round(a)) < tol:
            return f"{round(a)}+{b}φ"
    return "?"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--extra-budget", type=int, default=0,
                    help="add this many crossings to every default budget")
    args = ap.parse_args()
    for name, budget in DEFAULTS:
        mesh = builtin(name, [1.0, 1.3] if name == "right_pyramid" else [])
        t0 = time.perf_counter()
        recs = enumerate_closed(mesh, budget + args.extra_budget)
        dt = time.perf_counter() - t0
        values = squared_lengths(recs)
        shown = [golden(v) for v in values] if name == "dodecahedron" else values
        print(f"{name:20s} budget {budget + args.extra_budget:3d}  classes {len(recs):4d}  "
              f"{dt:6.2f} s  squared lengths {shown}")


if __name__ == "__main__":
    main()
