"""Full net of a disphenoid and its (n, m) classes of closed geodesics.

Net coordinates use the basis e1 = 2 AB, e2 = 2 AC.  Knots sit on the
half-integer lattice: integer points are A, (i+1/2, j) B, (i, j+1/2) C and
(i+1/2, j+1/2) D.  The half-unit cells split along u + v = const into the
triangles that fold onto the four faces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import EdgeInterior, Mesh, disphenoid, disphenoid_vertices
from .search import canonical_sequence
from .unfold import GeodesicPath, make_path

LABELS = "ABCD"
KNOT_TOL = 1e-12

# the Klein four-group acting on labels A, B, C, D
KLEIN = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))


class InvalidClass(ValueError):
    pass


class KnotOnLine(ValueError):
    pass


@dataclass(frozen=True)
class GeodesicClass:
    n: int
    m: int

    def __post_init__(self):
        if not is_valid_class(self.n, self.m):
            raise InvalidClass(f"({self.n}, {self.m}) is not a geodesic class")

    @property
    def nodes_total(self) -> int:
        return 4 * (self.n + self.m)


def is_valid_class(n: int, m: int) -> bool:
    if (n, m) in ((1, 0), (1, 1)):
        return True
    return n > m >= 1 and math.gcd(n, m) == 1


def enumerate_classes(max_total: int) -> list[GeodesicClass]:
    out = []
    for total in range(1, max_total + 1):
        for n in range(total, -1, -1):
            m = total - n
            if is_valid_class(n, m):
                out.append(GeodesicClass(n, m))
    return sorted(out, key=lambda c: (c.n + c.m, c.n))


@dataclass(frozen=True)
class FullNet:
    """Planar base triangle ABC of the disphenoid with sides (p, q, r)."""

    p: float
    q: float
    r: float

    @property
    def A(self) -> np.ndarray:
        return np.zeros(2)

    @property
    def B(self) -> np.ndarray:
        return np.array([self.p, 0.0])

    @property
    def C(self) -> np.ndarray:
        p, q, r = self.p, self.q, self.r
        cos_a = (p * p + q * q - r * r) / (2 * p * q)
        return q * np.array([cos_a, math.sqrt(max(0.0, 1 - cos_a * cos_a))])

    @property
    def e1(self) -> np.ndarray:
        return 2 * self.B

    @property
    def e2(self) -> np.ndarray:
        return 2 * self.C

    def to_plane(self, uv) -> np.ndarray:
        uv = np.asarray(uv, float)
        return uv[..., :1] * self.e1 + uv[..., 1:2] * self.e2

    @staticmethod
    def knot_label(i: int, j: int) -> int:
        """Label of the knot at half-integer lattice point (i/2, j/2)."""
        return (i % 2) + 2 * (j % 2)


def class_length(spec, cls: GeodesicClass) -> float:
    net = FullNet(*spec)
    return float(np.linalg.norm(cls.n * net.e1 + cls.m * net.e2))


def node_counts(cls: GeodesicClass) -> dict[str, int]:
    """Nodes on each edge: AB and CD carry m, AC and BD n, BC and AD n + m."""
    n, m = cls.n, cls.m
    return {"AB": m, "CD": m, "AC": n, "BD": n, "BC": n + m, "AD": n + m,
            "total": 4 * (n + m)}


@lru_cache(maxsize=64)
def _mesh_for(spec) -> Mesh:
    return disphenoid(*spec)


def _edge_param(mesh: Mesh, la: int, lb: int, s: float) -> EdgeInterior:
    """Point at fraction ``s`` from vertex ``la`` toward ``lb``."""
    e = mesh.edge_between(la, lb)
    a, _ = mesh.edges[e]
    return EdgeInterior(e, s if a == la else 1.0 - s)


def geodesic_from_class(spec, cls: GeodesicClass, offset: float,
                        mesh: Mesh | None = None) -> GeodesicPath:
    """Fold the net segment of class ``cls`` onto the disphenoid.

    ``offset`` in (0, 1) selects the parallel line between two consecutive
    knot-bearing lines; the segment starts on the net line u = 0.
    """
    if not 0.0 < offset < 1.0:
        raise KnotOnLine(f"offset {offset} puts the line through a knot")
    spec = tuple(float(x) for x in spec)
    mesh = mesh or _mesh_for(spec)
    n, m = cls.n, cls.m
    # m*u - n*v = offset/2 on the start line u = 0
    x0 = np.array([0.0, -offset / (2 * n)])
    w = np.array([float(n), float(m)])
    # crossings with u, v, u+v in (1/2)Z; work in doubled coordinates
    P0, W = 2 * x0, 2 * w
    params = set()
    for comp in (0, 1, 2):
        a = P0[0] + P0[1] if comp == 2 else P0[comp]
        da = W[0] + W[1] if comp == 2 else W[comp]
        if da == 0:
            continue
        lo, hi = sorted((a, a + da))
        for k in range(math.ceil(lo - 1e-12), math.floor(hi + 1e-12) + 1):
            s = (k - a) / da
            if -1e-12 <= s < 1 - 1e-12:
                params.add(round(s, 13))
    svals = sorted(params)
    nodes = []
    for s in svals:
        pt = P0 + s * W  # doubled coordinates: knots at integer points
        nodes.append(_net_point_to_edge(mesh, pt))
    nodes.append(nodes[0])
    faces = []
    for k, s in enumerate(svals):
        s2 = svals[k + 1] if k + 1 < len(svals) else 1.0
        mid = P0 + 0.5 * (s + s2) * W
        faces.append(_net_face(mesh, mid))
    return make_path(mesh, nodes, faces, closed=True)


def _near_int(x: float) -> bool:
    return abs(x - round(x)) <= 1e-9


def _net_point_to_edge(mesh: Mesh, pt) -> EdgeInterior:
    u, v = pt
    for ku, kv in ((round(u), round(v)),):
        if abs(u - ku) <= KNOT_TOL and abs(v - kv) <= KNOT_TOL:
            raise KnotOnLine("the folded line passes through a knot")
    if _near_int(u):
        i = round(u)
        j = math.floor(v)
        s = v - j
        la, lb = FullNet.knot_label(i, j), FullNet.knot_label(i, j + 1)
    elif _near_int(v):
        j = round(v)
        i = math.floor(u)
        s = u - i
        la, lb = FullNet.knot_label(i, j), FullNet.knot_label(i + 1, j)
    elif _near_int(u + v):
        k = round(u + v)
        i = math.floor(u)
        # from (i, k - i) toward (i + 1, k - i - 1)
        s = u - i
        la, lb = FullNet.knot_label(i, k - i), FullNet.knot_label(i + 1, k - i - 1)
    else:
        raise ValueError("point is not on a net edge")
    if s <= KNOT_TOL or s >= 1 - KNOT_TOL:
        raise KnotOnLine("the folded line passes through a knot")
    return _edge_param(mesh, la, lb, s)


def _net_face(mesh: Mesh, pt) -> int:
    u, v = pt
    i, j = math.floor(u), math.floor(v)
    if (u - i) + (v - j) < 1:
        corners = ((i, j), (i + 1, j), (i, j + 1))
    else:
        corners = ((i + 1, j), (i + 1, j + 1), (i, j + 1))
    labels = {FullNet.knot_label(*c) for c in corners}
    for f, face in enumerate(mesh.faces):
        if set(face) == labels:
            return f
    raise ValueError(f"no face with labels {labels}")


def edge_label_sequence(mesh: Mesh, path: GeodesicPath) -> tuple[tuple[int, int], ...]:
    """Crossed edges as sorted label pairs, in path order."""
    out = []
    for node in path.nodes[:-1]:
        a, b = mesh.edges[node.edge]
        out.append((min(a, b), max(a, b)))
    return tuple(out)


def per_edge_counts(mesh: Mesh, path: GeodesicPath) -> dict[str, int]:
    counts = {LABELS[a] + LABELS[b]: 0 for a in range(4) for b in range(a + 1, 4)}
    for a, b in edge_label_sequence(mesh, path):
        counts[LABELS[a] + LABELS[b]] += 1
    counts["total"] = sum(counts.values())
    return counts


def _canonical_labels(seq) -> tuple:
    best = None
    for s in (seq, tuple(reversed(seq))):
        for k in range(len(s)):
            cand = s[k:] + s[:k]
            if best is None or cand < best:
                best = cand
    return best


def isomorphism_check(spec, cls: GeodesicClass, o1: float, o2: float,
                      cls2: GeodesicClass | None = None) -> bool:
    """Do the two folded lines agree up to automorphism, shift and reversal?"""
    mesh = _mesh_for(tuple(float(x) for x in spec))
    s1 = edge_label_sequence(mesh, geodesic_from_class(spec, cls, o1, mesh))
    s2 = edge_label_sequence(mesh, geodesic_from_class(spec, cls2 or cls, o2, mesh))
    if len(s1) != len(s2):
        return False
    target = _canonical_labels(s2)
    for perm in KLEIN:
        mapped = tuple(tuple(sorted((perm[a], perm[b]))) for a, b in s1)
        if _canonical_labels(mapped) == target:
            return True
    return False


def equivalence_key(mesh: Mesh, path: GeodesicPath) -> tuple[int, ...]:
    return canonical_sequence(mesh, path.crossing_sequence)


__all__ = [
    "FullNet", "GeodesicClass", "InvalidClass", "KnotOnLine", "class_length",
    "disphenoid_vertices", "enumerate_classes", "geodesic_from_class",
    "isomorphism_check", "node_counts", "per_edge_counts",
]
