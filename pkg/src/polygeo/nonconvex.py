"""Seven-cube surface, its k-turn closed geodesics and a bounded-depth
shortest-path oracle for checking that short arcs are shortest.

Geometry (cube edge ``a``; listed for a = 1).  The middle cube is
[0,1]^3.  The upper assembly adds a cube on top of it, plus one in front of
and one to the right of that top cube.  The lower assembly is the image of
the upper one under the half-turn R(x, y, z) = (1 - x, y, 1 - z), which fixes
the middle cube.  The four side faces of the middle cube form an exposed
belt; a belt coordinate ``s`` in [0, 4) runs around it (y = 0, x = 1, y = 1,
x = 0 faces in turn) and ``z`` is the height.

The k-turn path uses the vertices A = (0,0,1), B = (0,0,2), C = (1,0,2),
D = (1,0,1) and their images A' = R(A), ... :

* A -> B -> C -> D along three edges of the upper assembly (a Pi shape),
* a helix from D down around the belt k times to A',
* A' -> B' -> C' -> D' along the image edges,
* a parallel helix from D' back up to A.

Unrolled, the belt turns become a strip of 4k + 1 squares in which both
helices are straight segments of slope 1/(4k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import (
    ANGLE_TOL, EdgeInterior, FaceInterior, Mesh, SurfacePoint, Vertex, angle_sum,
)
from .unfold import (
    GeodesicPath, UnfoldingFrame, VerificationReport, is_simple, make_path,
    unfold_step, verify_geodesic, vertex_split,
)

# single source of truth: integer origins of the seven unit cubes
CUBE_ORIGINS: tuple[tuple[int, int, int], ...] = (
    (0, 0, 0),    # middle cube
    (0, 0, 1),    # top
    (0, -1, 1),   # top, front
    (1, 0, 1),    # top, right
    (0, 0, -1),   # bottom          = R(top)
    (0, -1, -1),  # bottom, front   = R(top, front)
    (-1, 0, -1),  # bottom, left    = R(top, right)
)

# belt corners (x, y) at s = 0, 1, 2, 3
BELT_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))

CHORD_TOL = 1e-9


class SelfIntersection(RuntimeError):
    pass


class NotAVertexNode(ValueError):
    pass


class Disconnected(RuntimeError):
    pass


# -- the surface ------------------------------------------------------------

def _square(origin, axis: int, side: int) -> list[tuple[int, int, int]]:
    """Corners of a unit cube face, counter-clockwise seen from outside."""
    u, w = (axis + 1) % 3, (axis + 2) % 3
    base = list(origin)
    base[axis] += side
    corners = []
    for du, dw in ((0, 0), (1, 0), (1, 1), (0, 1)):
        c = list(base)
        c[u] += du
        c[w] += dw
        corners.append(tuple(c))
    # (u, w, axis) is right-handed, so this order faces +axis
    return corners if side == 1 else corners[::-1]


def seven_cube_faces(origins=CUBE_ORIGINS):
    """Exposed unit squares of a union of unit cubes, as integer corner lists."""
    occupied = set(origins)
    squares = []
    for o in origins:
        for axis in range(3):
            for side in (0, 1):
                nb = list(o)
                nb[axis] += 1 if side else -1
                if tuple(nb) not in occupied:
                    squares.append(_square(o, axis, side))
    return squares


def build_seven_cubes(a: float = 1.0) -> Mesh:
    if not a > 0:
        raise ValueError("cube edge must be positive")
    index: dict[tuple[int, int, int], int] = {}
    faces = []
    for sq in seven_cube_faces():
        f = []
        for c in sq:
            f.append(index.setdefault(c, len(index)))
        faces.append(tuple(f))
    verts = np.zeros((len(index), 3))
    for c, i in index.items():
        verts[i] = c
    return Mesh(verts * float(a), faces, check_euler=True)


def _vertex_at(mesh: Mesh, a: float, xyz) -> int:
    target = np.asarray(xyz, float) * a
    d = np.linalg.norm(mesh.vertices - target, axis=1)
    i = int(np.argmin(d))
    if d[i] > mesh.tol:
        raise ValueError(f"no vertex at {xyz}")
    return i


def _face_with(mesh: Mesh, verts: set[int]) -> int:
    for f, face in enumerate(mesh.faces):
        if verts <= set(face):
            return f
    raise ValueError(f"no face contains vertices {sorted(verts)}")


def _edge_point(mesh: Mesh, lo: int, hi: int, frac: float) -> EdgeInterior:
    """Point at fraction ``frac`` from vertex ``lo`` to vertex ``hi``."""
    e = mesh.edge_between(lo, hi)
    if e is None:
        raise ValueError(f"vertices {lo}, {hi} are not adjacent")
    return EdgeInterior(e, frac if mesh.edges[e][0] == lo else 1.0 - frac)


# -- k-turn geodesic ----------------------------------------------------------

@dataclass
class KTurnPath:
    turns: int
    cube_edge: float
    path: GeodesicPath
    report: VerificationReport

    @property
    def length(self) -> float:
        return self.path.length


def _belt_xy(s: float) -> tuple[float, float]:
    j = int(math.floor(s)) % 4
    f = s - math.floor(s)
    (x0, y0), (x1, y1) = BELT_CORNERS[j], BELT_CORNERS[(j + 1) % 4]
    return x0 + f * (x1 - x0), y0 + f * (y1 - y0)


def _helix(mesh: Mesh, a: float, s0: int, z0: float, s1: int, z1: float):
    """Nodes strictly between belt parameters s0 and s1 and the link faces."""
    step = 1 if s1 > s0 else -1
    nodes, faces = [], []
    s = s0
    while s != s1:
        nxt = s + step
        j = min(s, nxt) % 4
        (x0, y0), (x1, y1) = BELT_CORNERS[j], BELT_CORNERS[(j + 1) % 4]
        corners = {_vertex_at(mesh, a, (x0, y0, 0)), _vertex_at(mesh, a, (x1, y1, 1))}
        faces.append(_face_with(mesh, corners))
        if nxt != s1:
            z = z0 + (z1 - z0) * (nxt - s0) / (s1 - s0)
            x, y = _belt_xy(nxt)
            lo = _vertex_at(mesh, a, (x, y, 0))
            hi = _vertex_at(mesh, a, (x, y, 1))
            nodes.append(_edge_point(mesh, lo, hi, z))
        s = nxt
    return nodes, faces


def k_turn_geodesic(mesh: Mesh, k: int, a: float | None = None) -> KTurnPath:
    """Closed geodesic winding ``k`` times around the middle cube."""
    if int(k) != k or k < 1:
        raise ValueError("k must be ≥ 1")
    k = int(k)
    if a is None:
        a = float(np.max(np.abs(mesh.vertices))) / 2.0
    V = lambda *xyz: _vertex_at(mesh, a, xyz)  # noqa: E731
    A, B, C, D = V(0, 0, 1), V(0, 0, 2), V(1, 0, 2), V(1, 0, 1)
    A2, B2, C2, D2 = V(1, 0, 0), V(1, 0, -1), V(0, 0, -1), V(0, 0, 0)

    def run_face(p, q):
        return min(f for f in range(len(mesh.faces)) if {p, q} <= set(mesh.faces[f]))

    nodes: list[SurfacePoint] = []
    faces: list[int] = []
    runs: list[bool] = []

    def edge_runs(chain):
        for p, q in zip(chain, chain[1:]):
            nodes.append(Vertex(p))
            faces.append(run_face(p, q))
            runs.append(True)

    def helix(start, s0, z0, s1, z1):
        mids, fs = _helix(mesh, a, s0, z0, s1, z1)
        nodes.append(Vertex(start))
        nodes.extend(mids)
        faces.extend(fs)
        runs.extend([False] * len(fs))

    edge_runs([A, B, C, D])
    helix(D, 1, 1.0, 4 * k + 1, 0.0)
    edge_runs([A2, B2, C2, D2])
    helix(D2, 4 * k, 0.0, 0, 1.0)
    nodes.append(Vertex(A))
    path = make_path(mesh, nodes, faces, closed=True, edge_runs=runs)
    if not is_simple(mesh, path):
        raise SelfIntersection(f"k-turn path for k = {k} intersects itself")
    return KTurnPath(k, a, path, verify_geodesic(mesh, path))


def k_turn_length(k: int, a: float = 1.0) -> float:
    """Closed-form length: two helices of the 4k+1-square strip plus two Pi loops."""
    return a * (2.0 * math.hypot(4 * k, 1.0) + 6.0)


def strip_development(k: int, a: float = 1.0):
    """Squares and the two helix segments of the unrolled belt, in (s, z)."""
    squares = [((i * a, 0.0), ((i + 1) * a, a)) for i in range(4 * k + 1)]
    seg_down = ((a, a), ((4 * k + 1) * a, 0.0))       # D to A'
    seg_up = ((0.0, a), (4 * k * a, 0.0))             # A to D'
    return squares, (seg_down, seg_up)


def vertex_passage_check(mesh: Mesh, path: GeodesicPath, i: int) -> bool:
    """Can the path pass through vertex node ``i`` as a geodesic?"""
    if not isinstance(path.nodes[i], Vertex):
        raise NotAVertexNode(f"node {i} is not a vertex")
    return min(vertex_split(mesh, path, i)) >= math.pi - ANGLE_TOL


def angle_bounded_predicate(mesh: Mesh) -> bool:
    """Every vertex has angle sum below 2 pi."""
    return all(angle_sum(mesh, v).angle_sum < 2 * math.pi - ANGLE_TOL
               for v in range(len(mesh.vertices)))


# -- shortest-path oracle -----------------------------------------------------

@dataclass
class ShortestOracleResult:
    source: SurfacePoint
    target: SurfacePoint
    depth: int
    length: float
    path: GeodesicPath
    via_vertex: int | None = None


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _in_cone(r, l, d, eps) -> bool:
    return _cross(r, d) >= -eps and _cross(d, l) >= -eps


def _cone_meet(cone, r2, l2, eps):
    """Intersection of two angular cones narrower than pi, or None."""
    r, l = cone
    nr = r2 if _in_cone(r, l, r2, eps) else (r if _in_cone(r2, l2, r, eps) else None)
    nl = l2 if _in_cone(r, l, l2, eps) else (l if _in_cone(r2, l2, l, eps) else None)
    if nr is None or nl is None or _cross(nr, nl) < -eps:
        return None
    return nr, nl


@dataclass
class _Chord:
    length: float
    faces: tuple[int, ...]
    crossings: tuple[tuple[int, float], ...]   # (half-edge, parameter from its tail)


def _chords(mesh: Mesh, p: SurfacePoint, q: SurfacePoint, max_crossings: int,
            bound: float = math.inf) -> list[_Chord | None]:
    """Shortest straight developed chord from p to q for each crossing count."""
    best: list[_Chord | None] = [None] * (max_crossings + 1)
    target_faces = set(mesh.point_faces(q))
    scale = max(1.0, mesh.diameter)
    eps = CHORD_TOL

    def limit():
        done = [c.length for c in best if c is not None]
        return min([bound] + done)

    def record(n, length, faces, hes):
        cur = best[n]
        if cur is None or length < cur.length - 1e-15 * scale or (
                abs(length - cur.length) <= 1e-15 * scale and faces < cur.faces):
            best[n] = _Chord(length, faces, hes)

    def finish(P, Q, segs, faces, hes):
        d = Q - P
        L = float(np.linalg.norm(d))
        if L > limit() + 1e-12 * scale:
            return
        params = []
        last = -eps
        for (a, b) in segs:
            e = b - a
            den = _cross(d, e)
            if abs(den) <= 1e-15 * scale * scale:
                return
            lam = _cross(a - P, e) / den
            mu = _cross(a - P, d) / den
            if mu < -eps or mu > 1 + eps or lam < last - eps or lam > 1 + eps:
                return
            last = lam
            params.append(min(max(mu, 0.0), 1.0))
        record(len(segs), L, faces, tuple(zip(hes, params)))

    def dfs(f, frame, P, cone, segs, faces, hes, entry):
        if f in target_faces:
            finish(P, frame.apply(mesh.point_uv(q, f)), segs, faces, hes)
        if len(segs) == max_crossings:
            return
        for h in mesh.face_he[f]:
            if h == entry:
                continue
            a = frame.apply(mesh.local_vertex(f, mesh.he_tail[h]))
            b = frame.apply(mesh.local_vertex(f, mesh.he_head[h]))
            ab = b - a
            t = min(max(float(np.dot(P - a, ab) / np.dot(ab, ab)), 0.0), 1.0)
            dist = float(np.linalg.norm(a + t * ab - P))
            if dist <= 1e-12 * scale or dist > limit() + 1e-12 * scale:
                continue
            ra, rb = (a - P) / np.linalg.norm(a - P), (b - P) / np.linalg.norm(b - P)
            # edges of a counter-clockwise face are seen clockwise from inside
            r2, l2 = (rb, ra) if _cross(ra, rb) < 0 else (ra, rb)
            new = (r2, l2) if cone is None else _cone_meet(cone, r2, l2, eps)
            if new is None:
                continue
            g = mesh.he_face[mesh.he_twin[h]]
            dfs(g, unfold_step(frame, mesh, h), P, new, segs + [(a, b)],
                faces + (g,), hes + (h,), mesh.he_twin[h])

    for f0 in sorted(set(mesh.point_faces(p))):
        frame = UnfoldingFrame.identity(f0)
        P = mesh.point_uv(p, f0)
        dfs(f0, frame, P, None, [], (f0,), (), -1)
    return best


def _prefix_min(chords):
    out, cur = [], None
    for c in chords:
        if c is not None and (cur is None or c.length < cur.length):
            cur = c
        out.append(cur)
    return out


def _chord_nodes(mesh: Mesh, chord: _Chord, p, q):
    nodes = [p]
    for h, mu in chord.crossings:
        if mu <= 1e-12:
            node = Vertex(mesh.he_tail[h])
        elif mu >= 1 - 1e-12:
            node = Vertex(mesh.he_head[h])
        else:
            e = mesh.he_edge[h]
            node = EdgeInterior(e, mu if mesh.edges[e][0] == mesh.he_tail[h] else 1.0 - mu)
        nodes.append(node)
    nodes.append(q)
    return nodes, list(chord.faces)


def local_shortest_oracle(mesh: Mesh, p: SurfacePoint, q: SurfacePoint,
                          max_crossings: int = 8) -> ShortestOracleResult:
    """Shortest surface path from p to q crossing at most ``max_crossings`` edges.

    Candidates are straight chords through every edge sequence of the given
    depth, and chord-vertex-chord routes through a single vertex whose angle
    sum is at least 2 pi.
    """
    pp, qp = mesh.point_position(p), mesh.point_position(q)
    if np.linalg.norm(pp - qp) <= mesh.tol:
        raise ValueError("source and target coincide")
    direct = [c for c in _chords(mesh, p, q, max_crossings) if c is not None]
    best_len, best_parts, via = math.inf, None, None
    if direct:
        c = min(direct, key=lambda c: (c.length, len(c.crossings)))
        best_len, best_parts = c.length, [(p, c, q)]
    for v in range(len(mesh.vertices)):
        if angle_sum(mesh, v).angle_sum < 2 * math.pi - ANGLE_TOL:
            continue
        vp = mesh.vertices[v]
        d1, d2 = float(np.linalg.norm(pp - vp)), float(np.linalg.norm(vp - qp))
        if d1 <= mesh.tol or d2 <= mesh.tol or d1 + d2 >= best_len - 1e-12:
            continue
        V = Vertex(v)
        leg1 = _prefix_min(_chords(mesh, p, V, max_crossings, best_len - d2))
        if leg1[-1] is None:
            continue
        leg2 = _prefix_min(_chords(mesh, V, q, max_crossings, best_len - leg1[-1].length))
        for c1 in range(max_crossings + 1):
            a1, a2 = leg1[c1], leg2[max_crossings - c1]
            if a1 is None or a2 is None:
                continue
            total = a1.length + a2.length
            if total < best_len - 1e-12:
                best_len, best_parts, via = total, [(p, a1, V), (V, a2, q)], v
    if best_parts is None:
        raise Disconnected(f"target not reachable within {max_crossings} crossings")
    nodes, faces = [p], []
    for src, chord, dst in best_parts:
        ns, fs = _chord_nodes(mesh, chord, src, dst)
        nodes.extend(ns[1:])
        faces.extend(fs)
    path = make_path(mesh, nodes, faces, closed=False)
    return ShortestOracleResult(p, q, max_crossings, best_len, path, via)


# -- arcs of a path -------------------------------------------------------------

def point_at_arclength(mesh: Mesh, path: GeodesicPath, s: float) -> SurfacePoint:
    """Surface point at distance ``s`` from the first node along ``path``."""
    acc = 0.0
    for i, f in enumerate(path.link_faces):
        a, b = path.link_segment(mesh, i)
        L = float(np.linalg.norm(b - a))
        if s <= acc + L or i == path.n_links - 1:
            lam = min(max((s - acc) / L, 0.0), 1.0)
            return mesh.locate(f, a + lam * (b - a))
        acc += L
    raise ValueError("empty path")


@lru_cache(maxsize=8)
def seven_cubes(a: float = 1.0) -> Mesh:
    return build_seven_cubes(a)
