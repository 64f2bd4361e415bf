"""Unfolding face sequences onto the plane, straight-line tracing, verification."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import (
    ANGLE_TOL, TWO_PI, EdgeInterior, FaceInterior, Mesh, SurfacePoint, Vertex,
    angle_sum,
)

VERTEX_HIT_TOL = 1e-12


class EdgeNotOnFace(ValueError):
    pass


class InvalidStart(ValueError):
    pass


class InconsistentPath(ValueError):
    pass


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _angle_between(a, b) -> float:
    return abs(math.atan2(_cross(a, b), float(np.dot(a, b))))


# -- frames -----------------------------------------------------------------

@dataclass(frozen=True)
class UnfoldingFrame:
    """Rotation + translation taking a face's local coordinates to the net plane."""

    rotation: float
    translation: tuple[float, float]
    face: int

    @classmethod
    def identity(cls, face: int) -> "UnfoldingFrame":
        return cls(0.0, (0.0, 0.0), face)

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return np.array([[c, -s], [s, c]])

    def apply(self, uv) -> np.ndarray:
        return self.matrix @ np.asarray(uv, float) + np.asarray(self.translation)

    def apply_vector(self, d) -> np.ndarray:
        return self.matrix @ np.asarray(d, float)

    def inverse_apply(self, xy) -> np.ndarray:
        return self.matrix.T @ (np.asarray(xy, float) - np.asarray(self.translation))


def unfold_step(frame: UnfoldingFrame, mesh: Mesh, edge: int) -> UnfoldingFrame:
    """Frame of the face across half-edge ``edge``, glued along that edge."""
    if mesh.he_face[edge] != frame.face:
        raise EdgeNotOnFace(f"half-edge {edge} is not on face {frame.face}")
    f = frame.face
    g = mesh.he_face[mesh.he_twin[edge]]
    tail, head = mesh.he_tail[edge], mesh.he_head[edge]
    A = frame.apply(mesh.local_vertex(f, tail))
    B = frame.apply(mesh.local_vertex(f, head))
    a = mesh.local_vertex(g, tail)
    b = mesh.local_vertex(g, head)
    rot = math.atan2(B[1] - A[1], B[0] - A[0]) - math.atan2(b[1] - a[1], b[0] - a[0])
    rot = wrap_angle(rot)
    c, s = math.cos(rot), math.sin(rot)
    t = A - np.array([c * a[0] - s * a[1], s * a[0] + c * a[1]])
    return UnfoldingFrame(rot, (float(t[0]), float(t[1])), g)


# -- paths ------------------------------------------------------------------

@dataclass
class GeodesicPath:
    """Broken line on the surface.

    ``link_faces[i]`` carries the segment from ``nodes[i]`` to ``nodes[i+1]``;
    an edge-run link lies along a mesh edge and names one incident face.
    A closed path repeats its first node at the end.
    """

    nodes: list[SurfacePoint]
    link_faces: list[int]
    closed: bool
    length: float
    crossing_sequence: list[int] = field(default_factory=list)
    edge_runs: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if not self.edge_runs:
            self.edge_runs = [False] * len(self.link_faces)
        if len(self.link_faces) != len(self.nodes) - 1:
            raise InconsistentPath("need exactly one face per link")

    @property
    def n_links(self) -> int:
        return len(self.link_faces)

    def link_segment(self, mesh: Mesh, i: int) -> tuple[np.ndarray, np.ndarray]:
        f = self.link_faces[i]
        return mesh.point_uv(self.nodes[i], f), mesh.point_uv(self.nodes[i + 1], f)


def make_path(mesh: Mesh, nodes: list[SurfacePoint], link_faces: list[int],
              closed: bool, edge_runs: list[bool] | None = None) -> GeodesicPath:
    """Assemble a path, computing its length and crossing sequence."""
    length = 0.0
    for i, f in enumerate(link_faces):
        a, b = mesh.point_uv(nodes[i], f), mesh.point_uv(nodes[i + 1], f)
        length += float(np.linalg.norm(b - a))
    crossings = []
    n = len(link_faces)
    idx = range(n) if closed else range(1, n)
    for i in idx:
        p = nodes[i]
        f_in, f_out = link_faces[i - 1], link_faces[i]
        if isinstance(p, EdgeInterior) and f_in != f_out:
            crossings.append(mesh.he_in_face(p.edge, f_in))
    return GeodesicPath(list(nodes), list(link_faces), closed, length, crossings,
                        list(edge_runs) if edge_runs else [False] * n)


class StopReason(enum.Enum):
    Closed = "closed"
    VertexHit = "vertex_hit"
    BudgetExhausted = "budget_exhausted"


@dataclass
class TraceOutcome:
    path: GeodesicPath
    stop_reason: StopReason


def _start_face(mesh: Mesh, start: SurfacePoint, direction, face: int | None) -> int:
    if isinstance(start, Vertex):
        raise InvalidStart("tracing from a vertex is not supported")
    if isinstance(start, FaceInterior):
        return start.face
    if face is not None:
        if face not in mesh.face_of_edge(start.edge):
            raise InvalidStart(f"face {face} does not contain edge {start.edge}")
        return face
    for f in mesh.face_of_edge(start.edge):
        h = mesh.he_in_face(start.edge, f)
        a = mesh.local_vertex(f, mesh.he_tail[h])
        b = mesh.local_vertex(f, mesh.he_head[h])
        if _cross(b - a, direction) > 0:
            return f
    raise InvalidStart("direction runs along the start edge")


def trace(mesh: Mesh, start: SurfacePoint, direction, max_crossings: int,
          max_length: float, face: int | None = None) -> TraceOutcome:
    """Follow the straight line from ``start`` across faces.

    ``direction`` is given in the local frame of the start face: the face of a
    ``FaceInterior`` point, or for an edge point ``face`` (default: the incident
    face the direction points into).
    """
    d = np.asarray(direction, float)
    nd = float(np.linalg.norm(d))
    if nd == 0 or max_crossings <= 0 or max_length <= 0:
        raise InvalidStart("direction must be nonzero and budgets positive")
    d = d / nd
    f0 = _start_face(mesh, start, d, face)
    d0 = d.copy()
    tol = mesh.tol
    vtol = VERTEX_HIT_TOL * max(1.0, mesh.diameter)

    f = f0
    p = mesh.point_uv(start, f)
    p_start = p.copy()
    entry = mesh.he_in_face(start.edge, f) if isinstance(start, EdgeInterior) else None
    nodes: list[SurfacePoint] = [start]
    faces: list[int] = []
    remaining = float(max_length)
    crossings = 0

    def finish(reason: StopReason, closed=False) -> TraceOutcome:
        return TraceOutcome(make_path(mesh, nodes, faces, closed), reason)

    while True:
        uv = mesh.face_uv[f]
        best = None
        for h in mesh.face_he[f]:
            if h == entry:
                continue
            a = mesh.local_vertex(f, mesh.he_tail[h])
            b = mesh.local_vertex(f, mesh.he_head[h])
            e = b - a
            den = _cross(d, e)
            if abs(den) < 1e-15:
                continue
            w = a - p
            s = _cross(w, e) / den
            u = _cross(w, d) / den
            if s <= tol * 1e-3 or u < -1e-9 or u > 1 + 1e-9:
                continue
            if best is None or s < best[0]:
                best = (s, u, h, float(np.linalg.norm(e)))
        if best is None:
            raise InconsistentPath(f"ray leaves face {f} without crossing an edge")
        s, u, h, elen = best

        # closure at a face-interior start point
        if isinstance(start, FaceInterior) and f == f0 and faces:
            w = p_start - p
            along = float(np.dot(w, d))
            if 0 < along <= s + tol and abs(_cross(d, w)) <= tol and _angle_between(d, d0) <= ANGLE_TOL:
                if along <= remaining:
                    faces.append(f)
                    nodes.append(start)
                    return finish(StopReason.Closed, closed=True)

        if s > remaining:
            end = p + remaining * d
            faces.append(f)
            nodes.append(mesh.locate(f, end))
            return finish(StopReason.BudgetExhausted)

        if u * elen <= vtol or (1 - u) * elen <= vtol:
            faces.append(f)
            nodes.append(Vertex(mesh.he_tail[h] if u * elen <= vtol else mesh.he_head[h]))
            return finish(StopReason.VertexHit)

        remaining -= s
        eid = mesh.he_edge[h]
        t_edge = u if mesh.edges[eid][0] == mesh.he_tail[h] else 1.0 - u
        faces.append(f)
        twin = mesh.he_twin[h]
        g = mesh.he_face[twin]
        # rotate the direction into the twin face's frame
        a = mesh.local_vertex(f, mesh.he_tail[h])
        b = mesh.local_vertex(f, mesh.he_head[h])
        a2 = mesh.local_vertex(g, mesh.he_tail[h])
        b2 = mesh.local_vertex(g, mesh.he_head[h])
        rot = math.atan2(b2[1] - a2[1], b2[0] - a2[0]) - math.atan2(b[1] - a[1], b[0] - a[0])
        c, sn = math.cos(rot), math.sin(rot)
        d = np.array([c * d[0] - sn * d[1], sn * d[0] + c * d[1]])
        p = (1 - u) * a2 + u * b2
        crossings += 1

        if (isinstance(start, EdgeInterior) and eid == start.edge and g == f0
                and abs(t_edge - start.t) * elen <= tol and _angle_between(d, d0) <= ANGLE_TOL):
            nodes.append(start)
            return finish(StopReason.Closed, closed=True)
        nodes.append(EdgeInterior(eid, t_edge))
        if crossings >= max_crossings:
            return finish(StopReason.BudgetExhausted)
        f, entry = g, twin


# -- development ------------------------------------------------------------

@dataclass
class Development:
    frames: list[UnfoldingFrame]
    polyline: np.ndarray

    def straightness(self) -> float:
        """Largest distance of a polyline point from the end-to-end chord."""
        p0, p1 = self.polyline[0], self.polyline[-1]
        chord = p1 - p0
        L = float(np.linalg.norm(chord))
        if L == 0:
            return float(np.max(np.linalg.norm(self.polyline - p0, axis=1)))
        return max(abs(_cross(chord, q - p0)) / L for q in self.polyline)


def develop(mesh: Mesh, path: GeodesicPath, frame: UnfoldingFrame | None = None) -> Development:
    """Lay the faces visited by ``path`` out in one plane."""
    if not path.link_faces:
        raise InconsistentPath("empty path")
    frames = [frame or UnfoldingFrame.identity(path.link_faces[0])]
    if frames[0].face != path.link_faces[0]:
        raise InconsistentPath("initial frame is for a different face")
    for i in range(1, path.n_links):
        prev_f, f = path.link_faces[i - 1], path.link_faces[i]
        node = path.nodes[i]
        if f == prev_f:
            frames.append(frames[-1])
            continue
        if not isinstance(node, EdgeInterior):
            raise InconsistentPath(f"node {i} cannot be unfolded (not an edge point)")
        if f not in mesh.face_of_edge(node.edge) or prev_f not in mesh.face_of_edge(node.edge):
            raise InconsistentPath(f"node {i} is not on an edge shared by its links")
        frames.append(unfold_step(frames[-1], mesh, mesh.he_in_face(node.edge, prev_f)))
    pts = [frames[0].apply(mesh.point_uv(path.nodes[0], path.link_faces[0]))]
    for i, fr in enumerate(frames):
        pts.append(fr.apply(mesh.point_uv(path.nodes[i + 1], path.link_faces[i])))
    return Development(frames, np.array(pts))


# -- verification -----------------------------------------------------------

def vertex_split(mesh: Mesh, path: GeodesicPath, i: int) -> tuple[float, float]:
    """The two angular parts into which the links at vertex node ``i`` cut its fan."""
    node = path.nodes[i]
    if not isinstance(node, Vertex):
        raise ValueError(f"node {i} is not a vertex")
    n = path.n_links
    if path.closed:
        i_in, i_out = (i - 1) % n, i % n
        prev_node = path.nodes[i_in]
        next_node = path.nodes[i_out + 1]
    else:
        if i == 0 or i == n:
            raise ValueError("endpoint of an open path has no passage")
        i_in, i_out = i - 1, i
        prev_node, next_node = path.nodes[i - 1], path.nodes[i + 1]
    v = node.vertex
    fan = mesh.vertex_fan(v)
    starts, total = {}, 0.0
    for h in fan:
        f = mesh.he_face[h]
        starts[f] = (total, h)
        total += mesh.face_angle(f, v)

    def position(f: int, other: SurfacePoint) -> float:
        if f not in starts:
            raise InconsistentPath(f"link face {f} does not touch vertex {v}")
        base, h = starts[f]
        o = mesh.local_vertex(f, v)
        ref = mesh.local_vertex(f, mesh.he_head[h]) - o
        d = mesh.point_uv(other, f) - o
        ang = math.atan2(_cross(ref, d), float(np.dot(ref, d)))
        if ang < -1e-12:
            ang += TWO_PI
        return base + min(max(ang, 0.0), mesh.face_angle(f, v))

    p_in = position(path.link_faces[i_in], prev_node)
    p_out = position(path.link_faces[i_out], next_node)
    part = (p_out - p_in) % total
    return part, total - part


@dataclass
class VerificationReport:
    node_deviation: dict[int, float]
    containment_violations: list[int]
    vertex_nodes: list[tuple[int, float, tuple[float, float], bool]]
    simple: bool
    closed: bool
    failures: list[str]

    @property
    def accepted(self) -> bool:
        return not self.failures

    @property
    def max_deviation(self) -> float:
        return max(self.node_deviation.values(), default=0.0)


def _point_in_polygon(poly: np.ndarray, p, tol: float) -> bool:
    """Inside or on the boundary of a counter-clockwise convex/simple polygon."""
    n = len(poly)
    inside = False
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        seg = b - a
        L2 = float(np.dot(seg, seg))
        s = min(max(float(np.dot(p - a, seg)) / L2, 0.0), 1.0)
        if np.linalg.norm(a + s * seg - p) <= tol:
            return True
        if (a[1] > p[1]) != (b[1] > p[1]):
            x = a[0] + (p[1] - a[1]) * seg[0] / seg[1]
            if x > p[0]:
                inside = not inside
    return inside


def _on_edge_of_face(mesh: Mesh, f: int, a, b, tol: float) -> bool:
    for h in mesh.face_he[f]:
        p = mesh.local_vertex(f, mesh.he_tail[h])
        q = mesh.local_vertex(f, mesh.he_head[h])
        e = q - p
        L = float(np.linalg.norm(e))
        if abs(_cross(e, a - p)) / L <= tol and abs(_cross(e, b - p)) / L <= tol:
            sa = float(np.dot(a - p, e)) / L ** 2
            sb = float(np.dot(b - p, e)) / L ** 2
            if -1e-9 <= sa <= 1 + 1e-9 and -1e-9 <= sb <= 1 + 1e-9:
                return True
    return False


def verify_geodesic(mesh: Mesh, path: GeodesicPath) -> VerificationReport:
    tol = mesh.tol
    failures: list[str] = []
    n = path.n_links
    containment: list[int] = []
    for i, f in enumerate(path.link_faces):
        ok = True
        for node in (path.nodes[i], path.nodes[i + 1]):
            if f not in mesh.point_faces(node):
                ok = False
        if ok:
            a, b = path.link_segment(mesh, i)
            along_edge = _on_edge_of_face(mesh, f, a, b, tol)
            if path.edge_runs[i]:
                ok = along_edge
            else:
                ok = (not along_edge) and _point_in_polygon(mesh.face_uv[f], 0.5 * (a + b), tol)
        if not ok:
            containment.append(i)
            failures.append(f"link {i} is not contained in face {f}")

    deviations: dict[int, float] = {}
    vertex_nodes = []
    node_idx = range(n) if path.closed else range(1, n)
    for i in node_idx:
        node = path.nodes[i]
        i_in, i_out = (i - 1) % n, i
        if isinstance(node, Vertex):
            parts = vertex_split(mesh, path, i)
            total = angle_sum(mesh, node.vertex).angle_sum
            ok = min(parts) >= math.pi - ANGLE_TOL
            vertex_nodes.append((i, total, parts, ok))
            if not ok:
                failures.append(f"vertex node {i} (angle sum {total:.6f}) splits into "
                                f"{parts[0]:.6f} + {parts[1]:.6f}")
            continue
        if path.edge_runs[i_in] or path.edge_runs[i_out] or i_in in containment or i_out in containment:
            continue
        f, g = path.link_faces[i_in], path.link_faces[i_out]
        prev_node = path.nodes[i_in]
        next_node = path.nodes[i_out + 1]
        here = mesh.point_uv(node, f)
        d_in = here - mesh.point_uv(prev_node, f)
        if f == g:
            d_out = mesh.point_uv(next_node, f) - here
        elif isinstance(node, EdgeInterior) and g in mesh.face_of_edge(node.edge):
            fr = unfold_step(UnfoldingFrame.identity(f), mesh, mesh.he_in_face(node.edge, f))
            d_out = fr.apply(mesh.point_uv(next_node, g)) - fr.apply(mesh.point_uv(node, g))
        else:
            deviations[i] = math.pi
            failures.append(f"node {i} does not join its links")
            continue
        dev = _angle_between(d_in, d_out)
        deviations[i] = dev
        if dev >= ANGLE_TOL:
            failures.append(f"reflection violated at node {i} (deviation {dev:.3e} rad)")

    simple = is_simple(mesh, path)
    if not simple:
        failures.append("path intersects itself")
    if path.closed and mesh.point_position(path.nodes[0]) is not None:
        if np.linalg.norm(mesh.point_position(path.nodes[0]) -
                          mesh.point_position(path.nodes[-1])) > tol:
            failures.append("closed path does not return to its first node")
    return VerificationReport(deviations, containment, vertex_nodes, simple, path.closed, failures)


def _seg_distance(p, q, r, s) -> float:
    d1, d2 = _cross(q - p, r - p), _cross(q - p, s - p)
    d3, d4 = _cross(s - r, p - r), _cross(s - r, q - r)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return 0.0

    def pt_seg(x, a, b):
        e = b - a
        L2 = float(np.dot(e, e))
        t = 0.0 if L2 == 0 else min(max(float(np.dot(x - a, e)) / L2, 0.0), 1.0)
        return float(np.linalg.norm(a + t * e - x))

    return min(pt_seg(p, r, s), pt_seg(q, r, s), pt_seg(r, p, q), pt_seg(s, p, q))


def is_simple(mesh: Mesh, path: GeodesicPath, tol: float = 1e-12) -> bool:
    """No two links meet except consecutive links at their shared node."""
    n = path.n_links
    tol = tol * max(1.0, mesh.diameter)
    per_face: dict[int, list[tuple[int, np.ndarray, np.ndarray]]] = {}
    for i, f in enumerate(path.link_faces):
        faces = [f]
        if path.edge_runs[i]:
            a, b = path.nodes[i], path.nodes[i + 1]
            faces = sorted(set(mesh.point_faces(a)) & set(mesh.point_faces(b)))
        for g in faces:
            a = mesh.point_uv(path.nodes[i], g)
            b = mesh.point_uv(path.nodes[i + 1], g)
            per_face.setdefault(g, []).append((i, a, b))

    def consecutive(i, j):
        return abs(i - j) == 1 or (path.closed and {i, j} == {0, n - 1} and n > 1)

    for segs in per_face.values():
        for x in range(len(segs)):
            i, a, b = segs[x]
            for y in range(x + 1, len(segs)):
                j, c, d = segs[y]
                if i == j:
                    continue
                if consecutive(i, j):
                    # only collinear back-tracking can overlap
                    u, w = b - a, d - c
                    if abs(_cross(u, w)) <= tol * np.linalg.norm(u) * np.linalg.norm(w) \
                            and float(np.dot(u, w)) < 0:
                        return False
                    continue
                if _seg_distance(a, b, c, d) <= tol:
                    return False
    # distinct path portions must not share a vertex or an edge point
    count = n if path.closed else n + 1
    pos = [mesh.point_position(path.nodes[i]) for i in range(count)]
    for i in range(count):
        for j in range(i + 1, count):
            if np.linalg.norm(pos[i] - pos[j]) <= tol:
                return False
    return True


# -- JSON -------------------------------------------------------------------

def point_to_json(p: SurfacePoint) -> dict:
    if isinstance(p, Vertex):
        return {"kind": "vertex", "vertex": p.vertex}
    if isinstance(p, EdgeInterior):
        return {"kind": "edge", "edge": p.edge, "t": p.t}
    return {"kind": "face", "face": p.face, "uv": [p.uv[0], p.uv[1]]}


def point_from_json(d: dict) -> SurfacePoint:
    kind = d["kind"]
    if kind == "vertex":
        return Vertex(int(d["vertex"]))
    if kind == "edge":
        return EdgeInterior(int(d["edge"]), float(d["t"]))
    if kind == "face":
        return FaceInterior(int(d["face"]), (float(d["uv"][0]), float(d["uv"][1])))
    raise ValueError(f"unknown point kind {kind!r}")


def path_to_json(mesh: Mesh, path: GeodesicPath) -> dict:
    return {
        "mesh_hash": mesh.content_hash(),
        "closed": path.closed,
        "length": path.length,
        "nodes": [point_to_json(p) for p in path.nodes],
        "links": [{"face": f, "edge_run": bool(r)} for f, r in zip(path.link_faces, path.edge_runs)],
        "crossings": list(path.crossing_sequence),
    }


def path_from_json(mesh: Mesh, data: dict) -> GeodesicPath:
    nodes = [point_from_json(d) for d in data["nodes"]]
    links = data["links"]
    return make_path(mesh, nodes, [int(l["face"]) for l in links], bool(data["closed"]),
                     [bool(l.get("edge_run", False)) for l in links])
