"""Polyhedral surface model: OFF I/O, builtin solids, angle sums and defects.

Faces are stored as oriented polygons (counter-clockwise seen from outside).
Every face carries a fixed local 2D frame with its origin at the first vertex
and the x-axis along the first edge, so all planar computations downstream are
deterministic.
"""
from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-9
PHI = (math.sqrt(5.0) + 1.0) / 2.0


class MeshError(ValueError):
    """Base class for mesh construction and ingestion failures."""


class ParseError(MeshError):
    pass


class NonManifold(MeshError):
    pass


class NonPlanarFace(MeshError):
    pass


class OpenSurface(MeshError):
    pass


class NonAcuteTriangle(MeshError):
    pass


# -- surface points ---------------------------------------------------------

@dataclass(frozen=True)
class FaceInterior:
    face: int
    uv: tuple[float, float]


@dataclass(frozen=True)
class EdgeInterior:
    edge: int
    t: float

    def __post_init__(self):
        if not 0.0 < self.t < 1.0:
            raise ValueError(f"edge parameter must lie in (0, 1), got {self.t}")


@dataclass(frozen=True)
class Vertex:
    vertex: int


SurfacePoint = FaceInterior | EdgeInterior | Vertex


@dataclass(frozen=True)
class AngleReport:
    vertex: int
    angle_sum: float
    defect: float


# -- mesh -------------------------------------------------------------------

@dataclass(eq=False)
class Mesh:
    """Closed oriented polygonal surface.

    Half-edge ``h`` of face ``f`` runs from ``faces[f][i]`` to
    ``faces[f][i+1]``; ids are assigned face by face.  An undirected edge is
    oriented like its lower-numbered half-edge, and ``EdgeInterior.t`` is
    measured along that orientation.
    """

    vertices: np.ndarray
    faces: list[tuple[int, ...]]
    check_euler: bool = False
    # derived
    he_face: list[int] = field(init=False, repr=False)
    he_tail: list[int] = field(init=False, repr=False)
    he_head: list[int] = field(init=False, repr=False)
    he_twin: list[int] = field(init=False, repr=False)
    he_edge: list[int] = field(init=False, repr=False)
    face_he: list[list[int]] = field(init=False, repr=False)
    edges: list[tuple[int, int]] = field(init=False, repr=False)
    edge_he: list[tuple[int, int]] = field(init=False, repr=False)
    dihedral: np.ndarray = field(init=False, repr=False)
    face_uv: list[np.ndarray] = field(init=False, repr=False)
    face_origin: np.ndarray = field(init=False, repr=False)
    face_axes: np.ndarray = field(init=False, repr=False)
    normals: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshError("vertices must be an (n, 3) array")
        self.faces = [tuple(int(i) for i in f) for f in self.faces]
        nv = len(self.vertices)
        for f in self.faces:
            if len(f) < 3 or len(set(f)) != len(f):
                raise MeshError(f"degenerate face {f}")
            if min(f) < 0 or max(f) >= nv:
                raise MeshError(f"face {f} references a missing vertex")
        self._build_halfedges()
        self._build_frames()
        self._check_vertex_links()
        self._build_dihedrals()
        if self.check_euler and self.euler_characteristic() != 2:
            raise NonManifold("surface is not a sphere (V - E + F != 2)")

    # construction helpers
    def _build_halfedges(self):
        self.he_face, self.he_tail, self.he_head, self.face_he = [], [], [], []
        directed: dict[tuple[int, int], int] = {}
        for fi, f in enumerate(self.faces):
            hs = []
            for i, a in enumerate(f):
                b = f[(i + 1) % len(f)]
                if (a, b) in directed:
                    raise NonManifold(
                        f"directed edge {a}->{b} used twice (bad orientation or >2 faces)")
                h = len(self.he_face)
                directed[(a, b)] = h
                self.he_face.append(fi)
                self.he_tail.append(a)
                self.he_head.append(b)
                hs.append(h)
            self.face_he.append(hs)
        self.he_twin = [-1] * len(self.he_face)
        for (a, b), h in directed.items():
            t = directed.get((b, a))
            if t is None:
                raise OpenSurface(f"edge {a}-{b} has a single incident face")
            self.he_twin[h] = t
        self.edges, self.edge_he = [], []
        self.he_edge = [-1] * len(self.he_face)
        for h in range(len(self.he_face)):
            t = self.he_twin[h]
            if h < t:
                self.he_edge[h] = self.he_edge[t] = len(self.edges)
                self.edges.append((self.he_tail[h], self.he_head[h]))
                self.edge_he.append((h, t))

    def _build_frames(self):
        diam = self.diameter
        self.face_uv, origins, axes, normals = [], [], [], []
        for f in self.faces:
            pts = self.vertices[list(f)]
            n = np.zeros(3)
            for i in range(len(f)):  # Newell
                p, q = pts[i], pts[(i + 1) % len(f)]
                n += np.cross(p, q)
            norm = np.linalg.norm(n)
            if norm <= 1e-14 * diam * diam:
                raise NonPlanarFace(f"face {f} has zero area")
            n /= norm
            x = pts[1] - pts[0]
            x -= n * np.dot(x, n)
            x /= np.linalg.norm(x)
            y = np.cross(n, x)
            rel = pts - pts[0]
            resid = np.abs(rel @ n).max()
            if resid > 1e-9 * diam:
                raise NonPlanarFace(f"face {f} is not planar (residual {resid:.3g})")
            uv = np.column_stack([rel @ x, rel @ y])
            if _polygon_area(uv) <= 0 or not _is_simple_polygon(uv):
                raise NonPlanarFace(f"face {f} is not a simple polygon")
            self.face_uv.append(uv)
            origins.append(pts[0])
            axes.append(np.vstack([x, y]))
            normals.append(n)
        self.face_origin = np.array(origins)
        self.face_axes = np.array(axes)
        self.normals = np.array(normals)

    def _check_vertex_links(self):
        out: dict[int, list[int]] = {}
        for h, v in enumerate(self.he_tail):
            out.setdefault(v, []).append(h)
        for v in range(len(self.vertices)):
            hs = out.get(v)
            if not hs:
                raise NonManifold(f"vertex {v} is not used by any face")
            if len(self.vertex_fan(v)) != len(hs):
                raise NonManifold(f"vertex {v} has a disconnected face fan")

    def _build_dihedrals(self):
        dih = np.empty(len(self.edges))
        for e, (h, t) in enumerate(self.edge_he):
            n1, n2 = self.normals[self.he_face[h]], self.normals[self.he_face[t]]
            d = self.vertices[self.he_head[h]] - self.vertices[self.he_tail[h]]
            d /= np.linalg.norm(d)
            # signed turn of the outward normal about the edge direction
            turn = math.atan2(float(np.dot(np.cross(n1, n2), d)), float(np.dot(n1, n2)))
            dih[e] = math.pi - turn
        self.dihedral = dih

    # basic queries
    @property
    def diameter(self) -> float:
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(span))

    @property
    def tol(self) -> float:
        return 1e-9 * max(self.diameter, 1e-300)

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def next_he(self, h: int) -> int:
        hs = self.face_he[self.he_face[h]]
        return hs[(hs.index(h) + 1) % len(hs)]

    def prev_he(self, h: int) -> int:
        hs = self.face_he[self.he_face[h]]
        return hs[hs.index(h) - 1]

    def vertex_fan(self, v: int) -> list[int]:
        """Outgoing half-edges of ``v`` in counter-clockwise order around it."""
        start = self.he_tail.index(v)
        fan, h = [], start
        while True:
            fan.append(h)
            h = self.he_twin[self.prev_he(h)]
            if h == start or len(fan) > len(self.he_face):
                break
        return fan

    def face_of_edge(self, e: int) -> tuple[int, int]:
        h, t = self.edge_he[e]
        return self.he_face[h], self.he_face[t]

    def edge_between(self, a: int, b: int) -> int | None:
        for e, (p, q) in enumerate(self.edges):
            if {p, q} == {a, b}:
                return e
        return None

    def he_in_face(self, e: int, f: int) -> int:
        for h in self.edge_he[e]:
            if self.he_face[h] == f:
                return h
        raise ValueError(f"edge {e} is not on face {f}")

    def local_vertex(self, f: int, v: int) -> np.ndarray:
        return self.face_uv[f][self.faces[f].index(v)]

    def to_local(self, f: int, p: np.ndarray) -> np.ndarray:
        return self.face_axes[f] @ (np.asarray(p, float) - self.face_origin[f])

    def to_world(self, f: int, uv) -> np.ndarray:
        return self.face_origin[f] + np.asarray(uv, float) @ self.face_axes[f]

    def face_angle(self, f: int, v: int) -> float:
        uv = self.face_uv[f]
        k = self.faces[f].index(v)
        a = uv[(k + 1) % len(uv)] - uv[k]
        b = uv[k - 1] - uv[k]
        ang = math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])
        return ang if ang > 0 else ang + TWO_PI

    def is_convex(self) -> bool:
        return bool(np.all(self.dihedral < math.pi - ANGLE_TOL))

    # surface points
    def point_position(self, p: SurfacePoint) -> np.ndarray:
        if isinstance(p, Vertex):
            return self.vertices[p.vertex].copy()
        if isinstance(p, EdgeInterior):
            a, b = self.edges[p.edge]
            return (1 - p.t) * self.vertices[a] + p.t * self.vertices[b]
        return self.to_world(p.face, p.uv)

    def point_faces(self, p: SurfacePoint) -> list[int]:
        if isinstance(p, Vertex):
            return [self.he_face[h] for h in self.vertex_fan(p.vertex)]
        if isinstance(p, EdgeInterior):
            return list(self.face_of_edge(p.edge))
        return [p.face]

    def point_uv(self, p: SurfacePoint, f: int) -> np.ndarray:
        """Local coordinates of ``p`` in face ``f`` (which must contain it)."""
        if isinstance(p, Vertex):
            return self.local_vertex(f, p.vertex).copy()
        if isinstance(p, EdgeInterior):
            a, b = self.edges[p.edge]
            return (1 - p.t) * self.local_vertex(f, a) + p.t * self.local_vertex(f, b)
        if p.face != f:
            raise ValueError(f"face point on {p.face} queried in face {f}")
        return np.asarray(p.uv, float)

    def locate(self, f: int, uv, tol: float | None = None) -> SurfacePoint:
        """Classify a point of face ``f`` as vertex, edge-interior or face-interior."""
        tol = self.tol if tol is None else tol
        uv = np.asarray(uv, float)
        poly = self.face_uv[f]
        for k, v in enumerate(self.faces[f]):
            if np.linalg.norm(poly[k] - uv) <= tol:
                return Vertex(v)
        for h in self.face_he[f]:
            a = self.local_vertex(f, self.he_tail[h])
            b = self.local_vertex(f, self.he_head[h])
            d = b - a
            s = float(np.dot(uv - a, d) / np.dot(d, d))
            if 0.0 < s < 1.0 and abs(_cross(d, uv - a)) / math.sqrt(np.dot(d, d)) <= tol:
                e = self.he_edge[h]
                return EdgeInterior(e, s if self.edges[e][0] == self.he_tail[h] else 1.0 - s)
        return FaceInterior(f, (float(uv[0]), float(uv[1])))

    # serialization
    def to_off(self) -> str:
        buf = io.StringIO()
        buf.write("OFF\n")
        buf.write(f"{len(self.vertices)} {len(self.faces)} {len(self.edges)}\n")
        for p in self.vertices:
            buf.write(" ".join(f"{float(c):.17g}" for c in p) + "\n")
        for f in self.faces:
            buf.write(f"{len(f)} " + " ".join(str(i) for i in f) + "\n")
        return buf.getvalue()

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_off().encode("ascii")).hexdigest()


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _polygon_area(uv: np.ndarray) -> float:
    x, y = uv[:, 0], uv[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _is_simple_polygon(uv: np.ndarray) -> bool:
    n = len(uv)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_touch(uv[i], uv[(i + 1) % n], uv[j], uv[(j + 1) % n]):
                return False
    return True


def _segments_touch(p, q, r, s) -> bool:
    d1, d2 = _cross(q - p, r - p), _cross(q - p, s - p)
    d3, d4 = _cross(s - r, p - r), _cross(s - r, q - r)
    return d1 * d2 <= 0 and d3 * d4 <= 0 and not (d1 == d2 == 0 and
                                                     (max(p[0], q[0]) < min(r[0], s[0]) or
                                                      max(r[0], s[0]) < min(p[0], q[0])))


# -- OFF I/O ----------------------------------------------------------------

def load_off(text: str | Iterable[str]) -> Mesh:
    """Parse ASCII OFF text into a validated :class:`Mesh`."""
    if not isinstance(text, str):
        text = "".join(text)
    tokens: list[str] = []
    header_seen = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if not line.startswith("OFF"):
                raise ParseError("missing OFF header")
            header_seen = True
            line = line[3:].strip()
            if not line:
                continue
        tokens.extend(line.split())
    if not header_seen:
        raise ParseError("missing OFF header")
    try:
        nv, nf = int(tokens[0]), int(tokens[1])
        pos = 3
        verts = [[float(tokens[pos + 3 * i + k]) for k in range(3)] for i in range(nv)]
        pos += 3 * nv
        faces = []
        for _ in range(nf):
            k = int(tokens[pos])
            faces.append(tuple(int(tokens[pos + 1 + j]) for j in range(k)))
            pos += 1 + k
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed OFF body: {exc}") from exc
    if pos != len(tokens):
        # trailing per-face colour values are tolerated only if the counts agree
        raise ParseError("unexpected trailing data in OFF body")
    return Mesh(np.array(verts, dtype=float).reshape(nv, 3), faces)


def save_off(mesh: Mesh) -> str:
    return mesh.to_off()


# -- angles -----------------------------------------------------------------

def angle_sum(mesh: Mesh, v: int) -> AngleReport:
    total = sum(mesh.face_angle(mesh.he_face[h], v) for h in mesh.vertex_fan(v))
    return AngleReport(v, total, TWO_PI - total)


def angle_census(mesh: Mesh) -> list[AngleReport]:
    return [angle_sum(mesh, v) for v in range(len(mesh.vertices))]


def is_disphenoid(mesh: Mesh) -> bool:
    if len(mesh.vertices) != 4:
        return False
    return all(abs(r.angle_sum - math.pi) <= ANGLE_TOL for r in angle_census(mesh))


# -- builtins ---------------------------------------------------------------

def hull_mesh(points) -> Mesh:
    """Mesh of the convex hull of ``points`` with coplanar facets merged."""
    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    scale = float(np.linalg.norm(pts.max(0) - pts.min(0)))
    groups: list[tuple[np.ndarray, set[int]]] = []
    for simplex, eq in zip(hull.simplices, hull.equations):
        for n, members in groups:
            if np.allclose(n, eq, atol=1e-9 * max(scale, 1.0)):
                members.update(int(i) for i in simplex)
                break
        else:
            groups.append((eq, {int(i) for i in simplex}))
    used = sorted({i for _, m in groups for i in m})
    remap = {old: new for new, old in enumerate(used)}
    faces = []
    for eq, members in groups:
        n = eq[:3]
        ids = sorted(members)
        c = pts[ids].mean(axis=0)
        x = pts[ids[0]] - c
        x /= np.linalg.norm(x)
        y = np.cross(n, x)
        ang = [math.atan2(np.dot(pts[i] - c, y), np.dot(pts[i] - c, x)) for i in ids]
        ordered = [i for _, i in sorted(zip(ang, ids))]
        faces.append(tuple(remap[i] for i in ordered))
    faces.sort(key=lambda f: (min(f), f))
    faces = [_rotate_min_first(f) for f in faces]
    return Mesh(pts[used], faces)


def _rotate_min_first(f: tuple[int, ...]) -> tuple[int, ...]:
    k = f.index(min(f))
    return f[k:] + f[:k]


def regular_tetrahedron(a: float = 1.0) -> Mesh:
    return disphenoid(a, a, a)


def cube(a: float = 1.0) -> Mesh:
    v = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float) * a
    faces = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    return Mesh(v, faces)


def octahedron(a: float = 1.0) -> Mesh:
    r = a / math.sqrt(2.0)
    v = [[r, 0, 0], [-r, 0, 0], [0, r, 0], [0, -r, 0], [0, 0, r], [0, 0, -r]]
    return hull_mesh(v)


def icosahedron(a: float = 1.0) -> Mesh:
    h = a / 2.0
    v = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            v += [[0, s1 * h, s2 * h * PHI], [s1 * h, s2 * h * PHI, 0], [s2 * h * PHI, 0, s1 * h]]
    return hull_mesh(v)


def dodecahedron(a: float = 1.0) -> Mesh:
    # (±1,±1,±1), (0,±1/φ,±φ) and cyclic permutations have edge 2/φ
    s = a * PHI / 2.0
    v = [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            v += [[0, s1 / PHI, s2 * PHI], [s1 / PHI, s2 * PHI, 0], [s2 * PHI, 0, s1 / PHI]]
    return hull_mesh(np.array(v) * s)


def disphenoid_vertices(p: float, q: float, r: float) -> np.ndarray:
    """Vertices A, B, C, D with |AB| = |CD| = p, |AC| = |BD| = q, |BC| = |AD| = r."""
    sides = sorted((p, q, r))
    if min(sides) <= 0 or sides[0] ** 2 + sides[1] ** 2 <= sides[2] ** 2 * (1 + 1e-12):
        raise NonAcuteTriangle(f"non-acute triangle ({p}, {q}, {r})")
    x = math.sqrt((q * q + r * r - p * p) / 8.0)
    y = math.sqrt((p * p + r * r - q * q) / 8.0)
    z = math.sqrt((p * p + q * q - r * r) / 8.0)
    return np.array([[x, y, z], [x, -y, -z], [-x, y, -z], [-x, -y, z]])


def disphenoid(p: float, q: float, r: float) -> Mesh:
    v = disphenoid_vertices(p, q, r)
    faces = []
    for tri in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        a, b, c = (v[i] for i in tri)
        other = v[6 - sum(tri)]
        outward = np.dot(np.cross(b - a, c - a), a - other) > 0
        faces.append(tri if outward else (tri[0], tri[2], tri[1]))
    return Mesh(v, faces)


def right_pyramid(base_side: float, lateral_edge: float) -> Mesh:
    """Triangular pyramid: equilateral base, apex above the base centroid."""
    circum = base_side / math.sqrt(3.0)
    if lateral_edge <= circum:
        raise MeshError("lateral edge too short for the base")
    height = math.sqrt(lateral_edge ** 2 - circum ** 2)
    base = [[circum * math.cos(t), circum * math.sin(t), 0.0]
            for t in (0.0, 2 * math.pi / 3, 4 * math.pi / 3)]
    return hull_mesh(base + [[0.0, 0.0, height]])


BUILTINS = {
    "regular_tetrahedron": (regular_tetrahedron, 1),
    "cube": (cube, 1),
    "octahedron": (octahedron, 1),
    "icosahedron": (icosahedron, 1),
    "dodecahedron": (dodecahedron, 1),
    "disphenoid": (disphenoid, 3),
    "right_pyramid": (right_pyramid, 2),
    "seven_cubes": (None, 1),
}


def builtin(name: str, params: Sequence[float] = ()) -> Mesh:
    if name not in BUILTINS:
        raise MeshError(f"unknown builtin {name!r}")
    fn, arity = BUILTINS[name]
    params = list(params) or ([1.0] * arity if arity == 1 else [])
    if len(params) != arity:
        raise MeshError(f"{name} takes {arity} parameter(s), got {len(params)}")
    if name == "seven_cubes":
        from .nonconvex import build_seven_cubes
        return build_seven_cubes(*params)
    return fn(*params)
