"""Exhaustive enumeration of closed simple geodesics by corridor search.

Depth-first over directed edge crossings.  The set of straight lines that
stab every developed edge of the current corridor is tracked as a convex
polygon in line space: with the first crossed edge placed on the y-axis
(outward normal +x) every candidate line is ``y = m x + c``, and each crossing
contributes three half-planes in ``(m, c)``.  A branch dies when the polygon
is empty.  A sequence closes when the corridor returns to its first face with
zero rotation; the translation then fixes the direction and the surviving
``c`` values form the open interval of parallel geodesics.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mesh import EdgeInterior, Mesh, angle_sum
from .unfold import GeodesicPath, UnfoldingFrame, is_simple, make_path, verify_geodesic

ROTATION_TOL = 1e-9
VERTEX_MARGIN = 1e-12
SLOPE_BOUND = 1e6


class BudgetTooSmall(ValueError):
    pass


class OffsetOutOfRange(ValueError):
    pass


class PathNotClosed(ValueError):
    pass


@dataclass
class ClosureCertificate:
    crossings: tuple[int, ...]
    rotation: float
    translation: tuple[float, float]
    offsets: tuple[float, float]
    representative: GeodesicPath
    squared_length: float

    @property
    def length(self) -> float:
        return math.sqrt(self.squared_length)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.offsets[0] + self.offsets[1])

    def offset_at(self, fraction: float) -> float:
        lo, hi = self.offsets
        return lo + fraction * (hi - lo)


@dataclass
class GeodesicClassRecord:
    canonical_crossings: tuple[int, ...]
    squared_length: float
    certificate: ClosureCertificate
    multiplicity: int = 1
    notes: list[str] = field(default_factory=list)

    @property
    def length(self) -> float:
        return math.sqrt(self.squared_length)


# -- corridor geometry ------------------------------------------------------

class _Tables:
    """Per-half-edge constants used in the inner loop."""

    def __init__(self, mesh: Mesh):
        n = len(mesh.he_face)
        self.face = mesh.he_face
        self.twin = mesh.he_twin
        self.face_he = mesh.face_he
        self.tail = []
        self.head = []
        self.glue = []
        for h in range(n):
            f = mesh.he_face[h]
            self.tail.append(tuple(mesh.local_vertex(f, mesh.he_tail[h])))
            self.head.append(tuple(mesh.local_vertex(f, mesh.he_head[h])))
        from .unfold import unfold_step
        for h in range(n):
            fr = unfold_step(UnfoldingFrame.identity(mesh.he_face[h]), mesh, h)
            self.glue.append((math.cos(fr.rotation), math.sin(fr.rotation),
                              fr.translation[0], fr.translation[1]))


def _compose(F, G):
    c1, s1, x1, y1 = F
    c2, s2, x2, y2 = G
    return (c1 * c2 - s1 * s2, s1 * c2 + c1 * s2,
            c1 * x2 - s1 * y2 + x1, s1 * x2 + c1 * y2 + y1)


def _apply(F, p):
    c, s, x, y = F
    return (c * p[0] - s * p[1] + x, s * p[0] + c * p[1] + y)


def _start_frame(tb: _Tables, h: int):
    """Frame putting half-edge ``h`` on the y-axis from (0,0) upward."""
    tx, ty = tb.tail[h]
    hx, hy = tb.head[h]
    rot = math.pi / 2 - math.atan2(hy - ty, hx - tx)
    c, s = math.cos(rot), math.sin(rot)
    return (c, s, -(c * tx - s * ty), -(s * tx + c * ty))


def _constraints(T, H):
    """Half-planes a*m + b*c + d > 0 for a line crossing T->H outward."""
    ex, ey = H[0] - T[0], H[1] - T[1]
    return ((-H[0], -1.0, H[1]), (T[0], 1.0, -T[1]), (-ex, 0.0, ey))


def _clip(poly, a, b, d):
    vals = [a * m + b * c + d - VERTEX_MARGIN for m, c in poly]
    if min(vals) >= 0:
        return poly
    out = []
    n = len(poly)
    for k in range(n):
        vc, vn = vals[k], vals[(k + 1) % n]
        cur = poly[k]
        if vc >= 0:
            out.append(cur)
        if (vc >= 0) != (vn >= 0):
            nxt = poly[(k + 1) % n]
            t = vc / (vc - vn)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def _closure(F0, F, T1, cons):
    """Offsets interval if the corridor closes as a translation, else None."""
    c0, s0 = F0[0], F0[1]
    c, s = F[0], F[1]
    c_rel = c * c0 + s * s0
    s_rel = s * c0 - c * s0
    if abs(s_rel) > ROTATION_TOL or c_rel <= 0:
        return None
    P = _apply(F, T1)  # image of the first crossing's tail; F0 maps it to (0,0)
    tx, ty = P
    if tx <= 0:
        return None
    mstar = ty / tx
    lo, hi = -math.inf, math.inf
    for a, b, d in cons:
        v = a * mstar + d
        if b == 0.0:
            if v <= VERTEX_MARGIN:
                return None
        elif b > 0:
            lo = max(lo, -v)
        else:
            hi = min(hi, v)
    if hi - lo <= 2 * VERTEX_MARGIN:
        return None
    return math.atan2(s_rel, c_rel), (tx, ty), (lo, hi)


def _search_from(tb: _Tables, h1: int, max_crossings: int):
    """All closing corridors whose smallest crossing is ``h1``."""
    F0 = _start_frame(tb, h1)
    T1 = tb.tail[h1]
    f_start = tb.face[h1]
    cons0 = _constraints(_apply(F0, tb.tail[h1]), _apply(F0, tb.head[h1]))
    L = math.hypot(tb.head[h1][0] - tb.tail[h1][0], tb.head[h1][1] - tb.tail[h1][1])
    poly = [(-SLOPE_BOUND, 0.0), (SLOPE_BOUND, 0.0), (SLOPE_BOUND, L), (-SLOPE_BOUND, L)]
    for a, b, d in cons0:
        poly = _clip(poly, a, b, d)
    results = []
    seq = [h1]
    cons = list(cons0)

    def dfs(F, entry, poly):
        # F: frame of the face just entered through half-edge ``entry``
        g = tb.face[entry]
        if g == f_start and len(seq) >= 2:
            got = _closure(F0, F, T1, cons)
            if got is not None:
                results.append((tuple(seq), *got))
        if len(seq) >= max_crossings:
            return
        for h in tb.face_he[g]:
            if h == entry or h < h1:
                continue
            T = _apply(F, tb.tail[h])
            H = _apply(F, tb.head[h])
            new = _constraints(T, H)
            p = poly
            for a, b, d in new:
                p = _clip(p, a, b, d)
                if not p:
                    break
            if not p:
                continue
            seq.append(h)
            cons.extend(new)
            dfs(_compose(F, tb.glue[h]), tb.twin[h], p)
            del cons[-3:]
            seq.pop()

    dfs(_compose(F0, tb.glue[h1]), tb.twin[h1], poly)
    return results


_WORKER_TABLES: _Tables | None = None


def _init_worker(mesh: Mesh):
    global _WORKER_TABLES
    _WORKER_TABLES = _Tables(mesh)


def _worker(args):
    h1, max_crossings = args
    return _search_from(_WORKER_TABLES, h1, max_crossings)


def worker_count() -> int:
    raw = os.environ.get("GEO_THREADS", "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


# -- sequences --------------------------------------------------------------

def canonical_sequence(mesh: Mesh, seq) -> tuple[int, ...]:
    """Lexicographically least form over cyclic shifts and reversal."""
    seq = tuple(seq)
    rev = tuple(mesh.he_twin[h] for h in reversed(seq))
    best = None
    for s in (seq, rev):
        for k in range(len(s)):
            cand = s[k:] + s[:k]
            if best is None or cand < best:
                best = cand
    return best


def _is_primitive(seq) -> bool:
    n = len(seq)
    for p in range(1, n):
        if n % p == 0 and all(seq[i] == seq[i % p] for i in range(n)):
            return False
    return True


def corridor_segments(mesh: Mesh, seq):
    """Developed (tail, head) of every crossed half-edge, starting frame included."""
    tb = _Tables(mesh)
    F = _start_frame(tb, seq[0])
    segs = []
    for h in seq:
        segs.append((_apply(F, tb.tail[h]), _apply(F, tb.head[h])))
        F = _compose(F, tb.glue[h])
    return segs, F


def path_at_offset(mesh: Mesh, seq, translation, offset: float) -> GeodesicPath:
    """Fold the line with the given direction and perpendicular offset."""
    tx, ty = translation
    norm = math.hypot(tx, ty)
    ux, uy = tx / norm, ty / norm
    nx, ny = -uy, ux
    segs, _ = corridor_segments(mesh, seq)
    nodes = []
    for h, (T, H) in zip(seq, segs):
        den = nx * (H[0] - T[0]) + ny * (H[1] - T[1])
        s = (offset - (nx * T[0] + ny * T[1])) / den
        if not 0.0 < s < 1.0:
            raise OffsetOutOfRange(f"offset {offset} misses crossing {h}")
        e = mesh.he_edge[h]
        t = s if mesh.edges[e][0] == mesh.he_tail[h] else 1.0 - s
        nodes.append(EdgeInterior(e, t))
    nodes.append(nodes[0])
    faces = [mesh.he_face[mesh.he_twin[h]] for h in seq]
    return make_path(mesh, nodes, faces, closed=True)


def _certificate(mesh: Mesh, seq, rotation, translation, c_interval) -> ClosureCertificate:
    tx, ty = translation
    ux = tx / math.hypot(tx, ty)
    lo, hi = c_interval
    offsets = (ux * lo, ux * hi)
    mid = 0.5 * (offsets[0] + offsets[1])
    rep = path_at_offset(mesh, seq, translation, mid)
    return ClosureCertificate(tuple(seq), rotation, (tx, ty), offsets, rep, tx * tx + ty * ty)


def enumerate_closed(mesh: Mesh, max_crossings: int, workers: int | None = None,
                     verify: bool = True) -> list[GeodesicClassRecord]:
    """Every equivalence class of closed simple geodesics with at most
    ``max_crossings`` edge crossings, sorted by (squared length, sequence).

    Complete only on convex meshes: geodesics through vertices or along edges
    of a non-convex surface are not produced.
    """
    if max_crossings < 3:
        raise BudgetTooSmall("no closed geodesic crosses fewer than 3 edges")
    workers = worker_count() if workers is None else workers
    starts = [(h, max_crossings) for h in range(len(mesh.he_face))]
    if workers > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(mesh,)) as ex:
            chunks = list(ex.map(_worker, starts))
    else:
        tb = _Tables(mesh)
        chunks = [_search_from(tb, h, m) for h, m in starts]

    records: dict[tuple[int, ...], GeodesicClassRecord] = {}
    for chunk in chunks:
        for seq, rotation, translation, interval in chunk:
            if not _is_primitive(seq):
                continue
            key = canonical_sequence(mesh, seq)
            if key in records:
                records[key].multiplicity += 1
                continue
            cert = _certificate(mesh, seq, rotation, translation, interval)
            if not is_simple(mesh, cert.representative):
                continue
            rec = GeodesicClassRecord(key, cert.squared_length, cert)
            if verify:
                report = verify_geodesic(mesh, cert.representative)
                if not report.accepted:
                    rec.notes.extend(report.failures)
                    continue
            records[key] = rec
    return sorted(records.values(), key=lambda r: (round(r.squared_length, 9), r.canonical_crossings))


def squared_lengths(records, ndigits: int = 9) -> list[float]:
    return sorted({float(round(r.squared_length, ndigits)) for r in records})


def translate_family(mesh: Mesh, cert: ClosureCertificate, offset: float) -> GeodesicPath:
    lo, hi = cert.offsets
    if not lo < offset < hi:
        raise OffsetOutOfRange(f"offset {offset} outside ({lo}, {hi})")
    return path_at_offset(mesh, cert.crossings, cert.translation, offset)


# -- Gauss-Bonnet -----------------------------------------------------------

@dataclass
class SideReport:
    side_a: list[int]
    side_b: list[int]
    side_a_defect: float
    side_b_defect: float
    passed: bool


def gauss_bonnet_check(mesh: Mesh, cert_or_path, tol: float = 1e-6) -> SideReport:
    """Split the vertices by the closed path and total the defects on each side.

    Two vertices joined by an edge are on the same side iff the path crosses
    that edge an even number of times.  Side A is to the left of the path.
    """
    path = cert_or_path.representative if isinstance(cert_or_path, ClosureCertificate) else cert_or_path
    if not path.closed:
        raise PathNotClosed("side split needs a closed path")
    crossings = [0] * len(mesh.edges)
    for node in path.nodes[:-1]:
        if not isinstance(node, EdgeInterior):
            raise PathNotClosed("side split needs a path through edge interiors only")
        crossings[node.edge] += 1
    nv = len(mesh.vertices)
    side = [-1] * nv
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for e, (a, b) in enumerate(mesh.edges):
        parity = crossings[e] % 2
        adj[a].append((b, parity))
        adj[b].append((a, parity))
    # seed: the left endpoint of the first crossing
    h = path.crossing_sequence[0]
    f = mesh.he_face[h]
    node = path.nodes[0]
    here = mesh.point_uv(node, f)
    prev = mesh.point_uv(path.nodes[-2], f)
    d = here - prev
    tail = mesh.local_vertex(f, mesh.he_tail[h]) - here
    seed = mesh.he_tail[h] if d[0] * tail[1] - d[1] * tail[0] > 0 else mesh.he_head[h]
    side[seed] = 0
    stack = [seed]
    consistent = True
    while stack:
        v = stack.pop()
        for w, parity in adj[v]:
            want = side[v] ^ parity
            if side[w] == -1:
                side[w] = want
                stack.append(w)
            elif side[w] != want:
                consistent = False
    defects = [angle_sum(mesh, v).defect for v in range(nv)]
    a = [v for v in range(nv) if side[v] == 0]
    b = [v for v in range(nv) if side[v] == 1]
    da = float(sum(defects[v] for v in a))
    db = float(sum(defects[v] for v in b))
    ok = consistent and abs(da - 2 * math.pi) <= tol and abs(db - 2 * math.pi) <= tol
    return SideReport(a, b, da, db, ok)
