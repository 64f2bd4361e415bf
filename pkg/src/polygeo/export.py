"""Deterministic JSON text and SVG 1.1 drawings of nets, developments and censuses."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .disphenoid import FullNet, GeodesicClass, LABELS
from .mesh import EdgeInterior, Mesh
from .search import gauss_bonnet_check
from .unfold import GeodesicPath, UnfoldingFrame, unfold_step


# -- JSON ---------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("non-finite float in JSON output")
    text = format(x, ".17g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, bool) or obj is None:
        return "true" if obj is True else ("false" if obj is False else "null")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [inner + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def census_json(mesh: Mesh, records) -> list[dict]:
    out = []
    for rec in records:
        gb = gauss_bonnet_check(mesh, rec.certificate)
        out.append({
            "canonical_crossings": list(rec.canonical_crossings),
            "squared_length": rec.squared_length,
            "length": math.sqrt(rec.squared_length),
            "gauss_bonnet": {"side_a_defect": gb.side_a_defect,
                             "side_b_defect": gb.side_b_defect},
        })
    return out


def class_list_json(spec, classes) -> list[dict]:
    from .disphenoid import class_length
    return [{"n": c.n, "m": c.m, "length": class_length(spec, c), "nodes_total": c.nodes_total}
            for c in classes]


# -- SVG ----------------------------------------------------------------------

@dataclass(frozen=True)
class RenderSpec:
    target: str = "development"
    scale: float = 60.0
    stroke: float = 1.0
    path_stroke: float = 2.0
    labels: bool = True
    margin: float = 20.0

    def __post_init__(self):
        if self.target not in ("net", "development", "census"):
            raise ValueError(f"unknown render target {self.target!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def _n(x: float) -> str:
    return format(float(x), ".6f").rstrip("0").rstrip(".")


class _Canvas:
    def __init__(self, spec: RenderSpec, lo, hi):
        self.spec = spec
        self.lo, self.hi = np.asarray(lo, float), np.asarray(hi, float)
        self.items: list[str] = []

    def xy(self, p):
        s, m = self.spec.scale, self.spec.margin
        return (m + (p[0] - self.lo[0]) * s, m + (self.hi[1] - p[1]) * s)

    def polygon(self, pts, fill="#f4f4f4", stroke="#888888"):
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in (self.xy(p) for p in pts))
        self.items.append(f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{_n(self.spec.stroke)}"/>')

    def polyline(self, pts, stroke="#c0392b", width=None):
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in (self.xy(p) for p in pts))
        w = self.spec.path_stroke if width is None else width
        self.items.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{_n(w)}"/>')

    def text(self, p, label, size=12):
        x, y = self.xy(p)
        self.items.append(f'<text x="{_n(x)}" y="{_n(y)}" font-size="{size}" '
                          f'font-family="sans-serif">{escape(label)}</text>')

    def render(self) -> str:
        s, m = self.spec.scale, self.spec.margin
        w = (self.hi[0] - self.lo[0]) * s + 2 * m
        h = (self.hi[1] - self.lo[1]) * s + 2 * m
        head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{_n(w)}" height="{_n(h)}" viewBox="0 0 {_n(w)} {_n(h)}">\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def render_net(spec_pqr, cls: GeodesicClass, offset: float,
               spec: RenderSpec = RenderSpec("net")) -> str:
    """Full-net patch covering one period of a class-(n, m) line."""
    net = FullNet(*spec_pqr)
    n, m = cls.n, cls.m
    start = np.array([0.0, -offset / (2 * n)])
    end = start + np.array([n, m], float)
    i0, i1 = -1, 2 * n + 1
    j0, j1 = math.floor(2 * min(start[1], end[1])) - 1, math.ceil(2 * max(start[1], end[1])) + 1
    tris, knots = [], []
    for i in range(i0, i1):
        for j in range(j0, j1):
            a, b, c, d = ((i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1))
            tris.append([a, b, c])
            tris.append([b, d, c])
    for i in range(i0, i1 + 1):
        for j in range(j0, j1 + 1):
            knots.append((i, j))
    pts = [net.to_plane(np.array(k, float) / 2) for k in knots]
    lo, hi = np.min(pts, axis=0), np.max(pts, axis=0)
    cv = _Canvas(spec, lo, hi)
    for t in tris:
        cv.polygon([net.to_plane(np.array(k, float) / 2) for k in t])
    if spec.labels:
        for k, p in zip(knots, pts):
            cv.text(p, LABELS[FullNet.knot_label(*k)], 10)
    cv.polyline([net.to_plane(start), net.to_plane(end)])
    return cv.render()


def render_development(mesh: Mesh, path: GeodesicPath,
                       spec: RenderSpec = RenderSpec("development")) -> str:
    """Faces crossed by an edge-crossing path, unfolded into one plane."""
    frames = [UnfoldingFrame.identity(path.link_faces[0])]
    for i in range(1, path.n_links):
        f_prev, f = path.link_faces[i - 1], path.link_faces[i]
        node = path.nodes[i]
        if f == f_prev:
            frames.append(frames[-1])
        elif isinstance(node, EdgeInterior):
            frames.append(unfold_step(frames[-1], mesh, mesh.he_in_face(node.edge, f_prev)))
        else:
            raise ValueError("render the strip for paths through vertices")
    polys = [np.array([fr.apply(p) for p in mesh.face_uv[f]])
             for fr, f in zip(frames, path.link_faces)]
    line = [frames[0].apply(mesh.point_uv(path.nodes[0], path.link_faces[0]))]
    for i, fr in enumerate(frames):
        line.append(fr.apply(mesh.point_uv(path.nodes[i + 1], path.link_faces[i])))
    allp = np.vstack(polys + [np.array(line)])
    cv = _Canvas(spec, allp.min(axis=0), allp.max(axis=0))
    for f, poly in zip(path.link_faces, polys):
        cv.polygon(poly)
        if spec.labels:
            cv.text(poly.mean(axis=0), str(f), 10)
    cv.polyline(line)
    return cv.render()


def render_strip(k: int, a: float = 1.0, spec: RenderSpec = RenderSpec("development")) -> str:
    """The 4k+1 belt squares unrolled, with both helices."""
    from .nonconvex import strip_development
    squares, segs = strip_development(k, a)
    cv = _Canvas(spec, (0.0, 0.0), ((4 * k + 1) * a, a))
    for (x0, y0), (x1, y1) in squares:
        cv.polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    for p, q in segs:
        cv.polyline([p, q])
    if spec.labels:
        cv.text((a, a), "D", 12)
        cv.text(((4 * k + 1) * a, 0.0), "A'", 12)
        cv.text((0.0, a), "A", 12)
        cv.text((4 * k * a, 0.0), "D'", 12)
    return cv.render()


def render_census(rows: list[dict], title: str = "closed simple geodesics",
                  spec: RenderSpec = RenderSpec("census")) -> str:
    """Census table as SVG text rows: squared length, length, defect split."""
    line_h = 18.0 / spec.scale
    height = line_h * (len(rows) + 2)
    cv = _Canvas(spec, (0.0, 0.0), (480.0 / spec.scale, height))
    cv.text((0.0, height - line_h * 0.5), title, 14)
    header = "squared length | length | side defects | crossings"
    cv.text((0.0, height - line_h * 1.5), header, 12)
    for i, r in enumerate(rows):
        gb = r["gauss_bonnet"]
        txt = (f"{r['squared_length']:.9f} | {r['length']:.9f} | "
               f"{gb['side_a_defect']:.6f}, {gb['side_b_defect']:.6f} | "
               f"{len(r['canonical_crossings'])}")
        cv.text((0.0, height - line_h * (i + 2.5)), txt, 12)
    return cv.render()
