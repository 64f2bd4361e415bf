"""Command line: build meshes, search, trace, fold classes and verify paths.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import disphenoid as dsp
from . import export, nonconvex, search, unfold
from .mesh import EdgeInterior, FaceInterior, Mesh, MeshError, builtin, load_off, save_off

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read_mesh(path: str) -> Mesh:
    try:
        return load_off(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read mesh: {exc}") from exc


def _read_path(mesh: Mesh, path: str):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read path: {exc}") from exc
    if data.get("mesh_hash") != mesh.content_hash():
        raise UsageError("mesh mismatch: the path was made on a different mesh")
    try:
        return unfold.path_from_json(mesh, data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed path: {exc}") from exc


# -- commands -----------------------------------------------------------------

def cmd_builtin(args) -> int:
    if args.name == "disphenoid":
        if not args.triangle:
            raise UsageError("disphenoid needs --triangle p q r")
        params = args.triangle
    elif args.name == "right_pyramid":
        params = [args.base, args.lateral]
    else:
        params = [args.edge]
    _write(save_off(builtin(args.name, params)), args.output)
    return EXIT_OK


def _census_table(rows) -> str:
    if not rows:
        return "no closed simple geodesics found\n"
    lines = [f"{'squared length':>18}  {'length':>14}  {'crossings':>9}  side defects"]
    for r in rows:
        gb = r["gauss_bonnet"]
        lines.append(f"{r['squared_length']:18.9f}  {r['length']:14.9f}  "
                     f"{len(r['canonical_crossings']):9d}  "
                     f"{gb['side_a_defect']:.6f} / {gb['side_b_defect']:.6f}")
    return "\n".join(lines) + "\n"


def cmd_search(args) -> int:
    mesh = _read_mesh(args.mesh)
    records = search.enumerate_closed(mesh, args.max_crossings, workers=args.workers)
    rows = export.census_json(mesh, records)
    if args.json:
        _write(export.dumps(rows) + "\n", args.json)
    sys.stdout.write(_census_table(rows))
    return EXIT_OK


def cmd_trace(args) -> int:
    mesh = _read_mesh(args.mesh)
    if args.face is not None:
        start = FaceInterior(args.face, tuple(args.uv))
        face = None
    else:
        start = EdgeInterior(args.edge, args.t)
        face = args.into
    out = unfold.trace(mesh, start, args.direction, args.max_crossings,
                       args.max_length, face=face)
    data = unfold.path_to_json(mesh, out.path)
    data["stop_reason"] = out.stop_reason.value
    _write(export.dumps(data) + "\n", args.json)
    return EXIT_OK


def cmd_disphenoid(args) -> int:
    spec = tuple(args.triangle)
    mesh = builtin("disphenoid", spec)
    if args.list is not None:
        classes = dsp.enumerate_classes(args.list)
        _write(export.dumps(export.class_list_json(spec, classes)) + "\n", args.json)
        return EXIT_OK
    if args.cls is None:
        raise UsageError("give --class n m or --list N")
    try:
        cls = dsp.GeodesicClass(*args.cls)
    except dsp.InvalidClass as exc:
        raise UsageError(f"invalid class: {exc}") from exc
    path = dsp.geodesic_from_class(spec, cls, args.offset, mesh)
    data = unfold.path_to_json(mesh, path)
    data.update({"n": cls.n, "m": cls.m, "nodes_total": len(path.nodes) - 1,
                 "class_length": dsp.class_length(spec, cls)})
    _write(export.dumps(data) + "\n", args.json)
    if args.svg:
        Path(args.svg).write_text(export.render_net(spec, cls, args.offset,
                                                    export.RenderSpec("net", args.scale)))
    return EXIT_OK


def cmd_sevencubes(args) -> int:
    if args.turns < 1:
        raise UsageError("k must be ≥ 1")
    mesh = nonconvex.build_seven_cubes(args.edge)
    kp = nonconvex.k_turn_geodesic(mesh, args.turns, args.edge)
    data = unfold.path_to_json(mesh, kp.path)
    data.update({"turns": kp.turns,
                 "verification": "accepted" if kp.report.accepted else "rejected",
                 "failures": kp.report.failures})
    _write(export.dumps(data) + "\n", args.json)
    if args.mesh_out:
        Path(args.mesh_out).write_text(save_off(mesh))
    if args.svg:
        Path(args.svg).write_text(export.render_strip(
            args.turns, args.edge, export.RenderSpec("development", args.scale)))
    return EXIT_OK if kp.report.accepted else EXIT_VERIFY


def cmd_verify(args) -> int:
    mesh = _read_mesh(args.mesh)
    path = _read_path(mesh, args.path)
    rep = unfold.verify_geodesic(mesh, path)
    print(f"links: {path.n_links}  length: {path.length:.12g}")
    print(f"max reflection deviation: {rep.max_deviation:.3e} rad")
    for i, total, parts, ok in rep.vertex_nodes:
        print(f"vertex node {i}: angle sum {total:.9f}, parts {parts[0]:.9f} + {parts[1]:.9f}"
              f" -> {'pass' if ok else 'FAIL'}")
    print(f"simple: {rep.simple}")
    for msg in rep.failures:
        print(f"FAIL: {msg}")
    print("accepted" if rep.accepted else "rejected")
    return EXIT_OK if rep.accepted else EXIT_VERIFY


def cmd_render(args) -> int:
    spec = export.RenderSpec(args.target, args.scale, labels=not args.no_labels)
    if args.target == "net":
        if not (args.triangle and args.cls):
            raise UsageError("net rendering needs --triangle and --class")
        try:
            cls = dsp.GeodesicClass(*args.cls)
        except dsp.InvalidClass as exc:
            raise UsageError(f"invalid class: {exc}") from exc
        svg = export.render_net(tuple(args.triangle), cls, args.offset, spec)
    elif args.target == "development":
        if not (args.mesh and args.path):
            raise UsageError("development rendering needs --mesh and --path")
        mesh = _read_mesh(args.mesh)
        svg = export.render_development(mesh, _read_path(mesh, args.path), spec)
    else:
        if not args.mesh:
            raise UsageError("census rendering needs --mesh")
        mesh = _read_mesh(args.mesh)
        rows = export.census_json(mesh, search.enumerate_closed(mesh, args.max_crossings))
        svg = export.render_census(rows, spec=spec)
    _write(svg, args.output)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _positive(text: str) -> float:
    x = float(text)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polygeo", description="Closed geodesics on polyhedra.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("builtin", help="write a built-in solid as OFF")
    b.add_argument("name", choices=["regular_tetrahedron", "cube", "octahedron", "icosahedron",
                                    "dodecahedron", "disphenoid", "right_pyramid", "seven_cubes"])
    b.add_argument("--edge", type=_positive, default=1.0)
    b.add_argument("--triangle", type=_positive, nargs=3, metavar=("P", "Q", "R"))
    b.add_argument("--base", type=_positive, default=1.0)
    b.add_argument("--lateral", type=_positive, default=1.3)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_builtin)

    s = sub.add_parser("search", help="enumerate closed simple geodesics")
    s.add_argument("mesh")
    s.add_argument("--max-crossings", type=int, required=True)
    s.add_argument("--json")
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_search)

    t = sub.add_parser("trace", help="trace a straight line across faces")
    t.add_argument("mesh")
    g = t.add_mutually_exclusive_group(required=True)
    g.add_argument("--face", type=int)
    g.add_argument("--edge", type=int)
    t.add_argument("--uv", type=float, nargs=2, default=(0.0, 0.0))
    t.add_argument("--t", type=float, default=0.5)
    t.add_argument("--into", type=int, default=None, help="start face for an edge start")
    t.add_argument("--direction", type=float, nargs=2, required=True)
    t.add_argument("--max-crossings", type=int, default=100)
    t.add_argument("--max-length", type=_positive, default=1e3)
    t.add_argument("--json")
    t.set_defaults(func=cmd_trace)

    d = sub.add_parser("disphenoid", help="fold a class-(n, m) geodesic")
    d.add_argument("--triangle", type=_positive, nargs=3, required=True, metavar=("P", "Q", "R"))
    d.add_argument("--class", dest="cls", type=int, nargs=2, metavar=("N", "M"))
    d.add_argument("--offset", type=float, default=0.5)
    d.add_argument("--list", type=int, metavar="MAX_TOTAL")
    d.add_argument("--json")
    d.add_argument("--svg")
    d.add_argument("--scale", type=_positive, default=60.0)
    d.set_defaults(func=cmd_disphenoid)

    c = sub.add_parser("sevencubes", help="k-turn geodesic on the seven-cube surface")
    c.add_argument("--turns", "-k", type=int, required=True)
    c.add_argument("--edge", type=_positive, default=1.0)
    c.add_argument("--json")
    c.add_argument("--svg")
    c.add_argument("--mesh-out")
    c.add_argument("--scale", type=_positive, default=40.0)
    c.set_defaults(func=cmd_sevencubes)

    v = sub.add_parser("verify", help="check a path JSON against a mesh")
    v.add_argument("mesh")
    v.add_argument("path")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="SVG of a net, a development or a census")
    r.add_argument("target", choices=["net", "development", "census"])
    r.add_argument("--mesh")
    r.add_argument("--path")
    r.add_argument("--triangle", type=_positive, nargs=3, metavar=("P", "Q", "R"))
    r.add_argument("--class", dest="cls", type=int, nargs=2, metavar=("N", "M"))
    r.add_argument("--offset", type=float, default=0.5)
    r.add_argument("--max-crossings", type=int, default=8)
    r.add_argument("--scale", type=_positive, default=60.0)
    r.add_argument("--no-labels", action="store_true")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, MeshError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
