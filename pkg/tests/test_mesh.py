import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polygeo.mesh import (
    EdgeInterior, FaceInterior, Mesh, MeshError, NonAcuteTriangle, NonManifold, NonPlanarFace,
    OpenSurface, ParseError, Vertex, angle_census, angle_sum, builtin, hull_mesh,
    is_disphenoid, load_off, save_off,
)

PLATONIC = {
    "regular_tetrahedron": (4, 6, 4),
    "cube": (8, 12, 6),
    "octahedron": (6, 12, 8),
    "icosahedron": (12, 30, 20),
    "dodecahedron": (20, 30, 12),
}


def _rotation(a, b, c):
    ca, sa, cb, sb, cc, sc = map(float, (np.cos(a), np.sin(a), np.cos(b), np.sin(b),
                                         np.cos(c), np.sin(c)))
    rz = np.array([[ca, -sa, 0], [sa, ca, 0], [0, 0, 1]])
    ry = np.array([[cb, 0, sb], [0, 1, 0], [-sb, 0, cb]])
    rx = np.array([[1, 0, 0], [0, cc, -sc], [0, sc, cc]])
    return rz @ ry @ rx


@pytest.mark.parametrize("name", sorted(PLATONIC))
def test_counts_and_total_defect(name):
    m = builtin(name)
    assert (len(m.vertices), len(m.edges), len(m.faces)) == PLATONIC[name]
    assert m.euler_characteristic() == 2
    assert sum(r.defect for r in angle_census(m)) == pytest.approx(4 * math.pi, abs=1e-9)


@pytest.mark.parametrize("name", sorted(PLATONIC))
def test_unit_edges(name):
    m = builtin(name)
    lengths = [np.linalg.norm(m.vertices[a] - m.vertices[b]) for a, b in m.edges]
    assert np.allclose(lengths, 1.0, atol=1e-12)


def test_cube_dihedral_and_angles():
    m = builtin("cube")
    assert np.allclose(m.dihedral, math.pi / 2)
    assert all(r.angle_sum == pytest.approx(1.5 * math.pi) for r in angle_census(m))
    assert m.is_convex()


def test_disphenoid_edges_and_angle_sums():
    m = builtin("disphenoid", [2.0, 2.5, 3.0])
    d = lambda i, j: np.linalg.norm(m.vertices[i] - m.vertices[j])  # noqa: E731
    assert d(0, 1) == pytest.approx(2.0) and d(2, 3) == pytest.approx(2.0)
    assert d(0, 2) == pytest.approx(2.5) and d(1, 3) == pytest.approx(2.5)
    assert d(1, 2) == pytest.approx(3.0) and d(0, 3) == pytest.approx(3.0)
    assert is_disphenoid(m)


@pytest.mark.parametrize("tri", [(3, 4, 5), (1, 1, 2), (1, 2, 3), (0, 1, 1)])
def test_non_acute_rejected(tri):
    with pytest.raises(NonAcuteTriangle):
        builtin("disphenoid", tri)


def test_pyramid_not_disphenoid():
    m = builtin("right_pyramid", [1.0, 1.3])
    assert len(m.faces) == 4 and not is_disphenoid(m)
    assert all(np.isclose(np.linalg.norm(m.vertices[a] - m.vertices[b]), 1.0)
               or np.isclose(np.linalg.norm(m.vertices[a] - m.vertices[b]), 1.3)
               for a, b in m.edges)


def test_off_parse_errors():
    with pytest.raises(ParseError):
        load_off("OFF\n3 1 0\n0 0 0\n1 0 0\n")
    with pytest.raises(ParseError):
        load_off("NOPE\n")
    with pytest.raises(ParseError):
        load_off(save_off(builtin("cube")) + "1 2 3\n")


def test_off_comments():
    text = "# a tetrahedron\n" + save_off(builtin("regular_tetrahedron")).replace("\n", " # c\n", 2)
    assert load_off(text).content_hash() == builtin("regular_tetrahedron").content_hash()


def test_open_surface_and_nonmanifold():
    v = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
    with pytest.raises(OpenSurface):
        Mesh(v, [(0, 2, 1), (0, 1, 3), (0, 3, 2)])
    with pytest.raises(NonManifold):
        Mesh(v, [(0, 2, 1), (0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])


def test_non_planar_face():
    v = [[0, 0, 0], [1, 0, 0], [1, 1, 0.2], [0, 1, 0], [0.5, 0.5, 1]]
    faces = [(0, 3, 2, 1), (0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)]
    with pytest.raises(NonPlanarFace):
        Mesh(v, faces)


def test_surface_points():
    m = builtin("cube")
    e = 0
    p = EdgeInterior(e, 0.25)
    a, b = m.edges[e]
    assert np.allclose(m.point_position(p), 0.75 * m.vertices[a] + 0.25 * m.vertices[b])
    f1, f2 = m.face_of_edge(e)
    assert np.allclose(m.to_world(f1, m.point_uv(p, f1)), m.to_world(f2, m.point_uv(p, f2)))
    assert len(m.point_faces(Vertex(0))) == 3
    with pytest.raises(ValueError):
        EdgeInterior(0, 1.0)
    uv = m.face_uv[0].mean(axis=0)
    assert isinstance(m.locate(0, uv), FaceInterior)
    assert m.locate(0, m.face_uv[0][1]) == Vertex(m.faces[0][1])


def test_vertex_fan_is_cyclic():
    m = builtin("icosahedron")
    for v in range(len(m.vertices)):
        fan = m.vertex_fan(v)
        assert len(fan) == 5 and all(m.he_tail[h] == v for h in fan)


@given(st.sampled_from(sorted(PLATONIC)))
def test_off_round_trip(name):
    m = builtin(name)
    m2 = load_off(save_off(m))
    assert m2.content_hash() == m.content_hash()
    assert np.array_equal(m2.vertices, m.vertices) and m2.faces == m.faces


@given(st.sampled_from(sorted(PLATONIC)),
       st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi),
       st.floats(0.1, 10.0),
       st.tuples(*[st.floats(-5, 5)] * 3))
def test_angle_sums_invariant_under_similarity(name, a, b, c, scale, shift):
    m = builtin(name)
    moved = Mesh(scale * m.vertices @ _rotation(a, b, c).T + np.array(shift), m.faces)
    for v in range(len(m.vertices)):
        assert angle_sum(moved, v).angle_sum == pytest.approx(angle_sum(m, v).angle_sum, abs=1e-9)
    assert is_disphenoid(moved) == is_disphenoid(m)


@given(st.lists(st.tuples(*[st.floats(-1, 1)] * 3), min_size=6, max_size=12, unique=True))
def test_random_hull_is_sphere(points):
    pts = np.array(points)
    if np.linalg.matrix_rank(pts - pts.mean(axis=0), tol=1e-3) < 3:
        return
    try:
        m = hull_mesh(pts)
    except MeshError:
        return  # near-degenerate hulls are rejected by validation
    assert m.euler_characteristic() == 2
    assert sum(r.defect for r in angle_census(m)) == pytest.approx(4 * math.pi, abs=1e-7)
