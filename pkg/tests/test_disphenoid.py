import math

import pytest
from hypothesis import given, strategies as st

from polygeo.disphenoid import (
    FullNet, GeodesicClass, InvalidClass, KnotOnLine, class_length, enumerate_classes,
    geodesic_from_class, isomorphism_check, node_counts, per_edge_counts,
)
from polygeo.mesh import disphenoid, is_disphenoid
from polygeo.unfold import develop, is_simple, verify_geodesic


@st.composite
def acute_triangles(draw):
    p = draw(st.floats(1.0, 3.0))
    q = draw(st.floats(1.0, 3.0))
    lo, hi = abs(p * p - q * q), p * p + q * q
    r2 = draw(st.floats(lo + 0.05 * hi, 0.95 * hi))
    r = math.sqrt(r2)
    if r * r >= p * p + q * q or p * p >= q * q + r * r or q * q >= p * p + r * r:
        r = math.sqrt(0.5 * (p * p + q * q))
    return (p, q, r)


def test_enumeration_order():
    got = [(c.n, c.m) for c in enumerate_classes(6)]
    assert got == [(1, 0), (1, 1), (2, 1), (3, 1), (3, 2), (4, 1), (5, 1)]


@pytest.mark.parametrize("nm", [(2, 4), (0, 1), (1, 2), (2, 2), (4, 2)])
def test_invalid_classes(nm):
    with pytest.raises(InvalidClass):
        GeodesicClass(*nm)


def test_regular_lengths():
    for c in enumerate_classes(8):
        assert class_length((1, 1, 1), c) ** 2 == pytest.approx(4 * (c.n ** 2 + c.m ** 2 + c.n * c.m))


def test_knot_labels():
    assert [FullNet.knot_label(i, j) for i, j in ((0, 0), (1, 0), (0, 1), (1, 1), (2, 3))] \
        == [0, 1, 2, 3, 2]


@pytest.mark.parametrize("offset", [0.0, 1.0, -0.3])
def test_knot_on_line(offset):
    with pytest.raises(KnotOnLine):
        geodesic_from_class((1, 1, 1), GeodesicClass(2, 1), offset)


def test_class_3_2_has_20_links():
    path = geodesic_from_class((1, 1, 1), GeodesicClass(3, 2), 0.5)
    assert path.n_links == 20


@given(acute_triangles(), st.sampled_from(enumerate_classes(7)), st.floats(0.01, 0.99))
def test_folded_class_is_geodesic(tri, cls, offset):
    m = disphenoid(*tri)
    path = geodesic_from_class(tri, cls, offset, m)
    rep = verify_geodesic(m, path)
    assert rep.accepted, rep.failures
    assert is_simple(m, path)
    assert path.length == pytest.approx(class_length(tri, cls), rel=1e-9)
    assert develop(m, path).straightness() < 1e-9
    counts = per_edge_counts(m, path)
    assert all(counts[k] == v for k, v in node_counts(cls).items())


@given(acute_triangles(), st.sampled_from(enumerate_classes(6)),
       st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_offsets_give_isomorphic_geodesics(tri, cls, o1, o2):
    assert isomorphism_check(tri, cls, o1, o2)


def test_distinct_classes_not_isomorphic():
    assert not isomorphism_check((2, 2.5, 3), GeodesicClass(2, 1), 0.5, 0.5, GeodesicClass(3, 1))


@given(acute_triangles())
def test_constructed_disphenoid_detected(tri):
    assert is_disphenoid(disphenoid(*tri))
