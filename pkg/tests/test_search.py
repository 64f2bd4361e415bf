import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polygeo.mesh import Mesh, builtin
from polygeo.search import (
    BudgetTooSmall, OffsetOutOfRange, canonical_sequence, enumerate_closed,
    gauss_bonnet_check, squared_lengths, translate_family, worker_count,
)
from polygeo.unfold import is_simple, verify_geodesic


@pytest.fixture(scope="module")
def cube_records():
    return enumerate_closed(builtin("cube"), 8)


def test_cube_census(cube_records):
    assert squared_lengths(cube_records) == [16.0, 18.0, 20.0]
    for rec in cube_records:
        rep = verify_geodesic(builtin("cube"), rec.certificate.representative)
        assert rep.accepted
        assert rec.certificate.squared_length == pytest.approx(rec.squared_length)


def test_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        enumerate_closed(builtin("cube"), 2)


def test_canonical_sequence_invariance(cube_records):
    m = builtin("cube")
    for rec in cube_records:
        seq = list(rec.certificate.crossings)
        for k in range(len(seq)):
            assert canonical_sequence(m, seq[k:] + seq[:k]) == rec.canonical_crossings
        rev = [m.he_twin[h] for h in reversed(seq)]
        assert canonical_sequence(m, rev) == rec.canonical_crossings


def test_translate_family_interval(cube_records):
    m = builtin("cube")
    cert = cube_records[0].certificate
    lo, hi = cert.offsets
    for frac in (0.01, 0.5, 0.99):
        path = translate_family(m, cert, lo + frac * (hi - lo))
        assert path.length == pytest.approx(cert.length, abs=1e-9)
        assert is_simple(m, path)
    for bad in (lo, hi, hi + 1.0):
        with pytest.raises(OffsetOutOfRange):
            translate_family(m, cert, bad)


def test_gauss_bonnet_sides(cube_records):
    m = builtin("cube")
    for rec in cube_records:
        rep = gauss_bonnet_check(m, rec.certificate)
        assert rep.passed
        assert rep.side_a_defect == pytest.approx(2 * math.pi, abs=1e-9)
        assert sorted(rep.side_a + rep.side_b) == list(range(8))


def test_parallel_matches_serial():
    m = builtin("octahedron")
    serial = enumerate_closed(m, 8, workers=1)
    parallel = enumerate_closed(m, 8, workers=2)
    assert [r.canonical_crossings for r in serial] == [r.canonical_crossings for r in parallel]
    assert [r.squared_length for r in serial] == [r.squared_length for r in parallel]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("GEO_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("GEO_THREADS", "0")
    assert worker_count() >= 1


def test_pyramid_has_none():
    assert enumerate_closed(builtin("right_pyramid", [1.0, 1.3]), 10) == []


@settings(max_examples=8)
@given(st.floats(0.2, 5.0))
def test_scaling_multiplies_squared_lengths(scale):
    m = builtin("octahedron")
    scaled = Mesh(m.vertices * scale, m.faces)
    base = squared_lengths(enumerate_closed(m, 8, workers=1))
    recs = enumerate_closed(scaled, 8, workers=1)
    got = sorted({round(r.squared_length / scale ** 2, 9) for r in recs})
    assert np.allclose(got, base, rtol=1e-9)


@settings(max_examples=5)
@given(st.sampled_from(["cube", "octahedron", "regular_tetrahedron"]))
def test_search_is_deterministic(name):
    m = builtin(name)
    a = enumerate_closed(m, 8, workers=1)
    b = enumerate_closed(m, 8, workers=1)
    assert [(r.canonical_crossings, r.squared_length, r.certificate.offsets) for r in a] == \
           [(r.canonical_crossings, r.squared_length, r.certificate.offsets) for r in b]
