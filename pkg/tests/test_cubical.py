"""Cubical complexes: counts, face relations, joins, incidences, boundary."""

from __future__ import annotations

import itertools
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import brute_cells, brute_join, brute_meet, geo_face, geo_position
from conley_rook.cubical import (Cell, Complex, ComplexError, Extents, boundary_cells, build_complex, extension,
                                 incidence, is_face, join, make_cell, meet, parse_cell, relative_position)


def C(v, w):
    return make_cell(v, w)


@pytest.mark.parametrize("K, cells, tops", [((2, 2), 49, 9), ((1,), 5, 2), ((1, 1, 1), 125, 8)])
def test_cell_counts(K, cells, tops):
    cx = build_complex(K)
    assert len(cx.all_cells) == cells == len(brute_cells(cx.limits))
    assert cx.top_count() == tops == len(list(cx.top_cells()))
    prod = 1
    for k in K:
        prod *= 2 * k + 3
    assert cells == prod


def test_all_cells_match_enumeration_oracle():
    for K in [(1,), (2,), (1, 2), (2, 2), (1, 1, 2)]:
        cx = build_complex(K)
        assert set(cx.all_cells) == set(brute_cells(cx.limits))


def test_extents_reject_bad_input():
    with pytest.raises(ComplexError):
        Extents((0, 2))
    with pytest.raises(ComplexError):
        Extents(())


def test_cell_text_round_trip():
    c = C((1, 2), (0, 1))
    assert c.text() == "1,2;0,1"
    assert parse_cell("1,2;0,1") == c
    with pytest.raises(ComplexError):
        parse_cell("1,2;0")
    with pytest.raises(ComplexError):
        parse_cell("1,2;0,2")


def test_is_face_examples():
    assert is_face(C((1, 2), (0, 0)), C((0, 2), (1, 0)))
    a = C((1, 1), (0, 1))
    assert is_face(a, a)
    assert not is_face(C((1,), (0,)), C((2,), (1,)))


def test_relative_position_examples():
    a = C((1, 1), (0, 0))
    assert relative_position(a, C((1, 1), (1, 1))) == (-1, -1)
    assert relative_position(a, C((0, 0), (1, 1))) == (1, 1)
    b = C((0, 1), (1, 0))
    assert relative_position(a, b)[0] == 1
    with pytest.raises(ComplexError):
        relative_position(C((2,), (0,)), C((0,), (1,)))


def test_position_agrees_along_every_coface_chain():
    cx = Complex((3, 3))
    a = C((1, 1), (0, 0))
    for b in cx.cofaces(a):
        p = relative_position(a, b)
        for c in cx.cofaces(b):
            q = relative_position(a, c)
            assert all(p[n] == q[n] for n in extension(a, b))


def test_join_meet_examples():
    cx = Complex((3,))
    assert join(cx, C((1,), (0,)), C((2,), (0,))) == C((1,), (1,))
    assert join(cx, C((0,), (0,)), C((2,), (0,))) is None
    cx2 = Complex((3, 3))
    assert meet(cx2, C((1, 1), (1, 1)), C((2, 1), (1, 1))) == C((2, 1), (0, 1))


def test_top_star_and_extension_examples():
    cx = build_complex((2, 2))
    assert len(cx.top_star(C((1, 1), (0, 0)))) == 4
    mu = C((1, 1), (1, 1))
    assert cx.top_star(mu) == [mu]
    assert mu.inessential == frozenset()
    assert extension(C((1, 2), (0, 0)), C((1, 2), (1, 0))) == {0}


def test_boundary_examples():
    cx = build_complex((2, 2))
    bdy = boundary_cells(cx)
    perimeter = [c for c in cx.vertices() if 0 in c.v or 3 in c.v]
    assert len(perimeter) == 12 and set(perimeter) <= bdy
    assert C((1, 1), (0, 0)) not in bdy
    cx1 = build_complex((1,))
    assert boundary_cells(cx1) == {C((0,), (0,)), C((2,), (0,))}


# -- properties against the geometric oracles -------------------------------------

@st.composite
def complex_and_cells(draw, k=2):
    N = draw(st.integers(1, 3))
    limits = tuple(draw(st.integers(1, 3)) for _ in range(N))
    cx = Complex(limits)
    cells = cx.all_cells
    picks = [cells[draw(st.integers(0, len(cells) - 1))] for _ in range(k)]
    return cx, picks


@given(complex_and_cells())
def test_face_join_meet_match_oracle(data):
    cx, (a, b) = data
    cells = cx.all_cells
    assert is_face(a, b) == geo_face(a, b)
    assert join(cx, a, b) == brute_join(cells, a, b)
    assert meet(cx, a, b) == brute_meet(cells, a, b)
    if is_face(a, b):
        assert relative_position(a, b) == geo_position(a, b)


@given(complex_and_cells(k=1))
def test_faces_cofaces_top_star_match_oracle(data):
    cx, (a,) = data
    cells = cx.all_cells
    assert set(cx.faces(a)) == {c for c in cells if geo_face(c, a)}
    assert set(cx.cofaces(a)) == {c for c in cells if geo_face(a, c)}
    assert set(cx.top_star(a)) == {c for c in cells if geo_face(a, c) and c.dim == cx.N}


@given(complex_and_cells(k=1))
def test_integer_boundary_squares_to_zero(data):
    cx, (a,) = data
    acc = Counter()
    for f, s in cx.boundary(a):
        assert s == incidence(a, f)
        for g, t in cx.boundary(f):
            acc[g] += s * t
    assert all(v == 0 for v in acc.values())


@given(complex_and_cells(k=1))
def test_coboundary_is_transpose_of_boundary(data):
    cx, (a,) = data
    cob = dict(cx.coboundary(a))
    brute = {c: incidence(c, a) for c in cx.all_cells if c.dim == a.dim + 1 and geo_face(a, c)}
    assert cob == brute


def test_boundary_cells_match_geometric_oracle():
    for limits in [(2,), (3, 2), (2, 2, 2)]:
        cx = Complex(limits)
        geo = set()
        for c in cx.all_cells:
            for (lo, hi), L in zip(((v, v + w) for v, w in zip(c.v, c.w)), limits):
                if lo == hi and lo in (0, L):
                    geo.add(c)
        assert boundary_cells(cx) == geo
        assert {c for c in cx.all_cells if cx.is_boundary_cell(c)} == geo


def test_cells_in_other_dimension_rejected():
    with pytest.raises(ComplexError):
        is_face(C((0,), (0,)), C((0, 0), (1, 1)))
    cx = Complex((2, 2))
    assert Cell((3, 0), (0, 0)) not in cx
    with pytest.raises(ComplexError):
        cx.check(Cell((2, 0), (1, 0)))


def test_vertex_listing_is_lexicographic():
    cx = Complex((1, 1))
    assert [c.v for c in cx.vertices()] == list(itertools.product(range(2), repeat=2))
