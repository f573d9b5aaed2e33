import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opcheck.finset import (PointedMap, PointedSet, check_factorization_unique, classify,
                            enumerate_maps, factorize, inert_cube, parse_map, rho, subcube)

import oracles


def maps_upto(n):
    return [f for m in range(n + 1) for k in range(n + 1)
            for f in enumerate_maps(PointedSet(m), PointedSet(k))]


@st.composite
def pointed_maps(draw, max_arity=4):
    m = draw(st.integers(0, max_arity))
    n = draw(st.integers(0, max_arity))
    images = draw(st.lists(st.integers(0, n), min_size=m, max_size=m))
    return PointedMap.of(m, n, images)


def test_pointed_set_equality_is_arity():
    assert PointedSet(3) == PointedSet(3)
    assert PointedSet(2) != PointedSet(3)
    assert len(PointedSet(3)) == 4 and len(PointedSet(3).interior) == 3


@pytest.mark.parametrize("m,n,count", [(2, 1, 4), (0, 3, 1), (3, 0, 1)])
def test_enumerate_maps_examples(m, n, count):
    assert len(enumerate_maps(PointedSet(m), PointedSet(n))) == count


@pytest.mark.parametrize("m,n", list(itertools.product(range(5), repeat=2)))
def test_hom_counts_match_closed_form_and_oracle(m, n):
    maps = enumerate_maps(PointedSet(m), PointedSet(n))
    assert len(maps) == (n + 1) ** m == len(oracles.pointed_maps(m, n))
    assert len(set(maps)) == len(maps)
    assert [f.images for f in maps] == sorted(f.images for f in maps)


def test_classify_examples():
    assert classify(PointedMap.of(2, 1, (1, 0))) == (True, False)
    assert classify(PointedMap.of(2, 1, (1, 1))) == (False, True)
    assert classify(PointedMap.identity(PointedSet(1))) == (True, True)


def test_inert_and_active_closed_under_composition():
    by_source = {}
    for f in maps_upto(3):
        by_source.setdefault(f.source, []).append(f)
    for f in maps_upto(3):
        for g in by_source[f.target]:
            gf = f.then(g)
            if f.is_inert and g.is_inert:
                assert gf.is_inert, (f, g)
            if f.is_active and g.is_active:
                assert gf.is_active, (f, g)


def test_factorize_examples():
    i, a = factorize(PointedMap.of(2, 1, (0, 0)))
    assert i == PointedMap.of(2, 0, (0, 0))
    assert a == PointedMap.of(0, 1, ())
    assert i.then(a) == PointedMap.of(2, 1, (0, 0))
    ident = PointedMap.identity(PointedSet(2))
    assert factorize(ident) == (ident, ident)
    fold = PointedMap.of(2, 1, (1, 1))
    assert factorize(fold) == (ident, fold)


def test_factorize_keeps_numeric_order():
    i, a = factorize(PointedMap.of(4, 2, (2, 0, 1, 2)))
    assert i.images == (1, 0, 2, 3)
    assert a.images == (2, 1, 2)


@given(pointed_maps())
def test_factorize_composes_back(f):
    i, a = factorize(f)
    assert i.is_inert and a.is_active
    assert i.then(a) == f


@pytest.mark.parametrize("f", maps_upto(3), ids=str)
def test_factorization_unique_up_to_unique_iso(f):
    assert check_factorization_unique(f)


@st.composite
def composable_triples(draw, max_arity=3):
    a, b, c, d = (draw(st.integers(0, max_arity)) for _ in range(4))

    def arrow(m, n):
        return PointedMap.of(m, n, draw(st.lists(st.integers(0, n), min_size=m, max_size=m)))

    return arrow(a, b), arrow(b, c), arrow(c, d)


@given(composable_triples())
def test_composition_associative_and_unital(triple):
    f, g, h = triple
    assert f.then(g).then(h) == f.then(g.then(h))
    assert PointedMap.identity(f.source).then(f) == f == f.then(PointedMap.identity(f.target))


def test_rho():
    assert rho(2, 1) == PointedMap.of(2, 1, (1, 0))
    assert all(rho(4, i).is_inert for i in range(1, 5))
    with pytest.raises(ValueError):
        rho(2, 3)


def test_parse_map_round_trip():
    f = parse_map("2->1:1,0")
    assert f == rho(2, 1)
    assert str(f) == "2->1:1,0"
    assert parse_map("0->3:") == PointedMap.of(0, 3, ())
    for bad in ("2->1:1", "2->1:2,0", "x"):
        with pytest.raises(ValueError):
            parse_map(bad)


def test_cube_on_two_points():
    cube = inert_cube(PointedSet(2))
    assert len(cube.vertices) == 4
    assert len(cube.edges) == 5
    assert all(e.is_inert for e in cube.edges.values())
    assert cube.faces_commute()


@pytest.mark.parametrize("n,vertices,edges", [(0, 1, 0), (1, 2, 1), (3, 8, 19)])
def test_cube_sizes(n, vertices, edges):
    cube = inert_cube(PointedSet(n))
    assert len(cube.vertices) == 2 ** n
    assert len(cube.vertices) == vertices
    # strict pairs V' < V: 3^n - 2^n
    assert len(cube.edges) == edges == 3 ** n - 2 ** n
    assert all(e.is_inert for e in cube.edges.values())
    assert cube.faces_commute()


def test_cube_edge_is_identity_on_kept_elements():
    cube = inert_cube(PointedSet(3))
    e = cube.edge(frozenset({1, 2, 3}), frozenset({1, 3}))
    assert e == PointedMap.of(3, 2, (1, 0, 2))


def test_subcube():
    cube = inert_cube(PointedSet(3))
    assert subcube(cube, set(), {1, 2, 3}).vertices == cube.vertices
    sub = subcube(cube, {1}, {1, 2})
    assert sorted(map(sorted, sub.vertices)) == [[1], [1, 2]]
    assert len(subcube(cube, {2}, {2}).vertices) == 1
    with pytest.raises(ValueError):
        subcube(cube, {1}, {2})
