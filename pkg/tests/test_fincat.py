import json

import pytest

from opcheck.cm_operad import CMMorphism, CMObject, Variant, build_cm_truncation
from opcheck.fincat import (FiberedCategory, FinCategory, FunctorData, canonical_lift,
                            categories_equivalent, categories_isomorphic, category_from_json,
                            category_to_json, check_category, check_functor,
                            check_operad_axioms, delete_arrows, fstar_category,
                            full_subcategory, identity_fibration, identity_functor,
                            inert_cube_lift, is_cocartesian_edge, product_category)
from opcheck.finset import PointedMap, PointedSet, rho


def chain(bad=False):
    """The poset 0 -> 1 -> 2, optionally with a wrong composite."""
    arrows = ["id0", "id1", "id2", "a", "b", "ba"]
    src = {"id0": 0, "id1": 1, "id2": 2, "a": 0, "b": 1, "ba": 0}
    tgt = {"id0": 0, "id1": 1, "id2": 2, "a": 1, "b": 2, "ba": 2}
    ids = {0: "id0", 1: "id1", 2: "id2"}
    comp = {}
    for f in arrows:
        for g in arrows:
            if tgt[f] != src[g]:
                continue
            if f in ids.values():
                comp[(f, g)] = g
            elif g in ids.values():
                comp[(f, g)] = f
            else:
                comp[(f, g)] = "ba"
    if bad:
        comp[("a", "b")] = "a"
    return FinCategory([0, 1, 2], arrows, src, tgt, ids, comp, name="chain")


def idempotent():
    comp = {("id", "id"): "id", ("id", "e"): "e", ("e", "id"): "e", ("e", "e"): "e"}
    return FinCategory(["*"], ["id", "e"], {"id": "*", "e": "*"}, {"id": "*", "e": "*"},
                       {"*": "id"}, comp, name="idem")


def point():
    return FinCategory(["*"], ["id"], {"id": "*"}, {"id": "*"}, {"*": "id"},
                       {("id", "id"): "id"})


def test_check_category_examples():
    assert check_category(chain())
    bad = check_category(chain(bad=True))
    assert not bad
    assert bad.witness == {"first": "a", "second": "b", "composite": "a"}
    assert check_category(idempotent())


@pytest.mark.parametrize("n", [0, 1, 2])
def test_fstar_truncations_are_categories(n):
    assert check_category(fstar_category(n))


def test_check_functor_examples():
    c = chain()
    assert check_functor(identity_functor(c))
    assert check_functor(FunctorData(c, point(), lambda x: "*", lambda f: "id"))
    scrambled = {f: f for f in c.arrows}
    scrambled["ba"] = "a"
    verdict = check_functor(FunctorData(c, c, lambda x: x, scrambled))
    assert not verdict


def test_isomorphism_examples():
    c = chain()
    assert categories_isomorphic(identity_functor(c))
    sub = full_subcategory(c, [0, 1])
    inclusion = FunctorData(sub, c, lambda x: x, lambda f: f)
    assert check_functor(inclusion)
    verdict = categories_isomorphic(inclusion)
    assert not verdict
    assert verdict.witness == {"kind": "object", "problem": "not_hit", "element": 2}


def test_equivalence_is_weaker_than_isomorphism():
    # two isomorphic objects vs. a point: equivalent, not isomorphic
    arrows = ["i0", "i1", "u", "v"]
    src = {"i0": 0, "i1": 1, "u": 0, "v": 1}
    tgt = {"i0": 0, "i1": 1, "u": 1, "v": 0}
    comp = {("i0", "i0"): "i0", ("i1", "i1"): "i1", ("i0", "u"): "u", ("u", "i1"): "u",
            ("i1", "v"): "v", ("v", "i0"): "v", ("u", "v"): "i0", ("v", "u"): "i1"}
    iso = FinCategory([0, 1], arrows, src, tgt, {0: "i0", 1: "i1"}, comp)
    assert check_category(iso)
    F = FunctorData(point(), iso, lambda x: 0, lambda f: "i0")
    assert not categories_isomorphic(F)
    assert categories_equivalent(F)


def test_product_of_nothing_is_terminal():
    t = product_category([])
    assert t.objects == [()] and t.arrows == [()]
    assert check_category(t)
    assert check_category(product_category([chain(), idempotent()]))


def test_json_round_trip():
    c = chain()
    doc = category_to_json(c)
    assert doc["version"] == 1
    back = category_from_json(json.dumps(doc))
    assert check_category(back)
    assert category_to_json(back) == json.loads(json.dumps(doc))
    with pytest.raises(ValueError):
        category_from_json(dict(doc, version=99))


def test_identity_fibration_every_arrow_cocartesian():
    p = identity_fibration(2)
    assert all(is_cocartesian_edge(p, f) for f in p.total.arrows)


def test_cm_lift_over_rho1_is_cocartesian():
    p = build_cm_truncation(3, Variant.STRENGTHENED)
    e = CMMorphism(rho(2, 1), CMObject.of(2, [1, 2]), CMObject.of(1, [1]), Variant.STRENGTHENED)
    assert e in p.total.order
    assert is_cocartesian_edge(p, e)
    assert canonical_lift(p, e.source, rho(2, 1)) == e


def test_deleting_the_lift_leaves_no_cocartesian_arrow():
    p = build_cm_truncation(3, Variant.STRENGTHENED)
    e = CMMorphism(rho(2, 1), CMObject.of(2, [1, 2]), CMObject.of(1, [1]), Variant.STRENGTHENED)
    total = delete_arrows(p.total, [e])
    q = FiberedCategory(total, FunctorData(total, p.base, p.projection.object_map,
                                           p.projection.arrow_map))
    assert canonical_lift(q, e.source, rho(2, 1)) is None
    assert not check_operad_axioms(q)


def test_fstar_without_zero_fails_inert_lifts():
    base = fstar_category(3)
    total = full_subcategory(base, [PointedSet(n) for n in (1, 2, 3)])
    p = FiberedCategory(total, FunctorData(total, base, lambda x: x, lambda f: f))
    verdict = check_operad_axioms(p)
    assert not verdict
    assert verdict.check == "operad_inert_lifts"
    assert verdict.witness["base_map"] == PointedMap.of(1, 0, (0,))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fstar_is_an_operad(n):
    assert check_operad_axioms(identity_fibration(n))


def test_operad_check_rejects_bound_zero():
    with pytest.raises(ValueError):
        check_operad_axioms(identity_fibration(0))


def _iso_stability(p):
    c = p.total
    isos = [u for u in c.arrows if c.is_isomorphism(u)]
    for e in c.arrows:
        base = is_cocartesian_edge(p, e)
        for u in isos:
            if c.target[u] == c.source[e]:
                assert is_cocartesian_edge(p, c.then(u, e)) == base, (u, e)
            if c.source[u] == c.target[e]:
                assert is_cocartesian_edge(p, c.then(e, u)) == base, (e, u)


@pytest.mark.parametrize("make", [
    lambda: identity_fibration(2),
    lambda: build_cm_truncation(1, Variant.STRENGTHENED),
    lambda: build_cm_truncation(1, Variant.LITERAL),
], ids=["fstar2", "cm1-strong", "cm1-literal"])
def test_cocartesian_stable_under_isomorphisms(make):
    p = make()
    assert len(p.total.arrows) <= 40
    _iso_stability(p)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lifted_inert_cubes_commute(n):
    p = build_cm_truncation(n, Variant.STRENGTHENED)
    assert check_operad_axioms(p)
    lifts = {}
    for x in p.total.objects:
        assert inert_cube_lift(p, x, lifts)
