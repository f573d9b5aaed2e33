"""Explicit finite categories, functors, and fibrations over truncations of F_*.

Arrows are arbitrary hashable values listed in a canonical order; composition
is either a table ``{(f, g): g o f}`` or a callable returning the composite.
A composite that is not among the listed arrows counts as undefined, so a
broken arrow set (e.g. one not closed under composition) shows up as a
failed check rather than an exception.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable

from .finset import PointedMap, PointedSet, enumerate_maps, inert_maps_from, rho
from .verdict import Verdict

FORMAT_VERSION = 1


class FinCategory:
    def __init__(self, objects: Iterable, arrows: Iterable, source: Mapping,
                 target: Mapping, identity: Mapping, compose, name: str = ""):
        self.objects = list(objects)
        self.arrows = list(arrows)
        self.source = dict(source)
        self.target = dict(target)
        self.identity = dict(identity)
        self.name = name
        self._compose = compose
        self.order = {a: k for k, a in enumerate(self.arrows)}
        self.object_order = {x: k for k, x in enumerate(self.objects)}
        self._hom = defaultdict(list)
        self._out = defaultdict(list)
        self._in = defaultdict(list)
        for a in self.arrows:
            x, y = self.source[a], self.target[a]
            self._hom[(x, y)].append(a)
            self._out[x].append(a)
            self._in[y].append(a)

    def __repr__(self) -> str:
        return (f"FinCategory({self.name!r}, {len(self.objects)} objects, "
                f"{len(self.arrows)} arrows)")

    def hom(self, x, y) -> list:
        return self._hom.get((x, y), [])

    def out_arrows(self, x) -> list:
        return self._out.get(x, [])

    def in_arrows(self, y) -> list:
        return self._in.get(y, [])

    def then(self, f, g):
        """``g o f`` if defined and an arrow of this category, else None."""
        if self.target.get(f) != self.source.get(g):
            return None
        if callable(self._compose):
            h = self._compose(f, g)
        else:
            h = self._compose.get((f, g))
        return h if h in self.order else None

    def composable_pairs(self):
        for f in self.arrows:
            for g in self.out_arrows(self.target[f]):
                yield f, g

    def is_isomorphism(self, f) -> bool:
        return any(self.then(f, g) == self.identity[self.source[f]]
                   and self.then(g, f) == self.identity[self.target[f]]
                   for g in self.hom(self.target[f], self.source[f]))


@dataclass
class FunctorData:
    source: FinCategory
    target: FinCategory
    object_map: Callable | Mapping
    arrow_map: Callable | Mapping

    def ob(self, x):
        m = self.object_map
        return m(x) if callable(m) else m[x]

    def ar(self, f):
        m = self.arrow_map
        return m(f) if callable(m) else m[f]


def identity_functor(c: FinCategory) -> FunctorData:
    return FunctorData(c, c, lambda x: x, lambda f: f)


# ---------------------------------------------------------------------------
# constructions

def fstar_category(bound: int) -> FinCategory:
    """The full subcategory of F_* on <0>, ..., <bound>."""
    objects = [PointedSet(n) for n in range(bound + 1)]
    arrows = [f for s in objects for t in objects for f in enumerate_maps(s, t)]
    return FinCategory(
        objects, arrows,
        {f: f.source for f in arrows}, {f: f.target for f in arrows},
        {s: PointedMap.identity(s) for s in objects},
        lambda f, g: f.then(g), name=f"F*<={bound}")


def full_subcategory(c: FinCategory, objects: Iterable, name: str = "") -> FinCategory:
    keep = set(objects)
    arrows = [a for a in c.arrows if c.source[a] in keep and c.target[a] in keep]
    return FinCategory(
        [x for x in c.objects if x in keep], arrows,
        {a: c.source[a] for a in arrows}, {a: c.target[a] for a in arrows},
        {x: c.identity[x] for x in c.objects if x in keep},
        c.then, name=name or c.name)


def delete_arrows(c: FinCategory, doomed: Iterable, name: str = "") -> FinCategory:
    """Drop arrows; composites landing on a dropped arrow become undefined."""
    doomed = set(doomed)
    arrows = [a for a in c.arrows if a not in doomed]
    return FinCategory(
        c.objects, arrows,
        {a: c.source[a] for a in arrows}, {a: c.target[a] for a in arrows},
        c.identity, c.then, name=name or c.name)


def subcategory(c: FinCategory, objects: Iterable, arrows: Iterable,
                name: str = "") -> FinCategory:
    objects = list(objects)
    arrows = list(arrows)
    return FinCategory(
        objects, arrows,
        {a: c.source[a] for a in arrows}, {a: c.target[a] for a in arrows},
        {x: c.identity[x] for x in objects}, c.then, name=name)


def product_category(factors: list[FinCategory], name: str = "") -> FinCategory:
    """Componentwise product; the empty product is the terminal category."""
    objects = list(itertools.product(*(c.objects for c in factors)))
    arrows = list(itertools.product(*(c.arrows for c in factors)))

    def compose(f, g):
        parts = tuple(c.then(a, b) for c, a, b in zip(factors, f, g))
        return None if None in parts else parts

    return FinCategory(
        objects, arrows,
        {f: tuple(c.source[a] for c, a in zip(factors, f)) for f in arrows},
        {f: tuple(c.target[a] for c, a in zip(factors, f)) for f in arrows},
        {x: tuple(c.identity[o] for c, o in zip(factors, x)) for x in objects},
        compose, name=name or "x".join(c.name for c in factors) or "1")


# ---------------------------------------------------------------------------
# category and functor axioms

def check_category(c: FinCategory) -> Verdict:
    """Identities, composite endpoints, unit laws, associativity."""
    for x in c.objects:
        e = c.identity.get(x)
        if e not in c.order or c.source[e] != x or c.target[e] != x:
            return Verdict.failed("identity", {"object": x, "identity": e})
    for f, g in c.composable_pairs():
        h = c.then(f, g)
        if h is None:
            return Verdict.failed("composition_total", {"first": f, "second": g})
        if c.source[h] != c.source[f] or c.target[h] != c.target[g]:
            return Verdict.failed("composition_endpoints",
                                  {"first": f, "second": g, "composite": h})
    for f in c.arrows:
        if (c.then(c.identity[c.source[f]], f) != f
                or c.then(f, c.identity[c.target[f]]) != f):
            return Verdict.failed("unit_law", {"arrow": f})
    for f, g in c.composable_pairs():
        gf = c.then(f, g)
        for h in c.out_arrows(c.target[g]):
            if c.then(gf, h) != c.then(f, c.then(g, h)):
                return Verdict.failed("associativity",
                                      {"first": f, "second": g, "third": h})
    return Verdict.passed("category", objects=len(c.objects), arrows=len(c.arrows))


def check_functor(F: FunctorData) -> Verdict:
    src, tgt = F.source, F.target
    for x in src.objects:
        if F.ob(x) not in tgt.object_order:
            return Verdict.failed("functor_object", {"object": x, "image": F.ob(x)})
    for f in src.arrows:
        image = F.ar(f)
        if image not in tgt.order:
            return Verdict.failed("functor_arrow", {"arrow": f, "image": image})
        if (tgt.source[image] != F.ob(src.source[f])
                or tgt.target[image] != F.ob(src.target[f])):
            return Verdict.failed("functor_endpoints", {"arrow": f, "image": image})
    for x in src.objects:
        if F.ar(src.identity[x]) != tgt.identity[F.ob(x)]:
            return Verdict.failed("functor_identity", {"object": x})
    for f, g in src.composable_pairs():
        gf = src.then(f, g)
        if gf is None:
            return Verdict.failed("functor_source_composition",
                                  {"first": f, "second": g})
        if F.ar(gf) != tgt.then(F.ar(f), F.ar(g)):
            return Verdict.failed("functor_composition", {"first": f, "second": g})
    return Verdict.passed("functor")


def _bijection_witness(items, image, codomain, kind):
    hit = {}
    for a in items:
        b = image(a)
        if b in hit:
            return {"kind": kind, "problem": "doubly_hit", "image": b,
                    "preimages": [hit[b], a]}
        hit[b] = a
    for b in codomain:
        if b not in hit:
            return {"kind": kind, "problem": "not_hit", "element": b}
    return None


def categories_isomorphic(F: FunctorData) -> Verdict:
    """Pass iff the object and arrow maps are both bijective."""
    witness = _bijection_witness(F.source.objects, F.ob, F.target.objects, "object")
    if witness is None:
        witness = _bijection_witness(F.source.arrows, F.ar, F.target.arrows, "arrow")
    if witness is not None:
        return Verdict.failed("isomorphism", witness)
    return Verdict.passed("isomorphism", objects=len(F.source.objects),
                          arrows=len(F.source.arrows))


def categories_equivalent(F: FunctorData) -> Verdict:
    """Full faithfulness plus essential surjectivity, by brute force."""
    src, tgt = F.source, F.target
    for x in src.objects:
        for y in src.objects:
            fx, fy = F.ob(x), F.ob(y)
            witness = _bijection_witness(src.hom(x, y), F.ar, tgt.hom(fx, fy), "hom")
            if witness is not None:
                witness.update(source=x, target=y)
                return Verdict.failed("full_faithfulness", witness)
    images = {F.ob(x) for x in src.objects}
    for y in tgt.objects:
        if not any(tgt.is_isomorphism(u) for x in images for u in tgt.hom(x, y)):
            return Verdict.failed("essential_surjectivity", {"object": y})
    return Verdict.passed("equivalence", objects=len(src.objects),
                          arrows=len(src.arrows))


# ---------------------------------------------------------------------------
# fibrations over F_*

@dataclass
class FiberedCategory:
    """A category with a functor to a truncation of F_*."""
    total: FinCategory
    projection: FunctorData
    _over: dict = field(default_factory=dict, repr=False)

    @property
    def base(self) -> FinCategory:
        return self.projection.target

    @cached_property
    def bound(self) -> int:
        return max((s.arity for s in self.base.objects), default=-1)

    def over(self, x, y, fbar) -> list:
        """Arrows x -> y lying over the base arrow ``fbar``."""
        key = (x, y)
        table = self._over.get(key)
        if table is None:
            table = defaultdict(list)
            for a in self.total.hom(x, y):
                table[self.projection.ar(a)].append(a)
            self._over[key] = table
        return table.get(fbar, [])

    def fiber_objects(self, s: PointedSet) -> list:
        return [x for x in self.total.objects if self.projection.ob(x) == s]

    def fiber(self, s: PointedSet) -> FinCategory:
        """Objects over ``s`` and arrows over its identity."""
        ident = self.base.identity[s]
        objects = self.fiber_objects(s)
        arrows = [a for x in objects for y in objects for a in self.over(x, y, ident)]
        return subcategory(self.total, objects, arrows, name=f"fiber over {s}")


def identity_fibration(bound: int) -> FiberedCategory:
    base = fstar_category(bound)
    return FiberedCategory(base, identity_functor(base))


def is_cocartesian_edge(p: FiberedCategory, e) -> bool:
    """Brute-force the pushforward universal property of ``e``.

    For every ``h: X -> Z`` and every base ``g`` with ``g o p(e) = p(h)``
    there must be exactly one ``k`` over ``g`` with ``k o e = h``.
    """
    c, base = p.total, p.base
    x, y = c.source[e], c.target[e]
    ebar = p.projection.ar(e)
    t = base.target[ebar]
    for z in c.objects:
        homs = c.hom(x, z)
        if not homs:
            continue
        pz = p.projection.ob(z)
        factor = defaultdict(list)
        for gbar in base.hom(t, pz):
            factor[base.then(ebar, gbar)].append(gbar)
        for h in homs:
            for gbar in factor.get(p.projection.ar(h), ()):
                fillers = sum(1 for k in p.over(y, z, gbar) if c.then(e, k) == h)
                if fillers != 1:
                    return False
    return True


def canonical_lift(p: FiberedCategory, x, fbar, _cache: dict | None = None):
    """Least arrow out of ``x`` over ``fbar`` that is cocartesian, or None."""
    if _cache is not None and (x, fbar) in _cache:
        return _cache[(x, fbar)]
    found = None
    for a in p.total.out_arrows(x):
        if p.projection.ar(a) == fbar and is_cocartesian_edge(p, a):
            found = a
            break
    if _cache is not None:
        _cache[(x, fbar)] = found
    return found


def _check_inert_lifts(p, lifts):
    for x in p.total.objects:
        s = p.projection.ob(x)
        for f in inert_maps_from(s, p.bound):
            if canonical_lift(p, x, f, lifts) is None:
                return Verdict.failed("operad_inert_lifts", {"object": x, "base_map": f})
    return None


def _check_hom_decomposition(p, lifts, inert_only):
    c, base = p.total, p.base
    for x in c.objects:
        s = p.projection.ob(x)
        for y in c.objects:
            t = p.projection.ob(y)
            legs = [lifts[(y, rho(t.arity, i))] for i in t.interior]
            for f in base.hom(s, t):
                if inert_only and not f.is_inert:
                    continue
                lhs = p.over(x, y, f)
                factors = [p.over(x, c.target[leg], f.then(rho(t.arity, i)))
                           for i, leg in zip(t.interior, legs)]
                expected = 1
                for fac in factors:
                    expected *= len(fac)
                images = set()
                for g in lhs:
                    image = tuple(c.then(g, leg) for leg in legs)
                    if None in image:
                        return Verdict.failed("operad_hom_decomposition",
                                              {"source": x, "target": y, "base_map": f,
                                               "problem": "undefined_composite",
                                               "arrow": g})
                    images.add(image)
                if len(images) != len(lhs) or len(lhs) != expected:
                    return Verdict.failed("operad_hom_decomposition",
                                          {"source": x, "target": y, "base_map": f,
                                           "arrows_over_f": len(lhs),
                                           "distinct_images": len(images),
                                           "product_size": expected})
    return None


def segal_comparison(p: FiberedCategory, n: int, lifts: dict | None = None):
    """Fiber over <n> and its comparison functor to (fiber over <1>)^n.

    Objects go to the targets of the canonical lifts over each rho^i; an
    arrow ``u: X -> X'`` goes to the unique fiber arrow ``k`` with
    ``k o lift_i(X) = lift_i(X') o u``.  Returns ``(fiber, functor, problem)``
    where ``problem`` is a witness dict when the comparison is ill-defined.
    """
    lifts = {} if lifts is None else lifts
    s = PointedSet(n)
    fiber = p.fiber(s)
    unit = p.fiber(PointedSet(1))
    product = product_category([unit] * n, name=f"fiber<1>^{n}")
    c = p.total
    problem = None

    def leg(x, i):
        return canonical_lift(p, x, rho(n, i), lifts)

    object_map, arrow_map = {}, {}
    for x in fiber.objects:
        legs = [leg(x, i) for i in s.interior]
        if None in legs:
            problem = problem or {"problem": "missing_lift", "object": x}
            object_map[x] = None
            continue
        object_map[x] = tuple(c.target[a] for a in legs)
    for u in fiber.arrows:
        x, x2 = fiber.source[u], fiber.target[u]
        if object_map[x] is None or object_map[x2] is None:
            arrow_map[u] = None
            continue
        parts = []
        for i in s.interior:
            l1, l2 = leg(x, i), leg(x2, i)
            want = c.then(u, l2)
            cands = [k for k in unit.hom(c.target[l1], c.target[l2])
                     if c.then(l1, k) == want]
            if len(cands) != 1:
                problem = problem or {"problem": "induced_arrow", "arrow": u,
                                      "index": i, "candidates": len(cands)}
                parts.append(None)
            else:
                parts.append(cands[0])
        arrow_map[u] = tuple(parts)
    functor = FunctorData(fiber, product, object_map, arrow_map)
    return fiber, functor, problem


def check_operad_axioms(p: FiberedCategory, up_to_equivalence: bool = False,
                        inert_only: bool = False) -> Verdict:
    """The three 1-categorical operad conditions, first failure wins.

    ``inert_only`` restricts the hom-decomposition condition to inert base
    maps.  Every condition is evaluated and summarized in ``details``.
    """
    if p.bound < 1:
        raise ValueError("operad check needs a base truncation of bound >= 1")
    lifts: dict = {}
    summary = {}
    first = None

    closure = _closure_witness(p.total)
    summary["composition_closed"] = closure is None
    if closure is not None:
        first = Verdict.failed("operad_composition_closed", closure)

    v1 = _check_inert_lifts(p, lifts)
    summary["inert_lifts"] = v1 is None
    if first is None:
        first = v1
    if v1 is None:
        v2 = _check_hom_decomposition(p, lifts, inert_only)
        summary["hom_decomposition"] = v2 is None
        if first is None:
            first = v2
        v3 = None
        for n in range(p.bound + 1):
            _, functor, problem = segal_comparison(p, n, lifts)
            if problem is not None:
                v3 = Verdict.failed("operad_segal", dict(problem, arity=n))
                break
            check = categories_equivalent if up_to_equivalence else categories_isomorphic
            verdict = check(functor)
            if not verdict:
                v3 = Verdict.failed("operad_segal", dict(verdict.witness, arity=n))
                break
        summary["segal"] = v3 is None
        if first is None:
            first = v3
    details = {"bound": p.bound, "objects": len(p.total.objects),
               "arrows": len(p.total.arrows), "conditions": summary,
               "inert_only": inert_only, "up_to_equivalence": up_to_equivalence}
    if first is not None:
        return Verdict(False, first.check, first.witness, details)
    return Verdict.passed("operad", **details)


def _closure_witness(c: FinCategory):
    for f, g in c.composable_pairs():
        if c.then(f, g) is None:
            return {"first": f, "second": g}
    return None


def inert_cube_lift(p: FiberedCategory, x, lifts: dict | None = None) -> Verdict:
    """Lift the inert cube below ``p(x)`` by canonical lifts and test it commutes."""
    from .finset import inert_cube

    lifts = {} if lifts is None else lifts
    cube = inert_cube(p.projection.ob(x))
    top = cube.top
    vertex = {top: x}
    arrow = {}
    for v in cube.vertices:
        if v == top:
            continue
        a = canonical_lift(p, x, cube.edge(top, v), lifts)
        if a is None:
            return Verdict.failed("cube_lift", {"object": x, "vertex": sorted(v)})
        vertex[v] = p.total.target[a]
        arrow[(top, v)] = a
    for (v, w), edge in cube.edges.items():
        if v == top:
            continue
        a = canonical_lift(p, vertex[v], edge, lifts)
        if a is None or p.total.target[a] != vertex[w]:
            return Verdict.failed("cube_lift", {"object": x, "edge": [sorted(v), sorted(w)]})
        arrow[(v, w)] = a
    for (u, v), a in arrow.items():
        for w in cube.vertices:
            if w < v and p.total.then(a, arrow[(v, w)]) != arrow[(u, w)]:
                return Verdict.failed("cube_commutes",
                                      {"object": x, "path": [sorted(u), sorted(v), sorted(w)]})
    return Verdict.passed("cube_lift", object=str(x), vertices=len(cube.vertices))


# ---------------------------------------------------------------------------
# JSON interchange

def category_to_json(c: FinCategory) -> dict:
    names = {a: str(a) for a in c.arrows}
    if len(set(names.values())) != len(names):
        raise ValueError("arrow labels are not unique; cannot export")
    return {
        "version": FORMAT_VERSION,
        "name": c.name,
        "objects": [str(x) for x in c.objects],
        "arrows": [{"id": names[a], "src": str(c.source[a]), "tgt": str(c.target[a])}
                   for a in c.arrows],
        "comp": [[names[f], names[g], names[c.then(f, g)]]
                 for f, g in c.composable_pairs() if c.then(f, g) is not None],
        "ids": {str(x): names[c.identity[x]] for x in c.objects},
    }


def category_from_json(doc: Mapping[str, Any] | str) -> FinCategory:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("version", FORMAT_VERSION) != FORMAT_VERSION:
        raise ValueError(f"unsupported category format version {doc.get('version')}")
    arrows = [a["id"] for a in doc["arrows"]]
    return FinCategory(
        doc["objects"], arrows,
        {a["id"]: a["src"] for a in doc["arrows"]},
        {a["id"]: a["tgt"] for a in doc["arrows"]},
        doc["ids"],
        {(f, g): h for f, g, h in doc["comp"]},
        name=doc.get("name", ""))

