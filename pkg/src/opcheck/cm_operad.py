"""The operad CM: pointed sets with a marked subset, in two predicate variants.

An object is ``(S, U)`` with ``U`` a subset of S°.  A pointed map
``f: S -> T`` is a morphism ``(S, U) -> (T, V)`` when every ``v`` in ``V``
has exactly one marked preimage (``literal``); the ``strengthened`` variant
additionally forbids marked elements from landing on unmarked non-base
targets.  The color ``a`` is ``(<1>, {})`` and ``m`` is ``(<1>, {1})``.
"""

from __future__ import annotations

import enum
import itertools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable

from .fincat import (FiberedCategory, FinCategory, FunctorData,
                     fstar_category, is_cocartesian_edge, segal_comparison)
from .finset import BASE, PointedMap, PointedSet, enumerate_maps
from .verdict import Verdict


class Variant(enum.Enum):
    LITERAL = "literal"
    STRENGTHENED = "strengthened"

    def __lt__(self, other: "Variant") -> bool:
        order = (Variant.LITERAL, Variant.STRENGTHENED)
        return order.index(self) < order.index(other)

    def __str__(self) -> str:
        return self.value


def as_variant(v) -> Variant:
    return v if isinstance(v, Variant) else Variant(str(v))


@dataclass(frozen=True, slots=True)
class CMObject:
    base: PointedSet
    marked: frozenset

    def __post_init__(self):
        if not self.marked <= frozenset(self.base.interior):
            raise ValueError(f"marked set {sorted(self.marked)} not inside {self.base}°")

    @classmethod
    def of(cls, n: int, marked: Iterable[int] = ()) -> "CMObject":
        return cls(PointedSet(n), frozenset(marked))

    @property
    def arity(self) -> int:
        return self.base.arity

    def sort_key(self) -> tuple:
        return (self.base.arity, len(self.marked), tuple(sorted(self.marked)))

    def __str__(self) -> str:
        return f"({self.base.arity}|{','.join(map(str, sorted(self.marked)))})"


COLOR_A = CMObject.of(1)
COLOR_M = CMObject.of(1, [1])
COLORS = {"a": COLOR_A, "m": COLOR_M}

_OBJ_RE = re.compile(r"^\s*\(\s*(\d+)\s*\|\s*([\d,\s]*)\)\s*$")


def parse_cm_object(text: str) -> CMObject:
    """Parse ``"(2|1,2)"``; colors ``"a"`` and ``"m"`` are accepted too."""
    if text.strip() in COLORS:
        return COLORS[text.strip()]
    match = _OBJ_RE.match(text)
    if not match:
        raise ValueError(f"malformed CM object {text!r}")
    body = match[2].strip()
    return CMObject.of(int(match[1]), (int(t) for t in body.split(",")) if body else ())


@dataclass(frozen=True, slots=True)
class CMMorphism:
    underlying: PointedMap
    source: CMObject
    target: CMObject
    variant: Variant

    def then(self, g: "CMMorphism") -> "CMMorphism":
        return CMMorphism(self.underlying.then(g.underlying), self.source,
                          g.target, self.variant)

    def __str__(self) -> str:
        imgs = ",".join(map(str, self.underlying.images))
        return f"{self.source}->{self.target}:{imgs}"


def _predicate(f: PointedMap, src: CMObject, tgt: CMObject, strengthened: bool) -> bool:
    hits = Counter(f.images[u - 1] for u in src.marked)
    if any(hits[v] != 1 for v in tgt.marked):
        return False
    if strengthened:
        return all(t == BASE or t in tgt.marked for t in hits)
    return True


def is_cm_morphism(f: PointedMap, src: CMObject, tgt: CMObject, variant) -> bool:
    if f.source != src.base or f.target != tgt.base:
        raise ValueError(f"map {f} does not run from {src.base} to {tgt.base}")
    return _predicate(f, src, tgt, as_variant(variant) is Variant.STRENGTHENED)


def at_most_one(f: PointedMap, src: CMObject, tgt: CMObject) -> bool:
    """A deliberately weakened predicate used to exercise closure_check."""
    hits = Counter(f.images[u - 1] for u in src.marked)
    return all(hits[v] <= 1 for v in tgt.marked)


def cm_objects(bound: int) -> list[CMObject]:
    objs = [CMObject.of(n, c) for n in range(bound + 1)
            for k in range(n + 1) for c in itertools.combinations(range(1, n + 1), k)]
    return sorted(objs, key=CMObject.sort_key)


def _valid_arrows(objects, predicate, variant):
    arrows = []
    for x in objects:
        for y in objects:
            for f in enumerate_maps(x.base, y.base):
                if predicate(f, x, y):
                    arrows.append(CMMorphism(f, x, y, variant))
    return arrows


def build_cm_truncation(bound: int, variant) -> FiberedCategory:
    """All CM objects of arity <= bound over the F_* truncation.

    Composites are computed in F_*; a composite violating the predicate is
    simply absent, which ``closure_check`` reports.
    """
    if bound < 1:
        raise ValueError("truncation bound must be >= 1")
    variant = as_variant(variant)
    strong = variant is Variant.STRENGTHENED
    objects = cm_objects(bound)
    arrows = _valid_arrows(objects, lambda f, x, y: _predicate(f, x, y, strong), variant)
    total = FinCategory(
        objects, arrows,
        {a: a.source for a in arrows}, {a: a.target for a in arrows},
        {x: CMMorphism(PointedMap.identity(x.base), x, x, variant) for x in objects},
        CMMorphism.then, name=f"CM[{variant}]<={bound}")
    base = fstar_category(bound)
    projection = FunctorData(total, base, lambda x: x.base, lambda a: a.underlying)
    return FiberedCategory(total, projection)


def closure_check(bound: int, variant=Variant.STRENGTHENED,
                  predicate: Callable | None = None) -> Verdict:
    """Identities valid and valid morphisms closed under composition."""
    variant = as_variant(variant)
    if predicate is None:
        strong = variant is Variant.STRENGTHENED
        predicate = lambda f, x, y: _predicate(f, x, y, strong)  # noqa: E731
    objects = cm_objects(bound)
    for x in objects:
        if not predicate(PointedMap.identity(x.base), x, x):
            return Verdict.failed("closure_identity", {"object": x})
    arrows = _valid_arrows(objects, predicate, variant)
    out = {}
    for a in arrows:
        out.setdefault(a.source, []).append(a)
    for f in arrows:
        for g in out.get(f.target, ()):
            h = f.underlying.then(g.underlying)
            if not predicate(h, f.source, g.target):
                return Verdict.failed("closure_composition",
                                      {"first": f, "second": g, "composite": h})
    return Verdict.passed("closure", bound=bound, arrows=len(arrows))


def tensor_of(inputs: Iterable[str]) -> CMObject:
    """The object (<n>, {i : inputs_i = m}) for a list of colors."""
    inputs = list(inputs)
    for c in inputs:
        if c not in COLORS:
            raise ValueError(f"unknown color {c!r}; expected 'a' or 'm'")
    return CMObject.of(len(inputs), (i for i, c in enumerate(inputs, start=1) if c == "m"))


def mul_set(inputs: Iterable[str], output: str, variant) -> list[CMMorphism]:
    """Multimorphisms: active maps from the tensor of inputs to one color."""
    variant = as_variant(variant)
    src = tensor_of(inputs)
    if output not in COLORS:
        raise ValueError(f"unknown color {output!r}; expected 'a' or 'm'")
    tgt = COLORS[output]
    return [CMMorphism(f, src, tgt, variant)
            for f in enumerate_maps(src.base, tgt.base)
            if f.is_active and is_cm_morphism(f, src, tgt, variant)]


def segal_fiber(n: int, variant):
    """The fiber over <n> and its comparison functor to (fiber over <1>)^n."""
    p = build_cm_truncation(max(n, 1), variant)
    fiber, functor, problem = segal_comparison(p, n)
    if problem is not None:
        raise ValueError(f"Segal comparison ill-defined: {problem}")
    return fiber, functor


# ---------------------------------------------------------------------------
# the embedding of F° (pointed maps <1> -> S) as the objects with |U| <= 1

@dataclass(frozen=True, slots=True)
class FoObject:
    target: PointedSet
    point: int

    def __post_init__(self):
        if not 0 <= self.point <= self.target.arity:
            raise ValueError(f"point {self.point} not in {self.target}")

    def __str__(self) -> str:
        return f"{self.target}@{'*' if self.point == BASE else self.point}"


def phi_embed(o: FoObject, variant=None) -> CMObject:
    marked = () if o.point == BASE else (o.point,)
    return CMObject(o.target, frozenset(marked))


def fo_objects(bound: int) -> list[FoObject]:
    return [FoObject(PointedSet(n), j) for n in range(bound + 1) for j in range(n + 1)]


def fo_hom(x: FoObject, y: FoObject) -> list[PointedMap]:
    return [f for f in enumerate_maps(x.target, y.target) if f(x.point) == y.point]


def phi_check(bound: int, variant) -> Verdict:
    """phi is injective onto the |U| <= 1 objects, bijective on hom-sets,
    and sends marked (inert) edges to cocartesian edges."""
    variant = as_variant(variant)
    p = build_cm_truncation(bound, variant)
    cat = p.total
    fo = fo_objects(bound)
    images = {}
    for o in fo:
        x = phi_embed(o, variant)
        if x in images:
            return Verdict.failed("phi_injective", {"objects": [images[x], o]})
        images[x] = o
    small = [x for x in cat.objects if len(x.marked) <= 1]
    for x in small:
        if x not in images:
            return Verdict.failed("phi_surjective", {"object": x})
    for o1 in fo:
        for o2 in fo:
            x, y = phi_embed(o1, variant), phi_embed(o2, variant)
            fo_side = fo_hom(o1, o2)
            cm_side = [a.underlying for a in cat.hom(x, y)]
            if fo_side != cm_side:
                return Verdict.failed("phi_hom_bijection",
                                      {"source": x, "target": y,
                                       "fo_count": len(fo_side), "cm_count": len(cm_side),
                                       "fo_only": sorted(set(map(str, fo_side)) - set(map(str, cm_side))),
                                       "cm_only": sorted(set(map(str, cm_side)) - set(map(str, fo_side)))})
            for f in fo_side:
                if f.is_inert:
                    e = CMMorphism(f, x, y, variant)
                    if not is_cocartesian_edge(p, e):
                        return Verdict.failed("phi_marked_edges",
                                              {"arrow": e, "base_map": f})
    return Verdict.passed("phi", bound=bound, variant=str(variant),
                          fo_objects=len(fo), image_objects=len(small))


def canonical_lift_target(x: CMObject, f: PointedMap) -> CMObject:
    """The target (T, f(U) intersected with T°) of the canonical inert lift."""
    return CMObject(f.target, frozenset(f(u) for u in x.marked) - {BASE})
