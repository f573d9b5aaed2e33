"""The envelope Env(CM), the category F+ with disjoint union, and the comparison.

Env objects are triples ``(S, U, f: S° -> T)`` fibered over F_* by ``T_+``.
An arrow is a CM morphism ``phi`` together with a pointed map ``delta`` of
shapes such that ``delta o f = f' o phi`` as pointed maps: an element killed
by ``phi`` must lie in a block killed by ``delta`` and vice versa.

F+ objects are finite sets with a marked subset; morphisms restrict to a
bijection of marked sets.  Over F_*, an arrow between tuples of F+ objects
along ``delta`` is an F+ morphism out of each disjoint union of the blocks
sent to a common target; blocks sent to the basepoint are discarded.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cm_operad import CMMorphism, CMObject, Variant, _predicate, as_variant, cm_objects
from .fincat import (FiberedCategory, FinCategory, FunctorData, categories_isomorphic,
                     check_functor, fstar_category, full_subcategory)
from .finset import BASE, PointedMap, PointedSet, enumerate_maps
from .verdict import Verdict

DEFAULT_CEILING = 20_000


class CeilingExceeded(ValueError):
    pass


def ceiling() -> int:
    return int(os.environ.get("OPCHECK_CEILING", DEFAULT_CEILING))


# ---------------------------------------------------------------------------
# F+

def _label(x: int) -> str:
    return "*" if x == BASE else str(x)


@dataclass(frozen=True, slots=True)
class FPlusObject:
    carrier: tuple[int, ...]
    marked: frozenset

    def __post_init__(self):
        if len(set(self.carrier)) != len(self.carrier):
            raise ValueError(f"repeated carrier labels {self.carrier}")
        if not self.marked <= frozenset(self.carrier):
            raise ValueError(f"marked {sorted(self.marked)} not in carrier {self.carrier}")

    @classmethod
    def of(cls, k: int, marked: Iterable[int] = ()) -> "FPlusObject":
        return cls(tuple(range(1, k + 1)), frozenset(marked))

    def __len__(self) -> int:
        return len(self.carrier)

    def sort_key(self) -> tuple:
        return (len(self.carrier), len(self.marked), self.carrier,
                tuple(self.carrier.index(x) for x in sorted(self.marked)))

    def __str__(self) -> str:
        marks = [x for x in self.carrier if x in self.marked]
        return ("{" + ",".join(map(_label, self.carrier)) + "|"
                + ",".join(map(_label, marks)) + "}")


_FPLUS_RE = re.compile(r"^\s*\{\s*([\d,\s]*)\|\s*([\d,\s]*)\}\s*$")


def parse_fplus_object(text: str) -> FPlusObject:
    """Parse ``"{1,2|1}"``: carrier 1..2 with 1 marked."""
    match = _FPLUS_RE.match(text)
    if not match:
        raise ValueError(f"malformed F+ object {text!r}")
    carrier = [int(t) for t in match[1].split(",") if t.strip()]
    marked = [int(t) for t in match[2].split(",") if t.strip()]
    return FPlusObject(tuple(carrier), frozenset(marked))


@dataclass(frozen=True, slots=True)
class FPlusMorphism:
    source: FPlusObject
    target: FPlusObject
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[self.source.carrier.index(x)]

    def then(self, g: "FPlusMorphism") -> "FPlusMorphism":
        return FPlusMorphism(self.source, g.target, tuple(g(y) for y in self.images))

    def fiber(self, y: int) -> tuple[int, ...]:
        return tuple(x for x, fx in zip(self.source.carrier, self.images) if fx == y)

    def __str__(self) -> str:
        pairs = ",".join(f"{_label(x)}>{_label(y)}"
                         for x, y in zip(self.source.carrier, self.images))
        return f"{self.source}->{self.target}:{pairs}"


def is_fplus_morphism(f, src: FPlusObject, tgt: FPlusObject) -> bool:
    """``f`` (a mapping or a tuple in carrier order) restricts to U = V bijectively."""
    images = (tuple(f[x] for x in src.carrier) if hasattr(f, "keys")
              else tuple(f))
    if len(images) != len(src.carrier):
        raise ValueError("map does not cover the source carrier")
    if any(y not in tgt.carrier for y in images):
        return False
    marked_images = [y for x, y in zip(src.carrier, images) if x in src.marked]
    return (len(set(marked_images)) == len(marked_images)
            and set(marked_images) == set(tgt.marked))


def fplus_hom(src: FPlusObject, tgt: FPlusObject) -> list[FPlusMorphism]:
    return [FPlusMorphism(src, tgt, imgs)
            for imgs in itertools.product(tgt.carrier, repeat=len(src.carrier))
            if is_fplus_morphism(imgs, src, tgt)]


def fplus_objects(max_carrier: int) -> list[FPlusObject]:
    objs = [FPlusObject.of(k, c) for k in range(max_carrier + 1)
            for r in range(k + 1) for c in itertools.combinations(range(1, k + 1), r)]
    return sorted(objs, key=FPlusObject.sort_key)


def disjoint_union(parts: Sequence[FPlusObject]) -> FPlusObject:
    """Concatenate carriers and relabel positions 1..total."""
    marked, pos = [], 0
    for x in parts:
        marked.extend(pos + 1 + x.carrier.index(u) for u in x.marked)
        pos += len(x)
    return FPlusObject.of(pos, marked)


def _offsets(parts: Sequence[FPlusObject]) -> list[int]:
    return list(itertools.accumulate((len(x) for x in parts), initial=0))


def disjoint_union_morphism(fs: Sequence[FPlusMorphism]) -> FPlusMorphism:
    src = disjoint_union([f.source for f in fs])
    tgt = disjoint_union([f.target for f in fs])
    offs = _offsets([f.target for f in fs])
    images = tuple(offs[k] + 1 + f.target.carrier.index(y)
                   for k, f in enumerate(fs) for y in f.images)
    return FPlusMorphism(src, tgt, images)


def swap(x: FPlusObject, y: FPlusObject) -> FPlusMorphism:
    """The symmetry X + Y -> Y + X."""
    n, m = len(x), len(y)
    images = tuple(m + k for k in range(1, n + 1)) + tuple(range(1, m + 1))
    return FPlusMorphism(disjoint_union([x, y]), disjoint_union([y, x]), images)


def identity_fplus(x: FPlusObject) -> FPlusMorphism:
    return FPlusMorphism(x, x, x.carrier)


# ---------------------------------------------------------------------------
# (F+)^disjoint-union as a category over F_*

def _tuple_str(xs) -> str:
    return "(" + ";".join(map(str, xs)) + ")"


@dataclass(frozen=True, slots=True)
class FPlusArrow:
    """An arrow of tuples over ``shape_map``.

    ``images[t-1]`` lists, for each carrier element of block ``t``, its label
    in the target block ``shape_map(t)``; it is None for discarded blocks.
    """
    source: tuple
    target: tuple
    shape_map: PointedMap
    images: tuple

    def then(self, g: "FPlusArrow") -> "FPlusArrow":
        out = []
        for t, labels in enumerate(self.images, start=1):
            mid = self.shape_map(t)
            if labels is None or g.shape_map(mid) == BASE:
                out.append(None)
                continue
            block = self.target[mid - 1]
            nxt = g.images[mid - 1]
            out.append(tuple(nxt[block.carrier.index(y)] for y in labels))
        return FPlusArrow(self.source, g.target, self.shape_map.then(g.shape_map),
                          tuple(out))

    def component(self, t2: int) -> FPlusMorphism:
        """The F+ morphism out of the disjoint union of the blocks over ``t2``."""
        blocks = [t for t in range(1, len(self.source) + 1) if self.shape_map(t) == t2]
        src = disjoint_union([self.source[t - 1] for t in blocks])
        images = tuple(y for t in blocks for y in self.images[t - 1])
        return FPlusMorphism(src, self.target[t2 - 1], images)

    def __str__(self) -> str:
        parts = ["-" if labels is None else ",".join(map(_label, labels))
                 for labels in self.images]
        return (f"{_tuple_str(self.source)}->{_tuple_str(self.target)}"
                f"@{self.shape_map}:[{'/'.join(parts)}]")


def fplus_tuples(max_carrier: int, max_shape: int, max_total: int | None = None) -> list[tuple]:
    singles = fplus_objects(max_carrier)
    out = []
    for n in range(max_shape + 1):
        for xs in itertools.product(singles, repeat=n):
            if max_total is None or sum(map(len, xs)) <= max_total:
                out.append(xs)
    return sorted(out, key=lambda xs: (len(xs), sum(map(len, xs)),
                                       tuple(x.sort_key() for x in xs)))


def fplus_arrows_over(xs: tuple, ys: tuple, delta: PointedMap) -> list[FPlusArrow]:
    choices = []
    for t2 in range(1, len(ys) + 1):
        blocks = [t for t in range(1, len(xs) + 1) if delta(t) == t2]
        src = disjoint_union([xs[t - 1] for t in blocks])
        choices.append((blocks, fplus_hom(src, ys[t2 - 1])))
    arrows = []
    for pick in itertools.product(*(homs for _, homs in choices)):
        images = [None] * len(xs)
        for (blocks, _), f in zip(choices, pick):
            pos = 0
            for t in blocks:
                k = len(xs[t - 1])
                images[t - 1] = f.images[pos:pos + k]
                pos += k
        arrows.append(FPlusArrow(xs, ys, delta, tuple(images)))
    return arrows


def _fplus_identity(xs: tuple) -> FPlusArrow:
    return FPlusArrow(xs, xs, PointedMap.identity(PointedSet(len(xs))),
                      tuple(x.carrier for x in xs))


def build_fplus_over_fstar(max_carrier: int, max_shape: int,
                           max_total: int | None = None) -> FiberedCategory:
    """Tuples of F+ objects over F_*.

    ``max_carrier`` bounds each block, ``max_total`` (optional) the sum of
    block sizes, and ``max_shape`` the tuple length.
    """
    objects = fplus_tuples(max_carrier, max_shape, max_total)
    _guard(len(objects))
    arrows = []
    for xs in objects:
        for ys in objects:
            for delta in enumerate_maps(PointedSet(len(xs)), PointedSet(len(ys))):
                arrows.extend(fplus_arrows_over(xs, ys, delta))
    total = FinCategory(
        objects, arrows,
        {a: a.source for a in arrows}, {a: a.target for a in arrows},
        {xs: _fplus_identity(xs) for xs in objects},
        FPlusArrow.then, name="F+")
    base = fstar_category(max_shape)
    projection = FunctorData(total, base, lambda xs: PointedSet(len(xs)),
                             lambda a: a.shape_map)
    return FiberedCategory(total, projection)


# ---------------------------------------------------------------------------
# Env(CM)

@dataclass(frozen=True, slots=True)
class EnvObject:
    cm: CMObject
    shape: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        if len(self.assignment) != self.cm.arity:
            raise ValueError("assignment must be total on S°")
        if any(not 1 <= t <= self.shape for t in self.assignment):
            raise ValueError(f"assignment {self.assignment} leaves 1..{self.shape}")

    def block(self, t: int) -> tuple[int, ...]:
        return tuple(s for s, ft in enumerate(self.assignment, start=1) if ft == t)

    @property
    def is_canonical(self) -> bool:
        """Blocks occupy consecutive runs of S° in the order of T."""
        return list(self.assignment) == sorted(self.assignment)

    def sort_key(self) -> tuple:
        return (self.shape, self.cm.sort_key(), self.assignment)

    def __str__(self) -> str:
        return f"{self.cm}@{self.shape}:{','.join(map(str, self.assignment))}"


_ENV_RE = re.compile(r"^\s*(\(.*?\))\s*@\s*(\d+)\s*:\s*([\d,\s]*)$")


def parse_env_object(text: str) -> EnvObject:
    """Parse ``"(2|1)@2:1,2"``."""
    from .cm_operad import parse_cm_object

    match = _ENV_RE.match(text)
    if not match:
        raise ValueError(f"malformed envelope object {text!r}")
    body = match[3].strip()
    return EnvObject(parse_cm_object(match[1]), int(match[2]),
                     tuple(int(t) for t in body.split(",")) if body else ())


@dataclass(frozen=True, slots=True)
class EnvMorphism:
    cm_arrow: CMMorphism
    shape_map: PointedMap
    source: EnvObject
    target: EnvObject

    def then(self, g: "EnvMorphism") -> "EnvMorphism":
        return EnvMorphism(self.cm_arrow.then(g.cm_arrow),
                           self.shape_map.then(g.shape_map), self.source, g.target)

    def __str__(self) -> str:
        phi = ",".join(map(str, self.cm_arrow.underlying.images))
        delta = ",".join(map(str, self.shape_map.images))
        return f"{self.source}->{self.target}:{phi}/{delta}"


COHERENCES = ("commuting", "exempt")


def _phi_choices(x: EnvObject, y: EnvObject, delta: PointedMap, coherence: str):
    """Per element of S°, the images allowed by the coherence square."""
    per = []
    for s in x.cm.base.interior:
        dt = delta(x.assignment[s - 1])
        if coherence == "commuting":
            per.append((BASE,) if dt == BASE else y.block(dt))
        else:
            per.append((BASE,) + (() if dt == BASE else y.block(dt)))
    return per


def env_objects(bound: int, shape_bound: int) -> list[EnvObject]:
    objs = [EnvObject(x, k, f)
            for k in range(shape_bound + 1) for x in cm_objects(bound)
            for f in itertools.product(range(1, k + 1), repeat=x.arity)]
    return sorted(objs, key=EnvObject.sort_key)


def build_envelope(bound: int, shape_bound: int, variant,
                   coherence: str = "commuting") -> FiberedCategory:
    if coherence not in COHERENCES:
        raise ValueError(f"coherence must be one of {COHERENCES}")
    variant = as_variant(variant)
    strong = variant is Variant.STRENGTHENED
    objects = env_objects(bound, shape_bound)
    _guard(len(objects))
    arrows = []
    for x in objects:
        for y in objects:
            for delta in enumerate_maps(PointedSet(x.shape), PointedSet(y.shape)):
                for imgs in itertools.product(*_phi_choices(x, y, delta, coherence)):
                    f = PointedMap(x.cm.base, y.cm.base, imgs)
                    if _predicate(f, x.cm, y.cm, strong):
                        arrows.append(EnvMorphism(CMMorphism(f, x.cm, y.cm, variant),
                                                  delta, x, y))
    total = FinCategory(
        objects, arrows,
        {a: a.source for a in arrows}, {a: a.target for a in arrows},
        {x: EnvMorphism(CMMorphism(PointedMap.identity(x.cm.base), x.cm, x.cm, variant),
                        PointedMap.identity(PointedSet(x.shape)), x, x)
         for x in objects},
        EnvMorphism.then, name=f"Env(CM[{variant}])")
    base = fstar_category(shape_bound)
    projection = FunctorData(total, base, lambda x: PointedSet(x.shape),
                             lambda a: a.shape_map)
    return FiberedCategory(total, projection)


def _guard(count: int) -> None:
    if count > ceiling():
        raise CeilingExceeded(
            f"{count} objects exceeds the ceiling {ceiling()} (set OPCHECK_CEILING)")


# ---------------------------------------------------------------------------
# the comparison Env(CM) -> (F+)^disjoint-union

def comparison_on_objects(e: EnvObject) -> tuple[FPlusObject, ...]:
    """For each t in T, the block f^-1(t) relabeled 1..k, with its marks."""
    out = []
    for t in range(1, e.shape + 1):
        block = e.block(t)
        out.append(FPlusObject.of(len(block), (k for k, s in enumerate(block, start=1)
                                               if s in e.cm.marked)))
    return tuple(out)


def comparison_on_arrows(a: EnvMorphism) -> FPlusArrow | None:
    """Restrict phi blockwise; None when phi leaves the block prescribed by delta."""
    x, y, delta = a.source, a.target, a.shape_map
    phi = a.cm_arrow.underlying
    images = []
    for t in range(1, x.shape + 1):
        t2 = delta(t)
        if t2 == BASE:
            images.append(None)
            continue
        target_block = y.block(t2)
        labels = []
        for s in x.block(t):
            if phi(s) not in target_block:
                return None
            labels.append(target_block.index(phi(s)) + 1)
        images.append(tuple(labels))
    return FPlusArrow(comparison_on_objects(x), comparison_on_objects(y), delta,
                      tuple(images))


def canonical_representative(e: EnvObject) -> tuple[EnvObject, PointedMap]:
    """Reorder S° so blocks are consecutive; returns the object and the bijection."""
    order = sorted(e.cm.base.interior, key=lambda s: (e.assignment[s - 1], s))
    position = {s: k for k, s in enumerate(order, start=1)}
    sigma = PointedMap(e.cm.base, e.cm.base, tuple(position[s] for s in e.cm.base.interior))
    cm = CMObject(e.cm.base, frozenset(position[u] for u in e.cm.marked))
    return EnvObject(cm, e.shape, tuple(e.assignment[s - 1] for s in order)), sigma


def verify_envelope_iso(bound: int, shape_bound: int, variant,
                        coherence: str = "commuting") -> Verdict:
    """Compare Env(CM) with (F+)^disjoint-union at matching size bounds.

    Env objects differing only by a relabeling of S° collapse to one tuple
    of F+ objects, so the comparison is tested on the full subcategory of
    canonically labeled objects, after checking every object is isomorphic
    over the identity shape map to its canonical representative.  Stages,
    first failure wins: canonical representatives, object bijection,
    hom-set cardinalities per shape map, functoriality over F_*, and
    bijectivity on arrows.
    """
    if bound < 0 or shape_bound < 0:
        raise ValueError("bounds must be non-negative")
    variant = as_variant(variant)
    env = build_envelope(bound, shape_bound, variant, coherence)
    c = env.total
    details = {"bound": bound, "shape_bound": shape_bound, "variant": str(variant),
               "coherence": coherence, "env_objects": len(c.objects),
               "env_arrows": len(c.arrows)}

    for x in c.objects:
        rep, _ = canonical_representative(x)
        delta = PointedMap.identity(PointedSet(x.shape))
        if not any(c.is_isomorphism(u) for u in env.over(x, rep, delta)):
            return Verdict.failed("envelope_canonical_representative",
                                  {"object": x, "representative": rep}, **details)

    canon = full_subcategory(c, [x for x in c.objects if x.is_canonical],
                             name="Env canonical")
    canon_p = FiberedCategory(canon, FunctorData(canon, env.base, env.projection.object_map,
                                                 env.projection.arrow_map))
    fplus = build_fplus_over_fstar(bound, shape_bound, max_total=bound)
    details.update(canonical_objects=len(canon.objects), canonical_arrows=len(canon.arrows),
                   fplus_objects=len(fplus.total.objects),
                   fplus_arrows=len(fplus.total.arrows))

    seen = {}
    for x in canon.objects:
        image = comparison_on_objects(x)
        if image in seen:
            return Verdict.failed("envelope_objects",
                                  {"problem": "doubly_hit", "image": _tuple_str(image),
                                   "preimages": [seen[image], x]}, **details)
        seen[image] = x
    for xs in fplus.total.objects:
        if xs not in seen:
            return Verdict.failed("envelope_objects",
                                  {"problem": "not_hit", "element": _tuple_str(xs)}, **details)

    for x in canon.objects:
        for y in canon.objects:
            for delta in env.base.hom(PointedSet(x.shape), PointedSet(y.shape)):
                n_env = len(canon_p.over(x, y, delta))
                n_fplus = len(fplus.over(comparison_on_objects(x),
                                         comparison_on_objects(y), delta))
                if n_env != n_fplus:
                    return Verdict.failed("envelope_hom_cardinality",
                                          {"source": x, "target": y, "shape_map": delta,
                                           "env_count": n_env, "fplus_count": n_fplus},
                                          **details)

    functor = FunctorData(canon, fplus.total, comparison_on_objects, comparison_on_arrows)
    for a in canon.arrows:
        image = comparison_on_arrows(a)
        if image is None or image.shape_map != a.shape_map:
            return Verdict.failed("envelope_functor",
                                  {"arrow": a, "problem": "not over the same shape map"},
                                  **details)
    verdict = check_functor(functor)
    if not verdict:
        return Verdict.failed("envelope_functor", verdict.witness, **details)
    verdict = categories_isomorphic(functor)
    if not verdict:
        return Verdict.failed("envelope_isomorphism", verdict.witness, **details)
    return Verdict.passed("envelope_isomorphism", **details)


def marked_violations(bound: int, shape_bound: int, variant) -> list[EnvMorphism]:
    """Env arrows whose blockwise restriction is not an F+ morphism."""
    env = build_envelope(bound, shape_bound, variant)
    bad = []
    for a in env.total.arrows:
        image = comparison_on_arrows(a)
        if image is None or any(
                not is_fplus_morphism(image.component(t2).images,
                                      image.component(t2).source, image.target[t2 - 1])
                for t2 in range(1, len(image.target) + 1)):
            bad.append(a)
    return bad

