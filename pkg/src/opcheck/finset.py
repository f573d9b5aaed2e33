"""Finite pointed sets <n> = {*, 1, ..., n} and basepoint-preserving maps.

The basepoint is encoded as ``0`` throughout; non-base elements are the
integers ``1..n``.  A map ``<m> -> <n>`` stores the images of ``1..m``.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from .verdict import Verdict

BASE = 0


@dataclass(frozen=True, order=True, slots=True)
class PointedSet:
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity {self.arity}")

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(range(self.arity + 1))

    @property
    def interior(self) -> tuple[int, ...]:
        """The non-base elements S°."""
        return tuple(range(1, self.arity + 1))

    def __len__(self) -> int:
        return self.arity + 1

    def __str__(self) -> str:
        return f"<{self.arity}>"


@dataclass(frozen=True, slots=True)
class PointedMap:
    source: PointedSet
    target: PointedSet
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.source.arity:
            raise ValueError(
                f"{len(self.images)} images for source {self.source}")
        if any(not 0 <= i <= self.target.arity for i in self.images):
            raise ValueError(f"image out of range for target {self.target}")

    @classmethod
    def of(cls, m: int, n: int, images) -> "PointedMap":
        return cls(PointedSet(m), PointedSet(n), tuple(images))

    @classmethod
    def identity(cls, s: PointedSet) -> "PointedMap":
        return cls(s, s, s.interior)

    def __call__(self, x: int) -> int:
        return self.images[x - 1] if x else BASE

    def then(self, g: "PointedMap") -> "PointedMap":
        """The composite ``g o self``."""
        if g.source != self.target:
            raise ValueError(f"cannot compose {self} with {g}")
        gi = (BASE,) + g.images
        return PointedMap(self.source, g.target,
                          tuple(gi[i] for i in self.images))

    def fiber(self, y: int) -> tuple[int, ...]:
        return tuple(x for x in self.source.elements if self(x) == y)

    @property
    def is_inert(self) -> bool:
        counts = Counter(self.images)
        return all(counts[t] == 1 for t in self.target.interior)

    @property
    def is_active(self) -> bool:
        return BASE not in self.images

    def __str__(self) -> str:
        imgs = ",".join(map(str, self.images))
        return f"{self.source.arity}->{self.target.arity}:{imgs}"


_MAP_RE = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*:\s*([\d,\s]*)$")


def parse_map(text: str) -> PointedMap:
    """Parse ``"<m>-><n>:i1,...,im"`` with ``0`` for the basepoint."""
    match = _MAP_RE.match(text)
    if not match:
        raise ValueError(f"malformed map {text!r}")
    m, n, body = int(match[1]), int(match[2]), match[3].strip()
    images = [int(tok) for tok in body.split(",")] if body else []
    return PointedMap.of(m, n, images)


def rho(n: int, i: int) -> PointedMap:
    """The inert map <n> -> <1> whose only non-base fiber is {i}."""
    if not 1 <= i <= n:
        raise ValueError(f"rho index {i} outside 1..{n}")
    return PointedMap.of(n, 1, (1 if j == i else BASE for j in range(1, n + 1)))


def enumerate_maps(s: PointedSet, t: PointedSet) -> list[PointedMap]:
    """All pointed maps s -> t, lexicographic on image tuples."""
    return [PointedMap(s, t, imgs)
            for imgs in itertools.product(range(t.arity + 1), repeat=s.arity)]


def classify(f: PointedMap) -> tuple[bool, bool]:
    return f.is_inert, f.is_active


def factorize(f: PointedMap) -> tuple[PointedMap, PointedMap]:
    """Inert-active factorization through (f^-1(T°))_+ in source order."""
    kept = [x for x in f.source.interior if f(x) != BASE]
    mid = PointedSet(len(kept))
    position = {x: k for k, x in enumerate(kept, start=1)}
    inert = PointedMap(f.source, mid,
                       tuple(position.get(x, BASE) for x in f.source.interior))
    active = PointedMap(mid, f.target, tuple(f(x) for x in kept))
    return inert, active


def inert_maps_from(s: PointedSet, max_arity: int | None = None) -> Iterator[PointedMap]:
    """Every inert map out of ``s``; targets up to ``max_arity``."""
    top = s.arity if max_arity is None else min(s.arity, max_arity)
    for k in range(top + 1):
        for t in enumerate_maps(s, PointedSet(k)):
            if t.is_inert:
                yield t


def check_factorization_unique(f: PointedMap) -> Verdict:
    """Compare every inert-active factorization of ``f`` with the canonical one.

    Each alternative ``(i', a')`` must pass through an object of the same
    arity and be related to ``(i, a)`` by exactly one isomorphism ``s`` with
    ``s o i = i'`` and ``a' o s = a``.
    """
    i, a = factorize(f)
    k = i.target.arity
    if not (i.is_inert and a.is_active and i.then(a) == f):
        return Verdict.failed("factorize", {"map": f, "inert": i, "active": a})
    for alt_i in inert_maps_from(f.source):
        for alt_a in enumerate_maps(alt_i.target, f.target):
            if not alt_a.is_active or alt_i.then(alt_a) != f:
                continue
            if alt_i.target.arity != k:
                return Verdict.failed("factorization_arity",
                                      {"map": f, "inert": alt_i, "active": alt_a})
            isos = [s for s in enumerate_maps(i.target, alt_i.target)
                    if s.is_inert and s.is_active
                    and i.then(s) == alt_i and s.then(alt_a) == a]
            if len(isos) != 1:
                return Verdict.failed("factorization_iso",
                                      {"map": f, "inert": alt_i, "active": alt_a,
                                       "isomorphisms": len(isos)})
    return Verdict.passed("factorization_unique", map=str(f))


def _subset_key(v: frozenset) -> tuple:
    return (len(v), tuple(sorted(v)))


def _restriction(v: frozenset, w: frozenset) -> PointedMap:
    """The inert map V_+ -> W_+ (W a subset of V), identity on W, killing V - W."""
    sv, sw = sorted(v), sorted(w)
    position = {x: k for k, x in enumerate(sw, start=1)}
    return PointedMap.of(len(sv), len(sw), (position.get(x, BASE) for x in sv))


@dataclass(frozen=True)
class CubeDiagram:
    """Subsets of S° with the inert restriction maps between them.

    Vertices are subsets ``V``, realized as the pointed set ``V_+`` with its
    elements relabeled 1..|V| in numeric order.  ``edges`` holds every strict
    pair ``(V, V')`` with ``V'`` a proper subset of ``V``.
    """
    ambient: PointedSet
    vertices: tuple[frozenset, ...]
    edges: dict
    reverse_inclusion: bool = True

    def vertex_object(self, v: frozenset) -> PointedSet:
        return PointedSet(len(v))

    def edge(self, v: frozenset, w: frozenset) -> PointedMap:
        if v == w:
            return PointedMap.identity(PointedSet(len(v)))
        return self.edges[(v, w)]

    @cached_property
    def top(self) -> frozenset:
        return max(self.vertices, key=len)

    @cached_property
    def bottom(self) -> frozenset:
        return min(self.vertices, key=len)

    def faces_commute(self) -> bool:
        return all(self.edge(u, v).then(self.edge(v, w)) == self.edge(u, w)
                   for u in self.vertices for v in self.vertices
                   for w in self.vertices if w <= v <= u)


def _cube_on(ambient: PointedSet, vertices: list[frozenset]) -> CubeDiagram:
    vertices = sorted(vertices, key=_subset_key, reverse=True)
    edges = {(v, w): _restriction(v, w)
             for v in vertices for w in vertices if w < v}
    return CubeDiagram(ambient, tuple(vertices), edges)


def inert_cube(s: PointedSet) -> CubeDiagram:
    """The cube P_{S°} of subsets under reverse inclusion, with inert edges."""
    subsets = [frozenset(c) for k in range(s.arity + 1)
               for c in itertools.combinations(s.interior, k)]
    return _cube_on(s, subsets)


def subcube(c: CubeDiagram, lower, upper) -> CubeDiagram:
    """Restrict ``c`` to the subsets V with lower <= V <= upper."""
    lower, upper = frozenset(lower), frozenset(upper)
    if not lower <= upper:
        raise ValueError(f"{sorted(lower)} is not contained in {sorted(upper)}")
    if not upper <= frozenset(c.ambient.interior):
        raise ValueError(f"{sorted(upper)} is not a subset of {c.ambient}°")
    return _cube_on(c.ambient, [v for v in c.vertices if lower <= v <= upper])
