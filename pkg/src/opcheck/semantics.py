"""Finite commutative monoids, modules, and the functor A_{E,M} in finite sets.

An F+ object evaluates to the set of assignments giving each unmarked
element a value in E and each marked element a value in M.  A morphism
folds the E-values over each fiber and, over a marked target, acts with
that product on the unique marked source value.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import reduce
from importlib import resources
from pathlib import Path
from typing import Callable, Hashable, Sequence

from .cm_operad import CMMorphism, CMObject, Variant
from .envelope import (EnvMorphism, EnvObject, FPlusArrow, FPlusMorphism, FPlusObject,
                       comparison_on_arrows, comparison_on_objects)
from .finset import BASE, PointedMap, PointedSet, enumerate_maps, inert_cube, subcube
from .verdict import Verdict


@dataclass(frozen=True)
class CommMonoid:
    elements: tuple
    unit: Hashable
    mult: dict

    def __post_init__(self):
        els = set(self.elements)
        if self.unit not in els:
            raise ValueError(f"unit {self.unit!r} is not an element")
        for a, b in itertools.product(self.elements, repeat=2):
            if (a, b) not in self.mult:
                raise ValueError(f"multiplication table missing ({a!r}, {b!r})")
            if self.mult[(a, b)] not in els:
                raise ValueError(f"product of ({a!r}, {b!r}) is not an element")

    def __call__(self, a, b):
        return self.mult[(a, b)]

    def fold(self, values: Sequence) -> Hashable:
        return reduce(self, values, self.unit)


@dataclass(frozen=True)
class ModuleData:
    monoid: CommMonoid
    elements: tuple
    action: dict

    def __post_init__(self):
        els = set(self.elements)
        for e, m in itertools.product(self.monoid.elements, self.elements):
            if (e, m) not in self.action:
                raise ValueError(f"action table missing ({e!r}, {m!r})")
            if self.action[(e, m)] not in els:
                raise ValueError(f"action of ({e!r}, {m!r}) is not a module element")

    def act(self, e, m):
        return self.action[(e, m)]


def check_algebra(E: CommMonoid, M: ModuleData) -> Verdict:
    els = E.elements
    for a in els:
        if E(E.unit, a) != a or E(a, E.unit) != a:
            return Verdict.failed("monoid_unit", {"element": a})
    for a, b in itertools.product(els, repeat=2):
        if E(a, b) != E(b, a):
            return Verdict.failed("monoid_commutativity", {"elements": [a, b]})
    for a, b, c in itertools.product(els, repeat=3):
        if E(E(a, b), c) != E(a, E(b, c)):
            return Verdict.failed("monoid_associativity", {"elements": [a, b, c]})
    for m in M.elements:
        if M.act(E.unit, m) != m:
            return Verdict.failed("module_unit", {"element": m})
    for a, b, m in itertools.product(els, els, M.elements):
        if M.act(E(a, b), m) != M.act(a, M.act(b, m)):
            return Verdict.failed("module_associativity", {"elements": [a, b, m]})
    return Verdict.passed("algebra", monoid_size=len(els), module_size=len(M.elements))


def algebra_from_json(doc: dict) -> tuple[CommMonoid, ModuleData]:
    mon, mod = doc["monoid"], doc["module"]
    e_els, m_els = tuple(mon["elems"]), tuple(mod["elems"])
    try:
        mult = {(a, b): mon["mult"][i][j]
                for i, a in enumerate(e_els) for j, b in enumerate(e_els)}
        action = {(e, m): mod["action"][i][j]
                  for i, e in enumerate(e_els) for j, m in enumerate(m_els)}
    except (IndexError, TypeError) as exc:
        raise ValueError(f"table is not total: {exc}") from None
    E = CommMonoid(e_els, mon["unit"], mult)
    return E, ModuleData(E, m_els, action)


BUNDLED = ("z2_additive.json", "max_monoid.json")


def load_algebra(name_or_path: str | Path) -> tuple[CommMonoid, ModuleData]:
    """Read algebra JSON from a path, falling back to the bundled examples."""
    path = Path(name_or_path)
    if path.exists():
        text = path.read_text()
    elif path.name in BUNDLED:
        text = resources.files("opcheck.data").joinpath(path.name).read_text()
    else:
        raise FileNotFoundError(f"no algebra file {name_or_path}")
    return algebra_from_json(json.loads(text))


# ---------------------------------------------------------------------------
# evaluation on F+

def eval_object(E: CommMonoid, M: ModuleData, x: FPlusObject) -> list[tuple]:
    factors = [M.elements if c in x.marked else E.elements for c in x.carrier]
    return list(itertools.product(*factors))


def eval_morphism(E: CommMonoid, M: ModuleData, f: FPlusMorphism) -> dict:
    """Fold over each fiber; act on the marked element over a marked target."""
    src = f.source.carrier
    fibers = []
    for t in f.target.carrier:
        fib = [src.index(s) for s in f.fiber(t)]
        marked = [k for k in fib if src[k] in f.source.marked]
        plain = [k for k in fib if src[k] not in f.source.marked]
        fibers.append((t in f.target.marked, plain, marked))
    table = {}
    for x in eval_object(E, M, f.source):
        out = []
        for is_marked, plain, marked in fibers:
            e = E.fold([x[k] for k in plain])
            out.append(M.act(e, x[marked[0]]) if is_marked else e)
        table[x] = tuple(out)
    return table


def eval_tuple(E, M, xs: Sequence[FPlusObject]) -> list[tuple]:
    """Cartesian product of block values; a point for the empty tuple."""
    return [tuple(p) for p in itertools.product(*(eval_object(E, M, x) for x in xs))]


def eval_fplus_arrow(E, M, a: FPlusArrow, evaluator: Callable = eval_morphism) -> dict:
    comps = [evaluator(E, M, a.component(t2)) for t2 in range(1, len(a.target) + 1)]
    blocks = [[t for t in range(1, len(a.source) + 1) if a.shape_map(t) == t2]
              for t2 in range(1, len(a.target) + 1)]
    table = {}
    for x in eval_tuple(E, M, a.source):
        table[x] = tuple(comp[tuple(v for t in blk for v in x[t - 1])]
                         for comp, blk in zip(comps, blocks))
    return table


def realize_multimorphism(E, M, arrow: CMMorphism) -> dict:
    """Evaluate a multimorphism (S, U) -> color through the envelope."""
    src = EnvObject(arrow.source, 1, (1,) * arrow.source.arity)
    tgt = EnvObject(arrow.target, 1, (1,) * arrow.target.arity)
    one = PointedMap.identity(PointedSet(1))
    image = comparison_on_arrows(EnvMorphism(arrow, one, src, tgt))
    comp = eval_morphism(E, M, image.component(1))
    return {x: comp[x][0] for x in comp}


# ---------------------------------------------------------------------------
# the functor A_{E,M} on F_*

def embed_fstar(s: PointedSet) -> FPlusObject:
    """<n> as ({1..n, *}, {*}); the basepoint slot carries the module value."""
    return FPlusObject(s.interior + (BASE,), frozenset({BASE}))


def embed_map(f: PointedMap) -> FPlusMorphism:
    return FPlusMorphism(embed_fstar(f.source), embed_fstar(f.target),
                         f.images + (BASE,))


@dataclass
class SemFunctor:
    bound: int
    object_values: dict = field(default_factory=dict)
    arrow_values: dict = field(default_factory=dict)


def build_A(E: CommMonoid, M: ModuleData, bound: int,
            evaluator: Callable = eval_morphism) -> SemFunctor:
    A = SemFunctor(bound)
    objects = [PointedSet(n) for n in range(bound + 1)]
    for s in objects:
        A.object_values[s] = eval_object(E, M, embed_fstar(s))
    for s in objects:
        for t in objects:
            for f in enumerate_maps(s, t):
                A.arrow_values[f] = evaluator(E, M, embed_map(f))
    return A


def check_cardinality(A: SemFunctor, E: CommMonoid, M: ModuleData) -> Verdict:
    for s, values in A.object_values.items():
        want = len(E.elements) ** s.arity * len(M.elements)
        if len(values) != want or len(set(values)) != want:
            return Verdict.failed("cardinality", {"object": s, "size": len(values),
                                                  "expected": want})
    return Verdict.passed("cardinality", objects=len(A.object_values))


def check_functoriality(A: SemFunctor) -> Verdict:
    for s, values in A.object_values.items():
        ident = A.arrow_values[PointedMap.identity(s)]
        for x in values:
            if ident[x] != x:
                return Verdict.failed("functor_identity", {"object": s, "input": x})
    out = {}
    for f in A.arrow_values:
        out.setdefault(f.source, []).append(f)
    pairs = 0
    for f, Af in A.arrow_values.items():
        for g in out.get(f.target, ()):
            pairs += 1
            Agf, Ag = A.arrow_values[f.then(g)], A.arrow_values[g]
            for x in A.object_values[f.source]:
                if Agf[x] != Ag[Af[x]]:
                    return Verdict.failed("functor_composition",
                                          {"first": f, "second": g, "input": x,
                                           "composite": Agf[x], "stepwise": Ag[Af[x]]})
    return Verdict.passed("functoriality", bound=A.bound, composable_pairs=pairs)


# ---------------------------------------------------------------------------
# inert cubes in the finite-set semantics

def _cube_values(E, M, s: PointedSet, marked: frozenset):
    from .cm_operad import canonical_lift_target

    cube = inert_cube(s)
    root = CMObject(s, marked)
    env = {}
    for v in cube.vertices:
        cm = canonical_lift_target(root, cube.edge(cube.top, v))
        env[v] = EnvObject(cm, cm.arity, cm.base.interior)
    values = {v: eval_tuple(E, M, comparison_on_objects(env[v])) for v in cube.vertices}
    maps = {}
    for (v, w), edge in cube.edges.items():
        arrow = CMMorphism(edge, env[v].cm, env[w].cm, Variant.STRENGTHENED)
        image = comparison_on_arrows(EnvMorphism(arrow, edge, env[v], env[w]))
        maps[(v, w)] = eval_fplus_arrow(E, M, image)
    return cube, values, maps


def set_limit(vertices: Sequence, values: dict, maps: dict) -> list[dict]:
    """All compatible families over a finite diagram of finite sets."""
    order = sorted(vertices, key=len, reverse=True)
    families = []

    def extend(k, chosen):
        if k == len(order):
            families.append(dict(chosen))
            return
        w = order[k]
        for y in values[w]:
            if all(maps[(v, w)][chosen[v]] == y for v in order[:k] if (v, w) in maps):
                chosen[w] = y
                extend(k + 1, chosen)
                del chosen[w]

    extend(0, {})
    return families


def check_inert_cube_limit(E: CommMonoid, M: ModuleData, s: PointedSet, marked) -> Verdict:
    """Product and limit checks on the semantic cube over ``(S, U)``.

    The apex must map bijectively to the product of the singleton vertices,
    and for each subcube ``U1 <= V <= U2`` with ``|U2 - U1| > 1`` the apex
    ``U2`` must map bijectively to the limit of the remaining vertices.
    """
    if s.arity < 1:
        raise ValueError("cube limit check needs |S°| >= 1")
    marked = frozenset(marked)
    cube, values, maps = _cube_values(E, M, s, marked)
    top = cube.top

    def leg(v, w, x):
        return x if v == w else maps[(v, w)][x]

    for u in cube.vertices:
        for v in cube.vertices:
            for w in cube.vertices:
                if w < v < u:
                    for x in values[u]:
                        if maps[(v, w)][maps[(u, v)][x]] != maps[(u, w)][x]:
                            return Verdict.failed("cube_commutes",
                                                  {"path": [sorted(u), sorted(v), sorted(w)],
                                                   "input": x})

    singletons = [frozenset({i}) for i in s.interior]
    product_size = 1
    for v in singletons:
        product_size *= len(values[v])
    images = {tuple(leg(top, v, x) for v in singletons) for x in values[top]}
    if len(images) != len(values[top]) or len(images) != product_size:
        return Verdict.failed("cube_product", {"object": str(CMObject(s, marked)),
                                               "apex_size": len(values[top]),
                                               "image_size": len(images),
                                               "product_size": product_size})
    checked = 0
    for lower in cube.vertices:
        for upper in cube.vertices:
            if not lower <= upper or len(upper - lower) <= 1:
                continue
            sub = subcube(cube, lower, upper)
            rest = [v for v in sub.vertices if v != upper]
            limit = set_limit(rest, values, maps)
            cone = {tuple(leg(upper, v, x) for v in rest) for x in values[upper]}
            families = {tuple(fam[v] for v in rest) for fam in limit}
            checked += 1
            if cone != families or len(cone) != len(values[upper]):
                return Verdict.failed("cube_limit",
                                      {"object": str(CMObject(s, marked)),
                                       "subcube": [sorted(lower), sorted(upper)],
                                       "apex_size": len(values[upper]),
                                       "limit_size": len(families)})
    return Verdict.passed("cube_limit", object=str(CMObject(s, marked)),
                          subcubes=checked)
