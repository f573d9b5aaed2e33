"""Independent brute-force oracles.

Nothing here imports the package: objects are plain tuples and every count
comes from direct enumeration of raw image tuples.
"""

import itertools


def pointed_maps(m, n):
    """Image tuples of all pointed maps <m> -> <n> (0 is the basepoint)."""
    return list(itertools.product(range(n + 1), repeat=m))


def cm_valid(phi, marked_src, marked_tgt, strengthened):
    for v in marked_tgt:
        if sum(1 for u in marked_src if phi[u - 1] == v) != 1:
            return False
    if strengthened:
        return all(phi[u - 1] == 0 or phi[u - 1] in marked_tgt for u in marked_src)
    return True


def env_hom_count(x, y, delta, strengthened):
    """Env arrows over ``delta``; objects are (m, marked, assignment, k)."""
    m, marked, f, _ = x
    m2, marked2, f2, _ = y

    def d(t):
        return delta[t - 1]

    count = 0
    for phi in pointed_maps(m, m2):
        if not cm_valid(phi, marked, marked2, strengthened):
            continue
        square = all(d(f[s - 1]) == (0 if phi[s - 1] == 0 else f2[phi[s - 1] - 1])
                     for s in range(1, m + 1))
        count += square
    return count


def blocks(x):
    """The tuple of (size, marked positions) blocks of an Env object."""
    m, marked, f, k = x
    out = []
    for t in range(1, k + 1):
        elems = [s for s in range(1, m + 1) if f[s - 1] == t]
        out.append((len(elems), frozenset(p for p, s in enumerate(elems, 1) if s in marked)))
    return tuple(out)


def fplus_hom_count(xs, ys, delta):
    """Arrows of tuples over ``delta``: per target block, maps out of the union."""
    total = 1
    for t2, (size2, marked2) in enumerate(ys, start=1):
        flags = [p in marked for t, (size, marked) in enumerate(xs, start=1)
                 if delta[t - 1] == t2 for p in range(1, size + 1)]
        count = 0
        for g in itertools.product(range(1, size2 + 1), repeat=len(flags)):
            hit = [y for y, flag in zip(g, flags) if flag]
            if len(hit) == len(set(hit)) and set(hit) == set(marked2):
                count += 1
        total *= count
    return total


def env_objects(bound, shape_bound, canonical=True):
    out = []
    for k in range(shape_bound + 1):
        for m in range(bound + 1):
            for r in range(m + 1):
                for marked in itertools.combinations(range(1, m + 1), r):
                    for f in itertools.product(range(1, k + 1), repeat=m):
                        if canonical and list(f) != sorted(f):
                            continue
                        out.append((m, frozenset(marked), f, k))
    return out


def fo_hom_count(n, j, n2, j2):
    """Pointed maps <n> -> <n2> sending point j to j2."""
    return sum(1 for phi in pointed_maps(n, n2) if (0 if j == 0 else phi[j - 1]) == j2)


def cm_hom_count(n, marked, n2, marked2, strengthened):
    return sum(1 for phi in pointed_maps(n, n2)
               if cm_valid(phi, marked, marked2, strengthened))


def mul_count(inputs, output, strengthened):
    marked = {i for i, c in enumerate(inputs, start=1) if c == "m"}
    marked_out = {1} if output == "m" else set()
    return sum(1 for phi in pointed_maps(len(inputs), 1)
               if 0 not in phi and cm_valid(phi, marked, marked_out, strengthened))
