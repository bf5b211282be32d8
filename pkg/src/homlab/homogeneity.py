"""Automorphism groups and homogeneity predicates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotPartialIsometry, OrderCapExceeded, PreconditionFailed
from .permgroup import PermGroup, close, compose, default_cap, group_from_elements, is_boolean
from .space import ColoredSpace

FLOAT_TOL = 1e-9


class _Matcher:
    """Color-preserving map search with candidate bitmasks.

    cand[x] is the set of possible images of x. Assigning a -> b intersects
    every cand[x] with the points at color c(a, x) from b.
    """

    def __init__(self, space: ColoredSpace, target: ColoredSpace | None = None):
        target = space if target is None else target
        self.n = n = space.n
        self.rows = space.rows
        trows = target.rows
        c = max(space.delta, target.delta)
        nbr = [[0] * c for _ in range(n)]
        for p in range(n):
            for q, col in enumerate(trows[p]):
                nbr[p][col] |= 1 << q
        self.nbr = nbr
        prints = {}
        for p in range(n):
            prints.setdefault(tuple(sorted(trows[p])), []).append(p)
        self.start = [0] * n
        for p in range(n):
            group = prints.get(tuple(sorted(self.rows[p])), [])
            self.start[p] = sum(1 << q for q in group)

    def assign(self, cand, a, b):
        if not (cand[a] >> b) & 1:
            return None
        row = self.rows[a]
        nb = self.nbr[b]
        new = cand[:]
        for x in range(self.n):
            if x == a:
                new[x] = 1 << b
                continue
            m = new[x] & nb[row[x]]
            if not m:
                return None
            new[x] = m
        return new

    def seeded(self, pairs):
        cand = self.start[:]
        for a, b in pairs:
            cand = self.assign(cand, a, b)
            if cand is None:
                return None
        return cand

    def solutions(self, cand, assigned):
        """Yield complete maps (as tuples) consistent with cand."""
        if len(assigned) == self.n:
            yield tuple(cand[x].bit_length() - 1 for x in range(self.n))
            return
        x = min((p for p in range(self.n) if p not in assigned), key=lambda p: bin(cand[p]).count("1"))
        m = cand[x]
        while m:
            low = m & -m
            y = low.bit_length() - 1
            m ^= low
            nxt = self.assign(cand, x, y)
            if nxt is not None:
                yield from self.solutions(nxt, assigned | {x})

    def first(self, pairs):
        cand = self.seeded(pairs)
        if cand is None:
            return None
        return next(self.solutions(cand, {a for a, _ in pairs}), None)


def _popcount(m):
    return bin(m).count("1")


def automorphisms(space: ColoredSpace, cap=None) -> PermGroup:
    """Full automorphism group: a transversal per base point from seeded
    searches, then closed to an explicit element list."""
    cap = default_cap() if cap is None else cap
    cached = space._cache.get("aut")
    if cached is not None:
        if cached.order > cap:
            raise OrderCapExceeded(cap)
        return cached
    n = space.n
    if n == 0:
        return PermGroup(0, np.zeros((1, 0), dtype=np.int64), [])
    matcher = _Matcher(space)
    fixed = []
    gens = []
    order = 1
    while True:
        cand = matcher.seeded([(p, p) for p in fixed])
        moving = [p for p in range(n) if _popcount(cand[p]) > 1]
        if not moving:
            break
        b = moving[0]
        orbit = {b}
        level_gens = []
        m = cand[b]
        while m:
            low = m & -m
            y = low.bit_length() - 1
            m ^= low
            if y in orbit:
                continue
            f = matcher.first([(p, p) for p in fixed] + [(b, y)])
            if f is None:
                continue
            level_gens.append(f)
            # grow the orbit of b under the generators found at this level
            stack = [y]
            orbit.add(y)
            frontier = list(orbit)
            while frontier:
                z = frontier.pop()
                for g in level_gens:
                    w = g[z]
                    if w not in orbit:
                        orbit.add(w)
                        frontier.append(w)
        gens.extend(level_gens)
        order *= len(orbit)
        if order > cap:
            raise OrderCapExceeded(cap)
        fixed.append(b)
    G = close(gens, n, cap=cap)
    if G.order != order:
        raise AssertionError(f"automorphism transversal product {order} != closure order {G.order}")
    space._cache["aut"] = G
    return G


def find_isometry(x: ColoredSpace, y: ColoredSpace):
    """A color-preserving bijection x -> y (as an image tuple), or None."""
    if x.n != y.n:
        return None
    if x.n == 0:
        return ()
    m = _Matcher(x, y)
    if any(s == 0 for s in m.start):
        return None
    return m.first([])


def is_automorphism(space: ColoredSpace, perm) -> bool:
    p = np.asarray(perm)
    return bool(np.array_equal(space.colors[np.ix_(p, p)], space.colors))


def check_partial_isometry(space: ColoredSpace, pairs):
    pairs = [(int(a), int(b)) for a, b in pairs]
    src = [a for a, _ in pairs]
    dst = [b for _, b in pairs]
    n = space.n
    if len(set(src)) != len(src) or len(set(dst)) != len(dst):
        raise NotPartialIsometry("map is not injective")
    if any(not (0 <= p < n) for p in src + dst):
        raise NotPartialIsometry("point out of range")
    C = space.colors
    for i, (a1, b1) in enumerate(pairs):
        for a2, b2 in pairs[i + 1:]:
            if C[a1, a2] != C[b1, b2]:
                raise NotPartialIsometry(f"d({a1},{a2}) != d({b1},{b2})")
    return pairs


def extend_partial(space: ColoredSpace, pairs):
    """Some automorphism extending the partial isometry, or None."""
    pairs = check_partial_isometry(space, pairs)
    if space.n == 0:
        return ()
    return _Matcher(space).first(pairs)


def count_extensions(space: ColoredSpace, pairs, limit=None) -> int:
    pairs = check_partial_isometry(space, pairs)
    matcher = _Matcher(space)
    cand = matcher.seeded(pairs)
    if cand is None:
        return 0
    count = 0
    for _ in matcher.solutions(cand, {a for a, _ in pairs}):
        count += 1
        if limit is not None and count >= limit:
            break
    return count


def homogeneity_level(space: ColoredSpace, kmax: int, G: PermGroup | None = None) -> int:
    """Largest j <= kmax such that the space is j-homogeneous.

    Level j is checked at representatives a of the Aut-orbits of (j-1)-tuples
    of distinct points: the orbits of the stabilizer of a on the other points
    must coincide with the classes of points having the same colors to a.
    Once a stabilizer is trivial and all classes are singletons, every longer
    extension passes as well.
    """
    n = space.n
    if n == 0:
        return kmax
    G = automorphisms(space) if G is None else G
    rows = space.rows
    frontier = [((), G.elements)]
    for j in range(1, min(kmax, n) + 1):
        nxt = []
        for a, S in frontier:
            rest = [y for y in range(n) if y not in a]
            classes = {}
            for y in rest:
                classes.setdefault(tuple(rows[x][y] for x in a), set()).add(y)
            if len(S) == 1:
                if any(len(c) > 1 for c in classes.values()):
                    return j - 1
                continue
            seen = set()
            for y in rest:
                if y in seen:
                    continue
                orb = set(S[:, y].tolist())
                seen |= orb
                if orb != classes[tuple(rows[x][y] for x in a)]:
                    return j - 1
                nxt.append((a + (y,), S[S[:, y] == y]))
        frontier = nxt
        if not frontier:
            return kmax
    return kmax


def is_k_homogeneous(space: ColoredSpace, k: int) -> bool:
    if k < 1:
        raise ValueError("k must be at least 1")
    return homogeneity_level(space, k) >= k


def point_stabilizers_trivial(space: ColoredSpace, G=None) -> bool:
    G = automorphisms(space) if G is None else G
    if space.n == 0:
        return True
    # the stabilizer of x is trivial for every x iff no non-identity
    # automorphism has a fixed point
    fixes = (G.elements == np.arange(space.n)).any(axis=1)
    return int(fixes.sum()) == 1


def is_uniquely_k_homogeneous(space: ColoredSpace, k: int) -> bool:
    if k < 1:
        raise ValueError("k must be at least 1")
    return is_k_homogeneous(space, k) and point_stabilizers_trivial(space)


def is_isosceles_free(space: ColoredSpace) -> bool:
    return all(len(set(row)) == len(row) for row in space.rows)


def is_ultrahomogeneous(space: ColoredSpace, shortcut=True) -> bool:
    n = space.n
    if n <= 1:
        return True
    if shortcut and is_isosceles_free(space) and is_k_homogeneous(space, 1):
        return True
    return homogeneity_level(space, n) >= n


@dataclass
class EvaluationFlags:
    distance_injective: bool
    distance_surjective: bool
    evaluation_injective: bool
    evaluation_surjective: bool

    def as_dict(self):
        return {
            "D_a_injective": self.distance_injective,
            "D_a_surjective": self.distance_surjective,
            "E_a_injective": self.evaluation_injective,
            "E_a_surjective": self.evaluation_surjective,
        }


def evaluation_bijectivity(space: ColoredSpace, a: int) -> EvaluationFlags:
    """Flags for x -> d(x, a) onto Dist(X) and f -> f(a) onto X."""
    if not 0 <= a < space.n:
        raise PreconditionFailed(f"point {a} not in the space")
    row = space.rows[a]
    G = automorphisms(space)
    images = G.elements[:, a]
    return EvaluationFlags(
        distance_injective=len(set(row)) == len(row),
        distance_surjective=len(set(row)) == space.delta,
        evaluation_injective=len(set(images.tolist())) == G.order,
        evaluation_surjective=len(set(images.tolist())) == space.n,
    )


def _as_map(e, n):
    if isinstance(e, dict):
        return [e[x] for x in range(n)]
    e = list(e)
    if e and isinstance(e[0], (tuple, list)):
        d = dict(e)
        if set(d) != set(range(n)):
            raise PreconditionFailed("embedding must be total on X")
        return [d[x] for x in range(n)]
    return e


def extension_operator(X: ColoredSpace, Y: ColoredSpace, e):
    """Map f in Aut(X) to the unique automorphism of Y sending e(a) to e(f(a)).

    Returns a dict from automorphism tuples of X to automorphism tuples of Y.
    """
    if not is_isosceles_free(X):
        raise PreconditionFailed("X must be isosceles-free")
    if not is_isosceles_free(Y) or not is_ultrahomogeneous(Y):
        raise PreconditionFailed("Y must be homogeneous and isosceles-free")
    if X.palette is None or Y.palette is None:
        raise PreconditionFailed("both spaces need palettes to compare distances")
    emb = _as_map(e, X.n)
    if len(emb) != X.n or len(set(emb)) != X.n:
        raise PreconditionFailed("embedding must be total and injective")
    for i in range(X.n):
        for j in range(X.n):
            if abs(X.distance(i, j) - Y.distance(emb[i], emb[j])) > FLOAT_TOL:
                raise PreconditionFailed(f"embedding does not preserve d({i},{j})")
    if X.n == 0:
        return {(): tuple(range(Y.n))}
    AX = automorphisms(X)
    AY = automorphisms(Y)
    a = 0
    out = {}
    for f in AX:
        target = emb[f[a]]
        rows = np.flatnonzero(AY.elements[:, emb[a]] == target)
        if len(rows) != 1:
            raise PreconditionFailed("no unique automorphism of Y for the extension")
        F = tuple(int(v) for v in AY.elements[rows[0]])
        if any(F[emb[x]] != emb[f[x]] for x in range(X.n)):
            raise PreconditionFailed("extension does not commute with the embedding")
        out[f] = F
    if len(set(out.values())) != len(out):
        raise PreconditionFailed("extension operator is not injective")
    for f in out:
        for g in out:
            if out[compose(f, g)] != compose(out[f], out[g]):
                raise PreconditionFailed("extension operator is not a homomorphism")
    return out


@dataclass
class HomogeneityReport:
    n: int
    delta: int
    aut_order: int
    is_k_homogeneous: dict = field(default_factory=dict)
    unique: dict = field(default_factory=dict)
    ultra: bool | None = None
    isosceles_free: bool = False

    def as_dict(self):
        out = {
            "n": self.n,
            "delta": self.delta,
            "aut_order": self.aut_order,
            "isosceles_free": self.isosceles_free,
            "is_k_homogeneous": {str(k): v for k, v in self.is_k_homogeneous.items()},
            "unique": {str(k): v for k, v in self.unique.items()},
        }
        if self.ultra is not None:
            out["ultra"] = self.ultra
        return out


def analyze(space: ColoredSpace, ks=(1, 2), ultra=False) -> HomogeneityReport:
    G = automorphisms(space)
    top = max(list(ks) + [space.n if ultra else 0])
    level = homogeneity_level(space, top, G)
    trivial_stab = point_stabilizers_trivial(space, G)
    report = HomogeneityReport(n=space.n, delta=space.delta, aut_order=G.order,
                               isosceles_free=is_isosceles_free(space))
    for k in ks:
        report.is_k_homogeneous[k] = level >= k
        report.unique[k] = level >= k and trivial_stab
    if ultra:
        report.ultra = level >= space.n
    return report
