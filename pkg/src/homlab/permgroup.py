"""Permutation groups stored with a fully enumerated element list.

Permutations are tuples of images: p[i] is the image of point i. Composition
follows function notation, compose(p, q) applies q first.
"""
from __future__ import annotations

import math
import os
import random
from functools import lru_cache

import numpy as np

from .errors import DegreeTooLarge, InternalInvariantViolation, OrderCapExceeded

DEFAULT_CAP = 10**6
# below this degree permutations are indexed by their rank in S_n
_RANK_DEGREE = 9


def default_cap() -> int:
    env = os.environ.get("HOMLAB_AUT_CAP")
    return int(env) if env else DEFAULT_CAP


def identity(n):
    return tuple(range(n))


def compose(p, q):
    return tuple(p[i] for i in q)


def inverse(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def is_permutation(p) -> bool:
    return sorted(p) == list(range(len(p)))


def from_cycles(n, *cycles):
    img = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return tuple(img)


# ---------------------------------------------------------------------------
# vectorized helpers on arrays of permutations (one permutation per row)


@lru_cache(maxsize=None)
def _factorials(n):
    return np.array([math.factorial(n - 1 - i) for i in range(n)], dtype=np.int64)


# degrees whose rank lookup table (size n^n) is small enough to keep
_LUT_DEGREE = 8


@lru_cache(maxsize=None)
def _rank_lut(n):
    weights = np.array([n ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    lut = np.full(n**n, -1, dtype=np.int32)
    lut[all_permutations(n) @ weights] = np.arange(math.factorial(n), dtype=np.int32)
    return weights, lut


def perm_rank(arr: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each row among all permutations of its degree."""
    arr = np.asarray(arr)
    n = arr.shape[1]
    if 1 < n <= _LUT_DEGREE:
        weights, lut = _rank_lut(n)
        return lut[arr @ weights].astype(np.int64)
    rank = np.zeros(arr.shape[0], dtype=np.int64)
    fact = _factorials(n)
    for i in range(n - 1):
        smaller = (arr[:, i + 1:] < arr[:, i:i + 1]).sum(axis=1)
        rank += smaller * fact[i]
    return rank


def row_keys(arr: np.ndarray):
    """Keys that sort rows lexicographically and identify them uniquely."""
    arr = np.asarray(arr)
    n = arr.shape[1]
    if n <= 15:
        weights = np.array([n ** (n - 1 - i) for i in range(n)], dtype=np.int64)
        return arr.astype(np.int64) @ weights
    return np.array([r.tobytes() for r in arr.astype(np.uint8)], dtype=object)


@lru_cache(maxsize=None)
def all_permutations(n: int) -> np.ndarray:
    """All n! permutations in lexicographic order (index = rank)."""
    if n > _RANK_DEGREE:
        raise DegreeTooLarge(f"refusing to list all permutations of degree {n}")
    import itertools

    arr = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    arr.flags.writeable = False
    return arr


def compose_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise a o b."""
    return np.take_along_axis(a, b, axis=1)


def conjugate_rows(sigmas: np.ndarray, g) -> np.ndarray:
    """Row-wise sigma o g o sigma^-1 for each sigma."""
    res = np.empty_like(sigmas)
    rows = np.arange(sigmas.shape[0])[:, None]
    res[rows, sigmas] = sigmas[:, np.asarray(g)]
    return res


# ---------------------------------------------------------------------------


class PermGroup:
    """A closed permutation group with its elements in lexicographic order."""

    def __init__(self, n, elements: np.ndarray, generators=None):
        self.n = n
        elements = np.asarray(elements, dtype=np.int64).reshape(-1, n)
        elements.flags.writeable = False
        self.elements = elements
        self._generators = None if generators is None else tuple(tuple(int(x) for x in g) for g in generators)
        self._keyset = None
        self._rankmask = None

    @property
    def order(self) -> int:
        return self.elements.shape[0]

    def __len__(self):
        return self.order

    def __iter__(self):
        for row in self.elements:
            yield tuple(int(x) for x in row)

    @property
    def generators(self) -> tuple:
        if self._generators is None:
            self._generators = tuple(small_generating_set(self))
        return self._generators

    def _keys(self):
        if self._keyset is None:
            self._keyset = set(row_keys(self.elements).tolist()) if self.n else {0}
        return self._keyset

    def rank_mask(self) -> np.ndarray:
        """Boolean membership table over all of S_n (small degrees only)."""
        if self._rankmask is None:
            mask = np.zeros(math.factorial(self.n), dtype=bool)
            mask[perm_rank(self.elements)] = True
            self._rankmask = mask
        return self._rankmask

    def __contains__(self, perm) -> bool:
        if self.n == 0:
            return True
        key = row_keys(np.asarray([perm], dtype=np.int64))[0]
        key = key.item() if hasattr(key, "item") else key
        return key in self._keys()

    def index(self, perm) -> int:
        key = row_keys(np.asarray([perm], dtype=np.int64))
        keys = row_keys(self.elements)
        pos = int(np.searchsorted(keys, key[0]))
        if pos >= len(keys) or keys[pos] != key[0]:
            raise KeyError(perm)
        return pos

    def __repr__(self):
        return f"PermGroup(degree={self.n}, order={self.order})"


def _unique_rows(arr: np.ndarray):
    keys = row_keys(arr)
    _, idx = np.unique(keys, return_index=True)
    return arr[np.sort(idx)]


def close(generators, n=None, cap=None, start=None) -> PermGroup:
    """Breadth-first closure of a generating set (optionally grown from a known
    subgroup `start`)."""
    cap = default_cap() if cap is None else cap
    gens = [tuple(int(x) for x in g) for g in generators]
    if n is None:
        if gens:
            n = len(gens[0])
        elif start is not None:
            n = start.n
        else:
            raise ValueError("degree unknown for empty generator list")
    if any(len(g) != n for g in gens):
        raise ValueError("generators of different degree")
    if start is not None:
        gens = list(start.generators) + gens
    gens = [g for g in dict.fromkeys(gens) if g != tuple(range(n))]
    gen_arr = np.array(gens, dtype=np.int64).reshape(-1, n)
    seed = np.arange(n, dtype=np.int64)[None, :] if start is None else np.array(start.elements)
    if 1 < n <= _LUT_DEGREE:
        mask = _close_ranked(seed, gens, n, cap)
        G = PermGroup(n, all_permutations(n)[np.flatnonzero(mask)], gens)
        G._rankmask = mask
        return G
    elements = _close_keyed(seed, gen_arr, n, cap)
    order = np.argsort(row_keys(elements), kind="stable")
    return PermGroup(n, elements[order], gens)


@lru_cache(maxsize=512)
def _right_action(g):
    """rank(x) -> rank(x o g) over all of S_n."""
    n = len(g)
    return perm_rank(all_permutations(n)[:, list(g)]).astype(np.int32)


def _close_ranked(seed, gens, n, cap):
    """Closure on permutation ranks; returns the membership mask over S_n."""
    size = math.factorial(n)
    seen = np.zeros(size, dtype=bool)
    owner = np.empty(size, dtype=np.int64)
    frontier = np.unique(perm_rank(seed))
    seen[frontier] = True
    total = len(frontier)
    maps = [_right_action(g) for g in gens]
    while len(frontier) and maps:
        cand = np.concatenate([m[frontier] for m in maps])
        cand = cand[~seen[cand]]
        pos = np.arange(len(cand))
        owner[cand] = pos
        frontier = cand[owner[cand] == pos]
        seen[frontier] = True
        total += len(frontier)
        if total > cap:
            raise OrderCapExceeded(cap)
    return seen


def _close_keyed(seed, gen_arr, n, cap):
    seen = set(row_keys(seed).tolist())
    chunks = [seed]
    frontier = seed
    while len(frontier) and len(gen_arr):
        cand = np.concatenate([frontier[:, g] for g in gen_arr])
        keys = row_keys(cand).tolist()
        keep = []
        for i, k in enumerate(keys):
            if k not in seen:
                seen.add(k)
                keep.append(i)
        frontier = cand[keep]
        if len(seen) > cap:
            raise OrderCapExceeded(cap)
        chunks.append(frontier)
    return np.concatenate(chunks)


def group_from_elements(n, elements, generators=None) -> PermGroup:
    """Wrap an element list already known to be closed."""
    arr = np.asarray(elements, dtype=np.int64).reshape(-1, n)
    order = np.argsort(row_keys(arr), kind="stable") if len(arr) else []
    return PermGroup(n, arr[order], generators)


def trivial_group(n) -> PermGroup:
    return PermGroup(n, np.arange(n, dtype=np.int64)[None, :], [])


def symmetric_group(n) -> PermGroup:
    if n <= 1:
        return trivial_group(n)
    gens = [from_cycles(n, list(range(n))), from_cycles(n, [0, 1])]
    return close(gens, n)


def small_generating_set(G: PermGroup):
    """A short generating set found by seeded random sampling."""
    if G.order == 1:
        return []
    rng = random.Random(G.order * 7919 + G.n)
    gens = []
    H = trivial_group(G.n)
    while H.order < G.order:
        for _ in range(64):
            g = tuple(int(x) for x in G.elements[rng.randrange(G.order)])
            if g not in H:
                break
        else:
            g = next(e for e in G if e not in H)
        gens.append(g)
        H = close(gens, G.n, cap=G.order)
    return gens


# ---------------------------------------------------------------------------
# orbits and predicates


def point_orbits(G: PermGroup):
    seen = set()
    out = []
    for x in range(G.n):
        if x in seen:
            continue
        orb = sorted(set(G.elements[:, x].tolist()))
        seen.update(orb)
        out.append(orb)
    return out


def pair_orbitals(G: PermGroup):
    """Partition of the unordered pairs {i<j} into G-orbits, sorted."""
    n = G.n
    E = G.elements
    seen = set()
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in seen:
                continue
            a, b = E[:, i], E[:, j]
            lo, hi = np.minimum(a, b), np.maximum(a, b)
            orb = sorted(set(zip(lo.tolist(), hi.tolist())))
            seen.update(orb)
            out.append(orb)
    return out


def is_transitive(G: PermGroup) -> bool:
    return G.n <= 1 or len(set(G.elements[:, 0].tolist())) == G.n


def is_regular(G: PermGroup) -> bool:
    return is_transitive(G) and G.order == G.n


def is_abelian(G: PermGroup) -> bool:
    gens = G.generators
    return all(compose(a, b) == compose(b, a) for a in gens for b in gens)


def is_boolean(G: PermGroup) -> bool:
    sq = compose_rows(G.elements, G.elements)
    return bool(np.all(sq == np.arange(G.n)))


def involution_count(G: PermGroup) -> int:
    sq = compose_rows(G.elements, G.elements)
    ident = np.all(sq == np.arange(G.n), axis=1)
    return int(ident.sum()) - 1


def stabilizer(G: PermGroup, points) -> PermGroup:
    points = list(points)
    if not points:
        return G
    mask = np.all(G.elements[:, points] == np.asarray(points), axis=1)
    return PermGroup(G.n, G.elements[mask])


def setwise_stabilizer(G: PermGroup, blocks) -> PermGroup:
    """Elements mapping every block onto itself."""
    label = np.empty(G.n, dtype=np.int64)
    for b, block in enumerate(blocks):
        label[list(block)] = b
    mask = np.all(label[G.elements] == label, axis=1)
    return PermGroup(G.n, G.elements[mask])


def is_normal_subgroup(H: PermGroup, G: PermGroup) -> bool:
    for g in G.generators:
        gi = inverse(g)
        for h in H.generators:
            if compose(compose(g, h), gi) not in H:
                return False
    return True


def element_order_counts(G: PermGroup):
    """Multiset of element orders as a sorted tuple of (order, count)."""
    n = G.n
    ident = np.arange(n)
    cur = G.elements.copy()
    orders = np.zeros(G.order, dtype=np.int64)
    k = 1
    while (orders == 0).any():
        hit = (orders == 0) & np.all(cur == ident, axis=1)
        orders[hit] = k
        cur = compose_rows(G.elements, cur)
        k += 1
    vals, counts = np.unique(orders, return_counts=True)
    return tuple(zip(vals.tolist(), counts.tolist()))


def cycle_type_profile(G: PermGroup):
    """Sorted multiset of cycle types; a conjugacy invariant."""
    n = G.n
    ident = np.arange(n)
    cur = G.elements
    # fixed-point counts of p, p^2, .., p^n determine the cycle type of p
    code = np.zeros(G.order, dtype=np.int64)
    for _ in range(n):
        code = code * (n + 1) + (cur == ident).sum(axis=1)
        cur = compose_rows(G.elements, cur)
    vals, counts = np.unique(code, return_counts=True)
    return tuple(zip(vals.tolist(), counts.tolist()))


def to_json(G: PermGroup) -> dict:
    return {"degree": G.n, "order": G.order, "generators": [list(g) for g in G.generators]}


def from_json(data: dict) -> PermGroup:
    n = data["degree"]
    return close([tuple(g) for g in data["generators"]], n)


# ---------------------------------------------------------------------------
# enumeration of regular and transitive groups

MAX_REGULAR_DEGREE = 20
MAX_TRANSITIVE_DEGREE = 8


def orbital_color_matrix(G: PermGroup) -> np.ndarray:
    """Color matrix whose classes are the unordered pair orbitals of G."""
    n = G.n
    colors = np.zeros((n, n), dtype=np.int64)
    for c, orb in enumerate(pair_orbitals(G), start=1):
        for i, j in orb:
            colors[i, j] = colors[j, i] = c
    return colors


def _orbital_form(G: PermGroup) -> bytes:
    from .space import ColoredSpace, canonical_form

    return canonical_form(ColoredSpace(orbital_color_matrix(G)))


def regular_representation(T) -> PermGroup:
    """Left regular action x -> g*x of a table group."""
    m = T.order
    return group_from_elements(m, T.table, generators=[T.table[g] for g in T.generators])


def enumerate_regular_groups(n: int, limit=None):
    """Regular permutation groups of degree n up to conjugacy in S_n.

    Regular actions of isomorphic groups are conjugate, so this is one left
    regular representation per isomorphism type of group of order n.
    """
    from .cayley import groups_of_order

    if n < 1 or n > MAX_REGULAR_DEGREE:
        raise DegreeTooLarge(f"regular group enumeration supports 1 <= n <= {MAX_REGULAR_DEGREE}")
    groups = [regular_representation(T) for T in groups_of_order(n)]
    groups.sort(key=lambda G: (_orbital_form(G), element_order_counts(G)))
    return groups if limit is None else groups[:limit]


def conjugate(G: PermGroup, H: PermGroup):
    """Some sigma with sigma G sigma^-1 = H, or None (exhaustive, small n)."""
    if G.n != H.n or G.order != H.order:
        return None
    P = all_permutations(G.n)
    mask = H.rank_mask()
    idx = np.arange(len(P))
    for g in G.generators:
        ok = mask[perm_rank(conjugate_rows(P[idx], g))]
        idx = idx[ok]
        if not len(idx):
            return None
    return tuple(int(x) for x in P[idx[0]])


def normalizer(H: PermGroup) -> PermGroup:
    """Normalizer of H in the full symmetric group (small n)."""
    P = all_permutations(H.n)
    mask = H.rank_mask()
    idx = np.arange(len(P))
    for h in H.generators:
        idx = idx[mask[perm_rank(conjugate_rows(P[idx], h))]]
    return PermGroup(H.n, P[idx])


class ConjugacyRegistry:
    """Groups up to conjugacy: invariants first, exhaustive conjugation on
    collisions."""

    def __init__(self):
        self.buckets = {}
        self.groups = []
        self.exact = {}

    @staticmethod
    def key(G):
        sizes = tuple(sorted(len(o) for o in point_orbits(G)))
        return (G.order, sizes, cycle_type_profile(G))

    def add(self, G):
        exact = np.packbits(G.rank_mask()).tobytes()
        hit = self.exact.get(exact)
        if hit is not None:
            return hit, False
        bucket = self.buckets.setdefault(self.key(G), [])
        for H in bucket:
            if conjugate(G, H) is not None:
                self.exact[exact] = H
                return H, False
        bucket.append(G)
        self.groups.append(G)
        self.exact[exact] = G
        return G, True


def _double_coset_reps(H: PermGroup, merging=False):
    """One element per class of S_n under x -> h1 x h2 and x -> v x v^-1
    (h in H, v normalizing H); each class gives conjugate groups <H, x>."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    n = H.n
    P = all_permutations(n)
    N = len(P)
    src = np.arange(N)
    heads, tails = [], []
    for h in H.generators:
        h = np.asarray(h)
        for img in (h[P], P[:, h]):
            heads.append(src)
            tails.append(perm_rank(img))
    NH = normalizer(H)
    for v in NH.generators:
        v = np.asarray(v)
        vinv = np.argsort(v)
        heads.append(src)
        tails.append(perm_rank(v[P[:, vinv]]))
    if heads:
        rows = np.concatenate(heads)
        cols = np.concatenate(tails)
        graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = src
    _, reps = np.unique(labels, return_index=True)
    reps = reps[~H.rank_mask()[reps]]
    if merging:
        orbit_label = np.empty(n, dtype=np.int64)
        for k, orb in enumerate(point_orbits(H)):
            orbit_label[orb] = k
        moves = np.any(orbit_label[P[reps]] != orbit_label, axis=1)
        reps = reps[moves]
    return [tuple(int(x) for x in P[r]) for r in np.sort(reps)]


def _prime_step_reps(H: PermGroup):
    """Elements x of the normalizer N of H whose coset xH has prime order in
    N/H, one per class under x -> h x, x h, v x v^-1 (h in H, v in N)."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    n = H.n
    N = normalizer(H)
    E = N.elements
    m = len(E)
    local = np.full(math.factorial(n), -1, dtype=np.int64)
    local[perm_rank(E)] = np.arange(m)
    hmask = H.rank_mask()
    step = np.zeros(m, dtype=np.int64)
    cur = E.copy()
    k = 1
    while (step == 0).any():
        hit = (step == 0) & hmask[perm_rank(cur)]
        step[hit] = k
        cur = compose_rows(E, cur)
        k += 1
    prime = np.array([s > 1 and all(s % d for d in range(2, s)) for s in step.tolist()])
    src = np.arange(m)
    heads, tails = [], []
    for h in H.generators:
        h = np.asarray(h)
        for img in (h[E], E[:, h]):
            heads.append(src)
            tails.append(local[perm_rank(img)])
    for v in N.generators:
        v = np.asarray(v)
        heads.append(src)
        tails.append(local[perm_rank(v[E[:, np.argsort(v)]])])
    if heads:
        graph = coo_matrix(
            (np.ones(m * len(heads), dtype=np.int8), (np.concatenate(heads), np.concatenate(tails))),
            shape=(m, m),
        )
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = src
    _, reps = np.unique(labels, return_index=True)
    reps = np.sort(reps[prime[reps]])
    return [(tuple(int(x) for x in E[r]), int(step[r])) for r in reps]


@lru_cache(maxsize=None)
def _transitive_groups(n: int):
    trans = ConjugacyRegistry()
    if n == 1:
        trans.add(trivial_group(1))
        return tuple(trans.groups), ()
    # phase 1: all solvable subgroups up to conjugacy, each obtained from a
    # smaller one by adjoining an element of its normalizer of prime order
    # modulo it. For prime-power degree a Sylow subgroup of a transitive
    # group is transitive, and at degree 6 every nonsolvable transitive group
    # contains a transitive A4, so every transitive group of degree <= 8
    # contains a solvable transitive subgroup.
    solvable = ConjugacyRegistry()
    queue = [trivial_group(n)]
    solvable.add(queue[0])
    while queue:
        H = queue.pop()
        for x, q in _prime_step_reps(H):
            K = close([x], start=H, cap=q * H.order)
            if K.order != q * H.order:
                raise InternalInvariantViolation("cyclic extension has the wrong order")
            K, new = solvable.add(K)
            if new:
                queue.append(K)
                if is_transitive(K):
                    trans.add(K)
    # phase 2: upward closure over transitive groups
    covers = []
    queue = list(trans.groups)
    while queue:
        G = queue.pop()
        for x in _double_coset_reps(G):
            K = close([x], start=G)
            covers.append((G, K))
            K, new = trans.add(K)
            if new:
                queue.append(K)
    return tuple(trans.groups), tuple(covers)


def enumerate_transitive_groups(n: int, order_cap=None):
    """All transitive subgroups of S_n up to conjugacy (n <= 8), sorted by
    order and then by the canonical form of their orbital coloring."""
    if n < 1 or n > MAX_TRANSITIVE_DEGREE:
        raise DegreeTooLarge(f"transitive group enumeration supports 1 <= n <= {MAX_TRANSITIVE_DEGREE}")
    groups, _ = _transitive_groups(n)
    cap = default_cap() if order_cap is None else order_cap
    if any(G.order > cap for G in groups):
        raise OrderCapExceeded(cap)
    return sorted(groups, key=lambda G: (G.order, _orbital_form(G), cycle_type_profile(G)))


def transitive_covers(n: int):
    """Pairs (G, <G, x>) met during the upward walk, for monotonicity checks."""
    return _transitive_groups(n)[1]
