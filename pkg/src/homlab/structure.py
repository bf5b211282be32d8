"""Invariant decompositions, quotients, Boolean spaces and Z2-norm tables."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BasisSearchTooLarge,
    InternalInvariantViolation,
    NotHomogeneous,
    NotPowerOfTwo,
    PreconditionFailed,
)
from .homogeneity import (
    automorphisms,
    find_isometry,
    homogeneity_level,
    is_isosceles_free,
    is_k_homogeneous,
    point_stabilizers_trivial,
)
from .permgroup import PermGroup, is_abelian, is_boolean, is_normal_subgroup, setwise_stabilizer
from .space import ColoredSpace, new_space, realize_metric

ISOFREE = "IsoscelesFree"
ISOGEN = "IsoscelesGenerated"
RAINBOW = "RainbowDuplicateOfIsoscelesGenerated"
BOOLEAN = "Boolean"

NORM_TOL = 1e-9


@dataclass(frozen=True)
class Decomposition:
    blocks: tuple
    kind: str

    def label(self) -> np.ndarray:
        n = sum(len(b) for b in self.blocks)
        out = np.empty(n, dtype=np.int64)
        for i, b in enumerate(self.blocks):
            out[list(b)] = i
        return out

    def as_dict(self):
        return {"kind": self.kind, "blocks": [list(b) for b in self.blocks]}


def _require(space, k):
    if space.n and not is_k_homogeneous(space, k):
        raise NotHomogeneous(k)


def _blocks_from_parent(parent):
    groups = {}
    for x in range(len(parent)):
        groups.setdefault(_find(parent, x), []).append(x)
    return tuple(sorted(tuple(g) for g in groups.values()))


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _union(parent, a, b):
    ra, rb = _find(parent, a), _find(parent, b)
    if ra != rb:
        parent[max(ra, rb)] = min(ra, rb)


def singleton_distances(space: ColoredSpace) -> set:
    """Colors s such that every point has exactly one point at color s."""
    _require(space, 1)
    if space.n == 0:
        return {0}
    out = set()
    for c in range(space.delta):
        if all(row.count(c) == 1 for row in space.rows):
            out.add(c)
    return out


def _check_blocks_isometric(space, blocks, G):
    """Each block is mapped onto every other one by some automorphism."""
    label = Decomposition(blocks, "").label()
    first = blocks[0]
    for block in blocks[1:]:
        rows = np.flatnonzero(G.elements[:, first[0]] == block[0])
        if not len(rows):
            raise InternalInvariantViolation("no automorphism between components")
        img = G.elements[rows[0], list(first)]
        if sorted(img.tolist()) != list(block):
            raise InternalInvariantViolation("automorphism does not carry components onto components")
    # invariance under the whole group
    for g in G.generators:
        moved = label[list(g)]
        for block in blocks:
            if len(set(moved[list(block)].tolist())) != 1:
                raise InternalInvariantViolation("decomposition is not invariant")


def isosceles_free_components(space: ColoredSpace) -> Decomposition:
    _require(space, 2)
    n = space.n
    if n == 0:
        return Decomposition((), ISOFREE)
    S = singleton_distances(space)
    parent = list(range(n))
    for x in range(n):
        for y in range(x + 1, n):
            if space.rows[x][y] in S:
                _union(parent, x, y)
    blocks = _blocks_from_parent(parent)
    for b in blocks:
        if not is_isosceles_free(space.subspace(b)):
            raise InternalInvariantViolation("isosceles-free component has an isosceles triangle")
        for x in b:
            for y in b:
                if space.rows[x][y] not in S:
                    raise InternalInvariantViolation("singleton relation is not transitive")
    _check_blocks_isometric(space, blocks, automorphisms(space))
    return Decomposition(blocks, ISOFREE)


def isosceles_generated_components(space: ColoredSpace) -> Decomposition:
    _require(space, 1)
    n = space.n
    if n == 0:
        return Decomposition((), ISOGEN)
    parent = list(range(n))
    for x, row in enumerate(space.rows):
        by_color = {}
        for y, c in enumerate(row):
            if y != x:
                by_color.setdefault(c, []).append(y)
        for ys in by_color.values():
            if len(ys) > 1:
                for y in ys:
                    _union(parent, x, y)
    blocks = _blocks_from_parent(parent)
    _check_blocks_isometric(space, blocks, automorphisms(space))
    return Decomposition(blocks, ISOGEN)


def aut_star(space: ColoredSpace, decomposition: Decomposition) -> PermGroup:
    """Automorphisms fixing every component setwise."""
    G = automorphisms(space)
    if space.n == 0:
        return G
    H = setwise_stabilizer(G, decomposition.blocks)
    if not is_normal_subgroup(H, G):
        raise InternalInvariantViolation("Aut_* is not normal in Aut")
    return H


def _quotient_classes(space, blocks):
    """Union-find on colors: colors met between the same pair of blocks are
    identified, and colors inside a block join color 0."""
    label = Decomposition(blocks, "").label()
    parent = list(range(space.delta))
    first = {}
    for x in range(space.n):
        for y in range(space.n):
            key = (label[x], label[y]) if label[x] != label[y] else (-1, -1)
            c = space.rows[x][y]
            if key in first:
                _union(parent, first[key], c)
            else:
                first[key] = c
    return label, parent


def quotient_space(space: ColoredSpace, decomposition: Decomposition | None = None, a: float = 1.0) -> ColoredSpace:
    """Space of isosceles-generated components with fresh distances in
    {0} u [a, 2a]; checks the semidirect order identity on the way."""
    if a <= 0:
        raise PreconditionFailed("a must be positive")
    expected = isosceles_generated_components(space)
    if decomposition is None:
        decomposition = expected
    elif tuple(sorted(decomposition.blocks)) != expected.blocks:
        raise PreconditionFailed("decomposition is not the isosceles-generated one")
    blocks = expected.blocks
    if not blocks:
        return new_space(np.zeros((0, 0)), [0.0])
    label, parent = _quotient_classes(space, blocks)
    m = len(blocks)
    reps = [b[0] for b in blocks]
    roots = {}
    for c in sorted(range(space.delta), key=lambda c: (_find(parent, c), c)):
        roots.setdefault(_find(parent, c), len(roots))
    colors = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            # the class of d(C, C') must not depend on the chosen points
            cls = {roots[_find(parent, space.rows[x][y])] for x in blocks[i] for y in blocks[j]}
            if len(cls) != 1:
                raise InternalInvariantViolation("component distance class is not well defined")
            colors[i, j] = cls.pop()
    Q = realize_metric(new_space(colors), a)
    if not is_isosceles_free(Q) or not is_k_homogeneous(Q, 1):
        raise InternalInvariantViolation("quotient is not homogeneous isosceles-free")
    order = automorphisms(space).order
    star = aut_star(space, expected).order
    if order != star * automorphisms(Q).order:
        raise InternalInvariantViolation("|Aut| != |Aut_*| * |Aut(X/~)|")
    return Q


def is_boolean_space(space: ColoredSpace) -> bool:
    if space.n == 0 or not is_k_homogeneous(space, 1):
        return False
    G = automorphisms(space)
    boolean = is_boolean(G)
    if boolean != is_abelian(G):
        raise InternalInvariantViolation("abelian and Boolean disagree on a 1-homogeneous space")
    return boolean


# ---------------------------------------------------------------------------
# Z2-norm tables


@dataclass(frozen=True)
class NormTable:
    m: int
    norm: tuple

    def __post_init__(self):
        if len(self.norm) != 1 << self.m:
            raise PreconditionFailed(f"norm table needs 2^{self.m} entries")
        if abs(self.norm[0]) > NORM_TOL:
            raise PreconditionFailed("norm of the empty set must be 0")

    def as_dict(self):
        return {"m": self.m, "norm": list(self.norm)}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["m"]), tuple(float(v) for v in data["norm"]))


def _values(space):
    return space.palette if space.palette is not None else tuple(float(c) for c in range(space.delta))


def require_homogeneous_isofree(space):
    if not is_isosceles_free(space):
        raise PreconditionFailed("space is not isosceles-free")
    if not is_k_homogeneous(space, 1):
        raise PreconditionFailed("space is not homogeneous")


def to_norm_table(space: ColoredSpace, base: int = 0) -> NormTable:
    """Coordinates over Z2 for a homogeneous isosceles-free space.

    x + y is the point at distance d(x, y) from the base. A basis is taken
    greedily over points sorted by norm, and the round trip is checked.
    """
    from .constructions import boolean_space

    require_homogeneous_isofree(space)
    n = space.n
    m = n.bit_length() - 1
    if n & (n - 1):
        raise NotPowerOfTwo(f"{n} points")
    if not 0 <= base < n:
        raise PreconditionFailed(f"base point {base} not in the space")
    rows = space.rows
    at = {c: y for y, c in enumerate(rows[base])}

    def add(x, y):
        return at[rows[x][y]]

    basis = []
    span = {base}
    for x in sorted(range(n), key=lambda y: rows[base][y]):
        if x in span:
            continue
        basis.append(x)
        span |= {add(s, x) for s in span}
    if len(basis) != m:
        raise InternalInvariantViolation("basis size does not match log2 |X|")
    point = [base] * n
    for mask in range(1, n):
        low = (mask & -mask).bit_length() - 1
        point[mask] = add(point[mask ^ (1 << low)], basis[low])
    vals = _values(space)
    table = NormTable(m, tuple(vals[rows[base][p]] for p in point))
    rebuilt = boolean_space(table)
    for i in range(n):
        for j in range(n):
            if abs(rebuilt.distance(i, j) - space.distance(point[i], point[j])) > NORM_TOL:
                raise InternalInvariantViolation("norm table round trip failed")
    return table


def invertible_maps(m: int):
    """Column tuples (bitmask images of the basis) of every invertible m x m
    matrix over Z2."""
    def rec(cols, span):
        if len(cols) == m:
            yield tuple(cols)
            return
        for v in range(1, 1 << m):
            if v in span:
                continue
            yield from rec(cols + [v], span | {s ^ v for s in span})
    yield from rec([], {0})


def _apply(cols, m):
    img = np.zeros(1 << m, dtype=np.int64)
    for i, c in enumerate(cols):
        bit = 1 << i
        img[bit:2 * bit] = img[:bit] ^ c
    return img


def _is_additive(norm, m):
    size = np.arange(1 << m)
    weights = np.array([norm[1 << i] for i in range(m)])
    bits = ((size[:, None] >> np.arange(m)) & 1)
    return bool(np.all(np.abs(bits @ weights - norm) <= NORM_TOL * (1 + np.abs(norm))))


def _is_monotone(norm, m):
    for i in range(m):
        bit = 1 << i
        lo = np.arange(1 << m)
        lo = lo[(lo & bit) == 0]
        if np.any(norm[lo] > norm[lo | bit] + NORM_TOL):
            return False
    return True


@dataclass
class NormFlags:
    additive: bool
    monotone: bool
    additive_basis: tuple | None = None
    monotone_basis: tuple | None = None
    maps_checked: int = 0

    def as_dict(self):
        return {
            "additive": self.additive,
            "monotone": self.monotone,
            "additive_basis": self.additive_basis,
            "monotone_basis": self.monotone_basis,
            "maps_checked": self.maps_checked,
        }


def norm_properties(t: NormTable) -> NormFlags:
    """Additive / monotone flags up to an invertible linear change of basis.

    A basis change is given by the images of the basis vectors; the new table
    is norm'[S] = norm[A S].
    """
    m = t.m
    if m > 4:
        raise BasisSearchTooLarge(f"m={m}: basis search limited to m <= 4")
    norm = np.asarray(t.norm, dtype=float)
    flags = NormFlags(False, False)
    for cols in invertible_maps(m):
        flags.maps_checked += 1
        new = norm[_apply(cols, m)]
        if not flags.additive and _is_additive(new, m):
            flags.additive, flags.additive_basis = True, cols
        if not flags.monotone and _is_monotone(new, m):
            flags.monotone, flags.monotone_basis = True, cols
    if flags.additive and not flags.monotone:
        raise InternalInvariantViolation("additive table that is not monotone")
    return flags


# ---------------------------------------------------------------------------
# classification


@dataclass
class Classification:
    labels: set
    isosceles_free: bool
    components: int
    two_homogeneous: bool
    factorization: object = None

    def as_dict(self):
        out = {
            "labels": sorted(self.labels),
            "isosceles_free": self.isosceles_free,
            "components": self.components,
            "two_homogeneous": self.two_homogeneous,
        }
        if self.factorization is not None:
            X, params = self.factorization
            out["factorization"] = {"base_points": X.n, "base_delta": X.delta, "H_order": params.H.order}
        return out


def classify(space: ColoredSpace) -> Classification:
    """Labels among isosceles-generated, rainbow duplicate of an
    isosceles-generated space, and Boolean that apply to a 1-homogeneous space."""
    from .constructions import rainbow_factorization

    _require(space, 1)
    dec = isosceles_generated_components(space)
    k = len(dec.blocks)
    labels = set()
    factor = None
    if k <= 1:
        labels.add(ISOGEN)
    if k == 2:
        factor = rainbow_factorization(space)
        if factor is None:
            raise InternalInvariantViolation("two components but no rainbow factorization")
        base = factor[0]
        if len(isosceles_generated_components(base).blocks) > 1:
            raise InternalInvariantViolation("rainbow base is not isosceles-generated")
        labels.add(RAINBOW)
    if is_boolean_space(space):
        labels.add(BOOLEAN)
    if not labels:
        raise InternalInvariantViolation("no classification case applies")
    two = homogeneity_level(space, 2) >= 2
    iso_free = is_isosceles_free(space)
    if two and not (ISOGEN in labels or iso_free):
        raise InternalInvariantViolation("2-homogeneous but neither isosceles-generated nor isosceles-free")
    return Classification(labels, iso_free, k, two, factor)


def theorem_checks(space: ColoredSpace) -> dict:
    """Evaluate the structural implications on one space; each entry is True
    when the implication holds (vacuously or not)."""
    out = {}
    n = space.n
    G = automorphisms(space)
    one = homogeneity_level(space, 1) >= 1
    iso_free = is_isosceles_free(space)
    out["isofree_homog_implies_ultra"] = not (one and iso_free) or (
        homogeneity_level(space, n) >= n
    )
    out["isofree_implies_boolean_aut"] = not iso_free or is_boolean(G)
    out["isofree_homog_power_of_two"] = not (one and iso_free) or (n & (n - 1)) == 0
    if not one or n == 0:
        return out
    S = singleton_distances(space)
    out["singleton_bound"] = 2 * space.delta <= len(S) + n
    dec = isosceles_generated_components(space)
    k = len(dec.blocks)
    star = aut_star(space, dec)
    out["two_components_unique"] = k < 2 or point_stabilizers_trivial(space, G)
    out["three_components_boolean"] = k < 3 or is_boolean_space(space)
    out["two_components_star_abelian"] = k < 2 or is_abelian(star)
    Q = quotient_space(space, dec)
    out["quotient_power_of_two"] = (Q.n & (Q.n - 1)) == 0
    out["semidirect_order"] = G.order == star.order * automorphisms(Q).order
    out["classification_nonempty"] = bool(classify(space).labels)
    return out


def isometric_exact(x: ColoredSpace, y: ColoredSpace) -> bool:
    """Isometry up to relabeling of points, comparing real distances."""
    if x.n != y.n or x.delta != y.delta:
        return False
    px, py = _values(x), _values(y)
    if any(abs(a - b) > NORM_TOL * (1 + abs(a)) for a, b in zip(px, py)):
        return False
    # palettes are sorted, so equal palettes mean equal color meaning
    return find_isometry(x, y) is not None
