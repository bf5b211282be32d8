"""Finite spaces: cycles, products, binary and Boolean spaces, rainbow duplicates."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegreeTooLarge,
    DistancesNotDistinct,
    DoesNotInvert,
    InternalInvariantViolation,
    NoPalette,
    NormNotInjective,
    NotAbelian,
    NotATriangle,
    NotAutomorphism,
    NotHomogeneous,
    NotInvolution,
    NotUniquelyTransitive,
    PreconditionFailed,
    RMeetsDistances,
    RNotInjective,
    SumNotInjective,
)
from .homogeneity import automorphisms, is_automorphism, is_isosceles_free, is_k_homogeneous, is_ultrahomogeneous
from .permgroup import (
    PermGroup,
    close,
    compose,
    group_from_elements,
    inverse,
    is_abelian,
    is_boolean,
    setwise_stabilizer,
)
from .space import ColoredSpace, from_metric, new_space, realize_metric

log = logging.getLogger(__name__)

MAX_POINTS = 64
MAX_BINARY = 10
VALUE_TOL = 1e-9


def cycle(n: int) -> ColoredSpace:
    """Circle graph C_n with the graph distance."""
    if n < 1:
        raise PreconditionFailed("cycle needs n >= 1")
    a = np.arange(n)
    d = np.abs(a[:, None] - a[None, :])
    return new_space(np.minimum(d, n - d), list(range(n // 2 + 1)))


def scale(space: ColoredSpace, factor: float) -> ColoredSpace:
    if space.palette is None:
        raise NoPalette("scale needs a palette")
    if factor <= 0:
        raise PreconditionFailed("scale factor must be positive")
    return new_space(space.colors, [p * factor for p in space.palette])


def l1_product(X: ColoredSpace, Y: ColoredSpace) -> ColoredSpace:
    """Product with summed distances; the sum map on distance sets must be
    injective so that colors stay separated."""
    if X.palette is None or Y.palette is None:
        raise NoPalette("l1_product needs palettes")
    sums = {}
    for i, p in enumerate(X.palette):
        for j, q in enumerate(Y.palette):
            s = p + q
            for (i2, j2), s2 in sums.items():
                if abs(s - s2) <= VALUE_TOL * (1 + abs(s)):
                    raise SumNotInjective(
                        f"{X.palette[i2]}+{Y.palette[j2]} = {p}+{q}", witness=((i2, j2), (i, j))
                    )
            sums[(i, j)] = s
    order = sorted(sums, key=sums.get)
    code = np.zeros((X.delta, Y.delta), dtype=np.int64)
    for rank, (i, j) in enumerate(order):
        code[i, j] = rank
    nx, ny = X.n, Y.n
    cx = np.repeat(np.repeat(X.colors, ny, axis=0), ny, axis=1)
    cy = np.tile(Y.colors, (nx, nx))
    return new_space(code[cx, cy], [sums[k] for k in order])


def binary_space(m: int) -> ColoredSpace:
    """2^m points with d(x, y) = x xor y read as an integer."""
    if not 0 <= m <= MAX_BINARY:
        raise DegreeTooLarge(f"binary_space supports 0 <= m <= {MAX_BINARY}")
    a = np.arange(1 << m)
    return new_space(a[:, None] ^ a[None, :], list(range(1 << m)))


def boolean_space(t) -> ColoredSpace:
    """Space on bitmasks with d(x, y) = norm[x xor y]."""
    norm = [float(v) for v in t.norm]
    ranked = sorted(range(len(norm)), key=lambda i: norm[i])
    for a, b in zip(ranked, ranked[1:]):
        if abs(norm[a] - norm[b]) <= VALUE_TOL * (1 + abs(norm[a])):
            raise NormNotInjective(f"norm[{a}] = norm[{b}] = {norm[a]}")
    rank = np.empty(len(norm), dtype=np.int64)
    rank[ranked] = np.arange(len(norm))
    a = np.arange(len(norm))
    X = new_space(rank[a[:, None] ^ a[None, :]], [norm[i] for i in ranked])
    if not is_isosceles_free(X) or not is_k_homogeneous(X, 1):
        raise InternalInvariantViolation("Boolean space is not homogeneous isosceles-free")
    return X


def _beta_parts(n):
    m = (n & -n).bit_length() - 1
    return m, (n >> m) // 2


def b_space(m: int, k: int) -> ColoredSpace:
    """Scaled odd cycle C_{2k+1} (by 2^m) times the binary space X_m.

    Point (i, x) has index i * 2^m + x.
    """
    n = (1 << m) * (2 * k + 1)
    if m < 0 or k < 0 or n > MAX_POINTS:
        raise DegreeTooLarge(f"b_space limited to {MAX_POINTS} points")
    return l1_product(scale(cycle(2 * k + 1), 1 << m), binary_space(m))


# ---------------------------------------------------------------------------
# rainbow duplicates


@dataclass
class RainbowParams:
    """H: abelian, uniquely transitive subgroup of Aut(X); g: involution of X
    inverting H by conjugation; r: one positive real per element of H, in the
    order of H.elements."""

    H: PermGroup
    g: tuple
    r: tuple

    def r_of(self, h) -> float:
        return self.r[self.H.index(h)]


def _translation_index(H: PermGroup):
    """idx[x][y] = position in H of the unique h with h(x) = y."""
    n = H.n
    idx = np.full((n, n), -1, dtype=np.int64)
    E = H.elements
    for pos in range(H.order):
        row = E[pos]
        for x in range(n):
            if idx[x, row[x]] != -1:
                raise NotUniquelyTransitive(f"two elements of H map {x} to {row[x]}")
            idx[x, row[x]] = pos
    if (idx < 0).any():
        x, y = map(int, np.argwhere(idx < 0)[0])
        raise NotUniquelyTransitive(f"no element of H maps {x} to {y}")
    return idx


def check_rainbow_params(X: ColoredSpace, params: RainbowParams):
    H, g, r = params.H, tuple(params.g), list(params.r)
    if X.palette is None:
        raise NoPalette("rainbow duplicate needs a palette on the base")
    if H.n != X.n or len(g) != X.n:
        raise PreconditionFailed("degree mismatch between X and the parameters")
    if not is_abelian(H):
        raise NotAbelian("H is not abelian")
    idx = _translation_index(H)
    for h in H.generators:
        if not is_automorphism(X, h):
            raise NotAutomorphism(f"{h} is not an automorphism of X")
    if not is_automorphism(X, g):
        raise NotAutomorphism("g is not an automorphism of X")
    if compose(g, g) != tuple(range(X.n)):
        raise NotInvolution("g o g != id")
    gi = inverse(g)
    for h in H.generators:
        if compose(compose(g, h), gi) != inverse(h):
            raise DoesNotInvert(f"g h g^-1 != h^-1 for h = {h}")
    if len(r) != H.order:
        raise RNotInjective("r needs one value per element of H")
    if any(v <= 0 for v in r):
        raise RNotInjective("r values must be positive")
    srt = sorted(r)
    if any(b - a <= VALUE_TOL for a, b in zip(srt, srt[1:])):
        raise RNotInjective("r is not injective")
    for v in r:
        if any(abs(v - p) <= VALUE_TOL for p in X.palette):
            raise RMeetsDistances(f"r value {v} is already a distance of X")
    return idx


def rainbow_triangle_condition(X: ColoredSpace, r) -> bool:
    """The sufficient condition |r(h) - r(h')| <= min positive distance and
    r(h) >= max distance."""
    pos = [p for p in X.palette if p > 0]
    if not pos:
        return True
    return max(r) - min(r) <= min(pos) + VALUE_TOL and min(r) >= max(pos) - VALUE_TOL


def rainbow_duplicate(X: ColoredSpace, params: RainbowParams) -> ColoredSpace:
    """Two copies of X; (x, 0) and (y, 1) are at distance r(h) for the unique
    h in H with h(x) = y. Point (x, i) has index i * n + x."""
    if X.n and not is_k_homogeneous(X, 1):
        raise NotHomogeneous(1)
    idx = check_rainbow_params(X, params)
    n = X.n
    r = np.asarray(params.r, dtype=float)
    D = X.distance_matrix()
    cross = r[idx]
    full = np.block([[D, cross], [cross.T, D]])
    log.debug("rainbow sufficient triangle condition: %s", rainbow_triangle_condition(X, params.r))
    Y = from_metric(full, tol=VALUE_TOL)
    if Y.delta != X.delta + params.H.order:
        raise InternalInvariantViolation("rainbow duplicate has the wrong number of distances")
    if automorphisms(Y).order != 2 * params.H.order:
        raise InternalInvariantViolation("|Aut| of the rainbow duplicate is not 2|H|")
    return Y


def default_r(X: ColoredSpace, H: PermGroup):
    """r(h_i) = max distance + 1 + i/|H| in the element order of H."""
    if X.palette is None:
        raise NoPalette("default_r needs a palette")
    top = max(X.palette)
    return tuple(top + 1 + i / H.order for i in range(H.order))


def rotation_group(n: int) -> PermGroup:
    a = np.arange(n)
    return group_from_elements(n, (a[None, :] + a[:, None]) % n, generators=[tuple((a + 1) % n)] if n > 1 else [])


def reflection(n: int) -> tuple:
    return tuple(int(v) for v in (-np.arange(n)) % n)


def d_space(n: int) -> ColoredSpace:
    """Rainbow duplicate of C_n over its rotations, with g the reflection
    i -> -i."""
    if n < 1:
        raise PreconditionFailed("d_space needs n >= 1")
    if 2 * n > MAX_POINTS:
        raise DegreeTooLarge(f"d_space limited to {MAX_POINTS} points")
    X = cycle(n)
    H = rotation_group(n)
    return rainbow_duplicate(X, RainbowParams(H, reflection(n), default_r(X, H)))


def _b_params(m, k):
    """H = rotations x translations and g = (reflection, id) on b_space(m, k)."""
    c, s = 2 * k + 1, 1 << m
    i = np.arange(c)[:, None]
    x = np.arange(s)[None, :]
    elems = []
    for a in range(c):
        for t in range(s):
            elems.append((((i + a) % c) * s + (x ^ t)).ravel())
    gens = [tuple(int(v) for v in elems[1 * s])] if c > 1 else []
    gens += [tuple(int(v) for v in elems[1 << b]) for b in range(m)]
    H = group_from_elements(c * s, np.array(elems), generators=gens)
    g = tuple(int(v) for v in ((((-i) % c) * s + x).ravel()))
    return H, g


def e_space(m: int, k: int) -> ColoredSpace:
    """Rainbow duplicate of b_space(m, k)."""
    n = (1 << m) * (2 * k + 1)
    if 2 * n > MAX_POINTS:
        raise DegreeTooLarge(f"e_space limited to {MAX_POINTS} points")
    X = b_space(m, k)
    H, g = _b_params(m, k)
    Y = rainbow_duplicate(X, RainbowParams(H, g, default_r(X, H)))
    if Y.delta != (1 << m) * (3 * k + 2):
        raise InternalInvariantViolation("e_space has the wrong number of distances")
    return Y


def discrete_boolean_duplicate(n: int) -> ColoredSpace:
    """Rainbow duplicate of the discrete 2^n-point space over the xor
    translations, with r injective into (1, 2)."""
    if not 0 <= n <= 4:
        raise DegreeTooLarge("discrete_boolean_duplicate supports 0 <= n <= 4")
    size = 1 << n
    a = np.arange(size)
    X = new_space((a[:, None] != a[None, :]).astype(int), [0.0, 1.0] if size > 1 else [0.0])
    H = group_from_elements(size, a[:, None] ^ a[None, :], generators=[tuple(int(v) for v in a ^ (1 << b)) for b in range(n)])
    r = tuple(1 + (i + 1) / (size + 1) for i in range(size))
    Y = rainbow_duplicate(X, RainbowParams(H, tuple(range(size)), r))
    if not is_boolean(automorphisms(Y)):
        raise InternalInvariantViolation("duplicate is not Boolean")
    if n >= 2 and is_isosceles_free(Y):
        raise InternalInvariantViolation("duplicate should not be isosceles-free")
    return Y


@dataclass
class Factorization:
    base: ColoredSpace
    params: RainbowParams
    points: tuple  # phi: index i * n + x of the duplicate -> point of Y

    def __iter__(self):
        return iter((self.base, self.params))

    def __getitem__(self, i):
        return (self.base, self.params)[i]


def rainbow_factorization(Y: ColoredSpace):
    """Write a space with exactly two isosceles-generated components as a
    rainbow duplicate of one of them; None for any other component count."""
    from .structure import isosceles_generated_components, isometric_exact

    if Y.n and not is_k_homogeneous(Y, 1):
        raise NotHomogeneous(1)
    dec = isosceles_generated_components(Y)
    if len(dec.blocks) != 2:
        return None
    if Y.palette is None:
        Y = realize_metric(Y, 1.0)
    A, B = dec.blocks
    rows = Y.rows
    x0 = A[0]
    q = min(rows[x0][y] for y in B)
    # f_q: the unique point at color q
    fq = [rows[y].index(q) for y in range(Y.n)]
    local = {p: i for i, p in enumerate(A)}
    G = automorphisms(Y)
    star = setwise_stabilizer(G, dec.blocks)
    H = group_from_elements(len(A), [[local[int(h[p])] for p in A] for h in star.elements])
    X = Y.subspace(A)
    r = tuple(Y.distance(x0, fq[A[int(h[0])]]) for h in H.elements)
    swap = G.elements[np.flatnonzero(G.elements[:, x0] == B[0])[0]]
    g = tuple(local[fq[int(swap[p])]] for p in A)
    params = RainbowParams(H, g, r)
    Z = rainbow_duplicate(X, params)
    phi = tuple(A) + tuple(fq[p] for p in A)
    n = len(A)
    for i in range(2 * n):
        for j in range(2 * n):
            if abs(Z.distance(i, j) - Y.distance(phi[i], phi[j])) > VALUE_TOL:
                raise InternalInvariantViolation("factorization does not reproduce the space")
    if not isometric_exact(Z, Y):
        raise InternalInvariantViolation("factorization round trip failed")
    return Factorization(X, params, phi)


# ---------------------------------------------------------------------------
# small explicit spaces

_HEXAGON = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 5, 4, 2, 3],
    [2, 5, 0, 1, 3, 4],
    [3, 4, 1, 0, 5, 2],
    [4, 2, 3, 5, 0, 1],
    [5, 3, 4, 2, 1, 0],
]


def hexagon(d1, d2, d3, d4, d5) -> ColoredSpace:
    """Six points, every distance once per row, yet not 1-homogeneous."""
    d = [0.0, d1, d2, d3, d4, d5]
    if len({float(v) for v in d[1:]}) != 5:
        raise DistancesNotDistinct("hexagon needs five distinct distances")
    if any(not 1 <= v <= 2 for v in d[1:]):
        raise PreconditionFailed("hexagon distances must lie in [1, 2]")
    idx = np.array(_HEXAGON)
    X = from_metric(np.asarray(d, dtype=float)[idx], tol=VALUE_TOL)
    if not is_isosceles_free(X) or is_k_homogeneous(X, 1):
        raise InternalInvariantViolation("hexagon lost its defining properties")
    return X


def tetrahedron(a, b, c) -> ColoredSpace:
    """Four points; opposite edges share a distance: {0,1},{2,3} -> a,
    {0,2},{1,3} -> b, {0,3},{1,2} -> c."""
    if min(a, b, c) <= 0:
        raise NotATriangle("distances must be positive")
    if len({a, b, c}) != 3:
        raise DistancesNotDistinct("a, b, c must be distinct for an isosceles-free space")
    s = sorted((a, b, c))
    if s[2] > s[0] + s[1] + VALUE_TOL:
        raise NotATriangle(f"{a}, {b}, {c} violate the triangle inequality")
    if abs(s[2] - s[0] - s[1]) <= VALUE_TOL:
        log.warning("degenerate triangle %s, %s, %s", a, b, c)
    M = np.array([[0, a, b, c], [a, 0, c, b], [b, c, 0, a], [c, b, a, 0]], dtype=float)
    X = from_metric(M, tol=VALUE_TOL)
    if not is_isosceles_free(X) or not is_ultrahomogeneous(X):
        raise InternalInvariantViolation("tetrahedron is not homogeneous isosceles-free")
    return X


@dataclass
class WapGadget:
    X: ColoredSpace
    Y: ColoredSpace
    r0: float
    eps: float
    r1: float
    obstruction: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "r0": self.r0,
            "eps": self.eps,
            "r1": self.r1,
            "obstruction": self.obstruction,
        }


def wap_gadget(B: ColoredSpace, p0: int = 0, p1: int = 1) -> WapGadget:
    """One-point extensions X = B + x and Y = B + y of B that cannot be
    amalgamated over {p0, p1} without an isosceles triangle."""
    if B.palette is None:
        raise PreconditionFailed("B needs a palette")
    if not is_isosceles_free(B):
        raise PreconditionFailed("B must be isosceles-free")
    if p0 == p1 or not (0 <= p0 < B.n and 0 <= p1 < B.n):
        raise PreconditionFailed("marked points must be distinct points of B")
    D = B.distance_matrix()
    n = B.n
    r0 = float(D.max()) + 1
    gaps = np.abs(D[:, p0][:, None] - D[:, p1][None, :])
    eps = float(gaps[gaps > VALUE_TOL].min()) / 2
    r1 = r0 - eps
    dx = D[:, p0] + r0
    dy = np.minimum(D[:, p0] + r0, D[:, p1] + r1)

    def extend(col):
        M = np.zeros((n + 1, n + 1))
        M[:n, :n] = D
        M[:n, n] = M[n, :n] = col
        return from_metric(M, tol=VALUE_TOL)

    X, Y = extend(dx), extend(dy)
    if not is_isosceles_free(X) or not is_isosceles_free(Y):
        raise InternalInvariantViolation("WAP extensions are not isosceles-free")
    # in an amalgam identifying p0 and p1, x and y are distinct points (their
    # distances to p1 differ) at equal distance from p0
    same_from_p0 = abs(dx[p0] - dy[p0]) <= VALUE_TOL
    differ_at_p1 = abs(dx[p1] - dy[p1]) > VALUE_TOL
    obstruction = {
        "d_X(p0,x)": float(dx[p0]),
        "d_Y(p0,y)": float(dy[p0]),
        "d_X(p1,x)": float(dx[p1]),
        "d_Y(p1,y)": float(dy[p1]),
        "forced_isosceles": bool(same_from_p0 and differ_at_p1),
    }
    if not obstruction["forced_isosceles"]:
        raise InternalInvariantViolation("WAP obstruction not realized")
    return WapGadget(X, Y, r0, eps, r1, obstruction)
