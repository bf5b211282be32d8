"""Finite metric spaces stored as symmetric color matrices.

A space on n points is an n x n matrix of color indices. Color 0 sits on the
diagonal and nowhere else. An optional palette assigns a real distance to each
color; all structural questions only look at the colors.
"""
from __future__ import annotations

import json
from array import array
from collections import Counter
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetricMatrix,
    DiagonalNotZero,
    EmptySpace,
    OffDiagonalZero,
    PaletteNotStrictlyIncreasing,
    ToleranceMergeAmbiguous,
    TriangleViolation,
)

TRIANGLE_TOL = 1e-9


class ColoredSpace:
    """Immutable validated color matrix with an optional distance palette.

    Build instances through new_space (or the constructors module); the
    initializer trusts its input.
    """

    __slots__ = ("colors", "palette", "_rows", "_cache")

    def __init__(self, colors: np.ndarray, palette=None):
        colors = np.array(colors, dtype=np.int32)
        colors.flags.writeable = False
        self.colors = colors
        self.palette = None if palette is None else tuple(float(p) for p in palette)
        self._rows = None
        self._cache = {}

    @property
    def n(self) -> int:
        return self.colors.shape[0]

    @property
    def delta(self) -> int:
        if self.n == 0:
            return 0
        return int(self.colors.max()) + 1

    @property
    def rows(self) -> tuple:
        if self._rows is None:
            self._rows = tuple(tuple(int(c) for c in row) for row in self.colors)
        return self._rows

    def distance(self, i, j) -> float:
        c = int(self.colors[i, j])
        return self.palette[c] if self.palette is not None else float(c)

    def distance_matrix(self) -> np.ndarray:
        pal = np.asarray(self.palette if self.palette is not None else range(self.delta), dtype=float)
        return pal[self.colors]

    def subspace(self, points) -> "ColoredSpace":
        points = list(points)
        sub = self.colors[np.ix_(points, points)]
        return new_space(sub, self.palette)

    def __eq__(self, other):
        if not isinstance(other, ColoredSpace):
            return NotImplemented
        return np.array_equal(self.colors, other.colors) and self.palette == other.palette

    def __hash__(self):
        return hash((self.colors.tobytes(), self.n, self.palette))

    def __repr__(self):
        return f"ColoredSpace(n={self.n}, delta={self.delta})"


def _compact(colors: np.ndarray, palette):
    used = np.unique(colors)
    if len(used) and used[0] != 0:
        used = np.concatenate([[0], used])
    remap = np.zeros(int(used.max()) + 1 if len(used) else 1, dtype=np.int32)
    remap[used] = np.arange(len(used), dtype=np.int32)
    new_colors = remap[colors] if colors.size else colors
    new_palette = None
    if palette is not None:
        new_palette = [float(palette[u]) for u in used] if len(used) else [0.0]
    return new_colors, new_palette


def check_triangle(colors: np.ndarray, palette) -> None:
    n = colors.shape[0]
    if n < 3:
        return
    d = np.asarray(palette, dtype=float)[colors]
    # d[i,k] <= d[i,j] + d[j,k], checked one middle point at a time
    for j in range(n):
        via = d[:, j][:, None] + d[j, :][None, :]
        bad = d > via + TRIANGLE_TOL * (1.0 + np.abs(via))
        if bad.any():
            i, k = map(int, np.argwhere(bad)[0])
            raise TriangleViolation(
                f"d({i},{k})={d[i, k]} > d({i},{j})+d({j},{k})={via[i, k]}"
            )


def new_space(matrix, palette=None) -> ColoredSpace:
    """Validate a color matrix and compact its colors to 0..c-1."""
    colors = np.array(matrix, dtype=np.int64)
    if colors.size == 0:
        colors = colors.reshape(0, 0)
    if colors.ndim != 2 or colors.shape[0] != colors.shape[1]:
        raise AsymmetricMatrix("matrix must be square")
    n = colors.shape[0]
    if not np.array_equal(colors, colors.T):
        i, j = map(int, np.argwhere(colors != colors.T)[0])
        raise AsymmetricMatrix(f"colors[{i}][{j}] != colors[{j}][{i}]")
    if n and np.any(np.diag(colors) != 0):
        raise DiagonalNotZero("diagonal entries must be color 0")
    off = colors + np.eye(n, dtype=np.int64)
    if np.any(off == 0):
        i, j = map(int, np.argwhere(off == 0)[0])
        raise OffDiagonalZero(f"colors[{i}][{j}] is 0 off the diagonal")
    if np.any(colors < 0):
        raise AsymmetricMatrix("negative color index")
    if palette is not None:
        palette = [float(p) for p in palette]
        if colors.size and int(colors.max()) >= len(palette):
            raise PaletteNotStrictlyIncreasing("palette shorter than the color range")
        if not palette or palette[0] != 0.0:
            raise PaletteNotStrictlyIncreasing("palette[0] must be 0")
        if any(b <= a for a, b in zip(palette, palette[1:])):
            raise PaletteNotStrictlyIncreasing(f"palette {palette} is not strictly increasing")
    colors, palette = _compact(colors, palette)
    if palette is not None:
        check_triangle(colors, palette)
    return ColoredSpace(colors, palette)


def validate(space: ColoredSpace) -> ColoredSpace:
    """Re-run every structural check on an existing space."""
    again = new_space(space.colors, space.palette)
    if not np.array_equal(again.colors, space.colors):
        raise AsymmetricMatrix("colors are not compact")
    return space


def discrete_space(n: int) -> ColoredSpace:
    colors = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
    return new_space(colors, [0.0, 1.0] if n > 1 else [0.0])


def from_metric(reals, tol: float = 1e-9) -> ColoredSpace:
    """Turn a real distance matrix into a space, merging values within tol."""
    d = np.array(reals, dtype=float)
    if d.size == 0:
        return new_space(np.zeros((0, 0), dtype=int), [0.0])
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise AsymmetricMatrix("matrix must be square")
    n = d.shape[0]
    if np.any(np.abs(d - d.T) > tol):
        raise AsymmetricMatrix("matrix is not symmetric within tolerance")
    if np.any(np.abs(np.diag(d)) > tol):
        raise DiagonalNotZero("diagonal is not zero within tolerance")
    iu = np.triu_indices(n, 1)
    vals = (d[iu] + d.T[iu]) / 2
    if np.any(vals <= tol):
        raise OffDiagonalZero("distinct points at distance zero")
    uniq = np.unique(vals)
    # consecutive values closer than tol are merged; a class wider than tol
    # would depend on merge order, so it is rejected
    classes = [[uniq[0]]] if len(uniq) else []
    for v in uniq[1:]:
        if v - classes[-1][-1] <= tol:
            classes[-1].append(v)
        else:
            classes.append([v])
    for cl in classes:
        if cl[-1] - cl[0] > tol:
            raise ToleranceMergeAmbiguous(
                f"values {cl[0]}..{cl[-1]} chain together but span more than {tol}"
            )
    reps = [cl[0] for cl in classes]
    idx = np.searchsorted(np.array([cl[-1] for cl in classes]), vals) + 1
    colors = np.zeros((n, n), dtype=np.int64)
    colors[iu] = idx
    colors = colors + colors.T
    return new_space(colors, [0.0] + reps)


def realize_metric(space: ColoredSpace, a: float = 1.0) -> ColoredSpace:
    """Attach the evenly spaced palette {0} and a(1 + k/(c-1)) for k < c-1."""
    c = space.delta
    if c <= 2:
        palette = [0.0] + [float(a)] * (c - 1)
    else:
        palette = [0.0] + [a * (1 + k / (c - 1)) for k in range(c - 1)]
    return ColoredSpace(space.colors, palette if c else [0.0])


def delta(space: ColoredSpace) -> int:
    return space.delta


def require_points(space: ColoredSpace) -> None:
    if space.n == 0:
        raise EmptySpace("operation needs at least one point")


# ---------------------------------------------------------------------------
# canonical form


def _vertex_invariant(rows, v):
    counts = Counter(rows[v])
    del counts[0]
    return tuple(sorted(counts.values()))


class _Canonizer:
    """Branch and bound over vertex orderings.

    An ordering is read column by column (entries (0,k),(1,k),..,(k-1,k)) and
    colors are renamed by first occurrence, so the minimum over orderings is
    invariant under point and color relabelings. Automorphisms found at equal
    leaves prune sibling branches and trigger a back-jump.
    """

    def __init__(self, space):
        self.rows = space.rows
        self.n = space.n
        self.best_cols = None
        self.best_order = None
        self.autos = []

    def column(self, order, cmap, w):
        col = []
        fresh = {}
        nxt = len(cmap) + 1
        for u in order:
            raw = self.rows[u][w]
            c = cmap.get(raw)
            if c is None:
                c = fresh.get(raw)
                if c is None:
                    c = nxt + len(fresh)
                    fresh[raw] = c
            col.append(c)
        return tuple(col)

    def orbit_of(self, seeds, fixed):
        gens = [g for g in self.autos if all(g[p] == p for p in fixed)]
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            x = stack.pop()
            for g in gens:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def run(self, first):
        self.search([], {}, [], first)
        return self.best_cols

    def search(self, order, cmap, cols, candidates):
        depth = len(order)
        tight = self.best_cols is not None and self.best_cols[:depth] == cols
        if depth == self.n:
            if not tight:
                self.best_cols = list(cols)
                self.best_order = list(order)
                return None
            sigma = [0] * self.n
            for a, b in zip(self.best_order, order):
                sigma[a] = b
            self.autos.append(tuple(sigma))
            return next(i for i in range(self.n) if self.best_order[i] != order[i])
        scored = [(self.column(order, cmap, w), w) for w in candidates]
        low = min(s for s, _ in scored)
        if tight and low > self.best_cols[depth]:
            return None
        explored = []
        for w in [w for s, w in scored if s == low]:
            if explored and w in self.orbit_of(explored, order):
                continue
            explored.append(w)
            new_map = dict(cmap)
            for u in order:
                raw = self.rows[u][w]
                if raw not in new_map:
                    new_map[raw] = len(new_map) + 1
            rest = [v for v in candidates if v != w] if depth else [v for v in range(self.n) if v != w]
            jump = self.search(order + [w], new_map, cols + [low], rest)
            if jump is not None and jump < depth:
                return jump
        return None


def canonical_form(space: ColoredSpace) -> bytes:
    """Bytes equal for two spaces iff they differ by a point relabeling and a
    color relabeling fixing color 0."""
    n = space.n
    header = array("I", [n, space.delta]).tobytes()
    if n <= 1:
        return header
    rows = space.rows
    invs = [_vertex_invariant(rows, v) for v in range(n)]
    lo = min(invs)
    first = [v for v in range(n) if invs[v] == lo]
    cols = _Canonizer(space).run(first)
    flat = array("H", [c for col in cols for c in col])
    return header + array("H", [len(lo)]).tobytes() + array("H", lo).tobytes() + flat.tobytes()


def relabel(space: ColoredSpace, perm, color_perm=None) -> ColoredSpace:
    """Point i of the input becomes point perm[i]; colors map through color_perm."""
    n = space.n
    inv = np.empty(n, dtype=np.int64)
    inv[np.asarray(perm, dtype=np.int64)] = np.arange(n)
    colors = space.colors[np.ix_(inv, inv)]
    if color_perm is not None:
        colors = np.asarray(color_perm)[colors]
        return new_space(colors, None)
    return ColoredSpace(colors, space.palette)


def isometric(x: ColoredSpace, y: ColoredSpace) -> bool:
    return canonical_form(x) == canonical_form(y)


# ---------------------------------------------------------------------------
# serialization


def to_json(space: ColoredSpace) -> dict:
    out = {"n": space.n, "colors": space.colors.tolist()}
    if space.palette is not None:
        out["palette"] = list(space.palette)
    return out


def from_json(data: dict) -> ColoredSpace:
    colors = data["colors"]
    n = data.get("n", len(colors))
    if len(colors) != n:
        raise AsymmetricMatrix(f"n={n} but {len(colors)} rows given")
    return new_space(np.array(colors, dtype=np.int64).reshape(n, n), data.get("palette"))


def to_text(space: ColoredSpace) -> str:
    lines = [str(space.n)]
    lines += [" ".join(str(c) for c in row) for row in space.rows]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> ColoredSpace:
    tokens = text.split()
    n = int(tokens[0])
    vals = [int(t) for t in tokens[1:]]
    if len(vals) != n * n:
        raise AsymmetricMatrix(f"expected {n * n} entries, got {len(vals)}")
    return new_space(np.array(vals, dtype=np.int64).reshape(n, n))


def load_space(path) -> ColoredSpace:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return from_json(json.loads(text))
    return from_text(text)


def dump_space(space: ColoredSpace, path=None, fmt="json") -> str:
    text = to_text(space) if fmt == "text" else json.dumps(to_json(space)) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
