"""Triangle schemes t: R x R -> R, their coherence, and finite limit spaces."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InternalInvariantViolation, NotCoherent, PreconditionFailed, SchemeInvalid
from .homogeneity import is_isosceles_free, is_k_homogeneous, is_ultrahomogeneous
from .space import ColoredSpace, new_space

VALUE_TOL = 1e-9


@dataclass(frozen=True)
class TriangleScheme:
    """R holds distinct nonnegative reals with R[0] = 0; t holds indices into R."""

    R: tuple
    t: tuple

    def __post_init__(self):
        R = tuple(float(v) for v in self.R)
        t = tuple(tuple(int(v) for v in row) for row in self.t)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)
        k = len(R)
        if k == 0 or R[0] != 0.0:
            raise SchemeInvalid("R must start with the distance 0")
        if any(v < 0 for v in R):
            raise SchemeInvalid("distances must be nonnegative")
        srt = sorted(R)
        if any(b - a <= VALUE_TOL for a, b in zip(srt, srt[1:])):
            raise SchemeInvalid("distances in R must be distinct")
        if len(t) != k or any(len(row) != k for row in t):
            raise SchemeInvalid("t must be |R| x |R|")
        if any(not 0 <= v < k for row in t for v in row):
            raise SchemeInvalid("t entries must index R")

    @property
    def size(self):
        return len(self.R)

    def table(self) -> np.ndarray:
        return np.array(self.t, dtype=np.int64).reshape(self.size, self.size)

    def as_dict(self):
        return {"R": list(self.R), "t": [list(row) for row in self.t]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["R"]), tuple(tuple(row) for row in data["t"]))


@dataclass
class SchemeReport:
    symmetric_bounded: bool
    involutive: bool
    witnesses: list = field(default_factory=list)

    @property
    def valid(self):
        return self.symmetric_bounded and self.involutive

    def as_dict(self):
        return {
            "valid": self.valid,
            "condition_1": self.symmetric_bounded,
            "condition_2": self.involutive,
            "witnesses": self.witnesses,
        }


def validate_scheme(s: TriangleScheme) -> SchemeReport:
    """(1) t(p,q) = t(q,p) <= p + q; (2) t(t(p,q),q) = p and t(p,0) = p."""
    t = s.table()
    R = s.R
    rep = SchemeReport(True, True)
    k = s.size
    for p in range(k):
        if t[p, 0] != p:
            rep.involutive = False
            rep.witnesses.append({"condition": 2, "p": p, "q": 0, "why": "t(p,0) != p"})
        for q in range(k):
            if t[p, q] != t[q, p]:
                rep.symmetric_bounded = False
                rep.witnesses.append({"condition": 1, "p": p, "q": q, "why": "t(p,q) != t(q,p)"})
            elif R[t[p, q]] > R[p] + R[q] + VALUE_TOL:
                rep.symmetric_bounded = False
                rep.witnesses.append({"condition": 1, "p": p, "q": q, "why": "t(p,q) > p + q"})
            if t[t[p, q], q] != p:
                rep.involutive = False
                rep.witnesses.append({"condition": 2, "p": p, "q": q, "why": "t(t(p,q),q) != p"})
    return rep


@dataclass
class CoherenceResult:
    ok: bool
    witness: tuple | None = None
    violations: list = field(default_factory=list)

    def as_dict(self):
        return {
            "coherent": self.ok,
            "witness": None if self.witness is None else list(self.witness),
            "violation_count": len(self.violations),
        }


def coherence_violations(s: TriangleScheme):
    """All (p, q, p', q') with t(p,q) = t(p',q') but t(p,p') != t(q,q')."""
    t = s.table()
    out = []
    for r in range(s.size):
        ps, qs = np.nonzero(t == r)
        bad = t[ps[:, None], ps[None, :]] != t[qs[:, None], qs[None, :]]
        for i, j in zip(*np.nonzero(bad)):
            out.append((int(ps[i]), int(qs[i]), int(ps[j]), int(qs[j])))
    return sorted(out)


def is_violation(s: TriangleScheme, quad) -> bool:
    t = s.table()
    p, q, p2, q2 = quad
    return bool(t[p, q] == t[p2, q2] and t[p, p2] != t[q, q2])


def coherence_check(s: TriangleScheme, hint=None) -> CoherenceResult:
    """The reported witness is `hint` when that quadruple is itself a
    violation, otherwise the least violation."""
    rep = validate_scheme(s)
    if not rep.valid:
        raise SchemeInvalid(f"scheme fails validation: {rep.witnesses[0]}")
    bad = coherence_violations(s)
    if not bad:
        return CoherenceResult(True)
    if hint is not None and is_violation(s, hint):
        return CoherenceResult(False, tuple(int(v) for v in hint), bad)
    return CoherenceResult(False, bad[0], bad)


def limit_space(s: TriangleScheme) -> ColoredSpace:
    """Points are the distances p in R with d(p, q) = t(p, q)."""
    res = coherence_check(s)
    if not res.ok:
        raise NotCoherent(res.witness)
    order = sorted(range(s.size), key=lambda i: s.R[i])
    rank = np.empty(s.size, dtype=np.int64)
    rank[order] = np.arange(s.size)
    X = new_space(rank[s.table()], [s.R[i] for i in order])
    n = X.n
    if not is_isosceles_free(X) or not is_ultrahomogeneous(X):
        raise InternalInvariantViolation("limit space is not ultrahomogeneous isosceles-free")
    if n & (n - 1):
        raise InternalInvariantViolation("limit space size is not a power of two")
    return X


def scheme_from_space(space: ColoredSpace) -> TriangleScheme:
    """Completion table of a homogeneous isosceles-free space, read off at
    point 0: t(p, q) is the distance between the points at distances p and q."""
    if not is_isosceles_free(space) or (space.n and not is_k_homogeneous(space, 1)):
        raise PreconditionFailed("space must be homogeneous isosceles-free")
    if space.n == 0:
        return TriangleScheme((0.0,), ((0,),))
    rows = space.rows
    at = {c: y for y, c in enumerate(rows[0])}
    k = space.delta
    vals = space.palette if space.palette is not None else tuple(float(c) for c in range(k))
    t = tuple(tuple(rows[at[p]][at[q]] for q in range(k)) for p in range(k))
    return TriangleScheme(vals, t)


def schemes_equivalent(a: TriangleScheme, b: TriangleScheme) -> bool:
    """Equal up to relabeling of R (matching equal distance values)."""
    if a.size != b.size:
        return False
    pos = {}
    for j, v in enumerate(b.R):
        pos[round(v, 9)] = j
    try:
        m = [pos[round(v, 9)] for v in a.R]
    except KeyError:
        return False
    ta, tb = a.table(), b.table()
    return bool(np.array_equal(np.asarray(m)[ta], tb[np.ix_(m, m)]))


def z3z3_index(a: int, b: int) -> int:
    """Index in R of the point (a, b) of Z3 x Z3."""
    return 1 + 3 * (a % 3) + (b % 3)


def z3z3_counterexample() -> TriangleScheme:
    """R = {0} and nine values in [1, 2] labeled by Z3 x Z3; two distinct
    points complete to the third point of their affine line, -p-q."""
    R = (0.0,) + tuple(1 + i / 8 for i in range(9))
    t = np.zeros((10, 10), dtype=np.int64)
    t[0, :] = np.arange(10)
    t[:, 0] = np.arange(10)
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    p, q = z3z3_index(a, b), z3z3_index(c, d)
                    t[p, q] = 0 if p == q else z3z3_index(-a - c, -b - d)
    return TriangleScheme(R, tuple(map(tuple, t.tolist())))


# the quadruple (p, q, p', q') = ((0,1), (0,2), (1,0), (2,0))
Z3Z3_WITNESS = (z3z3_index(0, 1), z3z3_index(0, 2), z3z3_index(1, 0), z3z3_index(2, 0))
