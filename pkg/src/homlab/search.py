"""Maximal numbers of distances Δ₁(n), Δ₂(n) in k-homogeneous n-point spaces.

A vertex-transitive coloring of the complete graph gives distinct colors to
the orbitals of its own automorphism group, which is transitive; conversely
the orbital coloring of any transitive group is 1-homogeneous. So Δ₁(n) is
the maximum of 1 + #orbitals over transitive groups of degree n, and the
finest colorings come from the smallest groups.
"""
from __future__ import annotations

import itertools
import logging
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import permgroup as pg
from .constructions import b_space
from .errors import (
    DegreeTooLarge,
    InternalInvariantViolation,
    NotTransitive,
    OrderCapExceeded,
)
from .homogeneity import homogeneity_level, is_automorphism
from .space import ColoredSpace, canonical_form, new_space, realize_metric

log = logging.getLogger(__name__)

REGULAR = "RegularOnly"
FULL = "FullTransitive"
ORACLE = "PartitionOracle"
FORMULA = "Formula"
METHODS = {"regular": REGULAR, "full": FULL, "oracle": ORACLE, "formula": FORMULA}

ORACLE_MAX = 5

# {n: (Δ₂, Δ₁)}; an interval (lo, hi) where only bounds are known
TABLE = {
    1: (1, 1), 2: (2, 2), 3: (2, 2), 4: (4, 4), 5: (3, 3), 6: (4, 5), 7: (4, 4), 8: (8, 8),
    9: (5, 5), 10: (6, 8), 11: (6, 6), 12: (8, 10), 13: (7, 7), 14: (8, 11), 15: (8, 8),
    16: (16, 16), 18: (10, (14, 16)), 20: (12, (16, 18)),
}


def _method(name):
    return METHODS.get(name, name)


def _is_prime(p):
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def beta(n: int) -> int:
    """2^m (k+1) for n = 2^m (2k+1)."""
    m = (n & -n).bit_length() - 1
    k = ((n >> m) - 1) // 2
    return (1 << m) * (k + 1)


def embedded_upper_bound(n: int, k: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    if k == 2:
        return beta(n)
    if k != 1:
        raise ValueError("k must be 1 or 2")
    if n & (n - 1) == 0:
        return n
    if n % 2:
        return (n + 1) // 2
    half = n // 2
    if half % 2 and _is_prime(half):
        return 3 * ((half - 1) // 2) + 2
    if n >= 7:
        return n - 2
    return n


@dataclass
class SearchReport:
    n: int
    target: str
    value: object
    method: str
    witness_group: pg.PermGroup | None = None
    witness_space: ColoredSpace | None = None
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def lower(self):
        return self.value[0] if isinstance(self.value, tuple) else self.value

    @property
    def upper(self):
        return self.value[1] if isinstance(self.value, tuple) else self.value

    @property
    def exact(self):
        return self.lower == self.upper

    def as_dict(self):
        out = {
            "n": self.n,
            "target": self.target,
            "method": self.method,
            "value": self.lower if self.exact else None,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "elapsed": round(self.elapsed, 3),
        }
        if self.witness_group is not None:
            out["witness_group_order"] = self.witness_group.order
            out["witness_generators"] = [list(g) for g in self.witness_group.generators]
        if self.witness_space is not None:
            out["witness_colors"] = self.witness_space.colors.tolist()
        out.update(self.extra)
        return out


def orbital_coloring(G: pg.PermGroup) -> ColoredSpace:
    """Color i~j by the unordered orbital of {i, j}, with an evenly spaced palette."""
    if not pg.is_transitive(G):
        raise NotTransitive(f"group of order {G.order} is not transitive on {G.n} points")
    X = realize_metric(new_space(pg.orbital_color_matrix(G)))
    if X.delta != 1 + len(pg.pair_orbitals(G)) and G.n > 1:
        raise InternalInvariantViolation("orbital coloring lost a color")
    if not all(is_automorphism(X, g) for g in G.generators):
        raise InternalInvariantViolation("group does not preserve its orbital coloring")
    return X


def verify_witness(space: ColoredSpace, k: int, delta: int) -> None:
    """Independent re-check of a reported witness."""
    if space.delta != delta:
        raise InternalInvariantViolation(f"witness has {space.delta} distances, expected {delta}")
    if homogeneity_level(space, k) < k:
        raise InternalInvariantViolation(f"witness is not {k}-homogeneous")


def _best(cands):
    """Max δ; ties broken by the least canonical form."""
    best = None
    for d, G, X in cands:
        key = (-d, canonical_form(X))
        if best is None or key < best[0]:
            best = (key, d, G, X)
    return best[1:]


# ---------------------------------------------------------------------------
# search routes


def _regular(n, k):
    cands = []
    for G in pg.enumerate_regular_groups(n):
        X = orbital_coloring(G)
        if k == 1 or homogeneity_level(X, k) >= k:
            cands.append((X.delta, G, X))
    return _best(cands) if cands else (0, None, None)


def _full(n, k):
    if n > pg.MAX_TRANSITIVE_DEGREE:
        raise DegreeTooLarge(f"full transitive search supports n <= {pg.MAX_TRANSITIVE_DEGREE}")
    groups = pg.enumerate_transitive_groups(n)
    cands = []
    for G in groups:
        X = orbital_coloring(G)
        if k == 1 or homogeneity_level(X, k) >= k:
            cands.append((X.delta, G, X))
    # coarser colorings for larger groups
    count = {}

    def orbitals(G):
        if id(G) not in count:
            count[id(G)] = len(pg.pair_orbitals(G))
        return count[id(G)]

    for H, K in pg.transitive_covers(n):
        if orbitals(H) < orbitals(K):
            raise InternalInvariantViolation(f"orbital count grew from a subgroup of order {H.order}")
    return _best(cands)


def _restricted_growth(m):
    """All set partitions of range(m) as first-occurrence block labelings."""
    out = []
    a = [0] * m

    def rec(i, top):
        if i == m:
            out.append(tuple(a))
            return
        for c in range(top + 2):
            a[i] = c
            rec(i + 1, max(top, c))

    if m == 0:
        return [()]
    rec(1, 0)
    return out


class PartitionOracle:
    """Every partition of the edges of K_n is a coloring; keep the k-homogeneous
    ones. Automorphisms are found by testing all n! permutations."""

    def __init__(self, n):
        if n < 1 or n > ORACLE_MAX:
            raise DegreeTooLarge(f"partition oracle supports 1 <= n <= {ORACLE_MAX}")
        self.n = n
        self.edges = list(itertools.combinations(range(n), 2))
        self.perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        self._results = None

    def _color_matrix(self, labels):
        n = self.n
        c = np.zeros((n, n), dtype=np.int64)
        for (i, j), v in zip(self.edges, labels):
            c[i, j] = c[j, i] = v + 1
        return c

    def run(self):
        """List of (δ, homogeneity level up to 2, color matrix) over all
        vertex-transitive colorings."""
        if self._results is not None:
            return self._results
        n = self.n
        res = []
        P = self.perms
        for labels in _restricted_growth(len(self.edges)):
            c = self._color_matrix(labels)
            # equal color multisets on every row is necessary
            rows = np.sort(c, axis=1)
            if n > 1 and not (rows == rows[0]).all():
                continue
            # c[p[i], p[j]] == c[i, j] for all i, j
            ok = (c[P[:, :, None], P[:, None, :]] == c[None]).all(axis=(1, 2))
            G = pg.group_from_elements(n, P[ok])
            if not pg.is_transitive(G):
                continue
            X = new_space(c)
            lvl = homogeneity_level(X, 2, G)
            res.append((X.delta, lvl, c))
        self._results = res
        return res

    def best(self, k):
        cands = [(d, c) for d, lvl, c in self.run() if lvl >= k]
        d = max(x[0] for x in cands)
        forms = sorted(canonical_form(new_space(c)) for dd, c in cands if dd == d)
        for dd, c in cands:
            if dd == d and canonical_form(new_space(c)) == forms[0]:
                return d, realize_metric(new_space(c))
        raise InternalInvariantViolation("oracle lost its witness")


def _oracle(n, k):
    d, X = PartitionOracle(n).best(k)
    return d, None, X


def delta1(n: int, method="regular") -> SearchReport:
    method = _method(method)
    t0 = time.perf_counter()
    if method == REGULAR:
        if n < 1 or n > pg.MAX_REGULAR_DEGREE:
            raise DegreeTooLarge(f"regular search supports 1 <= n <= {pg.MAX_REGULAR_DEGREE}")
        d, G, X = _regular(n, 1)
        ub = embedded_upper_bound(n, 1)
        value = d if d == ub else (d, ub)
    elif method == FULL:
        d, G, X = _full(n, 1)
        value = d
    elif method == ORACLE:
        d, G, X = _oracle(n, 1)
        value = d
    else:
        raise ValueError(f"unknown method {method}")
    verify_witness(X, 1, d)
    if d > embedded_upper_bound(n, 1):
        raise InternalInvariantViolation(f"Δ₁({n}) witness exceeds the proven bound")
    return SearchReport(n, "Delta1", value, method, G, X, time.perf_counter() - t0)


def delta2(n: int, method="formula") -> SearchReport:
    method = _method(method)
    t0 = time.perf_counter()
    if method == FORMULA:
        if n < 1 or n > 64:
            raise DegreeTooLarge("formula mode supports 1 <= n <= 64")
        m = (n & -n).bit_length() - 1
        k = ((n >> m) - 1) // 2
        X = b_space(m, k)
        d, G = beta(n), None
    elif method == FULL:
        d, G, X = _full(n, 2)
    elif method == ORACLE:
        d, G, X = _oracle(n, 2)
    elif method == REGULAR:
        d, G, X = _regular(n, 2)
        ub = beta(n)
        verify_witness(X, 2, d)
        return SearchReport(n, "Delta2", d if d == ub else (d, ub), method, G, X, time.perf_counter() - t0)
    else:
        raise ValueError(f"unknown method {method}")
    verify_witness(X, 2, d)
    if d > beta(n):
        raise InternalInvariantViolation(f"Δ₂({n}) witness exceeds β_n")
    return SearchReport(n, "Delta2", d, method, G, X, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# table verification


def _row(n):
    """All computations for one n; returns a plain dict (picklable)."""
    want2, want1 = TABLE[n]
    out = {"n": n, "expected_delta2": want2, "expected_delta1": list(want1) if isinstance(want1, tuple) else want1}
    checks = []

    f2 = delta2(n, FORMULA)
    out["delta2"] = f2.lower
    checks.append(("delta2_formula", f2.lower == want2))
    r1 = delta1(n, REGULAR)
    out["delta1_lower"], out["delta1_upper"] = r1.lower, r1.upper
    if isinstance(want1, tuple):
        checks.append(("delta1_bounds", (r1.upper == want1[1]) and want1[0] <= r1.lower <= want1[1]))
    else:
        checks.append(("delta1_regular", r1.exact and r1.lower == want1))
    if n <= pg.MAX_TRANSITIVE_DEGREE:
        full1, full2 = delta1(n, FULL), delta2(n, FULL)
        out["delta1_full"], out["delta2_full"] = full1.lower, full2.lower
        checks.append(("delta1_full", full1.lower == want1))
        checks.append(("delta2_full", full2.lower == want2))
    if n <= ORACLE_MAX:
        o1, o2 = delta1(n, ORACLE), delta2(n, ORACLE)
        out["delta1_oracle"], out["delta2_oracle"] = o1.lower, o2.lower
        checks.append(("delta1_oracle", o1.lower == want1))
        checks.append(("delta2_oracle", o2.lower == want2))
    out["checks"] = {name: ok for name, ok in checks}
    out["match"] = all(ok for _, ok in checks)
    out["exact"] = not isinstance(want1, tuple)
    return out


@dataclass
class TableReport:
    rows: list

    @property
    def ok(self):
        return all(r["match"] for r in self.rows)

    def as_dict(self):
        return {"ok": self.ok, "rows": self.rows}

    def text(self):
        head = f"{'n':>3}  {'Δ₂':>4}  {'Δ₁':>9}  {'table Δ₂':>8}  {'table Δ₁':>9}  match"
        lines = [head]
        for r in self.rows:
            d1 = str(r["delta1_lower"]) if r["delta1_lower"] == r["delta1_upper"] else f"[{r['delta1_lower']},{r['delta1_upper']}]"
            p1 = r["expected_delta1"]
            p1 = f"[{p1[0]},{p1[1]}]" if isinstance(p1, list) else str(p1)
            lines.append(f"{r['n']:>3}  {r['delta2']:>4}  {d1:>9}  {r['expected_delta2']:>8}  {p1:>9}  {'yes' if r['match'] else 'NO'}")
        return "\n".join(lines)


def table_ns(n_max):
    return [n for n in sorted(TABLE) if n <= n_max]


def verify_table(n_max: int = 16, jobs: int | None = None) -> TableReport:
    if n_max > pg.MAX_REGULAR_DEGREE:
        raise DegreeTooLarge(f"table verification supports n <= {pg.MAX_REGULAR_DEGREE}")
    ns = table_ns(n_max)
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(ns) <= 1:
        rows = [_row(n) for n in ns]
    else:
        # heaviest rows first; results collected by n so order never depends on scheduling
        order = sorted(ns, key=lambda n: (n > pg.MAX_TRANSITIVE_DEGREE, -n))
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = {n: ex.submit(_row, n) for n in order}
            rows = [futs[n].result() for n in ns]
    return TableReport(rows)


# ---------------------------------------------------------------------------
# random samples for property tests


def random_transitive_group(n: int, rng: random.Random, cap=100_000) -> pg.PermGroup:
    """A regular group of degree n, possibly enlarged by a random permutation."""
    regs = pg.enumerate_regular_groups(n)
    G = regs[rng.randrange(len(regs))]
    if n > 2 and rng.random() < 0.5:
        x = list(range(n))
        rng.shuffle(x)
        try:
            K = pg.close(list(G.generators) + [tuple(x)], n, cap=cap)
        except OrderCapExceeded:
            return G
        # a 2-transitive K colors K_n with a single color, whose full symmetric
        # automorphism group is too large to list for n >= 9
        if n < 9 or len(pg.pair_orbitals(K)) > 1:
            return K
    return G


def random_orbital_coloring(n: int, rng: random.Random) -> ColoredSpace:
    return orbital_coloring(random_transitive_group(n, rng))
