"""Finite groups given by multiplication tables, used to list regular actions.

Every group of order below 60 is solvable, so it has a normal subgroup of prime
index and arises as a cyclic extension of a smaller group. groups_of_order
builds all cyclic extensions of the groups one prime step down and keeps one
table per isomorphism type.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import DegreeTooLarge, InternalInvariantViolation

MAX_TABLE_ORDER = 59


class TableGroup:
    """Group on {0..m-1} with identity 0 and table[a, b] = a*b."""

    def __init__(self, table):
        table = np.asarray(table, dtype=np.int64)
        table.flags.writeable = False
        self.table = table
        m = table.shape[0]
        self.inv = np.argmax(table == 0, axis=1)
        self._orders = None
        self._gens = None
        self._words = None

    @property
    def order(self):
        return self.table.shape[0]

    def mul(self, a, b):
        return int(self.table[a, b])

    @property
    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            m = self.order
            out = np.zeros(m, dtype=np.int64)
            cur = np.arange(m)
            for k in range(1, m + 1):
                hit = (out == 0) & (cur == 0)
                out[hit] = k
                cur = self.table[cur, np.arange(m)]
            self._orders = out
        return self._orders

    def generated(self, gens):
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    @property
    def generators(self):
        """Greedy generating set, preferring elements of large order."""
        if self._gens is None:
            gens = []
            have = {0}
            by_order = sorted(range(self.order), key=lambda e: (-int(self.element_orders[e]), e))
            for e in by_order:
                if e not in have:
                    gens.append(e)
                    have = self.generated(gens)
            self._gens = gens
        return self._gens

    def words(self):
        """Each element written as parent * generator, in BFS order."""
        if self._words is None:
            gens = self.generators
            parent = {0: None}
            order = [0]
            for x in order:
                for gi, g in enumerate(gens):
                    y = int(self.table[x, g])
                    if y not in parent:
                        parent[y] = (x, gi)
                        order.append(y)
            self._words = (order, parent)
        return self._words

    def is_abelian(self):
        return bool(np.array_equal(self.table, self.table.T))

    def invariant(self):
        t = self.table
        m = self.order
        orders = self.element_orders
        cent = (t == t.T).sum(axis=1)
        sq_orders = orders[t[np.arange(m), np.arange(m)]]
        per = sorted(zip(orders.tolist(), cent.tolist(), sq_orders.tolist()))
        return (m, tuple(per))


def is_associative(table) -> bool:
    t = np.asarray(table)
    m = t.shape[0]
    left = t[t[:, :, None], np.arange(m)[None, None, :]]  # (ab)c
    right = t[np.arange(m)[:, None, None], t[None, :, :]]  # a(bc)
    return bool(np.array_equal(left, right))


def _homomorphisms(G: TableGroup, H: TableGroup, bijective=True):
    """Yield element maps G -> H (as arrays) that are homomorphisms."""
    order, parent = G.words()
    gens = G.generators
    go = G.element_orders
    ho = H.element_orders
    choices = []
    for g in gens:
        if bijective:
            choices.append([h for h in range(H.order) if ho[h] == go[g]])
        else:
            choices.append([h for h in range(H.order) if go[g] % ho[h] == 0])
    tg, th = G.table, H.table
    for images in itertools.product(*choices):
        phi = np.zeros(G.order, dtype=np.int64)
        for x in order[1:]:
            p, gi = parent[x]
            phi[x] = th[phi[p], images[gi]]
        if bijective and len(set(phi.tolist())) != G.order:
            continue
        if np.array_equal(phi[tg], th[phi[:, None], phi[None, :]]):
            yield phi


def automorphism_group(G: TableGroup):
    return list(_homomorphisms(G, G))


def isomorphic(G: TableGroup, H: TableGroup) -> bool:
    if G.order != H.order or G.invariant() != H.invariant():
        return False
    return next(_homomorphisms(G, H), None) is not None


def cyclic_group(m: int) -> TableGroup:
    a = np.arange(m)
    return TableGroup((a[:, None] + a[None, :]) % m)


def cyclic_extensions(N: TableGroup, p: int):
    """All groups G with N normal of index p and G/N cyclic, built from an
    automorphism alpha of N and z in N with alpha(z) = z, alpha^p = conj by z."""
    m = N.order
    t = N.table
    inv = N.inv
    out = []
    ar = np.arange(m)
    for alpha in automorphism_group(N):
        powers = [ar]
        for _ in range(p):
            powers.append(alpha[powers[-1]])
        alpha_p = powers[p]
        for z in range(m):
            if alpha[z] != z:
                continue
            inn = t[t[z, ar], inv[z]]
            if not np.array_equal(alpha_p, inn):
                continue
            table = np.empty((m * p, m * p), dtype=np.int64)
            for i in range(p):
                for j in range(p):
                    # (a g^i)(b g^j) = a alpha^i(b) g^(i+j), with g^p = z
                    prod = t[ar[:, None], powers[i][None, :]]
                    k = i + j
                    if k >= p:
                        prod = t[prod, z]
                        k -= p
                    table[i * m:(i + 1) * m, j * m:(j + 1) * m] = prod + k * m
            out.append(TableGroup(table))
    return out


def _primes(n):
    return [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]


@lru_cache(maxsize=None)
def groups_of_order(n: int):
    """One multiplication table per isomorphism type of groups of order n."""
    if n < 1 or n > MAX_TABLE_ORDER:
        raise DegreeTooLarge(f"group tables supported for orders 1..{MAX_TABLE_ORDER}")
    if n == 1:
        return (TableGroup([[0]]),)
    found = []
    for p in _primes(n):
        for N in groups_of_order(n // p):
            for G in cyclic_extensions(N, p):
                if any(isomorphic(G, H) for H in found):
                    continue
                if not is_associative(G.table):
                    raise InternalInvariantViolation("cyclic extension is not associative")
                found.append(G)
    found.sort(key=lambda G: G.invariant())
    return tuple(found)
