"""Brute-force reference implementations used only by the tests.

Everything here enumerates the whole search space directly, so it is slow but
shares no code with the package beyond reading the color matrix.
"""
import itertools

import numpy as np


def all_perms(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def brute_aut(colors):
    """Sorted list of all color preserving permutations."""
    c = np.asarray(colors)
    n = c.shape[0]
    P = all_perms(n)
    ok = (c[P[:, :, None], P[:, None, :]] == c[None]).all(axis=(1, 2))
    return sorted(tuple(int(x) for x in p) for p in P[ok])


def brute_extension_counts(colors, k):
    """Counts of automorphisms extending each partial isometry of size <= k."""
    c = np.asarray(colors)
    n = c.shape[0]
    aut = brute_aut(c)
    out = []
    for j in range(1, k + 1):
        for a in itertools.permutations(range(n), j):
            for b in itertools.permutations(range(n), j):
                if all(c[a[s], a[t]] == c[b[s], b[t]] for s in range(j) for t in range(j)):
                    out.append(sum(all(f[a[s]] == b[s] for s in range(j)) for f in aut))
    return out


def brute_k_homogeneous(colors, k):
    return all(cnt >= 1 for cnt in brute_extension_counts(colors, k))


def brute_uniquely_k_homogeneous(colors, k):
    return all(cnt == 1 for cnt in brute_extension_counts(colors, k))


def brute_isosceles_free(colors):
    c = np.asarray(colors)
    return all(len(set(row.tolist())) == len(row) for row in c)


def first_occurrence(seq):
    names = {}
    return tuple(names.setdefault(v, len(names)) for v in seq)


def brute_canonical(colors):
    """Min over point orders of the first-occurrence recolored matrix, with
    color 0 kept on the diagonal."""
    c = np.asarray(colors)
    n = c.shape[0]
    best = None
    for p in itertools.permutations(range(n)):
        flat = c[np.ix_(p, p)].ravel().tolist()
        key = first_occurrence([0] + flat)
        if best is None or key < best:
            best = key
    return best


def brute_point_orbits(perms, n):
    seen, out = set(), []
    for x in range(n):
        if x in seen:
            continue
        orb = {p[x] for p in perms}
        seen |= orb
        out.append(sorted(orb))
    return out


def brute_pair_orbitals(perms, n):
    seen, out = set(), []
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) in seen:
            continue
        orb = {tuple(sorted((p[i], p[j]))) for p in perms}
        seen |= orb
        out.append(sorted(orb))
    return sorted(out)


def compose(p, q):
    return tuple(p[i] for i in q)


def brute_close(gens, n):
    ident = tuple(range(n))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(elems)


def brute_subgroups(n):
    """Every subgroup of S_n generated by at most two elements (all of them
    for n <= 5)."""
    perms = list(itertools.permutations(range(n)))
    out = set()
    for a in perms:
        for b in perms:
            out.add(brute_close([a, b], n))
    return out


def conjugacy_classes_of(groups, n):
    perms = list(itertools.permutations(range(n)))
    inv = {p: tuple(sorted(range(n), key=lambda i: p[i])) for p in perms}
    reps = []
    seen = set()
    for H in sorted(groups, key=lambda G: (len(G), sorted(G))):
        if H in seen:
            continue
        reps.append(H)
        for s in perms:
            seen.add(frozenset(compose(compose(s, h), inv[s]) for h in H))
    return reps


def brute_transitive_classes(n):
    subs = [H for H in brute_subgroups(n) if len({h[0] for h in H}) == n]
    return conjugacy_classes_of(subs, n)


def cayley_tables(n):
    """All group tables on {0..n-1} with identity 0 (Latin squares that are
    associative), by row-by-row backtracking."""
    tables = []
    T = [[None] * n for _ in range(n)]
    for i in range(n):
        T[0][i] = i
        T[i][0] = i
    cells = [(i, j) for i in range(1, n) for j in range(1, n)]

    def ok_latin(i, j, v):
        return all(T[i][jj] != v for jj in range(n) if jj != j) and all(T[ii][j] != v for ii in range(n) if ii != i)

    def assoc():
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if T[T[a][b]][c] != T[a][T[b][c]]:
                        return False
        return True

    def rec(idx):
        if idx == len(cells):
            if assoc():
                tables.append([row[:] for row in T])
            return
        i, j = cells[idx]
        for v in range(n):
            if ok_latin(i, j, v):
                T[i][j] = v
                rec(idx + 1)
                T[i][j] = None

    rec(0)
    return tables


def isomorphism_types(tables):
    n = len(tables[0])
    reps = []
    for T in tables:
        found = False
        for R in reps:
            for p in itertools.permutations(range(1, n)):
                f = (0,) + p
                if all(f[T[a][b]] == R[f[a]][f[b]] for a in range(n) for b in range(n)):
                    found = True
                    break
            if found:
                break
        if not found:
            reps.append(T)
    return reps


def max_delta_by_partitions(n, k):
    """Δ_k(n) by listing every coloring of K_n directly (no canonical labels,
    no row filter) for tiny n."""
    edges = list(itertools.combinations(range(n), 2))
    best = 1 if n == 1 else 0
    for labels in itertools.product(range(len(edges)), repeat=len(edges)):
        # first-occurrence labelings only
        if first_occurrence(labels) != labels:
            continue
        c = np.zeros((n, n), dtype=np.int64)
        for (i, j), v in zip(edges, labels):
            c[i, j] = c[j, i] = v + 1
        if brute_k_homogeneous(c, k):
            best = max(best, len(set(labels)) + 1)
    return best
