import itertools

import pytest

from homlab import constructions as cons
from homlab.errors import NotPartialIsometry, OrderCapExceeded
from homlab.homogeneity import (
    analyze,
    automorphisms,
    count_extensions,
    evaluation_bijectivity,
    extend_partial,
    extension_operator,
    find_isometry,
    homogeneity_level,
    is_automorphism,
    is_isosceles_free,
    is_k_homogeneous,
    is_ultrahomogeneous,
    is_uniquely_k_homogeneous,
)
from homlab.permgroup import is_boolean
from homlab.space import discrete_space, relabel
from oracles import brute_aut, brute_isosceles_free, brute_k_homogeneous, brute_uniquely_k_homogeneous


def test_aut_examples():
    assert automorphisms(cons.cycle(4)).order == 8
    assert automorphisms(cons.binary_space(2)).order == 4
    assert automorphisms(cons.d_space(3)).order == 6


@pytest.mark.parametrize(
    "name", ["cycle4", "cycle6", "cycle7", "binary3", "discrete5", "b11", "d3", "d4", "e01", "tetra", "dbool2", "nonmonotone"]
)
def test_aut_matches_brute_force(spaces, name):
    X = spaces[name]
    assert sorted(automorphisms(X)) == brute_aut(X.colors)


def test_aut_cap():
    with pytest.raises(OrderCapExceeded):
        automorphisms(discrete_space(8), cap=1000)


def test_extend_partial_examples():
    C5 = cons.cycle(5)
    f = extend_partial(C5, [])
    assert f is not None and is_automorphism(C5, f)
    g = extend_partial(cons.cycle(4), [(0, 1)])
    assert g is not None and g[0] == 1 and is_automorphism(cons.cycle(4), g)
    assert extend_partial(cons.hexagon(1.1, 1.2, 1.3, 1.4, 1.5), [(1, 2)]) is None


def test_extend_partial_rejects_non_isometry():
    with pytest.raises(NotPartialIsometry):
        extend_partial(cons.cycle(5), [(0, 0), (1, 2)])
    with pytest.raises(NotPartialIsometry):
        extend_partial(cons.cycle(5), [(0, 1), (1, 1)])


def test_homogeneity_examples():
    for n in range(1, 9):
        C = cons.cycle(n)
        assert homogeneity_level(C, n) == n
    for m in range(0, 4):
        assert is_uniquely_k_homogeneous(cons.binary_space(m), 2)
    D4 = discrete_space(4)
    assert is_k_homogeneous(D4, 1) and not is_uniquely_k_homogeneous(D4, 1)


@pytest.mark.parametrize(
    "name", ["cycle5", "cycle6", "discrete4", "binary2", "b11", "d3", "d2", "e01", "tetra", "dbool1", "binary3"]
)
def test_homogeneity_matches_brute_force(spaces, name):
    X = spaces[name]
    for k in (1, 2, 3):
        if X.n > 6 and k == 3:
            continue
        assert is_k_homogeneous(X, k) == brute_k_homogeneous(X.colors, k)
        assert is_uniquely_k_homogeneous(X, k) == brute_uniquely_k_homogeneous(X.colors, k)


def test_hexagon_not_homogeneous_brute():
    H = cons.hexagon(1.1, 1.2, 1.3, 1.4, 1.5)
    assert not is_k_homogeneous(H, 1)
    assert not brute_k_homogeneous(H.colors, 1)


def test_ultrahomogeneous_examples():
    assert is_ultrahomogeneous(cons.b_space(1, 1))
    assert is_ultrahomogeneous(cons.b_space(1, 1), shortcut=False)
    assert not is_ultrahomogeneous(cons.d_space(3))
    assert is_ultrahomogeneous(discrete_space(1))
    assert is_ultrahomogeneous(cons.cycle(7))


def test_d3_two_point_isometry_without_extension():
    D3 = cons.d_space(3)
    found = None
    for a, b in itertools.permutations(range(6), 2):
        for c, d in itertools.permutations(range(6), 2):
            if D3.colors[a, b] == D3.colors[c, d] and extend_partial(D3, [(a, c), (b, d)]) is None:
                found = (a, b, c, d)
                break
        if found:
            break
    assert found is not None


def test_evaluation_examples():
    H = cons.hexagon(1.1, 1.2, 1.3, 1.4, 1.5)
    for a in range(6):
        f = evaluation_bijectivity(H, a)
        assert f.distance_injective and f.distance_surjective
        assert not f.evaluation_surjective
    X = cons.binary_space(3)
    for a in range(8):
        assert all(evaluation_bijectivity(X, a).as_dict().values())
    assert not evaluation_bijectivity(discrete_space(3), 0).distance_injective


def test_evaluation_surjective_iff_homogeneous(spaces):
    for X in list(spaces.values()) + [cons.hexagon(1.1, 1.2, 1.3, 1.4, 1.5)]:
        if X.n == 0:
            continue
        surj = all(evaluation_bijectivity(X, a).evaluation_surjective for a in range(X.n))
        assert surj == is_k_homogeneous(X, 1)


def test_extension_operator_identity():
    X2 = cons.binary_space(2)
    e = extension_operator(X2, X2, list(range(4)))
    assert all(f == F for f, F in e.items())


def test_extension_operator_embeds():
    X1, X2 = cons.binary_space(1), cons.binary_space(2)
    e = extension_operator(X1, X2, [0, 1])
    assert len(e) == 2 and len(set(e.values())) == 2
    assert automorphisms(X2).order == 4


def test_extension_operator_functor_law():
    X1, X2, X3 = (cons.binary_space(m) for m in (1, 2, 3))
    i = [0, 1]
    j = [0, 1, 2, 3]
    ji = [j[x] for x in i]
    i_s = extension_operator(X1, X2, i)
    j_s = extension_operator(X2, X3, j)
    ji_s = extension_operator(X1, X3, ji)
    for f in i_s:
        assert ji_s[f] == j_s[i_s[f]]


def test_analyze_d3():
    r = analyze(cons.d_space(3), ks=(1, 2))
    assert r.is_k_homogeneous == {1: True, 2: False}
    assert r.aut_order == 6


def test_isosceles_free_predicate(spaces):
    for X in spaces.values():
        assert is_isosceles_free(X) == brute_isosceles_free(X.colors)
    assert is_isosceles_free(cons.hexagon(1.1, 1.2, 1.3, 1.4, 1.5))
    assert not is_isosceles_free(cons.cycle(4))


def test_find_isometry():
    X = cons.d_space(3)
    Y = relabel(X, (3, 4, 5, 0, 2, 1))
    f = find_isometry(X, Y)
    assert f is not None
    assert find_isometry(X, cons.b_space(1, 1)) is None


def test_isofree_extension_counts_at_most_one(spaces):
    for X in spaces.values():
        if not is_isosceles_free(X):
            continue
        assert is_boolean(automorphisms(X))
        for a in range(X.n):
            for b in range(X.n):
                assert count_extensions(X, [(a, b)]) <= 1


def test_product_law():
    X = cons.scale(cons.cycle(3), 10)
    Y = cons.cycle(4)
    P = cons.l1_product(X, Y)
    assert automorphisms(P).order == automorphisms(X).order * automorphisms(Y).order


def test_isofree_homog_shortcut_agrees(spaces):
    for X in spaces.values():
        if is_isosceles_free(X) and is_k_homogeneous(X, 1):
            assert is_ultrahomogeneous(X, shortcut=False)
            assert (X.n & (X.n - 1)) == 0


def test_unique_implies_homogeneous(spaces):
    for X in spaces.values():
        for k in (1, 2):
            if is_uniquely_k_homogeneous(X, k):
                assert is_k_homogeneous(X, k)
        if X.n <= 12 and is_ultrahomogeneous(X, shortcut=False):
            assert all(is_k_homogeneous(X, k) for k in range(1, X.n + 1))


def test_subspace_of_component_inherits_homogeneity():
    from homlab.structure import isosceles_generated_components

    D = cons.d_space(5)
    for block in isosceles_generated_components(D).blocks:
        assert is_k_homogeneous(D.subspace(block), 1)
