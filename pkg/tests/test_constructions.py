import numpy as np
import pytest

from homlab import constructions as cons
from homlab.errors import (
    DegreeTooLarge,
    DistancesNotDistinct,
    DoesNotInvert,
    NoPalette,
    NormNotInjective,
    NotATriangle,
    NotAutomorphism,
    NotInvolution,
    NotUniquelyTransitive,
    PreconditionFailed,
    RMeetsDistances,
    RNotInjective,
    SumNotInjective,
)
from homlab.homogeneity import (
    automorphisms,
    homogeneity_level,
    is_isosceles_free,
    is_k_homogeneous,
    is_ultrahomogeneous,
)
from homlab.permgroup import close, group_from_elements, is_boolean
from homlab.search import beta
from homlab.space import canonical_form, discrete_space, new_space
from homlab.structure import NormTable, isometric_exact, isosceles_generated_components
from conftest import NONMONOTONE_NORM


def alpha(n2):
    """2^m (3k + 2) for 2n = 2^(m+1) (2k+1)."""
    n = n2 // 2
    m = (n & -n).bit_length() - 1
    k = ((n >> m) - 1) // 2
    return (1 << m) * (3 * k + 2)


def test_cycle():
    assert cons.cycle(4).delta == 3
    assert cons.cycle(1).n == 1
    C7 = cons.cycle(7)
    assert C7.delta == 4 and is_ultrahomogeneous(C7, shortcut=False)


def test_scale():
    assert cons.scale(cons.cycle(3), 2).palette == (0.0, 2.0)
    C = cons.cycle(6)
    assert cons.scale(C, 1) == C
    assert cons.scale(cons.cycle(5), 4).palette == (0.0, 4.0, 8.0)
    with pytest.raises(NoPalette):
        cons.scale(new_space([[0, 1], [1, 0]]), 2)


def test_l1_product():
    P = cons.l1_product(cons.scale(cons.cycle(3), 2), cons.binary_space(1))
    assert P.n == 6 and P.delta == 4
    X = cons.cycle(5)
    one = cons.l1_product(X, new_space([[0]], [0]))
    assert isometric_exact(one, X)
    with pytest.raises(SumNotInjective):
        cons.l1_product(cons.cycle(3), cons.cycle(3))


def test_binary_space():
    X = cons.binary_space(2)
    assert X.palette == (0.0, 1.0, 2.0, 3.0)
    assert cons.binary_space(0).n == 1
    X3 = cons.binary_space(3)
    assert X3.delta == 8 and is_ultrahomogeneous(X3, shortcut=False)
    with pytest.raises(DegreeTooLarge):
        cons.binary_space(11)


def test_boolean_space():
    assert isometric_exact(cons.boolean_space(NormTable(2, (0, 1, 2, 3))), cons.binary_space(2))
    T = cons.boolean_space(NormTable(2, (0, 1.0, 1.1, 1.2)))
    assert isometric_exact(T, cons.tetrahedron(1.0, 1.1, 1.2))
    Z = cons.boolean_space(NormTable(3, NONMONOTONE_NORM))
    assert Z.n == 8 and is_isosceles_free(Z) and is_k_homogeneous(Z, 1)
    with pytest.raises(NormNotInjective):
        cons.boolean_space(NormTable(2, (0, 1, 1, 2)))


def test_b_space():
    B = cons.b_space(1, 1)
    assert B.n == 6 and B.delta == 4
    for k in range(4):
        assert isometric_exact(cons.b_space(0, k), cons.cycle(2 * k + 1))
    B2 = cons.b_space(2, 1)
    assert B2.n == 12 and B2.delta == 8
    with pytest.raises(DegreeTooLarge):
        cons.b_space(3, 4)


def test_default_r():
    X = cons.cycle(3)
    H = cons.rotation_group(3)
    assert np.allclose(cons.default_r(X, H), [2, 2 + 1 / 3, 2 + 2 / 3])
    assert cons.default_r(X, group_from_elements(3, [(0, 1, 2)])) == (2.0,)
    r5 = cons.default_r(cons.cycle(5), cons.rotation_group(5))
    assert len(r5) == 5 and min(r5) == 3.0 and np.isclose(max(r5), 3.8)


def test_rainbow_single_point():
    X = new_space([[0]], [0])
    H = group_from_elements(1, [(0,)])
    Y = cons.rainbow_duplicate(X, cons.RainbowParams(H, (0,), (1.0,)))
    assert Y.n == 2


def test_rainbow_param_errors():
    X = cons.cycle(4)
    H = cons.rotation_group(4)
    good = cons.default_r(X, H)
    g = cons.reflection(4)
    with pytest.raises(NotInvolution):
        cons.rainbow_duplicate(X, cons.RainbowParams(H, (1, 2, 3, 0), good))
    with pytest.raises(DoesNotInvert):
        cons.rainbow_duplicate(X, cons.RainbowParams(H, (0, 1, 2, 3), good))
    with pytest.raises(RNotInjective):
        cons.rainbow_duplicate(X, cons.RainbowParams(H, g, (3, 3, 3.5, 3.7)))
    with pytest.raises(RMeetsDistances):
        cons.rainbow_duplicate(X, cons.RainbowParams(H, g, (2, 3, 3.5, 3.7)))
    V = group_from_elements(4, [(0, 1, 2, 3), (1, 0, 3, 2)])
    with pytest.raises(NotUniquelyTransitive):
        cons.rainbow_duplicate(X, cons.RainbowParams(V, g, good[:2]))
    # the 4-cycle 0 -> 1 -> 3 -> 2 does not preserve C_4
    K = close([(1, 3, 0, 2)])
    with pytest.raises(NotAutomorphism):
        cons.rainbow_duplicate(X, cons.RainbowParams(K, g, good))


def test_d_space():
    D3 = cons.d_space(3)
    assert D3.n == 6 and D3.delta == 5
    D5 = cons.d_space(5)
    assert D5.n == 10 and D5.delta == 8
    assert cons.d_space(1).n == 2


@pytest.mark.parametrize("n", range(1, 11))
def test_d_space_quantities(n):
    D = cons.d_space(n)
    assert D.delta == n // 2 + 1 + n
    assert automorphisms(D).order == 2 * n
    assert is_k_homogeneous(D, 1)


def test_d_space_beats_beta():
    for n in range(1, 13):
        if n & (n - 1):
            assert cons.d_space(n).delta > beta(2 * n)


def test_alpha_dominates_d():
    for m, k in [(0, 1), (1, 1), (0, 2), (2, 1), (1, 2), (0, 3), (3, 0), (2, 0)]:
        E = cons.e_space(m, k)
        n = E.n // 2
        assert E.delta == alpha(E.n)
        D = cons.d_space(n)
        assert alpha(E.n) >= D.delta
        if m >= 2:
            assert alpha(E.n) > D.delta


def test_e_space():
    E = cons.e_space(1, 1)
    assert E.n == 12 and E.delta == 10
    E0 = cons.e_space(0, 1)
    assert E0.n == 6 and E0.delta == 5
    E2 = cons.e_space(1, 2)
    assert E2.n == 20 and E2.delta == 16


def test_discrete_boolean_duplicate():
    Y = cons.discrete_boolean_duplicate(2)
    assert Y.n == 8 and is_boolean(automorphisms(Y)) and not is_isosceles_free(Y)
    assert cons.discrete_boolean_duplicate(0).n == 2
    Y3 = cons.discrete_boolean_duplicate(3)
    assert Y3.n == 16 and automorphisms(Y3).order == 16
    with pytest.raises(DegreeTooLarge):
        cons.discrete_boolean_duplicate(5)


def test_factorization_examples():
    f = cons.rainbow_factorization(cons.d_space(3))
    assert canonical_form(f.base) == canonical_form(cons.cycle(3))
    assert cons.rainbow_factorization(cons.binary_space(2)) is None
    g = cons.rainbow_factorization(cons.e_space(1, 1))
    assert isometric_exact(g.base, cons.b_space(1, 1))


@pytest.mark.parametrize("n", range(1, 9))
def test_factorization_round_trip_d(n):
    Y = cons.d_space(n)
    if n == 2:
        # D_2 is isosceles-free on 4 points, so its blocks are singletons
        assert cons.rainbow_factorization(Y) is None
        assert len(isosceles_generated_components(Y).blocks) == 4
        return
    X, params = cons.rainbow_factorization(Y)
    assert isometric_exact(cons.rainbow_duplicate(X, params), Y)


@pytest.mark.parametrize("m, k", [(0, 1), (1, 1), (0, 2), (0, 3), (3, 0)])
def test_factorization_round_trip_e(m, k):
    Y = cons.e_space(m, k)
    f = cons.rainbow_factorization(Y)
    if f is None:
        assert (Y.n & (Y.n - 1)) == 0
        return
    X, params = f
    assert isometric_exact(cons.rainbow_duplicate(X, params), Y)


def test_hexagon():
    H = cons.hexagon(1.1, 1.2, 1.3, 1.4, 1.5)
    assert H.delta == 6 and is_isosceles_free(H) and homogeneity_level(H, 1) == 0
    with pytest.raises(DistancesNotDistinct):
        cons.hexagon(1.1, 1.1, 1.3, 1.4, 1.5)
    with pytest.raises(PreconditionFailed):
        cons.hexagon(1.1, 1.2, 1.3, 1.4, 2.5)


def test_tetrahedron():
    T = cons.tetrahedron(1.0, 1.1, 1.2)
    assert T.delta == 4 and is_ultrahomogeneous(T, shortcut=False)
    with pytest.raises(DistancesNotDistinct):
        cons.tetrahedron(1, 1, 1)
    with pytest.raises(NotATriangle):
        cons.tetrahedron(1, 2, 4)


def test_tetrahedron_degenerate_accepted(caplog):
    T = cons.tetrahedron(1, 2, 3)
    assert is_isosceles_free(T)
    assert "degenerate" in caplog.text


def test_wap_two_points():
    B = new_space([[0, 1], [1, 0]], [0, 1])
    g = cons.wap_gadget(B)
    assert (g.r0, g.eps, g.r1) == (2.0, 0.5, 1.5)
    assert g.obstruction["d_Y(p1,y)"] == 1.5
    assert g.obstruction["forced_isosceles"]
    assert is_isosceles_free(g.X) and is_isosceles_free(g.Y)


def test_wap_on_tetrahedron():
    T = cons.tetrahedron(1.0, 1.1, 1.2)
    for p0 in range(4):
        for p1 in range(4):
            if p0 != p1:
                g = cons.wap_gadget(T, p0, p1)
                assert is_isosceles_free(g.X) and is_isosceles_free(g.Y)
                assert g.obstruction["forced_isosceles"]


def test_wap_preconditions():
    with pytest.raises(PreconditionFailed):
        cons.wap_gadget(cons.cycle(4))
    with pytest.raises(PreconditionFailed):
        cons.wap_gadget(cons.binary_space(1), 0, 0)


def test_constructor_property_flags(spaces):
    for name, X in spaces.items():
        assert is_k_homogeneous(X, 1), name
    assert is_boolean(automorphisms(discrete_space(2)))
