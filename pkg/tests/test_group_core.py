import random

import pytest

from faircount import (
    AbelianSpec,
    CapExceededError,
    CocycleGroup,
    CocyclePairing,
    CocycleSummand,
    GroupElement,
    ShapeError,
    abelian_as_cocycle_group,
    build_gn,
    build_mixed_example,
)

RNG = random.Random(20260811)


# -- construction ---------------------------------------------------------------


def test_gn_orders():
    assert build_gn(1).order == 81
    assert build_gn(2).order == 2187
    assert build_gn(1).exponent == 9


def test_mixed_orders():
    assert build_mixed_example(1).order == 24
    assert build_mixed_example(2).order == 288


def test_family_index_validation():
    with pytest.raises(ValueError):
        build_gn(0)
    with pytest.raises(ValueError):
        build_mixed_example(0)


def test_bad_pairing_rejected():
    # coefficient on an order-9 coordinate into a modulus-2 target wraps badly
    center = AbelianSpec((2,))
    base = AbelianSpec((9,))
    summand = CocycleSummand((1,), (1,), 0, 2)
    with pytest.raises(ShapeError):
        CocycleGroup(center, base, CocyclePairing((summand,)))


def test_modulus_must_match_target():
    center = AbelianSpec((3,))
    base = AbelianSpec((3,))
    with pytest.raises(ShapeError):
        CocycleGroup(center, base, CocyclePairing((CocycleSummand((1,), (1,), 0, 9),)))


# -- arithmetic -------------------------------------------------------------------


def test_mul_example():
    g = build_gn(1)
    x = g.element((0,), (1, 0))
    y = g.element((0,), (0, 1))
    assert g.mul(x, y) == GroupElement((1,), (1, 1))


def test_identity_laws():
    g = build_gn(1)
    for _ in range(50):
        x = g.random_element(RNG)
        assert g.mul(g.identity, x) == x
        assert g.mul(x, g.identity) == x


def test_inverse_example():
    g = build_gn(1)
    x = g.element((0,), (1, 0))
    assert g.inverse(x) == GroupElement((0,), (2, 0))
    assert g.inverse(g.identity) == g.identity
    for _ in range(100):
        y = g.random_element(RNG)
        assert g.mul(y, g.inverse(y)) == g.identity


def test_associativity_random():
    for group in (build_gn(1), build_gn(2), build_mixed_example(2)):
        for _ in range(1000):
            x, y, z = (group.random_element(RNG) for _ in range(3))
            assert group.mul(group.mul(x, y), z) == group.mul(x, group.mul(y, z))


def test_shape_mismatch():
    g1, g2 = build_gn(1), build_gn(2)
    x = g1.element((0,), (1, 0))
    with pytest.raises(ShapeError):
        g2.mul(x, x)


def test_power_consistency():
    g = build_gn(2)
    for _ in range(100):
        x = g.random_element(RNG)
        k = RNG.randrange(0, 20)
        assert g.mul(g.power(x, k), x) == g.power(x, k + 1)
        m = g.element_order(x)
        assert g.power(x, m) == g.identity


# -- orders ------------------------------------------------------------------------


def test_order_examples():
    g = build_gn(1)
    assert g.element_order(g.identity) == 1
    assert g.element_order(g.element((1,), (0, 0))) == 3
    assert g.element_order(g.element((0,), (1, 3))) == 3


def test_order_equals_base_order_when_base_nonzero():
    for n in (1, 2):
        group = build_gn(n)
        for g in group.elements():
            if any(g.a):
                assert group.element_order(g) == group.base.element_order(g.a)


def test_mixed_has_order_four_elements():
    # the pairing twists squares: elements over a base vector with both the
    # leading coordinate and a paired coordinate set have order 4
    m = build_mixed_example(1)
    g = m.element((0,), (1, 1, 0))
    assert m.element_order(g) == 4
    assert m.exponent == 12


# -- enumeration ---------------------------------------------------------------------


def test_enumeration_counts():
    g1 = build_gn(1)
    elems = list(g1.elements())
    assert len(elems) == 81
    assert len(set(elems)) == 81
    assert elems[0] == g1.identity
    assert len(list(build_gn(2).elements())) == 2187


def test_enumeration_cap():
    g = build_gn(1)
    with pytest.raises(CapExceededError):
        list(g.elements(cap=10))


def test_leading_coordinate_counts():
    for n in (1, 2):
        group = build_gn(n)
        nonzero = sum(1 for g in group.elements() if g.a[0] != 0)
        assert nonzero == 2 * 27**n
        assert group.order - nonzero == 27**n


# -- generation and subgroups -----------------------------------------------------------


def test_generates_abelianization():
    g = build_gn(1)
    a = g.element((0,), (1, 0))
    b = g.element((0,), (0, 1))
    assert g.generates_abelianization([a, b])
    assert not g.generates_abelianization([g.element((0,), (0, 3))])
    for x in list(g.elements())[:20]:
        assert not g.generates_abelianization([x])  # base group is not cyclic


def test_commutator_subgroup_is_center():
    for group in (build_gn(1), build_gn(2), build_mixed_example(1)):
        center_set = frozenset(
            GroupElement(c, group.base.zero) for c in group.center.elements()
        )
        assert group.commutator_elements() == center_set


def test_abelianization_invariants():
    assert build_gn(1).abelianization_invariants() == (3, 9)
    assert build_gn(2).abelianization_invariants() == (3, 9, 9)
    assert abelian_as_cocycle_group([3]).abelianization_invariants() == (3,)
    assert build_mixed_example(1).abelianization_invariants() == (2, 6)


def test_centrality():
    group = build_gn(2)
    for c in group.center.elements():
        z = GroupElement(c, group.base.zero)
        for _ in range(10):
            x = group.random_element(RNG)
            assert group.mul(z, x) == group.mul(x, z)


# -- Sylow components ------------------------------------------------------------------


def test_mixed_sylow_split():
    m = build_mixed_example(2)
    assert m.primes() == [2, 3]
    comp2 = m.sylow_component(2)
    comp3 = m.sylow_component(3)
    assert comp2.order * comp3.order == m.order
    assert comp3.order == 9
    for _ in range(50):
        x, y = comp3.random_element(RNG), comp3.random_element(RNG)
        assert comp3.mul(x, y) == comp3.mul(y, x)
    # the 2-part keeps the twist
    assert comp2.commutator_elements() != frozenset({comp2.identity})


def test_component_projection_roundtrip():
    m = build_mixed_example(1)
    c_idx, a_idx = m.component_coordinates(3)
    for _ in range(20):
        x = m.random_element(RNG)
        p = m.project_to_coordinates(x, c_idx, a_idx)
        back = m.embed_from_coordinates(p, c_idx, a_idx)
        assert m.project_to_coordinates(back, c_idx, a_idx) == p


# -- serialization ------------------------------------------------------------------------


def test_descriptor_roundtrip():
    for group in (build_gn(2), build_mixed_example(1)):
        data = group.to_dict()
        clone = CocycleGroup.from_dict(data)
        assert clone.order == group.order
        assert clone.to_dict() == data
        x = group.random_element(RNG)
        y = group.random_element(RNG)
        assert clone.mul(x, y) == group.mul(x, y)


# -- abelian spec -------------------------------------------------------------------------


def test_invariant_factors():
    assert AbelianSpec((3, 9)).invariant_factors() == (3, 9)
    assert AbelianSpec((2, 2, 2, 3)).invariant_factors() == (2, 2, 6)
    assert AbelianSpec(()).invariant_factors() == ()


def test_subgroup_count_of_small_group():
    # Z/3 + Z/9 has exactly 10 subgroups
    assert len(AbelianSpec((3, 9)).subgroups()) == 10


def test_pairing_bilinearity_random():
    group = build_gn(2)
    A, C = group.base, group.center
    ev = lambda a, b: group.pairing.evaluate(a, b, C.orders)
    for _ in range(200):
        a = tuple(RNG.randrange(o) for o in A.orders)
        b = tuple(RNG.randrange(o) for o in A.orders)
        c = tuple(RNG.randrange(o) for o in A.orders)
        assert ev(A.add(a, b), c) == C.add(ev(a, c), ev(b, c))
        assert ev(a, A.add(b, c)) == C.add(ev(a, b), ev(a, c))
        assert ev(A.zero, a) == C.zero
        assert ev(a, A.zero) == C.zero
