import random

import pytest

from faircount import CapExceededError, SieveLimitError, build_gn
from faircount.arith_count import (
    ResidueClassFunctionSpec,
    _FamilyData,
    count_bad_tuples,
    enumerate_bad_tuples,
    epi_count,
    epi_count_direct,
    epi_count_moebius,
    f_spec_for_gn,
    hom_count,
    n1_sum,
    n2_sum,
    sieve,
    sum_multiplicative,
    sum_multiplicative_oracle,
    tuple_dump_line,
)

RNG = random.Random(0xABC)


# -- sieve -------------------------------------------------------------------


def test_sieve_small_classes():
    t = sieve(30, 9)
    classes = {}
    for p, r in zip(t.primes, t.residues):
        classes.setdefault(int(r), []).append(int(p))
    assert classes[1] == [19]
    assert classes[4] == [13]
    assert classes[7] == [7]


def test_sieve_edge_and_count():
    assert sieve(2, 9).primes.tolist() == [2]
    assert sieve(10**6, 9).count() == 78498


def test_sieve_vs_trial_division():
    def is_prime(m):
        if m < 2:
            return False
        d = 2
        while d * d <= m:
            if m % d == 0:
                return False
            d += 1
        return True

    t = sieve(3000, 9)
    assert t.primes.tolist() == [m for m in range(2, 3001) if is_prime(m)]


def test_sieve_limits():
    with pytest.raises(ValueError):
        sieve(1, 9)
    with pytest.raises(SieveLimitError):
        sieve(10**9, 9, memory_cap=10**8)


# -- the prime weights -----------------------------------------------------------


def test_f_spec_values():
    f1 = f_spec_for_gn(1)
    assert f1.value_at(7) == 8
    assert f1.value_at(19) == 26
    assert f1.value_at(5) == 0
    assert f1.value_at(3) == 0
    f2 = f_spec_for_gn(2)
    assert f2.value_at(19) == 728
    assert f2.value_at(13) == 80


# -- multiplicative sums -----------------------------------------------------------


def test_sum_multiplicative_basics():
    f1 = f_spec_for_gn(1)
    assert sum_multiplicative(f1, 1) == 1
    assert sum_multiplicative(f1, 30) == 43
    assert sum_multiplicative_oracle(f1, 30) == 43
    empty = ResidueClassFunctionSpec(9, {})
    assert sum_multiplicative(empty, 10**4) == 1


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("X", [10**3, 10**4])
def test_sum_against_oracle(n, X):
    spec = f_spec_for_gn(n)
    assert sum_multiplicative(spec, X) == sum_multiplicative_oracle(spec, X)


def test_sum_requires_covering_sieve():
    f1 = f_spec_for_gn(1)
    small = sieve(10, 9)
    with pytest.raises(SieveLimitError):
        sum_multiplicative(f1, 100, small)


def test_oracle_cap():
    with pytest.raises(CapExceededError):
        sum_multiplicative_oracle(f_spec_for_gn(1), 10**7)


# -- tuple counting -----------------------------------------------------------------


def test_hom_count_values():
    assert hom_count(1, 2) == 0
    assert hom_count(1, 3) == 54
    assert hom_count(1, 90) == 2322


def test_enumerate_matches_hom_count():
    assert len(list(enumerate_bad_tuples(1, 2))) == 0
    assert len(list(enumerate_bad_tuples(1, 3))) == 54
    tuples = list(enumerate_bad_tuples(1, 90))
    assert len(tuples) == 2322
    assert count_bad_tuples(1, 90) == 2322
    assert count_bad_tuples(1, 3000) == hom_count(1, 3000) == len(
        list(enumerate_bad_tuples(1, 3000))
    )


def test_tuples_are_valid_and_distinct():
    group = build_gn(1)
    tuples = list(enumerate_bad_tuples(1, 90))
    lines = [tuple_dump_line(group, t) for t in tuples]
    assert len(set(lines)) == len(lines)
    for t in tuples:
        t.validate(group)
        assert t.conductor() <= 90
        assert t.conductor() % 3 == 0
        assert t.v(t.leading_element()) == 3


def test_tuple_stream_determinism():
    first = [tuple_dump_line(build_gn(1), t) for t in enumerate_bad_tuples(1, 300)]
    second = [tuple_dump_line(build_gn(1), t) for t in enumerate_bad_tuples(1, 300)]
    assert first == second


def test_tuple_cap():
    with pytest.raises(CapExceededError):
        list(enumerate_bad_tuples(1, 10**6, cap=10**4))


# -- surjective tuples ----------------------------------------------------------------


def test_epi_small_values():
    assert epi_count(1, 3) == 0
    assert epi_count(1, 2) == 0


def test_epi_three_routes():
    group = build_gn(1)
    for X in (90, 600):
        direct = epi_count_direct(1, X)
        moebius = epi_count_moebius(1, X)
        filtered = sum(
            1
            for t in enumerate_bad_tuples(1, X)
            if group.generates_abelianization(t.support())
        )
        assert direct == moebius == filtered


def test_epi_at_most_hom():
    for X in (3, 90, 10**3, 10**4):
        e = epi_count(1, X)
        h = hom_count(1, X)
        assert e <= h
        if X >= 3:
            assert e < h  # single-support tuples never generate a non-cyclic base


def test_epi_moebius_matches_direct_at_scale():
    assert epi_count_moebius(1, 10**4) == epi_count_direct(1, 10**4)


# -- the dissection sums ------------------------------------------------------------


def test_n2_boundary_cases():
    fam = _FamilyData.get(1)
    assert n2_sum(1, fam.tn, 90) == 54
    assert n2_sum(1, fam.tn, 3) == 54
    assert n2_sum(1, [], 90) == hom_count(1, 90)
    assert n2_sum(1, [], 2) == 0


def test_n2_monotone():
    fam = _FamilyData.get(1)
    X = 300
    for _ in range(20):
        k = RNG.randrange(0, len(fam.tn))
        S = RNG.sample(fam.tn, k)
        rest = [g for g in fam.tn if g not in S]
        S2 = S + rest[: RNG.randrange(0, len(rest) + 1)]
        assert n2_sum(1, S2, X) <= n2_sum(1, S, X)


def test_n1_alternating_identity():
    fam = _FamilyData.get(1)
    X = 90
    for k in (23, 24, 25, 26):
        for _ in range(3):
            S = RNG.sample(fam.tn, k)
            sset = set(S)
            direct = 0
            for t in enumerate_bad_tuples(1, X):
                if {g for g in fam.tn if t.v(g) == 1} == sset:
                    direct += 1
            assert n1_sum(1, S, X) == direct


def test_n1_partition():
    fam = _FamilyData.get(1)
    X = 300
    seen = set()
    for t in enumerate_bad_tuples(1, X):
        seen.add(frozenset(g for g in fam.tn if t.v(g) == 1))
    total = sum(n1_sum(1, list(ones), X) for ones in seen)
    assert total == hom_count(1, X)


def test_n1_infeasible_is_zero():
    fam = _FamilyData.get(1)
    # leaving every element unfrozen requires 26 distinct primes: impossible at X=90
    assert n1_sum(1, [], 90) == 0


def test_n_sums_reject_foreign_elements():
    group = build_gn(1)
    bad = group.element((0,), (1, 0))  # leading coordinate nonzero: not in T_n
    with pytest.raises(ValueError):
        n2_sum(1, [bad], 90)
