"""Acceptance gate: every criterion at its stated tolerance, one line each.

Each test prints an `ACCEPTANCE <id> PASS/FAIL` line directly to the terminal
(bypassing capture) with the measured wall time, so a plain `pytest -v` run
shows the verdicts inline.
"""

import math
import sys
import time
from fractions import Fraction

import pytest

from faircount import (
    alpha_gn,
    build_gn,
    build_mixed_example,
    closed_form_b_gn,
    counterexample_report,
    fibered_b_burnside,
    fibered_b_orbit,
    gn_datum,
    mixed_datum,
    mixed_family_probe,
    naive_b_formula,
    naive_b_orbit,
    s_set_sizes_all,
    trivial_datum,
)
from faircount.analytic import (
    c0,
    local_factor_cross_check,
    log_gamma,
    mb_constant,
    mb_local_factor,
)
from faircount.arith_count import (
    _FamilyData,
    enumerate_bad_tuples,
    epi_count,
    epi_count_direct,
    f_spec_for_gn,
    hom_count,
    n1_sum,
    n2_sum,
    sieve,
    sum_multiplicative,
    sum_multiplicative_oracle,
)


def announce(name: str, ok: bool, elapsed: float, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    extra = f" {detail}" if detail else ""
    sys.__stdout__.write(f"ACCEPTANCE {name} {tag} ({elapsed:.1f}s){extra}\n")
    sys.__stdout__.flush()


class _Budget:
    def __init__(self, name: str, seconds: float, detail: str = ""):
        self.name = name
        self.seconds = seconds
        self.detail = detail

    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.monotonic() - self.t0
        ok = exc_type is None and elapsed < self.seconds
        announce(self.name, ok, elapsed, self.detail)
        if exc_type is None and elapsed >= self.seconds:
            raise AssertionError(
                f"{self.name} exceeded its {self.seconds}s budget: {elapsed:.1f}s"
            )
        return False


@pytest.fixture(scope="module")
def exponent_artifacts():
    values = {}
    for n in (1, 2, 3):
        group = build_gn(n)
        values[n] = {
            "orbit": naive_b_orbit(group),
            "formula": naive_b_formula(group),
            "closed": closed_form_b_gn(n),
            "alpha": alpha_gn(n),
        }
    return values


def test_criterion_1_exponent_identities(exponent_artifacts):
    with _Budget("C1-exponent-identities", 60):
        expected = {1: 9, 2: 108, 3: 1677}
        for n, want in expected.items():
            art = exponent_artifacts[n]
            assert art["orbit"] == art["formula"] == art["closed"] == want, (
                f"n={n}: {art}"
            )
        assert exponent_artifacts[1]["alpha"] == 7
        assert exponent_artifacts[2]["alpha"] == 148
        for n in range(1, 7):
            closed = Fraction(9**n - 1, 3) + Fraction(27**n - 1, 6)
            assert alpha_gn(n, literal_cap=3) == closed  # internal brute checks


def test_criterion_2_counterexample_verdict(exponent_artifacts):
    with _Budget("C2-counterexample-verdict", 1):
        for n, expected in ((1, False), (2, True), (3, True)):
            art = exponent_artifacts[n]
            verdict = art["alpha"] - 1 > art["closed"]
            assert verdict is expected, f"n={n}"
        assert exponent_artifacts[1]["alpha"] - 1 == 6 <= 9
        assert exponent_artifacts[2]["alpha"] - 1 == 147 > 108
        assert exponent_artifacts[3]["alpha"] - 1 == 3522 > 1677


def test_criterion_3_fibered_identities():
    with _Budget("C3-fibered-identities", 120):
        for n in (1, 2):
            group = build_gn(n)
            datum = gn_datum(n, group=group)
            fb = fibered_b_orbit(group, datum)
            assert fb == alpha_gn(n), f"n={n}: {fb}"
            assert fibered_b_burnside(group, datum) == fb
        both = {
            fibered_b_orbit(build_gn(1), gn_datum(1, identification=i))
            for i in (1, 2)
        }
        assert both == {7}
        # trivial-quotient reduction and the Burnside cross-check on all data
        for group in (
            build_gn(1),
            build_gn(2),
            build_mixed_example(1),
            build_mixed_example(2),
        ):
            datum = trivial_datum(group)
            fb = fibered_b_orbit(group, datum)
            assert fb == naive_b_orbit(group) + 1, group.name
            assert fibered_b_burnside(group, datum) == fb, group.name
        for n in (1, 2):
            group = build_mixed_example(n)
            datum = mixed_datum(n, group=group)
            assert fibered_b_orbit(group, datum) == fibered_b_burnside(group, datum)


def test_criterion_4_s_set_formulas():
    with _Budget("C4-s-set-formulas", 60):
        for n in (1, 2):
            group = build_gn(n)
            t9, t27 = 9**n, 27**n
            for g in group.elements():
                if g == group.identity:
                    continue
                sizes = s_set_sizes_all(group, g)
                if all(v == 0 for v in g.a):
                    assert sizes[1] == group.order, f"central at {g}"
                    assert sizes[2] == 0, f"central at {g}"
                    continue
                for alpha, size in sizes.items():
                    if alpha != 1:
                        assert size == 0, f"exponent {alpha} at {g}"
                if g.a[0] != 0:
                    assert sizes[1] == 3 * t9, f"leading case at {g}"
                elif any(v % 3 for v in g.a[1:]):
                    assert sizes[1] == t27, f"middle case at {g}"
                else:
                    assert sizes[1] == 3 * t27, f"shallow case at {g}"


def test_criterion_5_counting_identities():
    with _Budget("C5-counting-identities", 600):
        table = sieve(10**6, 9)
        for n in (1, 2):
            spec = f_spec_for_gn(n)
            for X in (10**3, 10**4, 10**5, 10**6):
                dfs = sum_multiplicative(spec, X, table)
                oracle = sum_multiplicative_oracle(spec, X)
                assert dfs == oracle, f"n={n} X={X}"
        assert hom_count(1, 3) == 54
        assert hom_count(1, 90) == 2322 == len(list(enumerate_bad_tuples(1, 90)))
        for X in (3, 90, 10**3, 10**4):
            assert epi_count(1, X) == epi_count_direct(1, X), f"X={X}"
        # the dissection sums at n = 1, X <= 300
        fam = _FamilyData.get(1)
        X = 300
        seen = set()
        for t in enumerate_bad_tuples(1, X):
            seen.add(frozenset(g for g in fam.tn if t.v(g) == 1))
        assert sum(n1_sum(1, list(s), X) for s in seen) == hom_count(1, X)
        import random

        rng = random.Random(5)
        for _ in range(15):
            S = rng.sample(fam.tn, rng.randrange(0, len(fam.tn)))
            rest = [g for g in fam.tn if g not in S]
            S2 = S + rest[: rng.randrange(0, len(rest) + 1)]
            assert n2_sum(1, S2, X) <= n2_sum(1, S, X)


def test_criterion_6_local_factor_weld():
    with _Budget("C6-local-factor-weld", 300):
        for n in (1, 2):
            res = local_factor_cross_check(n, 10**4)
            assert res.ok, f"n={n} violations: {res.violations[:5]}"
            assert res.checked == 1228  # pi(10^4) = 1229 minus the wild prime 3
            group = build_gn(n)
            datum = gn_datum(n, group=group)
            assert mb_local_factor(group, datum, 3).exact == Fraction(27**n, 3)


def test_criterion_7_analytic_layer():
    with _Budget("C7-analytic-layer", 120):
        ln720 = math.log(720.0)
        assert abs(log_gamma(7.0) - ln720) <= 1e-12 * ln720
        for x in (1.0, 7.0, 50.0, 148.0, 1000.0):
            defect = abs(log_gamma(x + 1) - log_gamma(x) - math.log(x))
            assert defect <= 1e-12, f"x={x}"
        P = 10**5
        group = build_gn(1)
        datum = gn_datum(1, group=group)
        mb = mb_constant(group, datum, P)
        lhs = math.log(2.0) + mb.log_value
        rhs = math.log(54.0) + c0(1, P).log_value - math.log(3.0 * 720.0)
        assert abs(lhs - rhs) <= 1e-9, f"factor-two identity defect {abs(lhs-rhs)}"
        a = c0(1, P)
        b = c0(1, 2 * P)
        drift = abs(a.log_value - b.log_value)
        if drift > 3 * a.tail_estimate:
            sys.__stdout__.write(
                f"ACCEPTANCE C7 FLAG c0 doubling drift {drift:.3e} vs "
                f"3x tail {3 * a.tail_estimate:.3e}\n"
            )


def test_criterion_8_mixed_family_probe():
    with _Budget("C8-mixed-family-probe", 600):
        probe = mixed_family_probe(5)
        rec = {r["n"]: r for r in probe["records"]}
        assert rec[2]["burnside_checked"]
        for n in range(2, 6):
            env = next(e for e in probe["envelope"] if e["n"] == n)
            assert env["within"], f"n={n}: deviation {env['deviation']}"
        minimal = probe["minimal_n_exceeding_naive"]
        assert minimal is not None
        for r in probe["records"]:
            if r["n"] < minimal:
                assert r["fibered_b"] <= r["naive_b"]
        assert rec[minimal]["fibered_b"] > rec[minimal]["naive_b"]
        sys.__stdout__.write(
            f"ACCEPTANCE C8 INFO minimal n with fibered > naive: {minimal}; "
            f"ratios to 12^n/2: "
            + ", ".join(
                f"n={r['n']}: {float(r['ratio_to_half_12n']):.6f}"
                for r in probe["records"]
            )
            + "\n"
        )
