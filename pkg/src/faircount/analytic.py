"""Floating-point layer: log-gamma, conditionally convergent Euler products,
the mass-heuristic leading constant with its wild local factors, asymptotic
predictors, and the exact group-side/sieve-side local-factor identity.

All conditionally convergent products are taken over primes in increasing
order and accumulated in log space; every truncated product reports its
truncation bound and a tail estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import numtheory
from .arith_count import ResidueClassFunctionSpec, SieveTable, f_spec_for_gn, sieve
from .errors import EvenOrderError, InconsistentDatumError, PoleError, SieveLimitError
from .group_core import AbelianSpec, CocycleGroup, GroupElement, build_gn
from .malle_exponents import (
    FiberedDatum,
    alpha_gn,
    fibered_b_orbit,
    fibered_fixed_sums,
    gn_datum,
)

# ---------------------------------------------------------------------------
# log-gamma
# ---------------------------------------------------------------------------

_STIRLING = (
    1.0 / 12,
    -1.0 / 360,
    1.0 / 1260,
    -1.0 / 1680,
    1.0 / 1188,
    -691.0 / 360360,
    1.0 / 156,
    -3617.0 / 122400,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x >= 1 by an argument-shifted Stirling series: shift the
    argument above 20, evaluate the series, then remove the shift."""
    if x < 1:
        raise ValueError(f"log_gamma requires x >= 1, got {x}")
    shift = 0.0
    while x < 20.0:
        shift += math.log(x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    term = inv
    series = 0.0
    for c in _STIRLING:
        series += c * term
        term *= inv2
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_TWO_PI + series - shift


# ---------------------------------------------------------------------------
# Euler product results
# ---------------------------------------------------------------------------


@dataclass
class EulerProductResult:
    """A truncated Euler product: value (0.0 when the log underflows), its log,
    the truncation bound, an honest tail estimate, and the per-residue-class
    prime counts that feed the estimate."""

    value: float
    log_value: float
    truncation_bound: int
    tail_estimate: float
    per_class_prime_counts: dict[int, int]
    note: str = ""


def _class_counts(table: SieveTable, modulus: int) -> dict[int, int]:
    res = table.primes % modulus
    out: dict[int, int] = {}
    for c in numtheory.unit_residues(modulus):
        out[int(c)] = int(np.count_nonzero(res == c))
    return out


def _tail_estimate(
    P: int, weight: float, counts: dict[int, int], support: list[int]
) -> float:
    """Heuristic bound on the missing log-tail: class-count discrepancy against
    equidistribution plus the weight/(P log P) term, doubled."""
    total_coprime = sum(counts.values())
    classes = max(1, len(counts))
    expected = total_coprime / classes
    disc = sum(abs(counts.get(c, 0) - expected) for c in support) / P
    return 2.0 * (disc + weight / (P * math.log(P)))


def _safe_exp(logv: float) -> float:
    try:
        return math.exp(logv)
    except OverflowError:
        return math.inf


def c0(n: int, P: int, table: SieveTable | None = None) -> EulerProductResult:
    """The leading Euler product of the odd family at index n, truncated at P:
    product over all primes p <= P of (1 + f(p)/p)(1 - 1/p)^alpha."""
    if P < 100:
        raise ValueError("truncation bound P must be >= 100")
    if table is None:
        table = sieve(P, 9)
    elif table.limit < P:
        raise SieveLimitError(f"sieve limit {table.limit} < P = {P}")
    spec = f_spec_for_gn(n)
    alpha = float(alpha_gn(n, literal_cap=0))
    primes = table.primes[table.primes <= P]
    fvals = np.array([spec.value_at(int(p)) for p in primes], dtype=np.float64)
    pf = primes.astype(np.float64)
    logs = np.log1p(fvals / pf) + alpha * np.log1p(-1.0 / pf)
    if not np.all(np.isfinite(logs)):
        raise AssertionError("non-finite local factor in log accumulation")
    log_value = float(np.sum(logs))
    counts = _class_counts(
        SieveTable(limit=P, q=9, primes=primes, residues=primes % 9), 9
    )
    tail = _tail_estimate(P, alpha, counts, [1, 4, 7])
    return EulerProductResult(
        value=_safe_exp(log_value),
        log_value=log_value,
        truncation_bound=P,
        tail_estimate=tail,
        per_class_prime_counts=counts,
    )


def c0_local_factor(n: int, p: int) -> float:
    """One local factor of the product above, for spot checks."""
    spec = f_spec_for_gn(n)
    alpha = float(alpha_gn(n, literal_cap=0))
    return (1.0 + spec.value_at(p) / p) * (1.0 - 1.0 / p) ** alpha


def predict_count(n: int, X: float, P: int, table: SieveTable | None = None) -> float:
    """Main-term predictor 2*27^n * X (log X)^(alpha-1) / (3 Gamma(alpha)) * c0,
    assembled in log space."""
    if X <= math.e:
        raise ValueError("X must exceed e for the log-power main term")
    alpha = float(alpha_gn(n, literal_cap=0))
    cres = c0(n, P, table)
    log_main = (
        math.log(2.0)
        + n * math.log(27.0)
        + math.log(X)
        + (alpha - 1.0) * math.log(math.log(X))
        - math.log(3.0)
        - log_gamma(alpha)
        + cres.log_value
    )
    return _safe_exp(log_main)


# ---------------------------------------------------------------------------
# Fibered local factors (mass heuristic)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalFactor:
    """An exact local factor of the fibered Dirichlet series at s = 1, without
    the (1 - 1/p)^b normalization."""

    p: int
    exact: Fraction
    kind: str  # "tame", "wild-ramified", "wild-unramified"

    @property
    def value(self) -> float:
        return self.exact.numerator / self.exact.denominator


@dataclass
class WildLocalData:
    """Sylow bookkeeping behind a wild local factor."""

    p: int
    ker_phi_p_size: int
    tau_p: tuple
    s_sum: int
    ker_phi_nonp_size: int


class _DatumAnalytics:
    """Per-datum caches: class-indexed kernel S-sums and Sylow splits."""

    def __init__(self, group: CocycleGroup, datum: FiberedDatum):
        if datum.group is not group:
            raise InconsistentDatumError("datum belongs to a different group")
        self.group = group
        self.datum = datum
        self._sums: dict[int, int] | None = None

    def kernel_class_sums(self) -> dict[int, int]:
        if self._sums is None:
            self._sums = fibered_fixed_sums(self.group, self.datum)
        return self._sums

    def tame_numerator(self, p: int) -> int:
        """sum over x in ker(phi)-{id} of |S(x, p)| for a prime p not dividing |G|."""
        if self.group.order % p == 0:
            raise ValueError(f"{p} divides the group order; not a tame prime")
        return self.kernel_class_sums()[p % self.datum.m_act]


_analytics_cache: dict[int, _DatumAnalytics] = {}


def _analytics(group: CocycleGroup, datum: FiberedDatum) -> _DatumAnalytics:
    key = id(datum)
    if key not in _analytics_cache:
        _analytics_cache[key] = _DatumAnalytics(group, datum)
    return _analytics_cache[key]


def ramified_primes_of_r(datum: FiberedDatum) -> list[int]:
    """Primes at which the character behind r is ramified: exactly the prime
    divisors of its conductor."""
    return [p for p, _ in numtheory.factorize(datum.conductor)]


def _h_coordinate_split(h: AbelianSpec, p: int) -> tuple[list[int], list[int]]:
    coords = h.prime_coordinates()
    p_idx = coords.get(p, [])
    np_idx = [i for i in range(h.rank) if i not in p_idx]
    return p_idx, np_idx


def _component_phi(datum: FiberedDatum, comp: CocycleGroup, c_idx, a_idx, h_idx):
    """phi restricted to a coordinate component, mapped into the matching
    H-coordinates; returns (values per component element, H-sub spec)."""
    group = datum.group
    h_sub = AbelianSpec(tuple(datum.h.orders[i] for i in h_idx))
    values = []
    for x in comp.elements():
        full = group.embed_from_coordinates(x, c_idx, a_idx)
        v = datum.phi(full)
        proj = tuple(v[i] for i in h_idx)
        drop = tuple(v[i] for i in range(datum.h.rank) if i not in h_idx)
        if any(drop):
            raise InconsistentDatumError(
                "phi does not respect the Sylow decomposition of H"
            )
        values.append(proj)
    return values, h_sub


def _r_nonp_value(datum: FiberedDatum, p: int) -> tuple:
    """The non-p part of the r-value carried by the residue p (the p-component
    of the modulus is set to 1 before reading r)."""
    cond = datum.conductor
    pk = 1
    while cond % p == 0:
        cond //= p
        pk *= p
    mprime = cond
    if mprime == 1:
        beta = 1 % datum.conductor if datum.conductor > 1 else 0
    else:
        beta = numtheory.crt_lift(1, pk, p % mprime, mprime)
    full = datum.r_table[beta % datum.m_eff] if datum.m_eff > 1 else datum.r_table[0]
    _, np_idx = _h_coordinate_split(datum.h, p)
    return tuple(full[i] for i in np_idx)


def wild_local_data(group: CocycleGroup, datum: FiberedDatum, p: int) -> WildLocalData:
    """Sylow-split data at a prime p dividing |G|."""
    if group.order % p:
        raise ValueError(f"{p} does not divide |G| = {group.order}")
    cp_idx, ap_idx = group.component_coordinates(p)
    cn_idx, an_idx = group.component_coordinates(p, complement=True)
    comp_p = group.restrict_coordinates(cp_idx, ap_idx, name=f"{group.name}[{p}]")
    comp_np = group.restrict_coordinates(cn_idx, an_idx, name=f"{group.name}[non-{p}]")
    hp_idx, hnp_idx = _h_coordinate_split(datum.h, p)
    phi_p_vals, _ = _component_phi(datum, comp_p, cp_idx, ap_idx, hp_idx)
    phi_np_vals, h_np = _component_phi(datum, comp_np, cn_idx, an_idx, hnp_idx)
    hp_zero = tuple(0 for _ in hp_idx)
    ker_p = sum(1 for v in phi_p_vals if v == hp_zero)
    hnp_zero = tuple(0 for _ in hnp_idx)
    ker_np = sum(1 for v in phi_np_vals if v == hnp_zero)

    # inertia image: units congruent to 1 modulo the prime-to-p part of the
    # conductor, pushed through the non-p part of r
    cond = datum.conductor
    pk = 1
    while cond % p == 0:
        cond //= p
        pk *= p
    mprime = cond
    image_vals = set()
    for u in numtheory.unit_residues(datum.conductor):
        if mprime == 1 or u % mprime == 1 % mprime:
            full = (
                datum.r_table[u % datum.m_eff] if datum.m_eff > 1 else datum.r_table[0]
            )
            image_vals.add(tuple(full[i] for i in hnp_idx))
    image = h_np.subgroup_closure(image_vals)
    if len(image) != len(image_vals):
        raise InconsistentDatumError("inertia image of r is not closed")
    tau = max(image, key=lambda v: (h_np.element_order(v), v))
    if h_np.element_order(tau) != len(image):
        raise InconsistentDatumError("inertia image of r is not cyclic")

    rv = _r_nonp_value(datum, p)
    comp_elems = list(comp_np.elements())
    if datum.conductor % p == 0:
        sources = [x for x, v in zip(comp_elems, phi_np_vals) if v == tau]
    else:
        sources = [x for x, v in zip(comp_elems, phi_np_vals) if v == hnp_zero]
    s_sum = 0
    for g in sources:
        gp = comp_np.power(g, p)
        for h_el, hv in zip(comp_elems, phi_np_vals):
            if hv == rv and comp_np.conjugate(h_el, g) == gp:
                s_sum += 1
    return WildLocalData(
        p=p,
        ker_phi_p_size=ker_p,
        tau_p=tau,
        s_sum=s_sum,
        ker_phi_nonp_size=ker_np,
    )


def mb_local_factor(group: CocycleGroup, datum: FiberedDatum, p: int) -> LocalFactor:
    """The exact local factor of the fibered Dirichlet series at s = 1 at the
    prime p (tame sum for p coprime to |G|, Sylow-split forms otherwise)."""
    if group.order % p:
        ana = _analytics(group, datum)
        num = ana.tame_numerator(p)
        exact = 1 + Fraction(num, datum.kernel_size * p)
        return LocalFactor(p=p, exact=exact, kind="tame")
    data = wild_local_data(group, datum, p)
    if datum.conductor % p == 0:
        exact = Fraction(data.ker_phi_p_size, p) * Fraction(
            data.s_sum, data.ker_phi_nonp_size
        )
        return LocalFactor(p=p, exact=exact, kind="wild-ramified")
    exact = 1 + Fraction(
        data.ker_phi_p_size * data.s_sum - data.ker_phi_nonp_size,
        data.ker_phi_nonp_size * p,
    )
    return LocalFactor(p=p, exact=exact, kind="wild-unramified")


def _b_and_checks(group: CocycleGroup, datum: FiberedDatum) -> int:
    b = fibered_b_orbit(group, datum)
    if b < 1:
        raise PoleError(
            f"fibered orbit count {b} hits the Gamma pole; the datum has a "
            "trivial kernel"
        )
    return b


def mb_constant(
    group: CocycleGroup,
    datum: FiberedDatum,
    P: int,
    allow_even: bool = False,
    table: SieveTable | None = None,
) -> EulerProductResult:
    """The mass-heuristic leading constant: 1/Gamma(b) times the product of all
    normalized local factors up to P, in increasing prime order.

    Groups of even order are refused unless `allow_even` is set, in which case
    the result is stamped UNSUPPORTED_EVEN_ORDER."""
    note = ""
    if group.order % 2 == 0:
        if not allow_even:
            raise EvenOrderError(
                "the mass-heuristic constant is unsupported for groups of even "
                "order; pass allow_even to compute it anyway"
            )
        note = "UNSUPPORTED_EVEN_ORDER"
    return _fibered_product(group, datum, P, table, wild="full", note=note)


def tame_constant(
    group: CocycleGroup,
    datum: FiberedDatum,
    P: int,
    table: SieveTable | None = None,
) -> EulerProductResult:
    """The tame-only leading constant: bare (1 - 1/p)^b at primes dividing |G|,
    the tame local factor elsewhere.  Even group orders are permitted."""
    return _fibered_product(group, datum, P, table, wild="tame-only", note="")


def _fibered_product(
    group: CocycleGroup,
    datum: FiberedDatum,
    P: int,
    table: SieveTable | None,
    wild: str,
    note: str,
) -> EulerProductResult:
    if P < 100:
        raise ValueError("truncation bound P must be >= 100")
    if table is None:
        table = sieve(P, datum.m_act if datum.m_act > 1 else 2)
    elif table.limit < P:
        raise SieveLimitError(f"sieve limit {table.limit} < P = {P}")
    b = _b_and_checks(group, datum)
    ana = _analytics(group, datum)
    sums = ana.kernel_class_sums()
    ker = datum.kernel_size
    wild_primes = set(group.primes())
    if max(wild_primes) > P:
        raise ValueError("truncation bound P must cover the primes dividing |G|")
    log_value = -log_gamma(b) if wild == "full" else 0.0
    primes = table.primes[table.primes <= P]
    logs = np.empty(len(primes), dtype=np.float64)
    for i, pv in enumerate(primes):
        p = int(pv)
        norm = b * math.log1p(-1.0 / p)
        if p in wild_primes:
            if wild == "full":
                fac = mb_local_factor(group, datum, p)
                if fac.exact <= 0:
                    raise AssertionError(f"non-positive local factor at {p}")
                logs[i] = math.log(fac.value) + norm
            else:
                logs[i] = norm
        else:
            num = sums[p % datum.m_act]
            if num % ker == 0:
                logs[i] = math.log1p((num // ker) / p) + norm
            else:
                logs[i] = math.log1p(num / (ker * p)) + norm
    if not np.all(np.isfinite(logs)):
        raise AssertionError("non-finite local factor in log accumulation")
    log_value += float(np.sum(logs))
    modulus = datum.m_act if datum.m_act > 1 else 2
    counts = _class_counts(
        SieveTable(limit=P, q=modulus, primes=primes, residues=primes % modulus),
        modulus,
    )
    support = [c for c in counts if sums.get(c, 0) > 0]
    tail = _tail_estimate(P, float(b), counts, support)
    return EulerProductResult(
        value=_safe_exp(log_value),
        log_value=log_value,
        truncation_bound=P,
        tail_estimate=tail,
        per_class_prime_counts=counts,
        note=note,
    )


# ---------------------------------------------------------------------------
# Group side vs sieve side
# ---------------------------------------------------------------------------


@dataclass
class CrossCheckResult:
    n: int
    p_limit: int
    checked: int
    class_values: dict[int, Fraction]
    violations: list[tuple[int, Fraction, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def local_factor_cross_check(
    n: int, p_limit: int, identification: int = 1
) -> CrossCheckResult:
    """For every tame prime p <= p_limit, assert the exact identity between the
    group side sum_{x in ker(phi)-{id}} |S(x, p)| / |ker(phi)| and the sieve
    side prime weight f(p).  Violations are reported, not raised."""
    group = build_gn(n)
    datum = gn_datum(n, identification=identification, group=group)
    ana = _analytics(group, datum)
    sums = ana.kernel_class_sums()
    ker = datum.kernel_size
    spec = f_spec_for_gn(n)
    table = sieve(max(p_limit, 2), datum.m_act)
    class_values = {
        int(c): Fraction(sums[c], ker) for c in sorted(sums)
    }
    checked = 0
    violations = []
    for pv in table.primes:
        p = int(pv)
        if p > p_limit:
            break
        if group.order % p == 0:
            continue
        group_side = Fraction(sums[p % datum.m_act], ker)
        f_side = spec.value_at(p)
        checked += 1
        if group_side != f_side:
            violations.append((p, group_side, f_side))
    return CrossCheckResult(
        n=n,
        p_limit=p_limit,
        checked=checked,
        class_values=class_values,
        violations=violations,
    )
