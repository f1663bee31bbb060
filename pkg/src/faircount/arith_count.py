"""Exact counting: prime sieving by residue class, multiplicative-function sums,
ramification tuples, and surjective-tuple counts.

A ramification tuple assigns a squarefree integer v_g to each non-identity
group element, pairwise coprime, with the leading-coordinate elements jointly
carrying exactly the prime 3 and every other prime p sitting on an element of
order dividing p - 1.  The total count of such tuples with bounded conductor
factors as 2 * 27^n times a mean value of a multiplicative function; this
module computes both sides independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numtheory
from .errors import CapExceededError, SieveLimitError
from .group_core import CocycleGroup, GroupElement, build_gn

DEFAULT_TUPLE_CAP = 10_000_000
SIEVE_MEMORY_CAP = 100_000_000


# ---------------------------------------------------------------------------
# Sieving
# ---------------------------------------------------------------------------


@dataclass
class SieveTable:
    """Primes up to a limit with their residues modulo q."""

    limit: int
    q: int
    primes: np.ndarray
    residues: np.ndarray

    def class_of(self, p: int) -> int:
        return p % self.q

    def count(self) -> int:
        return int(len(self.primes))


def sieve(limit: int, q: int = 9, memory_cap: int = SIEVE_MEMORY_CAP) -> SieveTable:
    """All primes <= limit (plain sieve of Eratosthenes on a boolean array)."""
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")
    if limit > memory_cap:
        raise SieveLimitError(
            f"sieve limit {limit} exceeds the memory budget {memory_cap}"
        )
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    primes = np.nonzero(mask)[0].astype(np.int64)
    return SieveTable(limit=limit, q=q, primes=primes, residues=primes % q)


# ---------------------------------------------------------------------------
# Multiplicative functions by residue class
# ---------------------------------------------------------------------------


@dataclass
class ResidueClassFunctionSpec:
    """A multiplicative function supported on squarefree integers, determined
    on primes by residue class: f(p) = values[p mod q], zero off the table."""

    q: int
    values: dict[int, int]

    def value_at(self, p: int) -> int:
        return self.values.get(p % self.q, 0)


def f_spec_for_gn(n: int) -> ResidueClassFunctionSpec:
    """Prime weights for the odd family: 27^n - 1 on p = 1 mod 9 and
    9^n - 1 on p = 4, 7 mod 9."""
    if n < 1:
        raise ValueError("family index n must be >= 1")
    return ResidueClassFunctionSpec(
        9, {1: 27**n - 1, 4: 9**n - 1, 7: 9**n - 1}
    )


def sum_multiplicative(
    spec: ResidueClassFunctionSpec, X: int, table: SieveTable | None = None
) -> int:
    """sum_{m <= X} f(m), exact, by depth-first enumeration of squarefree
    products of support primes in increasing order with pruning at X."""
    if X < 1:
        raise ValueError("X must be >= 1")
    if table is None:
        table = sieve(max(X, 2), spec.q)
    elif table.limit < X:
        raise SieveLimitError(f"sieve limit {table.limit} < X = {X}")
    support = [
        (int(p), spec.value_at(int(p)))
        for p in table.primes[table.primes <= X]
        if spec.value_at(int(p)) > 0
    ]
    total = 0

    def rec(start: int, prod: int, weight: int) -> None:
        nonlocal total
        total += weight
        for j in range(start, len(support)):
            p, v = support[j]
            nxt = prod * p
            if nxt > X:
                break
            rec(j + 1, nxt, weight * v)

    rec(0, 1, 1)
    return total


def sum_multiplicative_oracle(spec: ResidueClassFunctionSpec, X: int) -> int:
    """The same sum by per-integer factorization over a smallest-prime-factor
    table; exists solely to validate sum_multiplicative."""
    if X < 1:
        raise ValueError("X must be >= 1")
    if X > 1_000_000:
        raise CapExceededError("per-integer oracle is capped at X = 10^6")
    spf = np.zeros(X + 1, dtype=np.int64)
    for p in range(2, math.isqrt(X) + 1):
        if spf[p] == 0:
            seg = spf[p::p]
            seg[seg == 0] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    total = 1  # m = 1
    for m in range(2, X + 1):
        weight = 1
        k = m
        while k > 1:
            p = int(spf[k])
            k //= p
            if k % p == 0:
                weight = 0
                break
            weight *= spec.value_at(p)
            if weight == 0:
                break
        total += weight
    return total


# ---------------------------------------------------------------------------
# Ramification tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RamificationTuple:
    """An assignment g -> v_g of squarefree integers; omitted elements carry 1."""

    n: int
    assignments: tuple[tuple[GroupElement, int], ...]

    def v(self, g: GroupElement) -> int:
        for h, val in self.assignments:
            if h == g:
                return val
        return 1

    def conductor(self) -> int:
        return math.prod(v for _, v in self.assignments)

    def leading_element(self) -> GroupElement:
        """The unique element with nonzero leading base coordinate (its v is 3)."""
        for g, val in self.assignments:
            if g.a[0] != 0:
                return g
        raise AssertionError("tuple has no leading element")

    def support(self) -> list[GroupElement]:
        return [g for g, _ in self.assignments]

    def validate(self, group: CocycleGroup) -> None:
        """Check all four defining conditions; raises AssertionError on failure."""
        vals = [val for _, val in self.assignments]
        for val in vals:
            if val < 1 or any(e > 1 for _, e in numtheory.factorize(val)):
                raise AssertionError(f"{val} is not a positive squarefree integer")
        for i, u in enumerate(vals):
            for w in vals[i + 1 :]:
                if math.gcd(u, w) != 1:
                    raise AssertionError("assigned values are not pairwise coprime")
        prod_lead = 1
        for g, val in self.assignments:
            group.check_element(g)
            if g == group.identity:
                raise AssertionError("identity element cannot carry ramification")
            if g.a[0] == 0:
                m = group.element_order(g)
                for p, _ in numtheory.factorize(val):
                    if p % m != 1:
                        raise AssertionError(
                            f"prime {p} on an order-{m} element is not 1 mod {m}"
                        )
            else:
                prod_lead *= val
        if prod_lead != 3:
            raise AssertionError(
                f"product over leading-coordinate elements is {prod_lead}, not 3"
            )


def tuple_dump_line(group: CocycleGroup, t: RamificationTuple) -> str:
    """One tuple as space-separated 'g-index:v' pairs (elements with v = 1 omitted)."""
    tab = group.table()
    pairs = sorted((tab.index_of_element(g), v) for g, v in t.assignments)
    return " ".join(f"{i}:{v}" for i, v in pairs)


# -- family structure used by the tuple walkers --------------------------------


class _FamilyData:
    """Cached per-n structure: the group, the kernel-side elements that can
    absorb tame primes, and the leading-coordinate candidates."""

    _cache: dict[int, "_FamilyData"] = {}

    def __init__(self, n: int):
        self.n = n
        self.group = build_gn(n)
        ident = self.group.identity
        self.tn: list[GroupElement] = []
        self.g0s: list[GroupElement] = []
        for g in self.group.elements():
            if g == ident:
                continue
            if g.a[0] == 0:
                self.tn.append(g)
            else:
                self.g0s.append(g)
        self.orders = [self.group.element_order(g) for g in self.tn]
        self.ord3_idx = [i for i, m in enumerate(self.orders) if m == 3]
        self.all_idx = list(range(len(self.tn)))

    @classmethod
    def get(cls, n: int) -> "_FamilyData":
        if n not in cls._cache:
            cls._cache[n] = cls(n)
        return cls._cache[n]

    def compatible(self, p: int) -> list[int]:
        """Indices of elements that may absorb the prime p (order divides p-1)."""
        return self.all_idx if p % 9 == 1 else self.ord3_idx


def hom_count(n: int, X: int, table: SieveTable | None = None) -> int:
    """Number of ramification tuples with conductor <= X: zero below 3, then
    2 * 27^n times the multiplicative mean value up to X/3."""
    if X < 3:
        return 0
    return 2 * 27**n * sum_multiplicative(f_spec_for_gn(n), X // 3, table)


def enumerate_bad_tuples(n: int, X: int, cap: int = DEFAULT_TUPLE_CAP):
    """Every ramification tuple with conductor <= X exactly once, deterministic:
    leading element in enumeration order, then primes ascending with receiving
    elements in enumeration order."""
    expected = hom_count(n, X)
    if expected > cap:
        raise CapExceededError(f"tuple count {expected} exceeds cap {cap}")
    if X < 3:
        return
    fam = _FamilyData.get(n)
    limit = X // 3
    if limit >= 2:
        table = sieve(limit, 9)
        supp = [int(p) for p in table.primes if p % 3 == 1]
    else:
        supp = []
    compat = {p: fam.compatible(p) for p in supp}

    def rec(start: int, prod: int, chosen: list[tuple[int, int]]):
        yield list(chosen)
        for j in range(start, len(supp)):
            p = supp[j]
            nxt = prod * p
            if nxt > limit:
                break
            for gi in compat[p]:
                chosen.append((gi, p))
                yield from rec(j + 1, nxt, chosen)
                chosen.pop()

    for g0 in fam.g0s:
        for chosen in rec(0, 1, []):
            values: dict[int, int] = {}
            for gi, p in chosen:
                values[gi] = values.get(gi, 1) * p
            assignments = [(g0, 3)] + [
                (fam.tn[gi], v) for gi, v in sorted(values.items())
            ]
            yield RamificationTuple(n=n, assignments=tuple(assignments))


def count_bad_tuples(n: int, X: int) -> int:
    """|enumerate_bad_tuples(n, X)| without materializing tuples: walks the
    same prime-assignment tree, multiplying by subtree reuse."""
    if X < 3:
        return 0
    fam = _FamilyData.get(n)
    limit = X // 3
    if limit >= 2:
        table = sieve(limit, 9)
        supp = [int(p) for p in table.primes if p % 3 == 1]
    else:
        supp = []
    n_compat = [len(fam.compatible(p)) for p in supp]

    def rec(start: int, prod: int) -> int:
        c = 1
        for j in range(start, len(supp)):
            nxt = prod * supp[j]
            if nxt > limit:
                break
            c += n_compat[j] * rec(j + 1, nxt)
        return c

    return len(fam.g0s) * rec(0, 1)


# ---------------------------------------------------------------------------
# Surjective tuples
# ---------------------------------------------------------------------------


def epi_count_direct(n: int, X: int, cap: int = DEFAULT_TUPLE_CAP) -> int:
    """Surjective-tuple count by walking the assignment tree and testing, per
    node, whether the base images of the support generate the base group."""
    if X < 3:
        return 0
    if hom_count(n, X) > cap:
        raise CapExceededError("tuple count exceeds cap")
    fam = _FamilyData.get(n)
    base = fam.group.base
    limit = X // 3
    if limit >= 2:
        table = sieve(limit, 9)
        supp = [int(p) for p in table.primes if p % 3 == 1]
    else:
        supp = []
    compat = {p: fam.compatible(p) for p in supp}
    tn_images = [g.a for g in fam.tn]
    g0_images = sorted({g.a for g in fam.g0s})
    g0_mult = 3**n  # center fiber size over each base image

    good_cache: dict[frozenset, int] = {}

    def good_g0_count(used: frozenset) -> int:
        hit = good_cache.get(used)
        if hit is None:
            imgs = [tn_images[i] for i in used]
            hit = sum(
                g0_mult for a0 in g0_images if base.generates(imgs + [a0])
            )
            good_cache[used] = hit
        return hit

    total = 0

    def rec(start: int, prod: int, used: frozenset) -> None:
        nonlocal total
        total += good_g0_count(used)
        for j in range(start, len(supp)):
            p = supp[j]
            nxt = prod * p
            if nxt > limit:
                break
            for gi in compat[p]:
                rec(j + 1, nxt, used | {gi})

    rec(0, 1, frozenset())
    return total


def _lattice_mu(base) -> tuple[list[frozenset], dict[int, int]]:
    """Subgroup lattice of the base group with the Moebius weights mu(B, full)."""
    subs = base.subgroups()
    full = max(range(len(subs)), key=lambda i: len(subs[i]))
    order = sorted(range(len(subs)), key=lambda i: -len(subs[i]))
    mu: dict[int, int] = {full: 1}
    for i in order:
        if i == full:
            continue
        acc = 0
        for j in range(len(subs)):
            if j != i and subs[i] < subs[j]:
                acc += mu[j]
        mu[i] = -acc
    return subs, mu


def epi_count_moebius(n: int, X: int, table: SieveTable | None = None) -> int:
    """Surjective-tuple count by inclusion-exclusion over the subgroup lattice
    of the base group: tuples spanning exactly the full group are recovered
    from the per-subgroup multiplicative sums.  Practical for n = 1."""
    if n != 1:
        raise CapExceededError(
            "subgroup-lattice counting is provided for n = 1; use epi_count_direct"
        )
    if X < 3:
        return 0
    fam = _FamilyData.get(n)
    base = fam.group.base
    t3 = 3**n
    subs, mu = _lattice_mu(base)
    limit = X // 3
    if table is None and limit >= 2:
        table = sieve(limit, 9)
    total = 0
    for i, B in enumerate(subs):
        if mu[i] == 0:
            continue
        g0c = t3 * sum(1 for a in B if a[0] != 0)
        if g0c == 0:
            continue
        inner = [a for a in B if a != base.zero and a[0] == 0]
        c3 = sum(1 for a in inner if base.element_order(a) == 3)
        call = len(inner)
        spec = ResidueClassFunctionSpec(
            9, {1: (t3 - 1) + t3 * call, 4: (t3 - 1) + t3 * c3, 7: (t3 - 1) + t3 * c3}
        )
        s = sum_multiplicative(spec, limit, table) if limit >= 1 else 1
        total += mu[i] * g0c * s
    return total


def epi_count(n: int, X: int, cap: int = DEFAULT_TUPLE_CAP) -> int:
    """Number of tuples whose support generates the group (lattice route for
    n = 1, direct walk otherwise)."""
    if n == 1:
        return epi_count_moebius(n, X)
    return epi_count_direct(n, X, cap=cap)


# ---------------------------------------------------------------------------
# Constrained subsums (the surjectivity dissection)
# ---------------------------------------------------------------------------


def _partition_spec(n: int, rest: list[GroupElement]) -> ResidueClassFunctionSpec:
    fam = _FamilyData.get(n)
    idx = {g: i for i, g in enumerate(fam.tn)}
    c3 = sum(1 for g in rest if fam.orders[idx[g]] == 3)
    call = len(rest)
    return ResidueClassFunctionSpec(9, {1: call, 4: c3, 7: c3})


def n2_sum(n: int, S, X: int, table: SieveTable | None = None) -> int:
    """Tuples with v_g = 1 for every g in S (S a subset of the prime-absorbing
    elements), leading factor included."""
    fam = _FamilyData.get(n)
    sset = set(S)
    for g in sset:
        if g not in set(fam.tn):
            raise ValueError(f"{g} is not a prime-absorbing element of this family")
    if X < 3:
        return 0
    rest = [g for g in fam.tn if g not in sset]
    spec = _partition_spec(n, rest)
    return len(fam.g0s) * sum_multiplicative(spec, X // 3, table)


def n1_sum(
    n: int,
    S,
    X: int,
    table: SieveTable | None = None,
    subset_cap: int = 22,
) -> int:
    """Tuples with v_g = 1 exactly for g in S, via the alternating sum
    n1(S) = sum_{S'} (-1)^{|S'|-|S|} n2(S') over supersets S' of S."""
    fam = _FamilyData.get(n)
    sset = set(S)
    rest = [g for g in fam.tn if g not in sset]
    if X < 3:
        return 0
    # every element outside S must absorb at least one prime
    limit = X // 3
    if rest:
        if limit >= 2:
            t = table if table is not None and table.limit >= limit else sieve(limit, 9)
            supp = [int(p) for p in t.primes if p % 3 == 1 and p <= limit]
        else:
            supp = []
        if len(supp) < len(rest):
            return 0
        prod = 1
        for p in supp[: len(rest)]:
            prod *= p
            if prod > limit:
                return 0
    if len(rest) > subset_cap:
        raise CapExceededError(
            f"alternating sum over 2^{len(rest)} supersets exceeds the cap"
        )
    total = 0
    for mask in range(1 << len(rest)):
        extra = [rest[i] for i in range(len(rest)) if mask >> i & 1]
        total += (-1) ** len(extra) * n2_sum(n, list(sset) + extra, X, table)
    return total
