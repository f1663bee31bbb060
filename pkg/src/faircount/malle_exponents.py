"""Logarithmic exponents: naive counting classes, twisted orbit counts, verdicts.

Two quantities drive everything here.  The naive exponent of a group G is
-1 plus the number of classes of G - {id} under conjugation together with
powering by residues coprime to the element order.  The fibered exponent
attached to a datum (H, phi, r) is the number of orbits of ker(phi) - {id}
under pairs (g, alpha) with phi(g) = r(alpha) acting by n -> g n^alpha g^-1.
Both are computed twice, by independent routes, and compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numtheory
from .bulk import orbit_count
from .errors import CapExceededError, InconsistentDatumError
from .group_core import (
    DEFAULT_ELEMENT_CAP,
    AbelianSpec,
    CocycleGroup,
    GroupElement,
    build_gn,
    build_mixed_example,
)

BURNSIDE_WORK_CAP = 500_000_000


# ---------------------------------------------------------------------------
# S-sets: admissible conjugator counts
# ---------------------------------------------------------------------------


def s_set_size(group: CocycleGroup, g: GroupElement, alpha: int) -> int:
    """|{h in G : h g h^-1 = g^alpha}| by scanning the whole group."""
    m = group.element_order(g)
    if math.gcd(alpha, m) != 1:
        raise ValueError(f"exponent {alpha} is not coprime to ord(g) = {m}")
    tab = group.table()
    target = tab.row_of(group.power(g, alpha))
    conj = tab.mul(tab.mul(tab.rows, tab.row_of(g)), tab.inv(tab.rows))
    return int(np.count_nonzero(np.all(conj == target, axis=1)))


def s_set_sizes_all(group: CocycleGroup, g: GroupElement) -> dict[int, int]:
    """s_set_size for every coprime exponent at once (one scan of G)."""
    m = group.element_order(g)
    if m == 1:
        return {1: group.order}
    tab = group.table()
    conj_idx = tab.index_of(tab.mul(tab.mul(tab.rows, tab.row_of(g)), tab.inv(tab.rows)))
    out = {}
    for alpha in numtheory.unit_residues(m):
        tgt = tab.index_of_element(group.power(g, alpha))
        out[alpha] = int(np.count_nonzero(conj_idx == tgt))
    return out


# ---------------------------------------------------------------------------
# Naive exponent, two ways
# ---------------------------------------------------------------------------


def naive_b_orbit(group: CocycleGroup, cap: int = DEFAULT_ELEMENT_CAP) -> int:
    """-1 + number of classes of G - {id} under conjugation and coprime powering.

    Classes are computed by closure under generator moves: conjugation by each
    group generator and g -> g^alpha for a generating set of the units modulo
    the group exponent (these moves generate the full equivalence).
    """
    if group.order > cap:
        raise CapExceededError(
            f"group order {group.order} exceeds enumeration cap {cap}"
        )
    tab = group.table()
    moves = [tab.conj_table(g) for g in group.generators()]
    for alpha in numtheory.unit_generators(group.exponent):
        moves.append(tab.pow_table(alpha))
    if not moves:
        moves = [np.arange(tab.size, dtype=np.int64)]
    active = np.ones(tab.size, dtype=bool)
    active[0] = False
    if not active.any():
        return -1
    return orbit_count(moves, tab.size, active) - 1


def _conjugation_defect_image(group: CocycleGroup, a) -> frozenset:
    """Image of the homomorphism b -> theta(b, a) - theta(a, b) from A to C."""
    C = group.center
    vals = []
    for e in group.base.basis():
        t1 = group.pairing.evaluate(e, a, C.orders)
        t2 = group.pairing.evaluate(a, e, C.orders)
        vals.append(C.sub(t1, t2))
    return C.subgroup_closure(vals)


def naive_b_formula(group: CocycleGroup, cap: int = DEFAULT_ELEMENT_CAP) -> Fraction:
    """The same constant from the weighted S-set sum, as an exact rational:

        -1 + sum_{g != id} 1/phi(ord g) * sum_{alpha coprime} |S_{g,alpha}| / |G|.

    Conjugating (c, a) by h gives (c + theta(q(h), a) - theta(a, q(h)), a), so
    for fixed g and alpha the conjugators are counted through the kernel of a
    homomorphism A -> C; this is validated against the scanning s_set_size in
    the test suite.
    """
    if group.order > cap:
        raise CapExceededError(
            f"group order {group.order} exceeds enumeration cap {cap}"
        )
    C, A = group.center, group.base
    size_c, size_a = C.size, A.size
    img_cache: dict[tuple, frozenset] = {}
    total = Fraction(0)
    identity = group.identity
    for g in group.elements():
        if g == identity:
            continue
        m = group.element_order(g)
        units = numtheory.unit_residues(m)
        im = img_cache.get(g.a)
        if im is None:
            im = _conjugation_defect_image(group, g.a)
            img_cache[g.a] = im
        s_total = 0
        for alpha in units:
            ga = group.power(g, alpha)
            if ga.a != g.a:
                continue
            t = C.sub(ga.c, g.c)
            if t in im:
                s_total += size_c * (size_a // len(im))
        total += Fraction(s_total, len(units) * group.order)
    return total - 1


def closed_form_b_gn(n: int) -> int:
    """Closed form of the naive constant for the odd family, exact."""
    if n < 1:
        raise ValueError("family index n must be >= 1")
    t3, t9 = 3**n, 9**n
    total = (
        Fraction(t3 - 1, 2)
        + Fraction(2 * (t9 - t3), 6)
        + t3
        + Fraction(t3 * (t3 - 1), 2)
        + Fraction(t3 * (t9 - t3), 18)
        - 1
    )
    if total.denominator != 1:
        raise AssertionError(f"closed form is not integral at n={n}: {total}")
    return int(total)


def alpha_gn(n: int, literal_cap: int = 3) -> Fraction:
    """Average ramification weight sum_{g in T_n} 1/phi(ord g), T_n the non-identity
    elements whose base image has zero leading coordinate.

    Evaluated three ways and compared: literal element enumeration (n small),
    base-side enumeration with center multiplicity, and the closed form
    (9^n - 1)/3 + (27^n - 1)/6.
    """
    if n < 1:
        raise ValueError("family index n must be >= 1")
    closed = Fraction(9**n - 1, 3) + Fraction(27**n - 1, 6)

    base = AbelianSpec((3,) + (9,) * n)
    t3 = 3**n
    acc = Fraction(0)
    for a in base.elements():
        if a[0] != 0:
            continue
        if all(v == 0 for v in a):
            # the central fiber contributes its t3 - 1 non-identity elements,
            # each of order 3
            acc += Fraction(t3 - 1, numtheory.totient(3))
        else:
            acc += Fraction(t3, numtheory.totient(base.element_order(a)))
    if acc != closed:
        raise AssertionError(f"base-side sum {acc} != closed form {closed} at n={n}")

    if n <= literal_cap:
        group = build_gn(n)
        lit = Fraction(0)
        for g in group.elements():
            if g == group.identity or g.a[0] != 0:
                continue
            lit += Fraction(1, numtheory.totient(group.element_order(g)))
        if lit != closed:
            raise AssertionError(f"literal sum {lit} != closed form {closed} at n={n}")
    return closed


# ---------------------------------------------------------------------------
# Fibered data
# ---------------------------------------------------------------------------


class FiberedDatum:
    """A quotient H, a surjection phi: G -> H, and r on units mod a reduced
    modulus, together defining the twisted action (g, alpha): n -> g n^alpha g^-1
    on ker(phi) - {id}.

    `m_eff` is the declared modulus r factors through; internally the action is
    driven by residues modulo m_act = lcm(conductor(r), exponent(ker phi)),
    which is the coarsest modulus that determines both r and n -> n^alpha.
    """

    def __init__(
        self,
        group: CocycleGroup,
        h: AbelianSpec,
        phi,
        r_table: dict[int, tuple],
        m_eff: int,
        *,
        kernel_generators=None,
        phi_vector=None,
        name: str = "",
    ):
        self.group = group
        self.h = h
        self.name = name or f"datum({group.name})"
        self.modulus = group.order
        self.m_eff = m_eff
        if m_eff < 1 or self.modulus % m_eff:
            raise InconsistentDatumError(
                f"reduced modulus {m_eff} does not divide |G| = {self.modulus}"
            )
        self._phi_scalar = phi
        tab = group.table()
        if phi_vector is not None:
            self.phi_idx = np.asarray(phi_vector(tab), dtype=np.int64)
        else:
            self.phi_idx = np.array(
                [h.index_of(phi(tab.element_of(row))) for row in tab.rows],
                dtype=np.int64,
            )
        self.r_table = {k % m_eff: tuple(v) for k, v in r_table.items()}
        self._validate_r()
        self._validate_phi()
        self.kernel_indices = np.where(self.phi_idx == h.index_of(h.zero))[0]
        self.kernel_size = len(self.kernel_indices)
        self.conductor = self._conductor()
        self.kernel_exponent = self._kernel_exponent()
        self.m_act = numtheory.lcm(self.conductor, self.kernel_exponent)
        self.kernel_generators = self._kernel_gens(kernel_generators)

    # -- accessors -------------------------------------------------------------

    def phi(self, x: GroupElement) -> tuple:
        return self._phi_scalar(x)

    def r(self, alpha: int) -> tuple:
        """r at a residue coprime to the modulus (read through m_eff)."""
        if self.m_eff == 1:
            return self.r_table[0]
        return self.r_table[alpha % self.m_eff]

    def r_act(self, beta: int) -> tuple:
        """r at a residue coprime to m_act (read through the conductor)."""
        if self.conductor == 1:
            return self.r_table[0 if self.m_eff == 1 else 1]
        return self.r_table[_lift_unit(beta, self.conductor, self.m_eff)]

    def r_act_index(self, beta: int) -> int:
        return self.h.index_of(self.r_act(beta))

    def unit_action_generators(self) -> list[int]:
        return numtheory.unit_generators(self.m_act)

    def section(self, beta: int) -> GroupElement:
        """The first group element (by index) mapping to r(beta) under phi."""
        tab = self.group.table()
        target = self.r_act_index(beta)
        hits = np.where(self.phi_idx == target)[0]
        if len(hits) == 0:
            raise InconsistentDatumError(
                f"r value at {beta} is outside the image of phi"
            )
        return tab.element_of(tab.rows[hits[0]])

    def fibered_product_size(self) -> int:
        """|{(g, alpha) : phi(g) = r(alpha)}| with alpha over units mod |G|."""
        counts = np.bincount(self.phi_idx, minlength=self.h.size)
        total = 0
        for alpha in numtheory.unit_residues(self.modulus):
            total += int(counts[self.h.index_of(self.r(alpha))])
        return total

    # -- validation --------------------------------------------------------------

    def _validate_r(self):
        units = numtheory.unit_residues(self.m_eff)
        if sorted(self.r_table) != sorted(units):
            raise InconsistentDatumError(
                f"r table must cover exactly the units mod {self.m_eff}"
            )
        for u in units:
            for v in units:
                w = u * v % self.m_eff if self.m_eff > 1 else 0
                if self.r_table[w] != self.h.add(self.r_table[u], self.r_table[v]):
                    raise InconsistentDatumError(
                        f"r is not multiplicative-to-additive at ({u}, {v})"
                    )

    def _validate_phi(self):
        h, group = self.h, self.group
        tab = group.table()
        if len(set(self.phi_idx.tolist())) != h.size:
            raise InconsistentDatumError("phi is not surjective onto H")
        counts = np.bincount(self.phi_idx, minlength=h.size)
        if counts.min() != counts.max():
            raise InconsistentDatumError("phi fibers are not of equal size")
        # homomorphism check by generator induction: phi(x*g) = phi(x) + phi(g)
        # for every x and every generator g implies the full property.
        add_idx = np.empty((h.size, h.size), dtype=np.int64)
        for i, u in enumerate(h.elements()):
            for j, v in enumerate(h.elements()):
                add_idx[i, j] = h.index_of(h.add(u, v))
        for g in group.generators():
            perm = tab.index_of(tab.mul(tab.rows, tab.row_of(g)))
            lhs = self.phi_idx[perm]
            rhs = add_idx[self.phi_idx, h.index_of(self.phi(g))]
            if not np.array_equal(lhs, rhs):
                raise InconsistentDatumError(
                    f"phi is not a homomorphism (fails against generator {g})"
                )

    def _conductor(self) -> int:
        """Minimal divisor d of m_eff such that r factors through units mod d."""
        for d in numtheory.divisors(self.m_eff):
            buckets: dict[int, tuple] = {}
            ok = True
            for u, val in self.r_table.items():
                key = u % d
                if buckets.setdefault(key, val) != val:
                    ok = False
                    break
            if ok:
                return d
        return self.m_eff

    def _kernel_exponent(self) -> int:
        tab = self.group.table()
        krows = tab.rows[self.kernel_indices]
        id_row = tab.rows[0]
        for d in numtheory.divisors(self.group.exponent):
            if np.array_equal(tab.pow(krows, d), np.broadcast_to(id_row, krows.shape)):
                return d
        raise AssertionError("kernel exponent must divide the group exponent")

    def _kernel_gens(self, provided) -> list[GroupElement]:
        tab = self.group.table()
        kset = np.zeros(tab.size, dtype=bool)
        kset[self.kernel_indices] = True

        def close(gen_elems):
            mask = np.zeros(tab.size, dtype=bool)
            mask[0] = True
            gen_rows = [tab.row_of(g) for g in gen_elems]
            changed = True
            while changed:
                changed = False
                for gr in gen_rows:
                    new_idx = tab.index_of(tab.mul(tab.rows[mask], gr))
                    before = int(mask.sum())
                    mask[new_idx] = True
                    if int(mask.sum()) != before:
                        changed = True
            return mask

        if provided is not None:
            gens = list(provided)
            for g in gens:
                if not kset[tab.index_of_element(g)]:
                    raise InconsistentDatumError(
                        f"declared kernel generator {g} is not in ker(phi)"
                    )
            mask = close(gens)
            if int(mask.sum()) != self.kernel_size:
                raise InconsistentDatumError(
                    "declared kernel generators do not generate ker(phi)"
                )
            return gens
        gens: list[GroupElement] = []
        span = np.zeros(tab.size, dtype=bool)
        span[0] = True
        for idx in self.kernel_indices:
            if span[idx]:
                continue
            gens.append(tab.element_of(tab.rows[idx]))
            span = close(gens)
        return gens


def _lift_unit(beta: int, d: int, m: int) -> int:
    """A unit mod m congruent to beta mod d (d | m, beta coprime to d)."""
    base = beta % d
    for k in range(m // d):
        cand = base + k * d
        if math.gcd(cand, m) == 1:
            return cand % m
    raise AssertionError("unit lifting failed; moduli inconsistent")


# -- datum constructors ----------------------------------------------------------


def gn_datum(n: int, identification: int = 1, group: CocycleGroup | None = None) -> FiberedDatum:
    """The order-3 quotient datum for the odd family.

    H is the order-3 quotient of the units mod 9 (kernel {1, 8}: the fixed
    field is the real subfield of the 9th cyclotomic field).  r sends the
    residue 2 to 1.  `identification` in {1, 2} selects which of the two
    compatible maps G -> H is used; both are legitimate, neither is canonical.
    """
    if identification not in (1, 2):
        raise ValueError("identification must be 1 or 2")
    g = group if group is not None else build_gn(n)
    h = AbelianSpec((3,))
    scale = identification

    def phi(x: GroupElement) -> tuple:
        return (scale * x.a[0] % 3,)

    def phi_vector(tab):
        return (scale * tab.rows[:, tab.nc].astype(np.int64)) % 3

    r_table = {pow(2, k, 9): (k % 3,) for k in range(6)}
    kernel_gens = [
        GroupElement(e, g.base.zero) for e in g.center.basis()
    ] + [
        GroupElement(g.center.zero, e)
        for e in g.base.basis()[1:]
    ]
    return FiberedDatum(
        g,
        h,
        phi,
        r_table,
        9,
        kernel_generators=kernel_gens,
        phi_vector=phi_vector,
        name=f"gn_datum({n},id={identification})",
    )


def mixed_datum(n: int, group: CocycleGroup | None = None) -> FiberedDatum:
    """The order-2 quotient datum for the mixed family.

    phi is the leading order-2 base coordinate; r is the quadratic character
    mod 3 (kernel {1 mod 3}, fixed field the quadratic field of discriminant -3).
    """
    g = group if group is not None else build_mixed_example(n)
    h = AbelianSpec((2,))

    def phi(x: GroupElement) -> tuple:
        return (x.a[0],)

    def phi_vector(tab):
        return tab.rows[:, tab.nc].astype(np.int64)

    r_table = {1: (0,), 2: (1,)}
    kernel_gens = [
        GroupElement(e, g.base.zero) for e in g.center.basis()
    ] + [
        GroupElement(g.center.zero, e)
        for e in g.base.basis()[1:]
    ]
    return FiberedDatum(
        g,
        h,
        phi,
        r_table,
        3,
        kernel_generators=kernel_gens,
        phi_vector=phi_vector,
        name=f"mixed_datum({n})",
    )


def trivial_datum(group: CocycleGroup) -> FiberedDatum:
    """H = {id}: the fibered action degenerates to the naive equivalence."""
    h = AbelianSpec(())

    def phi(x: GroupElement) -> tuple:
        return ()

    def phi_vector(tab):
        return np.zeros(tab.size, dtype=np.int64)

    return FiberedDatum(
        group,
        h,
        phi,
        {0: ()},
        1,
        kernel_generators=group.generators(),
        phi_vector=phi_vector,
        name=f"trivial_datum({group.name})",
    )


# ---------------------------------------------------------------------------
# Fibered exponent, two ways
# ---------------------------------------------------------------------------


def fibered_b_orbit(group: CocycleGroup, datum: FiberedDatum) -> int:
    """Orbit count of ker(phi) - {id} under the fibered action, by closure from
    a generating set: (k, 1) for kernel generators k and (h_beta, beta) for
    unit generators beta with any fixed h_beta in phi^-1(r(beta))."""
    if datum.group is not group:
        raise InconsistentDatumError("datum belongs to a different group")
    tab = group.table()
    moves = [tab.conj_table(k) for k in datum.kernel_generators]
    for beta in datum.unit_action_generators():
        h = datum.section(beta)
        moves.append(tab.conj_table(h)[tab.pow_table(beta)])
    active = np.zeros(tab.size, dtype=bool)
    active[datum.kernel_indices] = True
    active[0] = False
    if not active.any():
        return 0
    if not moves:
        moves = [np.arange(tab.size, dtype=np.int64)]
    return orbit_count(moves, tab.size, active)


def fibered_fixed_sums(
    group: CocycleGroup, datum: FiberedDatum, work_cap: int = BURNSIDE_WORK_CAP
) -> dict[int, int]:
    """For each unit beta mod m_act, the total fixed-point count

        sum_{h : phi(h) = r(beta)} |{x in ker(phi) - {id} : h x^beta h^-1 = x}|,

    which equals sum over x in ker(phi) - {id} of the admissible-conjugator
    count |S(x, beta)| with the phi(h) = r(beta) side condition."""
    if datum.group is not group:
        raise InconsistentDatumError("datum belongs to a different group")
    tab = group.table()
    units = numtheory.unit_residues(datum.m_act)
    kidx = datum.kernel_indices[datum.kernel_indices != 0]
    if len(kidx) == 0:
        return {beta: 0 for beta in units}
    pairs = datum.kernel_size * len(units)
    if pairs * len(kidx) > work_cap:
        raise CapExceededError(
            f"fixed-point work {pairs * len(kidx)} exceeds cap {work_cap}"
        )
    krows = tab.rows[kidx]
    inv_rows = tab.inv(tab.rows)
    out: dict[int, int] = {}
    for beta in units:
        target = datum.r_act_index(beta)
        hs = np.where(datum.phi_idx == target)[0]
        powed = tab.pow(krows, beta)
        chunk = max(1, 200_000 // max(1, len(kidx)))
        total = 0
        for start in range(0, len(hs), chunk):
            block = hs[start : start + chunk]
            left = tab.mul(tab.rows[block][:, None, :], powed[None, :, :])
            conj = tab.mul(left, inv_rows[block][:, None, :])
            total += int(np.count_nonzero(tab.index_of(conj) == kidx[None, :]))
        out[beta] = total
    return out


def fibered_b_burnside(
    group: CocycleGroup, datum: FiberedDatum, work_cap: int = BURNSIDE_WORK_CAP
) -> Fraction:
    """The same orbit count as the Burnside average of fixed points over the
    fibered product, an independent cross-check; the average is asserted to be
    an integer."""
    kidx = datum.kernel_indices[datum.kernel_indices != 0]
    if len(kidx) == 0:
        return Fraction(0)
    sums = fibered_fixed_sums(group, datum, work_cap)
    avg = Fraction(sum(sums.values()), datum.kernel_size * len(sums))
    if avg.denominator != 1:
        raise AssertionError(f"Burnside average {avg} is not an integer")
    return avg


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentReport:
    n: int
    naive_b: int
    alpha: Fraction
    fibered_b: int
    is_counterexample: bool
    margin: Fraction
    brute_checked: bool


def counterexample_report(n: int, brute_force: bool | None = None) -> ExponentReport:
    """Assemble all exponents for the odd family and compare alpha - 1 with the
    naive constant.  For n <= 3 every quantity is cross-checked by brute force;
    beyond that the closed forms are used."""
    if n < 1:
        raise ValueError("family index n must be >= 1")
    brute = (n <= 3) if brute_force is None else brute_force
    alpha = alpha_gn(n, literal_cap=3 if brute else 0)
    if alpha.denominator != 1:
        raise AssertionError("alpha is integral for this family")
    closed = closed_form_b_gn(n)
    if brute:
        group = build_gn(n)
        nb = naive_b_orbit(group)
        nf = naive_b_formula(group)
        if not (nb == nf == closed):
            raise AssertionError(
                f"naive constant mismatch at n={n}: orbit={nb} formula={nf} closed={closed}"
            )
        fib = fibered_b_orbit(group, gn_datum(n, group=group))
        if fib != alpha:
            raise AssertionError(
                f"fibered orbit count {fib} != alpha {alpha} at n={n}"
            )
    else:
        fib = int(alpha)
    naive_b = closed
    is_cx = alpha - 1 > naive_b
    return ExponentReport(
        n=n,
        naive_b=naive_b,
        alpha=alpha,
        fibered_b=int(alpha),
        is_counterexample=is_cx,
        margin=alpha - 1 - naive_b,
        brute_checked=brute,
    )


def mixed_family_probe(max_n: int = 5, burnside_max_n: int = 2) -> dict:
    """Exact naive and fibered constants for the mixed family, with the
    half-of-12^n ratio, an empirically calibrated decay envelope, and the
    minimal index where the fibered count overtakes the naive constant."""
    records = []
    for n in range(1, max_n + 1):
        group = build_mixed_example(n)
        datum = mixed_datum(n, group=group)
        naive = naive_b_orbit(group)
        fib = fibered_b_orbit(group, datum)
        rec = {"n": n, "naive_b": naive, "fibered_b": fib}
        if n <= burnside_max_n:
            burn = fibered_b_burnside(group, datum)
            if burn != fib:
                raise AssertionError(
                    f"Burnside {burn} != orbit {fib} for mixed({n})"
                )
            rec["burnside_checked"] = True
        main = Fraction(12**n, 2)
        rec["ratio_to_half_12n"] = Fraction(fib, 1) / main
        rec["deviation"] = abs(rec["ratio_to_half_12n"] - 1)
        records.append(rec)
    by_n = {r["n"]: r for r in records}
    k_base = by_n.get(2)
    envelope = None
    if k_base is not None:
        k = max(float(k_base["deviation"]) / 0.25, 1.0)
        envelope = []
        for r in records:
            if r["n"] < 2:
                continue
            bound = 5.0 * k * 0.5 ** r["n"]
            envelope.append(
                {
                    "n": r["n"],
                    "deviation": float(r["deviation"]),
                    "bound": bound,
                    "within": float(r["deviation"]) <= bound,
                }
            )
    minimal = next(
        (r["n"] for r in records if r["fibered_b"] > r["naive_b"]), None
    )
    minimal_strict = next(
        (r["n"] for r in records if r["fibered_b"] - 1 > r["naive_b"]), None
    )
    return {
        "records": records,
        "envelope_constant": None if k_base is None else k,
        "envelope": envelope,
        "minimal_n_exceeding_naive": minimal,
        "minimal_n_strictly_exceeding_naive": minimal_strict,
    }
