"""Finite nilpotent groups given as central extensions by bilinear 2-cocycles.

A group here is a set of pairs (c, a) with c in an abelian group C and a in an
abelian group A, multiplied as

    (c1, a1) * (c2, a2) = (c1 + c2 + theta(a1, a2), a1 + a2),

where theta: A x A -> C is bi-additive.  Every coordinate of C and A is a
cyclic group of prime-power order, so the group splits into its Sylow
components along coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

from . import numtheory
from .errors import CapExceededError, ShapeError

DEFAULT_ELEMENT_CAP = 10_000_000


@dataclass(frozen=True)
class AbelianSpec:
    """Finite abelian group  ⊕_i Z/orders[i]Z  with elements as residue tuples."""

    orders: tuple[int, ...]

    def __post_init__(self):
        for o in self.orders:
            if not isinstance(o, int) or o < 2:
                raise ValueError(f"cyclic orders must be integers >= 2, got {o}")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return reduce(numtheory.lcm, self.orders, 1)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce_vector(self, vec) -> tuple[int, ...]:
        if len(vec) != self.rank:
            raise ShapeError(f"expected {self.rank} coordinates, got {len(vec)}")
        return tuple(v % o for v, o in zip(vec, self.orders))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((u + v) % o for u, v, o in zip(x, y, self.orders))

    def neg(self, x) -> tuple[int, ...]:
        return tuple((-u) % o for u, o in zip(x, self.orders))

    def sub(self, x, y) -> tuple[int, ...]:
        return tuple((u - v) % o for u, v, o in zip(x, y, self.orders))

    def scale(self, k: int, x) -> tuple[int, ...]:
        return tuple(k * u % o for u, o in zip(x, self.orders))

    def element_order(self, x) -> int:
        return reduce(
            numtheory.lcm, (o // math.gcd(o, u) for u, o in zip(x, self.orders)), 1
        )

    def elements(self):
        """All elements in lexicographic order (identity first)."""
        return itertools.product(*(range(o) for o in self.orders))

    def index_of(self, x) -> int:
        idx = 0
        for u, o in zip(x, self.orders):
            idx = idx * o + u
        return idx

    def basis(self) -> list[tuple[int, ...]]:
        return [
            tuple(1 if j == i else 0 for j in range(self.rank))
            for i in range(self.rank)
        ]

    def subgroup_closure(self, gens) -> frozenset:
        """The subgroup generated by `gens`, as a frozenset of tuples."""
        closed = {self.zero}
        frontier = [self.zero]
        gens = [tuple(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in closed:
                        closed.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(closed)

    def generates(self, gens) -> bool:
        return len(self.subgroup_closure(gens)) == self.size

    def subgroups(self, cap: int = 512) -> list[frozenset]:
        """All subgroups, deterministic order.  Meant for small groups only."""
        if self.size > cap:
            raise CapExceededError(
                f"subgroup lattice of a group of order {self.size} exceeds cap {cap}"
            )
        cyclics = {self.subgroup_closure([x]) for x in self.elements()}
        subs = set(cyclics)
        grown = True
        while grown:
            grown = False
            for s in list(subs):
                for c in cyclics:
                    if c <= s:
                        continue
                    j = self.subgroup_closure(list(s | c))
                    if j not in subs:
                        subs.add(j)
                        grown = True
        return sorted(subs, key=lambda s: (len(s), sorted(s)))

    def invariant_factors(self) -> tuple[int, ...]:
        """Invariant factors d_1 | d_2 | ... of the group, ascending."""
        by_prime: dict[int, list[int]] = {}
        for o in self.orders:
            fac = numtheory.factorize(o)
            for p, e in fac:
                by_prime.setdefault(p, []).append(p**e)
        for p in by_prime:
            by_prime[p].sort(reverse=True)
        depth = max((len(v) for v in by_prime.values()), default=0)
        factors = []
        for i in range(depth):
            d = 1
            for p, powers in by_prime.items():
                if i < len(powers):
                    d *= powers[i]
            factors.append(d)
        return tuple(sorted(factors))

    def prime_coordinates(self) -> dict[int, list[int]]:
        """Map prime -> list of coordinate indices of that prime power order."""
        out: dict[int, list[int]] = {}
        for i, o in enumerate(self.orders):
            fac = numtheory.factorize(o)
            if len(fac) != 1:
                raise ValueError(
                    f"coordinate order {o} is not a prime power; split it first"
                )
            out.setdefault(fac[0][0], []).append(i)
        return out


@dataclass(frozen=True)
class CocycleSummand:
    """One bilinear summand  (a, b) -> (left.a mod m) * (right.b mod m)  into a center coordinate."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    target: int
    modulus: int


@dataclass(frozen=True)
class CocyclePairing:
    """A bi-additive pairing A x A -> C given as a sum of rank-one summands."""

    summands: tuple[CocycleSummand, ...]

    def evaluate(self, a, b, center_orders) -> tuple[int, ...]:
        out = [0] * len(center_orders)
        for s in self.summands:
            lv = sum(l * u for l, u in zip(s.left, a)) % s.modulus
            rv = sum(r * v for r, v in zip(s.right, b)) % s.modulus
            out[s.target] += lv * rv % s.modulus
        return tuple(v % o for v, o in zip(out, center_orders))


@dataclass(frozen=True)
class GroupElement:
    """A pair (c, a): central part c and base part a, both residue tuples."""

    c: tuple[int, ...]
    a: tuple[int, ...]

    def __repr__(self):
        return f"({','.join(map(str, self.c))}|{','.join(map(str, self.a))})"


class CocycleGroup:
    """The central extension C x_theta A.

    The quotient map to A is element.a; the i-th central coordinate of an
    element is element.c[i] (not a homomorphism).  Mixed-order groups are
    handled through the coordinate-wise Sylow decomposition.
    """

    def __init__(
        self,
        center: AbelianSpec,
        base: AbelianSpec,
        pairing: CocyclePairing,
        name: str = "",
    ):
        self.center = center
        self.base = base
        self.pairing = _normalized_pairing(pairing, center, base)
        self.name = name or f"cocycle({list(center.orders)}x{list(base.orders)})"
        self._table = None
        self._exponent = None
        self._commutator = None

    # -- basic structure ----------------------------------------------------

    @property
    def order(self) -> int:
        return self.center.size * self.base.size

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self.center.zero, self.base.zero)

    def check_element(self, x: GroupElement) -> None:
        if len(x.c) != self.center.rank or len(x.a) != self.base.rank:
            raise ShapeError(
                f"element {x} does not fit group with center rank "
                f"{self.center.rank} and base rank {self.base.rank}"
            )

    def element(self, c, a) -> GroupElement:
        return GroupElement(self.center.reduce_vector(c), self.base.reduce_vector(a))

    def q(self, x: GroupElement) -> tuple[int, ...]:
        """Quotient map to the base group A."""
        return x.a

    def rho(self, x: GroupElement, i: int) -> int:
        """The i-th central coordinate (a set map, not a homomorphism)."""
        return x.c[i]

    # -- arithmetic ----------------------------------------------------------

    def mul(self, x: GroupElement, y: GroupElement) -> GroupElement:
        self.check_element(x)
        self.check_element(y)
        theta = self.pairing.evaluate(x.a, y.a, self.center.orders)
        c = tuple(
            (u + v + t) % o
            for u, v, t, o in zip(x.c, y.c, theta, self.center.orders)
        )
        return GroupElement(c, self.base.add(x.a, y.a))

    def inverse(self, x: GroupElement) -> GroupElement:
        self.check_element(x)
        a_inv = self.base.neg(x.a)
        theta = self.pairing.evaluate(x.a, a_inv, self.center.orders)
        c = tuple((-u - t) % o for u, t, o in zip(x.c, theta, self.center.orders))
        return GroupElement(c, a_inv)

    def power(self, x: GroupElement, k: int) -> GroupElement:
        if k < 0:
            return self.power(self.inverse(x), -k)
        result = self.identity
        sq = x
        while k:
            if k & 1:
                result = self.mul(result, sq)
            sq = self.mul(sq, sq)
            k >>= 1
        return result

    def conjugate(self, h: GroupElement, g: GroupElement) -> GroupElement:
        return self.mul(self.mul(h, g), self.inverse(h))

    def commutator(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return self.mul(
            self.mul(x, y), self.inverse(self.mul(y, x))
        )

    @property
    def exponent(self) -> int:
        """Least m with g^m = id for all g, certified over all elements."""
        if self._exponent is None:
            # g^m has central part m*c + theta(a,a)*m(m-1)/2, so the product of
            # the component exponents always kills every element.
            bound = self.base.exponent * self.center.exponent
            tab = self.table()
            self._exponent = tab.group_exponent(bound)
        return self._exponent

    def element_order(self, g: GroupElement) -> int:
        self.check_element(g)
        for d in numtheory.divisors(self.exponent):
            if self.power(g, d) == self.identity:
                return d
        raise AssertionError("element order does not divide the group exponent")

    # -- enumeration ----------------------------------------------------------

    def elements(self, cap: int = DEFAULT_ELEMENT_CAP):
        """All elements exactly once, lexicographic on the (c, a) vector."""
        if self.order > cap:
            raise CapExceededError(
                f"group of order {self.order} exceeds enumeration cap {cap}"
            )
        nc = self.center.rank
        ranges = [range(o) for o in self.center.orders + self.base.orders]
        for vec in itertools.product(*ranges):
            yield GroupElement(vec[:nc], vec[nc:])

    def generators(self) -> list[GroupElement]:
        """Standard generating set: center basis plus lifts of the base basis."""
        gens = [GroupElement(e, self.base.zero) for e in self.center.basis()]
        gens += [GroupElement(self.center.zero, e) for e in self.base.basis()]
        return gens

    def generates_abelianization(self, elements) -> bool:
        """True iff the images of `elements` in A generate A.

        For these nilpotent groups that is equivalent to the elements
        generating the whole group.
        """
        return self.base.generates([x.a for x in elements])

    # -- derived subgroups ----------------------------------------------------

    def commutator_elements(self, all_pairs_cap: int = 3000) -> frozenset:
        """The commutator subgroup as a frozenset of GroupElements.

        Brute force over all pairs up to `all_pairs_cap`; beyond that, closure
        of generator commutators (commutators land in the center, which is
        where bilinearity makes the generator set sufficient) plus a sampled
        consistency check.
        """
        if self._commutator is not None:
            return self._commutator
        if self.order <= all_pairs_cap:
            import numpy as np

            tab = self.table()
            rows = tab.rows
            seen = np.zeros(tab.size, dtype=bool)
            for i in range(tab.size):
                x = rows[i]
                xy = tab.mul(x, rows)
                yx_inv = tab.inv(tab.mul(rows, x))
                seen[tab.index_of(tab.mul(xy, yx_inv))] = True
            comms = {tab.element_of(rows[j]) for j in np.nonzero(seen)[0]}
            closed = self._closure(comms)
        else:
            gens = self.generators()
            comms = {self.commutator(x, y) for x in gens for y in gens}
            closed = self._closure(comms)
            rng = _spot_rng()
            for _ in range(200):
                x = self.random_element(rng)
                y = self.random_element(rng)
                if self.commutator(x, y) not in closed:
                    raise AssertionError(
                        "generator commutators do not close the commutator subgroup"
                    )
        self._commutator = frozenset(closed)
        return self._commutator

    def _closure(self, gens) -> set:
        closed = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in closed:
                        closed.add(y)
                        nxt.append(y)
            frontier = nxt
        return closed

    def abelianization_invariants(self) -> tuple[int, ...]:
        """Invariant factors of G / [G, G].

        Computed, not presumed: the commutator subgroup is built by closure
        first.  Supported when it is trivial or equals the full center, which
        covers every group this package constructs.
        """
        comm = self.commutator_elements()
        center_set = frozenset(
            GroupElement(c, self.base.zero) for c in self.center.elements()
        )
        if comm == center_set:
            return self.base.invariant_factors()
        if comm == frozenset({self.identity}) and not self.pairing.summands:
            # trivial pairing: the group is literally C + A
            return AbelianSpec(self.center.orders + self.base.orders).invariant_factors()
        raise NotImplementedError(
            "abelianization supported only for trivial-pairing groups or "
            "full-center commutator subgroup"
        )

    # -- Sylow decomposition ----------------------------------------------------

    def primes(self) -> list[int]:
        ps = set(self.center.prime_coordinates()) | set(self.base.prime_coordinates())
        return sorted(ps)

    def sylow_coordinates(self, p: int) -> tuple[list[int], list[int]]:
        """(center coordinate indices, base coordinate indices) of the p-part."""
        return (
            self.center.prime_coordinates().get(p, []),
            self.base.prime_coordinates().get(p, []),
        )

    def restrict_coordinates(self, c_idx, a_idx, name: str = "") -> "CocycleGroup":
        """The subgroup supported on the given center/base coordinates, as a
        cocycle group of its own.  Valid when the pairing does not connect the
        kept coordinates to the dropped ones (true for Sylow splits)."""
        center = AbelianSpec(tuple(self.center.orders[i] for i in c_idx))
        base = AbelianSpec(tuple(self.base.orders[i] for i in a_idx))
        a_keep = set(a_idx)
        summands = []
        for s in self.pairing.summands:
            if s.target not in c_idx:
                continue
            if any(
                s.left[i] % s.modulus or s.right[i] % s.modulus
                for i in range(self.base.rank)
                if i not in a_keep
            ):
                raise ShapeError("pairing crosses the coordinate restriction")
            summands.append(
                CocycleSummand(
                    tuple(s.left[i] for i in a_idx),
                    tuple(s.right[i] for i in a_idx),
                    c_idx.index(s.target),
                    s.modulus,
                )
            )
        return CocycleGroup(
            center, base, CocyclePairing(tuple(summands)), name=name or f"{self.name}|restr"
        )

    def sylow_component(self, p: int) -> "CocycleGroup":
        """The p-Sylow subgroup as a cocycle group in its own right."""
        c_idx, a_idx = self.sylow_coordinates(p)
        return self.restrict_coordinates(c_idx, a_idx, name=f"{self.name}[{p}]")

    def nonp_component(self, p: int) -> "CocycleGroup":
        """The product of the q-Sylow subgroups over primes q != p."""
        c_idx = [i for i in range(self.center.rank) if i not in self.sylow_coordinates(p)[0]]
        a_idx = [i for i in range(self.base.rank) if i not in self.sylow_coordinates(p)[1]]
        return self.restrict_coordinates(c_idx, a_idx, name=f"{self.name}[non-{p}]")

    def component_coordinates(self, p: int, complement: bool = False):
        c_p, a_p = self.sylow_coordinates(p)
        if not complement:
            return c_p, a_p
        return (
            [i for i in range(self.center.rank) if i not in c_p],
            [i for i in range(self.base.rank) if i not in a_p],
        )

    def project_to_coordinates(self, x: GroupElement, c_idx, a_idx) -> GroupElement:
        return GroupElement(
            tuple(x.c[i] for i in c_idx), tuple(x.a[i] for i in a_idx)
        )

    def embed_from_coordinates(self, xp: GroupElement, c_idx, a_idx) -> GroupElement:
        c = [0] * self.center.rank
        a = [0] * self.base.rank
        for v, i in zip(xp.c, c_idx):
            c[i] = v
        for v, i in zip(xp.a, a_idx):
            a[i] = v
        return GroupElement(tuple(c), tuple(a))

    @property
    def sylow_components(self) -> list["CocycleGroup"]:
        return [self.sylow_component(p) for p in self.primes()]

    # -- misc -------------------------------------------------------------------

    def random_element(self, rng) -> GroupElement:
        c = tuple(rng.randrange(o) for o in self.center.orders)
        a = tuple(rng.randrange(o) for o in self.base.orders)
        return GroupElement(c, a)

    def table(self):
        """The cached dense element table used for bulk scans."""
        if self._table is None:
            from .bulk import ElementTable

            self._table = ElementTable(self)
        return self._table

    def __repr__(self):
        return f"<CocycleGroup {self.name} order={self.order}>"

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "center_orders": list(self.center.orders),
            "base_orders": list(self.base.orders),
            "pairing": [
                {
                    "left": list(s.left),
                    "right": list(s.right),
                    "target": s.target,
                    "modulus": s.modulus,
                }
                for s in self.pairing.summands
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CocycleGroup":
        summands = tuple(
            CocycleSummand(
                tuple(s["left"]), tuple(s["right"]), s["target"], s["modulus"]
            )
            for s in data.get("pairing", [])
        )
        return cls(
            AbelianSpec(tuple(data["center_orders"])),
            AbelianSpec(tuple(data["base_orders"])),
            CocyclePairing(summands),
            name=data.get("name", ""),
        )


def _normalized_pairing(
    pairing: CocyclePairing, center: AbelianSpec, base: AbelianSpec
) -> CocyclePairing:
    """Validate shapes and the wrap condition that makes each summand bi-additive."""
    out = []
    for s in pairing.summands:
        if len(s.left) != base.rank or len(s.right) != base.rank:
            raise ShapeError("pairing functional length does not match base rank")
        if not 0 <= s.target < center.rank:
            raise ShapeError(f"pairing target {s.target} out of range")
        if s.modulus != center.orders[s.target]:
            raise ShapeError(
                "summand modulus must equal the order of its target coordinate"
            )
        for coef, o in zip(s.left + s.right, base.orders + base.orders):
            if coef * o % s.modulus:
                raise ShapeError(
                    "pairing coefficient breaks bi-additivity "
                    f"(coef {coef} on Z/{o} into Z/{s.modulus})"
                )
        out.append(
            CocycleSummand(
                tuple(c % s.modulus for c in s.left),
                tuple(c % s.modulus for c in s.right),
                s.target,
                s.modulus,
            )
        )
    return CocyclePairing(tuple(out))


def _spot_rng():
    import random

    return random.Random(0x5EED)


# -- builders -----------------------------------------------------------------


def build_gn(n: int) -> CocycleGroup:
    """The odd family: center (Z/3)^n, base Z/3 + (Z/9)^n, order 3^(3n+1).

    Base coordinate 0 is the order-3 factor; coordinates 1..n are the order-9
    factors.  The pairing sends (a, b) to (a_0 * (b_i mod 3))_i.
    """
    if n < 1:
        raise ValueError("family index n must be >= 1")
    center = AbelianSpec((3,) * n)
    base = AbelianSpec((3,) + (9,) * n)
    e = lambda i: tuple(1 if j == i else 0 for j in range(n + 1))
    summands = tuple(
        CocycleSummand(e(0), e(i), i - 1, 3) for i in range(1, n + 1)
    )
    return CocycleGroup(center, base, CocyclePairing(summands), name=f"gn({n})")


def build_mixed_example(n: int) -> CocycleGroup:
    """The mixed family: center (Z/2)^n, base (Z/2)^(n+1) + (Z/3)^n.

    The pairing lives entirely on the order-2 coordinates; the 3-Sylow
    component is elementary abelian.
    """
    if n < 1:
        raise ValueError("family index n must be >= 1")
    center = AbelianSpec((2,) * n)
    base = AbelianSpec((2,) * (n + 1) + (3,) * n)
    rank = 2 * n + 1
    e = lambda i: tuple(1 if j == i else 0 for j in range(rank))
    summands = tuple(
        CocycleSummand(e(0), e(i), i - 1, 2) for i in range(1, n + 1)
    )
    return CocycleGroup(center, base, CocyclePairing(summands), name=f"mixed({n})")


def abelian_as_cocycle_group(orders, name: str = "") -> CocycleGroup:
    """An abelian group as a cocycle group with empty center and trivial pairing."""
    return CocycleGroup(
        AbelianSpec(()),
        AbelianSpec(tuple(orders)),
        CocyclePairing(()),
        name=name or f"abelian{list(orders)}",
    )
