"""Small integer-arithmetic helpers."""

from __future__ import annotations

import math
from functools import lru_cache


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return a * b // math.gcd(a, b)


@lru_cache(maxsize=4096)
def factorize(m: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization by trial division, as ((p, e), ...) with p ascending."""
    if m < 1:
        raise ValueError(f"cannot factorize {m}")
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def divisors(m: int) -> list[int]:
    """All positive divisors of m, ascending."""
    divs = [1]
    for p, e in factorize(m):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def totient(m: int) -> int:
    t = 1
    for p, e in factorize(m):
        t *= (p - 1) * p ** (e - 1)
    return t


def unit_residues(m: int) -> list[int]:
    """Residues of (Z/mZ)^*, ascending.  For m = 1 this is [0]."""
    if m == 1:
        return [0]
    return [a for a in range(1, m) if math.gcd(a, m) == 1]


def unit_generators(m: int) -> list[int]:
    """A small generating set of (Z/mZ)^*, found greedily."""
    units = unit_residues(m)
    if len(units) <= 1:
        return []
    identity = 1 % m
    gens: list[int] = []
    closed = {identity}
    for a in units:
        if a in closed:
            continue
        gens.append(a)
        frontier = list(closed)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x * g % m
                    if y not in closed:
                        closed.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


def crt_lift(r1: int, m1: int, r2: int, m2: int) -> int:
    """The residue mod m1*m2 matching r1 mod m1 and r2 mod m2 (coprime moduli)."""
    if math.gcd(m1, m2) != 1:
        raise ValueError("moduli must be coprime")
    if m1 == 1:
        return r2 % m2
    if m2 == 1:
        return r1 % m1
    inv = pow(m1, -1, m2)
    return (r1 + (r2 - r1) * inv % m2 * m1) % (m1 * m2)
