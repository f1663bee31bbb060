"""Dense element tables and vectorized bulk operations for small groups.

Every element of a cocycle group is a row of residues (center coordinates
first).  Because coordinates are enumerated lexicographically, the mixed-radix
value of a row *is* its index, which makes row -> index lookups pure
arithmetic.
"""

from __future__ import annotations

import numpy as np

from . import numtheory
from .errors import CapExceededError

TABLE_CAP = 2_000_000


class ElementTable:
    """All elements of a cocycle group as one (order x dim) integer matrix."""

    def __init__(self, group):
        if group.order > TABLE_CAP:
            raise CapExceededError(
                f"group of order {group.order} exceeds table cap {TABLE_CAP}"
            )
        self.group = group
        self.nc = group.center.rank
        self.na = group.base.rank
        self.dim = self.nc + self.na
        self.orders = np.array(
            group.center.orders + group.base.orders, dtype=np.int64
        )
        n = group.order
        strides = np.ones(self.dim, dtype=np.int64)
        for i in range(self.dim - 2, -1, -1):
            strides[i] = strides[i + 1] * self.orders[i + 1]
        self.strides = strides
        idx = np.arange(n, dtype=np.int64)
        rows = np.empty((n, self.dim), dtype=np.int16) if self.dim else np.empty((n, 0), np.int16)
        for i in range(self.dim):
            rows[:, i] = (idx // strides[i]) % self.orders[i]
        self.rows = rows
        self._summands = [
            (
                np.array(s.left, dtype=np.int64),
                np.array(s.right, dtype=np.int64),
                s.target,
                s.modulus,
            )
            for s in group.pairing.summands
        ]
        self._pow_tables: dict[int, np.ndarray] = {}

    @property
    def size(self) -> int:
        return len(self.rows)

    # -- element <-> row conversions ------------------------------------------

    def row_of(self, x) -> np.ndarray:
        self.group.check_element(x)
        return np.array(x.c + x.a, dtype=np.int16)

    def element_of(self, row):
        row = tuple(int(v) for v in row)
        from .group_core import GroupElement

        return GroupElement(row[: self.nc], row[self.nc :])

    def index_of_element(self, x) -> int:
        return int(self.row_of(x).astype(np.int64) @ self.strides)

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        return rows.astype(np.int64) @ self.strides

    # -- vectorized group law ----------------------------------------------------

    def _theta(self, xa: np.ndarray, ya: np.ndarray, out_shape) -> np.ndarray:
        acc = np.zeros(out_shape[:-1] + (self.nc,), dtype=np.int64)
        for left, right, target, mod in self._summands:
            lv = (xa.astype(np.int64) @ left) % mod
            rv = (ya.astype(np.int64) @ right) % mod
            acc[..., target] += lv * rv % mod
        return acc

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        y = np.atleast_2d(y)
        shape = np.broadcast_shapes(x.shape, y.shape)
        xc, xa = x[..., : self.nc], x[..., self.nc :]
        yc, ya = y[..., : self.nc], y[..., self.nc :]
        out = np.empty(shape, dtype=np.int16)
        theta = self._theta(xa, ya, shape)
        out[..., : self.nc] = (
            xc.astype(np.int64) + yc + theta
        ) % self.orders[: self.nc]
        out[..., self.nc :] = (xa.astype(np.int64) + ya) % self.orders[self.nc :]
        return out

    def inv(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        xc, xa = x[..., : self.nc], x[..., self.nc :]
        out = np.empty(x.shape, dtype=np.int16)
        a_inv = (-xa.astype(np.int64)) % self.orders[self.nc :]
        theta = self._theta(xa, a_inv, x.shape)
        out[..., : self.nc] = (-xc.astype(np.int64) - theta) % self.orders[: self.nc]
        out[..., self.nc :] = a_inv
        return out

    def pow(self, x: np.ndarray, k: int) -> np.ndarray:
        x = np.atleast_2d(x)
        if k < 0:
            return self.pow(self.inv(x), -k)
        result = np.zeros_like(x)
        sq = x
        while k:
            if k & 1:
                result = self.mul(result, sq)
            sq = self.mul(sq, sq)
            k >>= 1
        return result

    # -- permutation tables --------------------------------------------------------

    def conj_table(self, x) -> np.ndarray:
        """Index permutation g -> x g x^-1 over the whole group."""
        xr = self.row_of(x)
        xi = self.inv(xr)
        return self.index_of(self.mul(self.mul(xr, self.rows), xi))

    def pow_table(self, k: int) -> np.ndarray:
        """Index map g -> g^k over the whole group (a permutation for k coprime
        to the exponent)."""
        if k not in self._pow_tables:
            self._pow_tables[k] = self.index_of(self.pow(self.rows, k))
        return self._pow_tables[k]

    def group_exponent(self, bound: int) -> int:
        id_row = self.rows[0]
        for d in numtheory.divisors(bound):
            if np.array_equal(self.pow(self.rows, d), np.broadcast_to(id_row, self.rows.shape)):
                return d
        raise AssertionError("group exponent does not divide its certified bound")


def orbit_count(tables, n: int, active: np.ndarray) -> int:
    """Number of orbits among `active` indices under the group generated by the
    given index permutations (minimum-label propagation on the Schreier graph)."""
    labels = np.arange(n, dtype=np.int64)
    aug = []
    for t in tables:
        aug.append(t)
        inv = np.empty_like(t)
        inv[t] = np.arange(n, dtype=t.dtype)
        aug.append(inv)
    changed = True
    while changed:
        changed = False
        for t in aug:
            new = np.minimum(labels, labels[t])
            if not np.array_equal(new, labels):
                labels = new
                changed = True
        # pointer jumping accelerates convergence and cannot merge orbits
        for _ in range(2):
            labels = labels[labels]
    return int(np.unique(labels[active]).size)
