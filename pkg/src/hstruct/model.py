"""Finite vector spaces F_p^d with a distinguished independent set H.

H is always the first ``h`` standard basis vectors, which makes every
invariant computation canonical.  The canonical family member has d = 2m and
h = m.  Vectors are plain tuples of residues mod p; a packed base-p integer
encoding is available for fast dedup in the counting paths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

Vector = tuple[int, ...]

#: default cap on full-space enumerations (number of assignments visited)
DEFAULT_BUDGET = 2 ** 24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@lru_cache(maxsize=None)
def _inverse_table(p: int) -> tuple[int, ...]:
    # index 0 unused; p is prime so pow(c, p-2, p) inverts
    return (0,) + tuple(pow(c, p - 2, p) for c in range(1, p))


@dataclass(frozen=True)
class VectorHModel:
    """F_p^d with H = {e_1, ..., e_h}."""

    p: int
    d: int
    h: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"non-prime modulus p={self.p}")
        if not 1 <= self.h < self.d:
            raise ValueError(f"need 1 <= h < d, got h={self.h}, d={self.d}")

    @property
    def size(self) -> int:
        """|M| = p^d."""
        return self.p ** self.d

    @property
    def h_size(self) -> int:
        return self.h

    def zero(self) -> Vector:
        return (0,) * self.d

    def basis(self, i: int) -> Vector:
        """The standard basis vector e_i, 1-indexed."""
        if not 1 <= i <= self.d:
            raise ValueError(f"basis index {i} outside 1..{self.d}")
        return tuple(1 if j == i - 1 else 0 for j in range(self.d))

    def h_elements(self) -> list[Vector]:
        return [self.basis(i) for i in range(1, self.h + 1)]

    def in_h(self, v: Vector) -> bool:
        """Membership in the distinguished set (literal, not span)."""
        nz = [(i, c) for i, c in enumerate(v) if c]
        return len(nz) == 1 and nz[0][1] == 1 and nz[0][0] < self.h

    def inv(self, c: int) -> int:
        return _inverse_table(self.p)[c % self.p]

    def add(self, u: Vector, v: Vector) -> Vector:
        if len(u) != self.d or len(v) != self.d:
            raise ValueError("vector dimension mismatch")
        p = self.p
        return tuple((a + b) % p for a, b in zip(u, v))

    def scale(self, c: int, v: Vector) -> Vector:
        if not 0 <= c < self.p:
            raise ValueError(f"scalar {c} out of range for p={self.p}")
        if len(v) != self.d:
            raise ValueError("vector dimension mismatch")
        p = self.p
        return tuple((c * a) % p for a in v)

    def elements(self) -> Iterator[Vector]:
        """All p^d vectors; callers are responsible for budget checks."""
        return itertools.product(range(self.p), repeat=self.d)

    def pack(self, v: Vector) -> int:
        acc = 0
        for c in reversed(v):
            acc = acc * self.p + c
        return acc

    def unpack(self, key: int) -> Vector:
        out = []
        for _ in range(self.d):
            key, c = divmod(key, self.p)
            out.append(c)
        return tuple(out)


def new_model(p: int, m: int) -> VectorHModel:
    """Canonical family member: ambient dimension 2m, |H| = m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return VectorHModel(p=p, d=2 * m, h=m)
