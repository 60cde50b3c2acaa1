"""Pregeometric invariants: span dimension, H-bases, and rank pairs.

Algebraic closure in this backend is linear span, so every invariant reduces
to Gaussian elimination over F_p.  The H-basis of a tuple over an
H-independent base is the unique minimal set of distinguished basis vectors
over which the tuple becomes independent from all of H; it is computed as the
coordinate support of span(tuple, base) ∩ span(H) after discounting the base.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .counting import NormalFormSet, project_solutions
from .model import DEFAULT_BUDGET, Vector, VectorHModel


def rref(vectors: Sequence[Vector], p: int) -> list[Vector]:
    """Reduced row-echelon basis of the span; canonical, zero rows dropped."""
    rows = [list(v) for v in vectors]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                c = rows[r][col] % p
                rows[r] = [(a - c * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return [tuple(row) for row in rows[:rank]]


def rank_of(model: VectorHModel, vectors: Sequence[Vector]) -> int:
    return len(rref(vectors, model.p))


def dim_over(model: VectorHModel, tup: Sequence[Vector],
             base: Sequence[Vector] = ()) -> int:
    """rank(span(tup ∪ base)) - rank(span(base))."""
    for v in list(tup) + list(base):
        if len(v) != model.d:
            raise ValueError("vector dimension mismatch")
    return rank_of(model, list(tup) + list(base)) - rank_of(model, base)


def ldim(model: VectorHModel, tup: Sequence[Vector],
         base: Sequence[Vector] = ()) -> int:
    """Dimension of the tuple over base together with all of H."""
    return dim_over(model, tup, list(base) + model.h_elements())


def check_h_independent(model: VectorHModel, vecs: Sequence[Vector]) -> bool:
    """Whether the set depends on H only through its own H-members."""
    h_part = [v for v in vecs if model.in_h(v)]
    return dim_over(model, vecs, h_part) == dim_over(model, vecs, model.h_elements())


def _h_block_intersection(model: VectorHModel,
                          vectors: Sequence[Vector]) -> list[Vector]:
    """Basis of span(vectors) ∩ span(e_1..e_h).

    Eliminate with the non-H coordinates ordered first: reduced rows whose
    pivot falls in the H block are supported entirely on the H block and span
    exactly the intersection with that coordinate subspace.
    """
    d, h = model.d, model.h
    perm = list(range(h, d)) + list(range(h))
    reordered = [tuple(v[i] for i in perm) for v in vectors]
    out = []
    for row in rref(reordered, model.p):
        pivot = next(i for i, c in enumerate(row) if c)
        if pivot >= d - h:
            orig = [0] * d
            for j, c in enumerate(row):
                orig[perm[j]] = c
            out.append(tuple(orig))
    return out


def hbasis(model: VectorHModel, tup: Sequence[Vector],
           base: Sequence[Vector] = ()) -> frozenset[int]:
    """The unique minimal S ⊆ {1..h} with
    dim_over(tup, base ∪ {e_i : i in S}) == ldim(tup, base)."""
    if not check_h_independent(model, base):
        raise ValueError("base is not H-independent")
    base_h = {i for i in range(1, model.h + 1) if model.basis(i) in set(base)}
    support: set[int] = set()
    for row in _h_block_intersection(model, list(tup) + list(base)):
        for i in range(model.h):
            if row[i] and (i + 1) not in base_h:
                support.add(i + 1)
    return frozenset(support)


def closure_with_hbasis(model: VectorHModel,
                        tup: Sequence[Vector]) -> tuple[Vector, ...]:
    """The tuple together with its H-basis vectors; the closed base used for
    relative invariants."""
    return tuple(tup) + tuple(model.basis(i) for i in sorted(hbasis(model, tup)))


def su_rank_tuple(model: VectorHModel, tup: Sequence[Vector],
                  base: Sequence[Vector] = ()) -> tuple[int, int]:
    """(large dimension, H-basis size) over an H-independent base."""
    return (ldim(model, tup, base), len(hbasis(model, tup, base)))


@dataclass(frozen=True)
class TupleProfile:
    """Per-tuple invariants over a base."""

    ldim: int
    hbasis: frozenset[int]

    @property
    def su(self) -> tuple[int, int]:
        return (self.ldim, len(self.hbasis))

    def render(self) -> str:
        hb = "{" + ",".join(str(i) for i in sorted(self.hbasis)) + "}"
        return f"ldim={self.ldim} hb={hb} su=({self.su[0]},{self.su[1]})"


def profile(model: VectorHModel, tup: Sequence[Vector],
            base: Sequence[Vector] = ()) -> TupleProfile:
    return TupleProfile(ldim(model, tup, base), hbasis(model, tup, base))


def su_rank_set(model: VectorHModel, nf: NormalFormSet,
                budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """Lexicographic maximum of su_rank_tuple over the solution set.

    Finite-scale proxy for the rank of the definable set; (0, 0) on the
    empty set.
    """
    best = (0, 0)
    for solution in project_solutions(model, nf, budget):
        best = max(best, su_rank_tuple(model, list(solution)))
    return best
