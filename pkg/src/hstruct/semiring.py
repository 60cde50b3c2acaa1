"""Ordered semiring of dimension-measure triples (n, k, mu).

Addition keeps the operand of lexicographically larger dimension pair and adds
measures on ties; multiplication adds dimension pairs componentwise and
multiplies measures.  (0,0,0) is neutral for addition and absorbing for
multiplication, (0,0,1) is neutral for multiplication, and the order is the
lexicographic order on triples.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

Measure = Fraction | float


def _is_integral(mu: Measure) -> bool:
    if isinstance(mu, Fraction):
        return mu.denominator == 1
    return float(mu).is_integer()


@dataclass(frozen=True)
class DimMeasure:
    """A triple (n, k, mu): dimension pair plus a nonnegative measure.

    ``mu`` is kept as an exact ``Fraction`` when it came from exact counts and
    as a ``float`` when it is a fitted estimate.  Valid triples either have a
    positive measure, or dimension (0,0) with an integral measure (the
    cardinality of a finite set; (0,0,0) stands for the empty set).
    """

    n: int
    k: int
    mu: Measure

    def __post_init__(self):
        if self.n < 0 or self.k < 0:
            raise ValueError(f"negative dimension pair ({self.n},{self.k})")
        if self.mu < 0:
            raise ValueError(f"negative measure {self.mu}")
        if (self.n, self.k) != (0, 0):
            if self.mu <= 0:
                raise ValueError("measure must be positive when (n,k) != (0,0)")
        elif not _is_integral(self.mu):
            raise ValueError("dimension (0,0) requires an integral measure")

    @property
    def dim(self) -> tuple[int, int]:
        return (self.n, self.k)

    def render(self) -> str:
        """Textual form ``(n,k;mu)``; rational measures round-trip bit-exactly."""
        return f"({self.n},{self.k};{self.mu!r})" if isinstance(self.mu, float) \
            else f"({self.n},{self.k};{self.mu})"

    def __str__(self) -> str:
        return self.render()


ZERO = DimMeasure(0, 0, Fraction(0))
ONE = DimMeasure(0, 0, Fraction(1))

_RENDER_RE = re.compile(r"^\((\d+),(\d+);([^)]+)\)$")


def parse_dim_measure(text: str) -> DimMeasure:
    """Inverse of :meth:`DimMeasure.render`."""
    m = _RENDER_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a dimension-measure triple: {text!r}")
    raw = m.group(3)
    mu: Measure
    if "." in raw or "e" in raw or "inf" in raw or "nan" in raw:
        mu = float(raw)
    else:
        mu = Fraction(raw)
    return DimMeasure(int(m.group(1)), int(m.group(2)), mu)


def oplus(a: DimMeasure, b: DimMeasure) -> DimMeasure:
    """Semiring addition: lexicographic max on dimensions, measures add on ties."""
    if a.dim < b.dim:
        return b
    if b.dim < a.dim:
        return a
    return DimMeasure(a.n, a.k, a.mu + b.mu)


def odot(a: DimMeasure, b: DimMeasure) -> DimMeasure:
    """Semiring product: dimensions add componentwise, measures multiply."""
    if a.mu == 0 or b.mu == 0:
        return ZERO
    return DimMeasure(a.n + b.n, a.k + b.k, a.mu * b.mu)


def compare(a: DimMeasure, b: DimMeasure) -> int:
    """Lexicographic comparison of (n, k, mu); returns -1, 0, or 1."""
    left = (a.n, a.k, a.mu)
    right = (b.n, b.k, b.mu)
    if left < right:
        return -1
    if left > right:
        return 1
    return 0


def leq(a: DimMeasure, b: DimMeasure) -> bool:
    return compare(a, b) <= 0


def random_triple(rng: random.Random, max_dim: int = 4, max_den: int = 8) -> DimMeasure:
    """Random valid triple with an exact rational measure."""
    n = rng.randrange(max_dim + 1)
    k = rng.randrange(max_dim + 1)
    if (n, k) == (0, 0):
        return DimMeasure(0, 0, Fraction(rng.randrange(6)))
    mu = Fraction(rng.randrange(1, 12), rng.randrange(1, max_den + 1))
    return DimMeasure(n, k, mu)


@dataclass
class SuiteReport:
    """Outcome of the randomized algebraic-law suite."""

    trials: int
    seed: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def run_law_suite(trials: int = 1000, seed: int = 0) -> SuiteReport:
    """Check commutativity, associativity, distributivity, identities,
    absorption, order monotonicity and closure on random triples.

    All arithmetic is exact, so any failure is reported with zero tolerance.
    """
    rng = random.Random(seed)
    report = SuiteReport(trials=trials, seed=seed)

    def check(name: str, cond: bool, a, b, c):
        if not cond:
            report.failures.append(f"{name}: a={a} b={b} c={c}")

    for _ in range(trials):
        a = random_triple(rng)
        b = random_triple(rng)
        c = random_triple(rng)
        check("oplus commutative", oplus(a, b) == oplus(b, a), a, b, c)
        check("odot commutative", odot(a, b) == odot(b, a), a, b, c)
        check("oplus associative",
              oplus(oplus(a, b), c) == oplus(a, oplus(b, c)), a, b, c)
        check("odot associative",
              odot(odot(a, b), c) == odot(a, odot(b, c)), a, b, c)
        check("distributivity",
              odot(oplus(a, b), c) == oplus(odot(a, c), odot(b, c)), a, b, c)
        check("oplus identity", oplus(a, ZERO) == a, a, b, c)
        check("odot identity", odot(a, ONE) == a, a, b, c)
        check("odot absorbing", odot(a, ZERO) == ZERO, a, b, c)
        lo, hi = (a, b) if leq(a, b) else (b, a)
        check("oplus monotone", leq(oplus(lo, c), oplus(hi, c)), a, b, c)
        check("odot monotone", leq(odot(lo, c), odot(hi, c)), a, b, c)
        for value in (oplus(a, b), odot(a, b)):
            try:
                DimMeasure(value.n, value.k, value.mu)
            except ValueError as exc:
                report.failures.append(f"closure: {value} invalid ({exc})")
    return report
