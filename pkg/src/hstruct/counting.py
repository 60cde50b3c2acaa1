"""Exact satisfying-assignment counting over VectorHModel.

Two counting strategies with identical results:

* full enumeration over M^|frees| (guarded by a work budget), and
* H-first counting for sets of the shape "exists z1..zk in H, matrix":
  enumerate z-tuples over H, solve the matrix for the free variables when it
  is a boolean combination of linear equations that determines them, and
  count the deduplicated solution collection.

Disjunctions on the H-first path are handled by collecting explicit solution
sets per disjunct, so overlaps dedup exactly.  A third helper counts
quantifier-free boolean combinations of linear equations over the full space
by inclusion-exclusion on affine solution counts; it never enumerates and so
works at any model size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BudgetExceededError, NotLinearError
from .logic import (And, Eq, Exists, Formula, Implies, InH, Not, Or, Term,
                    _eval, all_vars, free_vars, is_l_formula,
                    is_quantifier_free, rename_free_vars, validate_for_model,
                    walk)
from .model import DEFAULT_BUDGET, Vector, VectorHModel


@dataclass(frozen=True)
class NormalFormSet:
    """The definable set { x̄ : exists z̄ in H^k, matrix(x̄, z̄) }."""

    free_vars: tuple[str, ...]
    h_vars: tuple[str, ...]
    matrix: Formula

    def __post_init__(self):
        if not is_l_formula(self.matrix):
            raise ValueError("normal-form matrix must not mention H")
        if set(self.free_vars) & set(self.h_vars):
            raise ValueError("free and H-bound variables overlap")
        extra = set(free_vars(self.matrix)) - set(self.free_vars) - set(self.h_vars)
        if extra:
            raise ValueError(f"matrix mentions undeclared variables {sorted(extra)}")

    @property
    def h_arity(self) -> int:
        return len(self.h_vars)

    def to_formula(self) -> Formula:
        body = self.matrix
        for v in reversed(self.h_vars):
            body = Exists(v, True, body)
        return body


def to_normal_form(f: Formula,
                   frees: tuple[str, ...] | None = None) -> NormalFormSet | None:
    """Extract an existential-H shape, or None when the formula has none.

    Positive InH atoms are rewritten as fresh H-bound existentials and
    H-existentials are pulled out through &, | and the right side of ->.
    Pulled binders are renamed _h1, _h2, ... left to right.
    """
    if frees is None:
        frees = free_vars(f)
    used = set(all_vars(f)) | set(frees)
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = f"_h{next(counter)}"
            if name not in used:
                used.add(name)
                return name

    def pull(node: Formula) -> tuple[list[str], Formula] | None:
        if is_l_formula(node):
            return [], node
        if isinstance(node, Exists) and node.over_h:
            w = fresh()
            body = node.body
            if node.var != w:
                body = rename_free_vars(body, {node.var: w})
            inner = pull(body)
            if inner is None:
                return None
            hv, core = inner
            return [w] + hv, core
        if isinstance(node, InH):
            w = fresh()
            return [w], Eq(Term.var(w), node.term)
        if isinstance(node, (And, Or)):
            left = pull(node.lhs)
            if left is None:
                return None
            right = pull(node.rhs)
            if right is None:
                return None
            return left[0] + right[0], type(node)(left[1], right[1])
        if isinstance(node, Implies) and is_l_formula(node.lhs):
            inner = pull(node.rhs)
            if inner is None:
                return None
            hv, core = inner
            return hv, Implies(node.lhs, core)
        return None

    result = pull(f)
    if result is None:
        return None
    h_vars, matrix = result
    return NormalFormSet(tuple(frees), tuple(h_vars), matrix)


# ---------------------------------------------------------------------------
# linear algebra over F_p on small scalar systems

def _rref_with_transform(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[list[int]], int]:
    """Return (E, T, rank) with T·rows = E in reduced row-echelon form."""
    s = len(rows)
    ncols = len(rows[0]) if rows else 0
    e = [list(r) for r in rows]
    t = [[1 if i == j else 0 for j in range(s)] for i in range(s)]
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, s) if e[r][col] % p), None)
        if pivot is None:
            continue
        e[rank], e[pivot] = e[pivot], e[rank]
        t[rank], t[pivot] = t[pivot], t[rank]
        inv = pow(e[rank][col], p - 2, p)
        e[rank] = [(x * inv) % p for x in e[rank]]
        t[rank] = [(x * inv) % p for x in t[rank]]
        for r in range(s):
            if r != rank and e[r][col] % p:
                c = e[r][col] % p
                e[r] = [(a - c * b) % p for a, b in zip(e[r], e[rank])]
                t[r] = [(a - c * b) % p for a, b in zip(t[r], t[rank])]
        rank += 1
    return e, t, rank


@dataclass(frozen=True)
class _LinearRow:
    """One vector equation sum(xc·x) + sum(zc·z) + const = 0."""

    xc: tuple[int, ...]
    zc: tuple[int, ...]
    const: tuple[tuple[int, int], ...]  # (coordinate, value) pairs


def _linear_row(eq: Eq, x_vars: tuple[str, ...], z_vars: tuple[str, ...],
                model: VectorHModel) -> _LinearRow:
    p = model.p
    coeffs: dict[str, int] = {}
    const: dict[int, int] = {}
    for term, sign in ((eq.lhs, 1), (eq.rhs, -1)):
        for v, c in term.coeffs:
            coeffs[v] = (coeffs.get(v, 0) + sign * c) % p
        for key, c in term.consts:
            index = model.h + 1 if key == "g" else key
            coord = index - 1
            const[coord] = (const.get(coord, 0) + sign * c) % p
    known = set(x_vars) | set(z_vars)
    if any(v not in known and c for v, c in coeffs.items()):
        raise NotLinearError("equation mentions an unknown variable")
    return _LinearRow(
        xc=tuple(coeffs.get(v, 0) for v in x_vars),
        zc=tuple(coeffs.get(v, 0) for v in z_vars),
        const=tuple(sorted((k, v) for k, v in const.items() if v)),
    )


def _dnf(f: Formula, cap: int = 128) -> list[tuple[list[Eq], list[Eq]]]:
    """Disjunctive normal form as (positive, negated) equation lists."""

    def nnf(node: Formula, positive: bool) -> Formula:
        if isinstance(node, Eq):
            return node if positive else Not(node)
        if isinstance(node, Not):
            return nnf(node.body, not positive)
        if isinstance(node, And):
            cls = And if positive else Or
            return cls(nnf(node.lhs, positive), nnf(node.rhs, positive))
        if isinstance(node, Or):
            cls = Or if positive else And
            return cls(nnf(node.lhs, positive), nnf(node.rhs, positive))
        if isinstance(node, Implies):
            return nnf(Or(Not(node.lhs), node.rhs), positive)
        raise NotLinearError(f"not a boolean combination of equations: {type(node).__name__}")

    def expand(node: Formula) -> list[tuple[list[Eq], list[Eq]]]:
        if isinstance(node, Eq):
            return [([node], [])]
        if isinstance(node, Not):
            return [([], [node.body])]
        if isinstance(node, Or):
            return expand(node.lhs) + expand(node.rhs)
        # And
        out = []
        for pl, nl in expand(node.lhs):
            for pr, nr in expand(node.rhs):
                out.append((pl + pr, nl + nr))
                if len(out) > cap:
                    raise NotLinearError("DNF blowup")
        return out

    return expand(nnf(f, True))


class _DisjunctSolver:
    """Solves one DNF disjunct for the free variables, given an H-tuple.

    Requires the positive equations to determine the free variables; the
    coefficient matrix does not depend on the H-tuple, so its reduction is
    done once and each H-tuple costs only a sparse back-substitution.
    """

    def __init__(self, model: VectorHModel, x_vars: tuple[str, ...],
                 z_vars: tuple[str, ...], pos: list[Eq], neg: list[Eq]):
        self.model = model
        self.n = len(x_vars)
        rows = [_linear_row(eq, x_vars, z_vars, model) for eq in pos]
        a = [list(r.xc) for r in rows]
        e, t, rank = _rref_with_transform(a, model.p)
        if rank < self.n:
            raise NotLinearError("matrix does not determine the free variables")
        self.rows = rows
        self.t = t
        self.s = len(rows)
        self.neg = [_linear_row(eq, x_vars, z_vars, model) for eq in neg]
        self.powers = [model.p ** i for i in range(model.d)]

    def _rhs(self, z_coords: tuple[int, ...]) -> list[dict[int, int]]:
        p = self.model.p
        out = []
        for row in self.rows:
            acc: dict[int, int] = {}
            for j, coord in enumerate(z_coords):
                c = row.zc[j]
                if c:
                    acc[coord] = (acc.get(coord, 0) + c) % p
            for coord, c in row.const:
                acc[coord] = (acc.get(coord, 0) + c) % p
            out.append({coord: (-v) % p for coord, v in acc.items() if v % p})
        return out

    def solve(self, z_coords: tuple[int, ...]) -> tuple[int, ...] | None:
        """Packed solution tuple for the free variables, or None."""
        p = self.model.p
        rhs = self._rhs(z_coords)
        reduced: list[dict[int, int]] = []
        for i in range(self.s):
            acc: dict[int, int] = {}
            ti = self.t[i]
            for l in range(self.s):
                c = ti[l]
                if c:
                    for coord, val in rhs[l].items():
                        acc[coord] = (acc.get(coord, 0) + c * val) % p
            reduced.append({k: v for k, v in acc.items() if v})
        for i in range(self.n, self.s):
            if reduced[i]:
                return None
        solution = reduced[: self.n]
        for row in self.neg:
            acc = {}
            for j, c in enumerate(row.xc):
                if c:
                    for coord, val in solution[j].items():
                        acc[coord] = (acc.get(coord, 0) + c * val) % p
            for j, coord in enumerate(z_coords):
                c = row.zc[j]
                if c:
                    acc[coord] = (acc.get(coord, 0) + c) % p
            for coord, c in row.const:
                acc[coord] = (acc.get(coord, 0) + c) % p
            if not any(v % p for v in acc.values()):
                return None  # negated equation holds
        return tuple(
            sum(val * self.powers[coord] for coord, val in sol.items())
            for sol in solution
        )


def _h_first_solutions(model: VectorHModel, nf: NormalFormSet,
                       budget: int) -> tuple[set[tuple[int, ...]], int]:
    """All solutions as packed tuples, plus the number of witnessing H-tuples."""
    k = nf.h_arity
    work = model.h ** k
    if work > budget:
        raise BudgetExceededError(f"H^{k} enumeration of size {work} exceeds budget {budget}")
    solvers = [
        _DisjunctSolver(model, nf.free_vars, nf.h_vars, pos, neg)
        for pos, neg in _dnf(nf.matrix)
    ]
    solutions: set[tuple[int, ...]] = set()
    witnesses = 0
    for z_coords in itertools.product(range(model.h), repeat=k):
        hit = False
        for solver in solvers:
            key = solver.solve(z_coords)
            if key is not None:
                solutions.add(key)
                hit = True
        if hit:
            witnesses += 1
    return solutions, witnesses


def count_h_first(model: VectorHModel, nf: NormalFormSet,
                  budget: int = DEFAULT_BUDGET) -> int:
    validate_for_model(nf.matrix, model)
    solutions, _ = _h_first_solutions(model, nf, budget)
    return len(solutions)


def h_witness_count(model: VectorHModel, nf: NormalFormSet,
                    budget: int = DEFAULT_BUDGET) -> int:
    """|{ z̄ in H^k : exists x̄ with matrix(x̄, z̄) }| on the H-first path."""
    validate_for_model(nf.matrix, model)
    _, witnesses = _h_first_solutions(model, nf, budget)
    return witnesses


def project_solutions(model: VectorHModel, nf: NormalFormSet,
                      budget: int = DEFAULT_BUDGET) -> list[tuple[Vector, ...]]:
    """The solution set as explicit deduplicated tuples, canonically ordered."""
    validate_for_model(nf.matrix, model)
    try:
        keys, _ = _h_first_solutions(model, nf, budget)
        return [tuple(model.unpack(part) for part in key) for key in sorted(keys)]
    except NotLinearError:
        pass
    formula = nf.to_formula()
    found: set[tuple[int, ...]] = set()
    for assignment in _assignments(model, nf.free_vars, budget):
        if _eval(model, formula, assignment, budget):
            found.add(tuple(model.pack(assignment[v]) for v in nf.free_vars))
    return [tuple(model.unpack(part) for part in key) for key in sorted(found)]


# ---------------------------------------------------------------------------
# linear counting over the full space (no H)

def _affine_count(model: VectorHModel, rows: list[_LinearRow], nvars: int) -> int:
    p = model.p
    a = [list(r.xc) for r in rows]
    _, t, rank = _rref_with_transform(a, p)
    s = len(rows)
    for i in range(rank, s):
        acc: dict[int, int] = {}
        for l in range(s):
            c = t[i][l]
            if c:
                for coord, val in rows[l].const:
                    acc[coord] = (acc.get(coord, 0) + c * val) % p
        if any(v % p for v in acc.values()):
            return 0
    return p ** (model.d * (nvars - rank))


def count_linear(model: VectorHModel, f: Formula, frees: tuple[str, ...],
                 max_atoms: int = 8) -> int:
    """Exact count of a quantifier-free L-formula by inclusion-exclusion.

    Works at any model size; raises NotLinearError when the formula is not a
    small boolean combination of linear equations.
    """
    if not (is_l_formula(f) and is_quantifier_free(f)):
        raise NotLinearError("not a quantifier-free L-formula")
    atoms: list[Eq] = []
    seen = set()
    for node in walk(f):
        if isinstance(node, Eq) and node not in seen:
            seen.add(node)
            atoms.append(node)
    if len(atoms) > max_atoms:
        raise NotLinearError(f"too many atoms ({len(atoms)})")
    rows = {eq: _linear_row(eq, frees, (), model) for eq in atoms}

    def truth(node: Formula, values: dict[Eq, bool]) -> bool:
        if isinstance(node, Eq):
            return values[node]
        if isinstance(node, Not):
            return not truth(node.body, values)
        if isinstance(node, And):
            return truth(node.lhs, values) and truth(node.rhs, values)
        if isinstance(node, Or):
            return truth(node.lhs, values) or truth(node.rhs, values)
        if isinstance(node, Implies):
            return (not truth(node.lhs, values)) or truth(node.rhs, values)
        raise NotLinearError("unexpected node")

    total = 0
    nvars = len(frees)
    for bits in itertools.product((True, False), repeat=len(atoms)):
        values = dict(zip(atoms, bits))
        if not truth(f, values):
            continue
        pos = [rows[eq] for eq, b in values.items() if b]
        neg = [rows[eq] for eq, b in values.items() if not b]
        # region count |pos & not(neg)| by inclusion-exclusion over neg
        for r in range(len(neg) + 1):
            for extra in itertools.combinations(neg, r):
                total += (-1) ** r * _affine_count(model, pos + list(extra), nvars)
    return total


# ---------------------------------------------------------------------------
# enumeration and the public dispatcher

def _assignments(model: VectorHModel, frees: tuple[str, ...], budget: int):
    total = model.size ** len(frees)
    if total > budget:
        raise BudgetExceededError(
            f"enumeration of {total} assignments exceeds budget {budget}")
    universe = list(model.elements())
    for combo in itertools.product(universe, repeat=len(frees)):
        yield dict(zip(frees, combo))


def count_enumerate(model: VectorHModel, f: Formula, frees: tuple[str, ...],
                    budget: int = DEFAULT_BUDGET) -> int:
    validate_for_model(f, model)
    return sum(
        1 for assignment in _assignments(model, frees, budget)
        if _eval(model, f, assignment, budget)
    )


def count(model: VectorHModel, f: Formula, frees: tuple[str, ...] | list[str],
          budget: int = DEFAULT_BUDGET) -> int:
    """Exact number of satisfying assignments of ``f`` over ``frees``.

    Strategy order: complement rule for outer negations, H-first linear
    solving, linear inclusion-exclusion, full enumeration (budget-guarded).
    """
    frees = tuple(frees)
    missing = set(free_vars(f)) - set(frees)
    if missing:
        raise ValueError(f"frees must cover free variables, missing {sorted(missing)}")
    validate_for_model(f, model)
    return _count(model, f, frees, budget)


def _count(model: VectorHModel, f: Formula, frees: tuple[str, ...],
           budget: int) -> int:
    used = tuple(v for v in frees if v in free_vars(f))
    if len(used) < len(frees):
        return _count(model, f, used, budget) * model.size ** (len(frees) - len(used))
    if isinstance(f, Not):
        return model.size ** len(frees) - _count(model, f.body, frees, budget)
    nf = to_normal_form(f, frees)
    if nf is not None:
        try:
            return count_h_first(model, nf, budget)
        except NotLinearError:
            pass
    try:
        return count_linear(model, f, frees)
    except NotLinearError:
        pass
    return count_enumerate(model, f, frees, budget)
