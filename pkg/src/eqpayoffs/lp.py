"""Exact rational linear programming.

The solver is a two-phase primal simplex over an integer tableau: every row
is kept as a primitive integer equation, so pivots only multiply and subtract
Python ints and divide by a row gcd.  Bland's rule is the default pivot rule.

Every solve returns a certificate that :func:`check_certificate` re-verifies
from the original data:

* optimal -- a dual vector ``y`` with ``b.y == c.x``;
* infeasible -- a Farkas vector ``y`` with ``A^T y >= 0`` and ``b.y < 0``;
* unbounded -- a feasible point and a ray ``d`` with ``c.d > 0``.

Certificates always refer to the maximisation form: for a minimisation
problem they certify ``max(-c.x)``.

Solutions are whatever vertex Bland's rule reaches from the slack basis, so
``max x + y s.t. x + y <= 1`` returns ``(1, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from eqpayoffs.core import rational

LE, EQ, GE = "<=", "=", ">="
_RHS = -1

Row = tuple[tuple[int, Fraction], ...]


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _sparse(row: Mapping[int, object] | Sequence[object]) -> Row:
    if isinstance(row, Mapping):
        items = row.items()
    elif row and isinstance(row[0], tuple):
        items = row
    else:
        items = enumerate(row)
    merged: dict[int, Fraction] = {}
    for j, v in items:
        merged[int(j)] = merged.get(int(j), Fraction(0)) + rational(v)
    return tuple(sorted((j, v) for j, v in merged.items() if v))


@dataclass(frozen=True)
class LinearProgram:
    """``max (or min) c.x`` subject to ``A x (rel) b``.

    Rows of ``matrix`` are sparse ``(column, coefficient)`` tuples; dense
    sequences and dicts are accepted and converted.  ``lower_bounds`` holds 0
    or ``None`` (free) per variable.
    """

    objective: tuple[Fraction, ...]
    matrix: tuple[Row, ...]
    relations: tuple[str, ...]
    rhs: tuple[Fraction, ...]
    lower_bounds: tuple[Fraction | None, ...] | None = None
    maximize: bool = True

    def __post_init__(self) -> None:
        c = tuple(rational(v) for v in self.objective)
        rows = tuple(_sparse(r) for r in self.matrix)
        rel = tuple(self.relations)
        b = tuple(rational(v) for v in self.rhs)
        lb = self.lower_bounds
        lb = tuple(Fraction(0) for _ in c) if lb is None else tuple(
            None if v is None else rational(v) for v in lb
        )
        if not (len(rows) == len(rel) == len(b)):
            raise ValueError("matrix, relations and rhs disagree in length")
        if len(lb) != len(c):
            raise ValueError("one lower bound per variable is required")
        if any(v not in (None, 0) for v in lb):
            raise ValueError("lower bounds must be 0 or None")
        if any(r not in (LE, EQ, GE) for r in rel):
            raise ValueError(f"unknown relation in {rel}")
        if any(j < 0 or j >= len(c) for row in rows for j, _ in row):
            raise ValueError("constraint refers to a missing variable")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "lower_bounds", lb)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def free(self) -> tuple[int, ...]:
        return tuple(j for j, v in enumerate(self.lower_bounds) if v is None)


@dataclass(frozen=True)
class LPResult:
    status: Status
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None
    dual: tuple[Fraction, ...] | None = None
    farkas: tuple[Fraction, ...] | None = None
    ray: tuple[Fraction, ...] | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class SimplexRegion:
    """Feasible region of an LP, kept in tableau form for repeated solves.

    Phase 1 runs once at construction; every :meth:`maximize` call starts
    phase 2 from the basis left by the previous call.  Instances mutate on
    every solve and must not be shared between threads.

    ``columns`` restricts the tableau to a working set of structural
    columns (``None`` keeps all of them).  The rest are priced exactly
    against the current duals after each restricted solve and brought in
    when they improve, so results and certificates are those of the full
    LP.  This pays off when optimal vertices have small supports.
    """

    def __init__(
        self,
        num_vars: int,
        rows: Sequence[Row | Mapping[int, object] | Sequence[object]],
        relations: Sequence[str],
        rhs: Sequence[object],
        free: Iterable[int] = (),
        rule: str = "bland",
        columns: Iterable[int] | None = None,
        batch: int = 12,
    ) -> None:
        if rule not in ("bland", "dantzig"):
            raise ValueError(f"unknown pivot rule {rule!r}")
        self.rule = rule
        self.batch = batch
        self.num_vars = num_vars
        self.free = tuple(sorted(set(free)))
        self.pivots = 0
        self._neg_col = {j: num_vars + k for k, j in enumerate(self.free)}
        ncols = num_vars + len(self.free)
        self.num_structural = ncols

        if columns is None:
            working = set(range(ncols))
        else:
            working = set()
            for j in columns:
                working.add(j)
                if j in self._neg_col:
                    working.add(self._neg_col[j])
        self.working = working

        # column-wise copy of the scaled constraint matrix, used for pricing
        self.colmap: list[list[tuple[int, int]]] = [[] for _ in range(ncols)]
        self.row_scale: list[int] = []
        relations = list(relations)
        rhs = [rational(v) for v in rhs]
        pending = []
        for r, (row, rel, b) in enumerate(zip(rows, relations, rhs)):
            items = _sparse(row)
            scale = math.lcm(b.denominator, *(v.denominator for _, v in items))
            if b < 0 or (b == 0 and rel == GE):
                scale = -scale
                rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            full: dict[int, int] = {}
            for j, v in items:
                iv = int(v * scale)
                full[j] = full.get(j, 0) + iv
                if j in self._neg_col:
                    full[self._neg_col[j]] = full.get(self._neg_col[j], 0) - iv
            eq = {}
            for j, v in full.items():
                if v:
                    self.colmap[j].append((r, v))
                    if j in working:
                        eq[j] = v
            if b:
                eq[_RHS] = int(b * scale)
            pending.append((eq, rel))
            self.row_scale.append(scale)

        # slack / surplus columns, then artificials
        self.id_col: list[int] = []
        self.basis: list[int] = []
        artificial_rows = []
        col = ncols
        for r, (eq, rel) in enumerate(pending):
            if rel == LE:
                eq[col] = 1
                self.id_col.append(col)
                self.basis.append(col)
                col += 1
            elif rel == GE:
                eq[col] = -1
                col += 1
                self.id_col.append(-1)
                self.basis.append(-1)
                artificial_rows.append(r)
            else:
                self.id_col.append(-1)
                self.basis.append(-1)
                artificial_rows.append(r)
        self.first_artificial = col
        for r in artificial_rows:
            pending[r][0][col] = 1
            self.id_col[r] = col
            self.basis[r] = col
            col += 1
        self.num_cols = col
        self.rows = [eq for eq, _ in pending]
        self.artificial = frozenset(range(self.first_artificial, self.num_cols))
        self._cost: dict[int, Fraction] = {}

        self.feasible = True
        self.farkas: tuple[Fraction, ...] | None = None
        if self.artificial:
            phase_cost = {c: Fraction(-1) for c in self.artificial}
            self._set_objective(phase_cost)
            status = self._solve(frozenset())
            assert status == "optimal"
            if self.obj.get(_RHS, 0) != 0:
                self.feasible = False
                self.farkas = self._duals()
                return
            self._expel_artificials()
        self._cost = {}

    # -- tableau primitives -------------------------------------------------

    def _set_objective(self, cost: Mapping[int, Fraction]) -> None:
        self._cost = dict(cost)
        present = {j: v for j, v in cost.items()
                   if v and (j >= self.num_structural or j in self.working)}
        scale = math.lcm(*(v.denominator for v in present.values())) if present else 1
        obj = {j: int(v * scale) for j, v in present.items()}
        for r, b in enumerate(self.basis):
            ob = obj.get(b)
            if ob:
                row = self.rows[r]
                p = row[b]
                obj, scale = self._combine(p, obj, ob, row), scale * p
                g = math.gcd(scale, *obj.values())
                if g > 1:
                    obj = {j: v // g for j, v in obj.items()}
                    scale //= g
        self.obj, self.obj_scale = obj, scale

    @staticmethod
    def _combine(p: int, target: dict[int, int], f: int, row: dict[int, int]) -> dict[int, int]:
        # p * target - f * row
        new = {j: p * v for j, v in target.items()} if p != 1 else dict(target)
        for j, v in row.items():
            w = new.get(j, 0) - f * v
            if w:
                new[j] = w
            else:
                new.pop(j, None)
        return new

    def _pivot(self, r: int, k: int) -> None:
        row = self.rows[r]
        p = row[k]
        if p < 0:
            # only degenerate rows (rhs 0) are pivoted on a negative element
            row = {j: -v for j, v in row.items()}
            self.rows[r] = row
            p = -p
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(k)
            if not f:
                continue
            new = self._combine(p, other, f, row)
            g = math.gcd(*new.values())
            if g > 1:
                new = {j: v // g for j, v in new.items()}
            self.rows[i] = new
        f = self.obj.get(k)
        if f:
            obj = self._combine(p, self.obj, f, row)
            scale = self.obj_scale * p
            g = math.gcd(scale, *obj.values())
            if g > 1:
                obj = {j: v // g for j, v in obj.items()}
                scale //= g
            self.obj, self.obj_scale = obj, scale
        self.basis[r] = k
        self.pivots += 1

    def _entering(self, forbidden: frozenset[int]) -> int | None:
        best = None
        best_val = 0
        for j, v in self.obj.items():
            if v <= 0 or j == _RHS or j in forbidden:
                continue
            if self.rule == "bland":
                if best is None or j < best:
                    best = j
            elif v > best_val or (v == best_val and j < best):
                best, best_val = j, v
        return best

    def _leaving(self, k: int) -> int | None:
        best = None
        num = den = 0
        for i, row in enumerate(self.rows):
            a = row.get(k, 0)
            if a <= 0:
                continue
            b = row.get(_RHS, 0)
            if best is None:
                best, num, den = i, b, a
                continue
            lhs, rhs = b * den, num * a
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best, num, den = i, b, a
        return best

    def _run(self, forbidden: frozenset[int]) -> str:
        streak = 0
        while True:
            k = self._entering(forbidden)
            if k is None:
                return "optimal"
            r = self._leaving(k)
            if r is None:
                self._unbounded_col = k
                return "unbounded"
            degenerate = self.rows[r].get(_RHS, 0) == 0
            self._pivot(r, k)
            if self.rule == "dantzig":
                # anti-cycling: fall back to Bland while pivots stay degenerate
                streak = streak + 1 if degenerate else 0
                if streak > 50:
                    self.rule = "bland"
                    status = self._run_bland_until_progress(forbidden)
                    self.rule = "dantzig"
                    streak = 0
                    if status is not None:
                        return status

    def _run_bland_until_progress(self, forbidden: frozenset[int]) -> str | None:
        while True:
            k = self._entering(forbidden)
            if k is None:
                return "optimal"
            r = self._leaving(k)
            if r is None:
                self._unbounded_col = k
                return "unbounded"
            degenerate = self.rows[r].get(_RHS, 0) == 0
            self._pivot(r, k)
            if not degenerate:
                return None

    def _solve(self, forbidden: frozenset[int]) -> str:
        # restricted solve, then price the columns outside the working set
        while True:
            status = self._run(forbidden)
            if status == "unbounded":
                return status
            entering = self._price()
            if not entering:
                return status
            for j in entering:
                self._add_column(j)

    def _price(self) -> list[int]:
        if len(self.working) == self.num_structural:
            return []
        s = self.obj_scale
        y = [s * self._cost.get(c, 0) - self.obj.get(c, 0) for c in self.id_col]
        found = []
        for j in range(self.num_structural):
            if j in self.working:
                continue
            d = s * self._cost.get(j, 0) - sum(y[r] * a for r, a in self.colmap[j])
            if d > 0:
                found.append((-Fraction(d) / s, j))
        found.sort()
        return [j for _, j in found[: self.batch]]

    def _add_column(self, j: int) -> None:
        self.working.add(j)
        ids = [(self.id_col[r], a) for r, a in self.colmap[j]]
        for row in self.rows:
            v = sum(a * row.get(c, 0) for c, a in ids)
            if v:
                row[j] = v
        s = self.obj_scale
        c = self._cost.get(j, Fraction(0))
        y_part = sum((s * self._cost.get(idc, 0) - self.obj.get(idc, 0)) * a for idc, a in ids)
        d = s * c - y_part
        if isinstance(d, Fraction) and d.denominator != 1:
            m = d.denominator
            self.obj = {k: v * m for k, v in self.obj.items()}
            self.obj_scale *= m
            d *= m
        if d:
            self.obj[j] = int(d)
        # rows still held by a zero-level artificial take the new column in
        for r, b in enumerate(self.basis):
            if b in self.artificial and not self._cost.get(b) and self.rows[r].get(j):
                self._pivot(r, j)

    def _expel_artificials(self) -> None:
        for r, b in enumerate(self.basis):
            if b not in self.artificial:
                continue
            row = self.rows[r]
            k = min((j for j, v in row.items()
                     if j != _RHS and j not in self.artificial and v), default=None)
            if k is not None:
                self._pivot(r, k)
            # otherwise the equation is redundant so far; its artificial stays
            # basic at level zero until a new column gives it an entry

    # -- readout ------------------------------------------------------------

    def _column_values(self) -> dict[int, Fraction]:
        vals = {}
        for r, b in enumerate(self.basis):
            row = self.rows[r]
            vals[b] = Fraction(row.get(_RHS, 0), row[b])
        return vals

    def _to_original(self, colvals: Mapping[int, Fraction]) -> tuple[Fraction, ...]:
        x = [colvals.get(j, Fraction(0)) for j in range(self.num_vars)]
        for j, neg in self._neg_col.items():
            x[j] -= colvals.get(neg, Fraction(0))
        return tuple(x)

    def _duals(self) -> tuple[Fraction, ...]:
        out = []
        for r, col in enumerate(self.id_col):
            d = Fraction(self.obj.get(col, 0), self.obj_scale)
            y = self._cost.get(col, Fraction(0)) - d
            out.append(y * self.row_scale[r])
        return tuple(out)

    def point(self) -> tuple[Fraction, ...]:
        return self._to_original(self._column_values())

    # -- public -------------------------------------------------------------

    def maximize(self, objective: Sequence[object] | Mapping[int, object]) -> LPResult:
        if not self.feasible:
            return LPResult(Status.INFEASIBLE, farkas=self.farkas, pivots=0)
        items = objective.items() if isinstance(objective, Mapping) else enumerate(objective)
        cost: dict[int, Fraction] = {}
        for j, v in items:
            v = rational(v)
            if v:
                cost[j] = cost.get(j, Fraction(0)) + v
                if j in self._neg_col:
                    cost[self._neg_col[j]] = -cost[j]
        start = self.pivots
        self._set_objective(cost)
        status = self._solve(self.artificial)
        x = self.point()
        if status == "unbounded":
            k = self._unbounded_col
            dir_cols = {k: Fraction(1)}
            for r, b in enumerate(self.basis):
                row = self.rows[r]
                a = row.get(k, 0)
                if a:
                    dir_cols[b] = Fraction(-a, row[b])
            return LPResult(Status.UNBOUNDED, x=x, ray=self._to_original(dir_cols),
                            pivots=self.pivots - start)
        value = Fraction(-self.obj.get(_RHS, 0), self.obj_scale)
        return LPResult(Status.OPTIMAL, value=value, x=x, dual=self._duals(),
                        pivots=self.pivots - start)

    def minimize(self, objective: Sequence[object] | Mapping[int, object]) -> LPResult:
        items = objective.items() if isinstance(objective, Mapping) else enumerate(objective)
        res = self.maximize({j: -rational(v) for j, v in items})
        if res.value is not None:
            res = LPResult(res.status, -res.value, res.x, res.dual, res.farkas, res.ray, res.pivots)
        return res


def region_of(lp: LinearProgram, rule: str = "bland",
              columns: Iterable[int] | None = None) -> SimplexRegion:
    return SimplexRegion(lp.num_vars, lp.matrix, lp.relations, lp.rhs, lp.free, rule, columns)


def lp_solve(lp: LinearProgram, rule: str = "bland",
             columns: Iterable[int] | None = None) -> LPResult:
    """Solve ``lp`` exactly; see the module docstring for the certificates."""
    region = region_of(lp, rule, columns)
    if lp.maximize:
        return region.maximize(lp.objective)
    return region.minimize(lp.objective)


def _row_dot(row: Row, x: Sequence[Fraction]) -> Fraction:
    return sum((v * x[j] for j, v in row), Fraction(0))


def _sign_ok(rel: str, y: Fraction) -> bool:
    return (rel == LE and y >= 0) or (rel == GE and y <= 0) or rel == EQ


def _dual_columns(lp: LinearProgram, y: Sequence[Fraction]) -> list[Fraction]:
    aty = [Fraction(0)] * lp.num_vars
    for row, yr in zip(lp.matrix, y):
        if yr:
            for j, v in row:
                aty[j] += v * yr
    return aty


def primal_violations(lp: LinearProgram, x: Sequence[Fraction]) -> list[str]:
    problems = []
    for j, lb in enumerate(lp.lower_bounds):
        if lb is not None and x[j] < lb:
            problems.append(f"x[{j}] = {x[j]} below its lower bound")
    for r, (row, rel, b) in enumerate(zip(lp.matrix, lp.relations, lp.rhs)):
        ax = _row_dot(row, x)
        if (rel == LE and ax > b) or (rel == GE and ax < b) or (rel == EQ and ax != b):
            problems.append(f"row {r}: {ax} {rel} {b} fails")
    return problems


def check_certificate(lp: LinearProgram, result: LPResult) -> list[str]:
    """Re-verify a solver certificate by direct evaluation; [] means valid."""
    sign = 1 if lp.maximize else -1
    c = [sign * v for v in lp.objective]
    problems: list[str] = []
    if result.status is Status.OPTIMAL:
        x, y = result.x, result.dual
        if x is None or y is None or len(y) != len(lp.matrix):
            return ["optimal result without primal/dual vectors"]
        problems += primal_violations(lp, x)
        for r, (rel, yr) in enumerate(zip(lp.relations, y)):
            if not _sign_ok(rel, yr):
                problems.append(f"dual y[{r}] = {yr} has the wrong sign for {rel}")
        aty = _dual_columns(lp, y)
        for j, lb in enumerate(lp.lower_bounds):
            if lb is None and aty[j] != c[j]:
                problems.append(f"free column {j}: A^T y = {aty[j]} != c = {c[j]}")
            if lb is not None and aty[j] < c[j]:
                problems.append(f"column {j}: A^T y = {aty[j]} < c = {c[j]}")
        primal = sum((cj * xj for cj, xj in zip(c, x)), Fraction(0))
        dual = sum((b * yr for b, yr in zip(lp.rhs, y)), Fraction(0))
        if primal != dual:
            problems.append(f"duality gap: primal {primal} != dual {dual}")
        if result.value != sign * primal:
            problems.append(f"reported value {result.value} != c.x = {sign * primal}")
    elif result.status is Status.INFEASIBLE:
        y = result.farkas
        if y is None or len(y) != len(lp.matrix):
            return ["infeasible result without a Farkas vector"]
        for r, (rel, yr) in enumerate(zip(lp.relations, y)):
            if not _sign_ok(rel, yr):
                problems.append(f"Farkas y[{r}] = {yr} has the wrong sign for {rel}")
        aty = _dual_columns(lp, y)
        for j, lb in enumerate(lp.lower_bounds):
            if (lb is None and aty[j] != 0) or (lb is not None and aty[j] < 0):
                problems.append(f"Farkas column {j}: A^T y = {aty[j]}")
        by = sum((b * yr for b, yr in zip(lp.rhs, y)), Fraction(0))
        if by >= 0:
            problems.append(f"Farkas b.y = {by} is not negative")
    else:
        x, d = result.x, result.ray
        if x is None or d is None:
            return ["unbounded result without point and ray"]
        problems += primal_violations(lp, x)
        for j, lb in enumerate(lp.lower_bounds):
            if lb is not None and d[j] < 0:
                problems.append(f"ray leaves the bound of x[{j}]")
        for r, (row, rel) in enumerate(zip(lp.matrix, lp.relations)):
            ad = _row_dot(row, d)
            if (rel == LE and ad > 0) or (rel == GE and ad < 0) or (rel == EQ and ad != 0):
                problems.append(f"ray violates row {r}")
        if sum((cj * dj for cj, dj in zip(c, d)), Fraction(0)) <= 0:
            problems.append("ray does not improve the objective")
    return problems
