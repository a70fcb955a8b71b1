"""Correlated equilibria: the incentive system, checks and payoff polytopes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from eqpayoffs.core import (
    BudgetExceeded,
    CorrelatedDistribution,
    Game,
    GameError,
    Point,
    Polytope,
    payoff_of_distribution,
    point,
)
from eqpayoffs.geometry import affine_dimension, extreme_points, halfspaces, null_space
from eqpayoffs.lp import EQ, GE, SimplexRegion
from eqpayoffs.equilibria.cone import polytope_vertices


@dataclass(frozen=True)
class CeRow:
    """``sum_s coefficients[s] * mu[s] >= 0``: recommended strategy vs deviation."""

    player: int
    recommended: int
    deviation: int
    coefficients: tuple[tuple[int, Fraction], ...]  # (profile index, gain lost)

    def value(self, weights: dict[int, Fraction]) -> Fraction:
        return sum((c * weights.get(k, 0) for k, c in self.coefficients), Fraction(0))


@dataclass(frozen=True)
class CeSystem:
    game: Game
    rows: tuple[CeRow, ...]

    @property
    def num_vars(self) -> int:
        return self.game.num_profiles

    def lp_data(self, columns: Iterable[int] | None = None):
        """Rows, relations and right-hand sides including ``sum(mu) = 1``.

        With ``columns`` the system is restricted to those profiles (all
        other weights fixed at 0) and renumbered ``0..len(columns)-1``.
        """
        if columns is None:
            keep = {k: k for k in range(self.num_vars)}
        else:
            keep = {k: i for i, k in enumerate(columns)}
        rows = []
        for row in self.rows:
            r = {keep[k]: c for k, c in row.coefficients if k in keep}
            rows.append(r)
        rows.append({i: 1 for i in keep.values()})
        return rows, [GE] * len(self.rows) + [EQ], [0] * len(self.rows) + [1]

    def region(self, columns: Sequence[int] | None = None,
               working: Iterable[int] | None = None) -> SimplexRegion:
        """Simplex region of the system; ``working`` seeds column generation."""
        rows, rel, rhs = self.lp_data(columns)
        n = self.num_vars if columns is None else len(columns)
        start = None if working is None else list(working)
        return SimplexRegion(n, rows, rel, rhs, rule="dantzig", columns=start)


@lru_cache(maxsize=16)
def ce_constraints(g: Game) -> CeSystem:
    """One row per player and ordered pair of distinct own strategies."""
    rows = []
    for i, count in enumerate(g.strategy_counts):
        for s in range(count):
            for t in range(count):
                if s == t:
                    continue
                coeffs = []
                for k, prof in enumerate(g.profiles()):
                    if prof[i] != s:
                        continue
                    dev = prof[:i] + (t,) + prof[i + 1:]
                    gain = g.payoff(prof)[i] - g.payoff(dev)[i]
                    if gain:
                        coeffs.append((k, gain))
                rows.append(CeRow(i, s, t, tuple(coeffs)))
    return CeSystem(g, tuple(rows))


@dataclass(frozen=True)
class CeCheck:
    is_equilibrium: bool
    strict: bool
    violated: CeRow | None = None
    violation: Fraction | None = None
    min_slack: Fraction | None = None  # over rows of recommended strategies in use

    def __bool__(self) -> bool:
        return self.is_equilibrium


def is_correlated_equilibrium(g: Game, mu: CorrelatedDistribution,
                              system: CeSystem | None = None) -> CeCheck:
    system = system or ce_constraints(g)
    weights = {g.index(p): w for p, w in mu.weights}
    marginals = [mu.marginal(i) for i in range(g.num_players)]
    worst, min_slack = None, None
    for row in system.rows:
        if not marginals[row.player].get(row.recommended):
            continue
        v = row.value(weights)
        if min_slack is None or v < min_slack:
            min_slack, worst = v, row
    if min_slack is not None and min_slack < 0:
        return CeCheck(False, False, worst, min_slack, min_slack)
    strict = min_slack is None or min_slack > 0
    return CeCheck(True, strict, None, None, min_slack)


# -- LP-based payoff set ------------------------------------------------------


def _payoff_objective(g: Game, d: Sequence[Fraction], columns: Sequence[int]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(d, g.table[k])), Fraction(0)) for k in columns]


def ce_support_closure(g: Game, system: CeSystem | None = None) -> tuple[int, ...]:
    """Profiles charged by some correlated equilibrium (union of all supports).

    Grows ``T`` by the support of a CE maximising the mass outside ``T``
    until that mass is 0; the last LP certifies that no CE leaves ``T``.
    """
    system = system or ce_constraints(g)
    region = system.region(working=())
    inside: set[int] = set()
    while True:
        c = [0 if k in inside else 1 for k in range(g.num_profiles)]
        res = region.maximize(c)
        if not res.optimal:
            raise GameError("correlated equilibrium LP is not feasible")  # pragma: no cover
        if res.value == 0:
            return tuple(sorted(inside))
        inside.update(k for k, v in enumerate(res.x) if v)


@dataclass
class _Projector:
    """Directional maximisation of expected payoffs over the CE polytope."""

    game: Game
    columns: tuple[int, ...]
    region: SimplexRegion
    probes: int = 0

    @classmethod
    def build(cls, g: Game, reduce: bool = True) -> _Projector:
        system = ce_constraints(g)
        if reduce:
            cols = ce_support_closure(g, system)
        else:
            cols = tuple(range(g.num_profiles))
        return cls(g, cols, system.region(cols))

    def maximize(self, d: Sequence[Fraction]) -> tuple[Fraction, Point, tuple[Fraction, ...]]:
        self.probes += 1
        res = self.region.maximize(_payoff_objective(self.game, d, self.columns))
        weights = dict(zip(self.columns, res.x))
        pay = tuple(sum((w * self.game.table[k][i] for k, w in weights.items() if w), Fraction(0))
                    for i in range(self.game.num_players))
        return res.value, pay, res.dual


def _affine_hull(proj: _Projector, dim: int, budget: int | None) -> list[Point]:
    found: list[Point] = []
    units = []
    for i in range(dim):
        e = [Fraction(0)] * dim
        e[i] = Fraction(1)
        units.append(e)
    for e in units:
        for sgn in (1, -1):
            found.append(proj.maximize([sgn * v for v in e])[1])
    verified: set[Point] = set()
    while True:
        pts = sorted(set(found))
        p0 = pts[0]
        span = [tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]
        normals = null_space(span, dim) if span else null_space([], dim)
        grew = False
        for a in normals:
            if a in verified:
                continue
            level = sum((x * y for x, y in zip(a, p0)), Fraction(0))
            for sgn in (1, -1):
                val, pay, _ = proj.maximize([sgn * x for x in a])
                if val != sgn * level:
                    found.append(pay)
                    grew = True
                    break
            if grew:
                break
            verified.add(a)
        if budget is not None and proj.probes > budget:
            raise BudgetExceeded(f"payoff projection needed more than {budget} LP probes", proj.probes)
        if not grew:
            return pts


def ce_payoff_polytope(g: Game, *, budget: int | None = 10**5, reduce: bool = True) -> Polytope:
    """Exact CEP(g) as a V-polytope.

    Inner hull (vertices found so far) and outer hull (confirmed supporting
    hyperplanes) are refined until every facet of the inner hull is
    confirmed by an LP probe.  Exact while the payoff set has affine
    dimension at most 3; otherwise use :func:`ce_support_function`.
    """
    proj = _Projector.build(g, reduce)
    n = g.num_players
    pts = _affine_hull(proj, n, budget)
    k = affine_dimension(pts)
    if k > 3:
        raise GameError(f"correlated payoff set has affine dimension {k}; "
                        "exact projection stops at 3, use ce_support_function")
    verts = extreme_points(pts)
    confirmed: set[tuple[Point, Fraction]] = set()
    while True:
        _, ineqs = halfspaces(Polytope(tuple(verts)))
        pending = [f for f in ineqs if f not in confirmed]
        if not pending:
            return Polytope(tuple(verts))
        for a, b in pending:
            val, pay, _ = proj.maximize(a)
            if val > b:
                verts = extreme_points(verts + [pay])
                break
            confirmed.add((a, b))
        if budget is not None and proj.probes > budget:
            raise BudgetExceeded(f"payoff projection needed more than {budget} LP probes", proj.probes)


def ce_support_function(g: Game, directions: Sequence[Sequence[object]],
                        reduce: bool = True) -> list[Fraction]:
    """``max { d.u(mu) : mu CE of g }`` for each direction, exactly."""
    proj = _Projector.build(g, reduce)
    return [proj.maximize(point(d))[0] for d in directions]


def ce_optimal_multipliers(g: Game, directions: Sequence[Sequence[object]]
                           ) -> list[tuple[Fraction, tuple[Fraction, ...]]]:
    """Support values and the optimal incentive multipliers ``w >= 0``.

    ``w`` has one entry per row of :func:`ce_constraints`; it certifies
    ``d.u(mu) <= value`` for every CE and is reused by
    :func:`ce_support_bracket` on nearby games.
    """
    system = ce_constraints(g)
    region = system.region(working=())
    out = []
    for d in directions:
        res = region.maximize(_payoff_objective(g, point(d), range(g.num_profiles)))
        out.append((res.value, tuple(-y for y in res.dual[:-1])))
    return out


def _dual_bound(system: CeSystem, d: Point, multipliers: Sequence[Fraction]) -> Fraction:
    if len(multipliers) != len(system.rows) or any(w < 0 for w in multipliers):
        raise GameError("one nonnegative multiplier per incentive row is required")
    reduced = [sum((a * b for a, b in zip(d, u)), Fraction(0)) for u in system.game.table]
    for w, row in zip(multipliers, system.rows):
        if w:
            for k, c in row.coefficients:
                reduced[k] += w * c
    return max(reduced)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def ce_support_bracket(g: Game, d: Sequence[object], multipliers: Sequence[Fraction],
                       witnesses: Sequence[CorrelatedDistribution]) -> tuple[Fraction, Fraction]:
    """Certified ``lower <= h_CEP(g)(d) <= upper``.

    ``upper`` is weak duality with the given multipliers (any ``w >= 0``
    works; the free normalisation multiplier is chosen optimally), ``lower``
    the best witness that is verified to be a CE of ``g``.
    """
    d = point(d)
    system = ce_constraints(g)
    upper = _dual_bound(system, d, multipliers)
    values = [_dot(d, payoff_of_distribution(g, mu)) for mu in witnesses
              if is_correlated_equilibrium(g, mu, system)]
    if not values:
        raise GameError("no witness is a correlated equilibrium of the game")
    return max(values), upper


@dataclass(frozen=True)
class CeEnclosure:
    """Certified ``inner <= CEP(g) <= outer`` for a two-player game."""

    inner: Polytope
    outer: Polytope
    brackets: tuple[tuple[Point, Fraction, Fraction], ...] = ()  # (d, lower, upper)

    def distance_bound(self, target: Polytope) -> Fraction:
        """Upper bound on the Hausdorff distance between CEP(g) and ``target``."""
        from eqpayoffs.geometry import DistanceBound, directed_distance

        vals = []
        for a, b in ((self.outer, target), (target, self.inner)):
            r = directed_distance(a, b)
            vals.append(r.upper if isinstance(r, DistanceBound) else r)
        return max(vals)


def _exact_multipliers(g: Game, d: Point) -> tuple[Fraction, ...]:
    return ce_optimal_multipliers(g, [d])[0][1]


def ce_payoff_enclosure(g: Game, directions: Sequence[Sequence[object]],
                        witnesses: Sequence[CorrelatedDistribution],
                        multipliers: Callable[[Game, Point], Sequence[Fraction]] = _exact_multipliers,
                        ) -> CeEnclosure:
    """Inner and outer polygons around CEP(g).

    The outer polygon comes from :func:`ce_support_bracket` upper bounds
    with ``multipliers(g, d)`` (exact optimal duals by default; any
    nonnegative proposal keeps the bound valid), so ``directions`` must
    enclose the plane, as the canonical 16 do.  The inner one is the hull
    of the witnesses that check as CE.
    """
    from eqpayoffs.geometry import convex_hull, polygon_from_halfplanes

    if g.num_players != 2:
        raise GameError("payoff enclosures are planar; two players are required")
    system = ce_constraints(g)
    good = [mu for mu in witnesses if is_correlated_equilibrium(g, mu, system)]
    if not good:
        raise GameError("no witness is a correlated equilibrium of the game")
    pays = [payoff_of_distribution(g, mu) for mu in good]
    brackets = []
    for d in directions:
        d = point(d)
        upper = _dual_bound(system, d, tuple(multipliers(g, d)))
        brackets.append((d, max(_dot(d, u) for u in pays), upper))
    outer = polygon_from_halfplanes([(d, hi) for d, _, hi in brackets])
    return CeEnclosure(convex_hull(pays, 2), outer, tuple(brackets))


# -- independent oracle -------------------------------------------------------


def ce_vertex_enumeration(g: Game, budget: int = 10**7,
                          support: Sequence[int] | None = None) -> list[CorrelatedDistribution]:
    """All extreme correlated equilibria, by double description.

    ``support`` optionally restricts the enumeration to profiles known to
    contain every CE support (e.g. :func:`ce_support_closure`).
    """
    system = ce_constraints(g)
    cols = list(range(g.num_profiles)) if support is None else list(support)
    pos = {k: i for i, k in enumerate(cols)}
    rows = []
    for row in system.rows:
        dense = [Fraction(0)] * len(cols)
        touched = False
        for k, c in row.coefficients:
            if k in pos:
                dense[pos[k]] = c
                touched = True
        if touched:
            rows.append(dense)
    out = []
    for v in polytope_vertices(rows, len(cols), budget):
        out.append(CorrelatedDistribution(tuple(
            (g.profile_at(cols[i]), w) for i, w in enumerate(v) if w)))
    return sorted(out, key=lambda mu: mu.weights)


def ce_vertex_payoffs(g: Game, vertices: Iterable[CorrelatedDistribution]) -> list[Point]:
    return [payoff_of_distribution(g, mu) for mu in vertices]

