"""Nash equilibria: best-response checks and exact enumeration of all equilibria.

Bimatrix games go through support enumeration.  For a support pair
``(I, J)`` the column player's mixtures that make every row of ``I`` a best
reply form a polytope ``Y(I, J)``, and symmetrically ``X(I, J)``; the
equilibria with exactly these supports are dense in ``X x Y`` (exchangeability),
so every component is a product of two polytopes and its payoff set is a
rectangle.

Two exact shortcuts keep the search small:

* supports must lie inside the union of all correlated-equilibrium
  supports, because the product of a Nash equilibrium is a CE;
* when both best-response polytopes are simple (checked exactly while
  enumerating them) the game is nondegenerate, and the equilibria are the
  completely labelled vertex pairs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from eqpayoffs.core import (
    BudgetExceeded,
    Game,
    GameError,
    MixedProfile,
    Point,
    Polytope,
    RectangleUnion,
)
from eqpayoffs.geometry import rectangle_union_canonicalize
from eqpayoffs.lp import EQ, GE, LE, LinearProgram, Status, lp_solve
from eqpayoffs.equilibria.cone import polytope_vertices
from eqpayoffs.equilibria.correlated import ce_support_closure

DEFAULT_BUDGET = 2**24


# -- checks ------------------------------------------------------------------


def pure_payoffs(g: Game, profile: MixedProfile, player: int) -> list[Fraction]:
    """Expected payoff of each pure strategy of ``player`` against the others."""
    others = [
        [(s, w) for s, w in enumerate(profile.strategies[k]) if w] if k != player else [(None, 1)]
        for k in range(g.num_players)
    ]
    out = [Fraction(0)] * g.strategy_counts[player]
    for combo in itertools.product(*others):
        w = Fraction(1)
        for _, p in combo:
            w *= p
        prof = [s for s, _ in combo]
        for t in range(g.strategy_counts[player]):
            prof[player] = t
            out[t] += w * g.payoff(prof)[player]
    return out


@dataclass(frozen=True)
class NashCheck:
    is_equilibrium: bool
    strict: bool
    player: int | None = None  # best profitable deviation when not an equilibrium
    deviation: int | None = None
    gain: Fraction | None = None

    def __bool__(self) -> bool:
        return self.is_equilibrium


def is_nash(g: Game, profile: MixedProfile) -> NashCheck:
    """Best-reply check; strict means every player's best reply is unique.

    A strict equilibrium is therefore pure, with every other own strategy
    strictly worse.
    """
    if len(profile.strategies) != g.num_players or any(
            len(s) != c for s, c in zip(profile.strategies, g.strategy_counts)):
        raise GameError("profile does not fit the game")
    best = None
    strict = True
    for i in range(g.num_players):
        vals = pure_payoffs(g, profile, i)
        support = profile.support(i)
        current = sum((profile.strategies[i][s] * vals[s] for s in support), Fraction(0))
        for t, v in enumerate(vals):
            gain = v - current
            if gain > 0 and (best is None or gain > best[2]):
                best = (i, t, gain)
            if gain >= 0 and (t not in support or len(support) > 1):
                strict = False
    if best is not None:
        return NashCheck(False, False, *best)
    return NashCheck(True, strict)


# -- results -----------------------------------------------------------------


@dataclass(frozen=True)
class SupportComponent:
    """Closure of the equilibria with exact supports ``supports``.

    ``strategies[i]`` is player i's polytope of mixtures; the component is
    their product.  ``payoff_box[i]`` is the range of player i's payoff.
    """

    supports: tuple[tuple[int, ...], ...]
    strategies: tuple[Polytope, ...]
    payoff_box: tuple[tuple[Fraction, Fraction], ...]

    @property
    def sigma(self) -> Polytope:
        return self.strategies[0]

    @property
    def tau(self) -> Polytope:
        return self.strategies[1]

    @property
    def payoff_rectangle(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        (a, b), (c, d) = self.payoff_box[:2]
        return (a, b, c, d)

    @property
    def isolated(self) -> bool:
        return all(len(p.vertices) == 1 for p in self.strategies)

    def vertex_profiles(self) -> list[MixedProfile]:
        return [MixedProfile(tuple(combo)) for combo in
                itertools.product(*(p.vertices for p in self.strategies))]


@dataclass(frozen=True)
class NashEquilibriumSet:
    components: tuple[SupportComponent, ...]
    method: str = "support enumeration"

    @property
    def isolated(self) -> tuple[MixedProfile, ...]:
        return tuple(c.vertex_profiles()[0] for c in self.components if c.isolated)

    def payoff_rectangles(self) -> RectangleUnion:
        return rectangle_union_canonicalize(
            RectangleUnion(tuple(c.payoff_rectangle for c in self.components)))

    def payoff_points(self, g: Game) -> list[Point]:
        """Payoffs at every vertex combination of every component."""
        from eqpayoffs.core import expected_payoffs

        return sorted({expected_payoffs(g, prof) for c in self.components
                       for prof in c.vertex_profiles()})


# -- dominance -----------------------------------------------------------------


def dominance_prune(g: Game) -> list[list[int]]:
    """Surviving strategies per player after iterated strict pure dominance."""
    alive = [list(range(c)) for c in g.strategy_counts]
    changed = True
    while changed:
        changed = False
        for i in range(g.num_players):
            others = [alive[k] if k != i else [None] for k in range(g.num_players)]
            contexts = list(itertools.product(*others))

            def pay(s, ctx):
                prof = list(ctx)
                prof[i] = s
                return g.payoff(prof)[i]

            for s in list(alive[i]):
                for t in alive[i]:
                    if t != s and all(pay(t, c) > pay(s, c) for c in contexts):
                        alive[i].remove(s)
                        changed = True
                        break
    return alive


def _subgame(g: Game, alive: Sequence[Sequence[int]]) -> Game:
    return Game.from_function([len(a) for a in alive],
                              lambda prof: g.payoff([alive[k][s] for k, s in enumerate(prof)]))


# -- nondegenerate bimatrix games: vertex pairs ---------------------------------


def _simple_vertices(matrix: Sequence[Sequence[Fraction]], var_labels: Sequence[int],
                     slack_labels: Sequence[int], limit: int):
    """Vertices of ``{z >= 0 : matrix z <= 1}`` keyed by their label sets.

    All entries must be positive.  Returns ``None`` as soon as a vertex
    with a zero basic variable shows up (the polytope is not simple) or
    more than ``limit`` vertices are found.
    """
    nv = len(var_labels)
    rows = []
    for k, r in enumerate(matrix):
        den = math.lcm(*(v.denominator for v in r))
        row = [int(v * den) for v in r] + [0] * len(matrix) + [den]
        row[nv + k] = den
        rows.append(row)
    labels = list(var_labels) + list(slack_labels)
    basis = [nv + k for k in range(len(matrix))]
    start = frozenset(range(nv))
    found = {}
    stack = [(start, rows, basis)]
    while stack:
        nonbasic, rows, basis = stack.pop()
        if nonbasic in found:
            continue
        if any(r[-1] == 0 for r in rows):
            return None
        coords = [Fraction(0)] * nv
        for r, b in zip(rows, basis):
            if b < nv:
                coords[b] = Fraction(r[-1], r[b])
        found[nonbasic] = coords
        if len(found) > limit:
            return None
        for e in sorted(nonbasic):
            best = None
            for i, r in enumerate(rows):
                a = r[e]
                if a > 0 and (best is None or r[-1] * best[1] < best[0] * a):
                    best = (r[-1], a, i)
            if best is None:
                continue
            i = best[2]
            nxt = (nonbasic - {e}) | {basis[i]}
            if nxt in found:
                continue
            piv = rows[i]
            p = piv[e]
            new_rows = []
            for j, r in enumerate(rows):
                if j == i:
                    new_rows.append(piv)
                    continue
                f = r[e]
                if not f:
                    new_rows.append(r)
                    continue
                nr = [p * x - f * y for x, y in zip(r, piv)]
                gg = math.gcd(*nr)
                new_rows.append([x // gg for x in nr] if gg > 1 else nr)
            nb = list(basis)
            nb[i] = e
            stack.append((nxt, new_rows, nb))
    return {frozenset(labels[c] for c in key): coords for key, coords in found.items()}


def _nondegenerate_equilibria(g: Game, limit: int):
    m, n = g.strategy_counts
    low = min(min(u) for u in g.table)
    shift = 1 - low
    a = [[g.payoff((i, j))[0] + shift for j in range(n)] for i in range(m)]
    b = [[g.payoff((i, j))[1] + shift for j in range(n)] for i in range(m)]
    # P = {x >= 0 : B^T x <= 1}: x_i has label i, column slack j has label m+j
    vp = _simple_vertices([[b[i][j] for i in range(m)] for j in range(n)],
                          range(m), [m + j for j in range(n)], limit)
    if vp is None:
        return None
    # Q = {y >= 0 : A y <= 1}: y_j has label m+j, row slack i has label i
    vq = _simple_vertices(a, [m + j for j in range(n)], range(m), limit)
    if vq is None:
        return None
    everything = frozenset(range(m + n))
    out = []
    for lx, x in vp.items():
        if not any(x):
            continue
        y = vq.get(everything - lx)
        if y is None or not any(y):
            continue
        sx, sy = sum(x), sum(y)
        out.append((tuple(v / sx for v in x), tuple(v / sy for v in y)))
    return sorted(out)


# -- general bimatrix support enumeration -------------------------------------


def _best_reply_lp(pay: Sequence[Sequence[Fraction]], rows_in: Sequence[int],
                   cols_in: Sequence[int]) -> tuple[list, list, list]:
    """Constraints on the opponent's mixture ``w`` (supported on ``cols_in``)
    and a value ``v`` that make exactly ``rows_in`` best replies (weakly).

    ``pay[r][c]`` is the best-replying player's payoff; variables are the
    weights of ``cols_in`` followed by ``v`` and a support margin ``s``.
    """
    k = len(cols_in)
    rows, rel, rhs = [], [], []
    for r in range(len(pay)):
        row = {j: pay[r][c] for j, c in enumerate(cols_in)}
        row[k] = -1
        rows.append(row)
        rel.append(EQ if r in rows_in else LE)
        rhs.append(0)
    rows.append({j: 1 for j in range(k)})
    rel.append(EQ)
    rhs.append(1)
    for j in range(k):
        rows.append({j: 1, k + 1: -1})  # w_j >= s
        rel.append(GE)
        rhs.append(0)
    return rows, rel, rhs


def _opponent_polytope(pay, rows_in, cols_in, total: int):
    """``(vertices, value range)`` of the mixtures in ``cols_in`` that keep
    all of ``rows_in`` optimal and use every column, or ``None``."""
    rows, rel, rhs = _best_reply_lp(pay, rows_in, cols_in)
    k = len(cols_in)
    free = [0] * k + [None, 0]
    res = lp_solve(LinearProgram([0] * k + [0, 1], rows, rel, rhs, free))
    if res.status is Status.INFEASIBLE or res.value == 0:
        return None
    # drop the margin and read off the value range
    rows = rows[:-k]
    rel = rel[:-k]
    rhs = rhs[:-k]
    free = [0] * k + [None]
    lo = lp_solve(LinearProgram([0] * k + [1], rows, rel, rhs, free, maximize=False)).value
    hi = lp_solve(LinearProgram([0] * k + [1], rows, rel, rhs, free)).value
    # vertices via double description on the cone of weights
    r0 = rows_in[0]
    cone = []
    for r in range(len(pay)):
        diff = [pay[r0][c] - pay[r][c] for c in cols_in]
        if r in rows_in and r != r0:
            cone.append(diff)
            cone.append([-v for v in diff])
        elif r not in rows_in:
            cone.append(diff)
    verts = []
    for v in polytope_vertices(cone, k):
        full = [Fraction(0)] * total
        for j, c in enumerate(cols_in):
            full[c] = v[j]
        verts.append(tuple(full))
    return verts, (lo, hi)


def _subsets(items: Sequence[int]) -> Iterable[tuple[int, ...]]:
    for size in range(1, len(items) + 1):
        yield from itertools.combinations(items, size)


def _bimatrix_components(g: Game, cells: set[tuple[int, int]] | None, budget: int):
    m, n = g.strategy_counts
    a = [[g.payoff((i, j))[0] for j in range(n)] for i in range(m)]
    bt = [[g.payoff((i, j))[1] for i in range(m)] for j in range(n)]
    comps = []
    examined = 0
    for rows_in in _subsets(range(m)):
        cols_ok = [j for j in range(n)
                   if cells is None or all((i, j) in cells for i in rows_in)]
        if not cols_ok:
            continue
        for cols_in in _subsets(cols_ok):
            examined += 1
            if examined > budget:
                raise BudgetExceeded(f"more than {budget} support pairs survive pruning", examined)
            tau = _opponent_polytope(a, rows_in, cols_in, n)
            if tau is None:
                continue
            sigma = _opponent_polytope(bt, cols_in, rows_in, m)
            if sigma is None:
                continue
            comps.append(((rows_in, cols_in), sigma, tau))
    return comps, examined


def nash_support_enumeration(g: Game, budget: int = DEFAULT_BUDGET, *,
                             prune_ce: bool = True, vertex_limit: int = 200_000
                             ) -> NashEquilibriumSet:
    """All Nash equilibria of a bimatrix game as support components.

    The vertex-pair method is tried first; it gives up on degenerate games
    or after ``vertex_limit`` vertices, and support enumeration takes over
    (``vertex_limit=0`` forces it).
    """
    if g.num_players != 2:
        raise GameError("support enumeration handles two players; use nash_equilibria")
    alive = dominance_prune(g)
    sub = _subgame(g, alive)
    back = [lambda s, k=k: alive[k][s] for k in range(2)]
    m0, n0 = g.strategy_counts

    def lift(vec, k):
        full = [Fraction(0)] * (m0, n0)[k]
        for s, v in enumerate(vec):
            full[alive[k][s]] = v
        return tuple(full)

    pairs = _nondegenerate_equilibria(sub, vertex_limit)
    comps = []
    if pairs is not None:
        for x, y in pairs:
            prof = MixedProfile((lift(x, 0), lift(y, 1)))
            u = _payoffs(g, prof)
            comps.append(SupportComponent(
                (prof.support(0), prof.support(1)),
                (Polytope((prof.strategies[0],)), Polytope((prof.strategies[1],))),
                ((u[0], u[0]), (u[1], u[1]))))
        return NashEquilibriumSet(tuple(sorted(comps, key=_component_key)), "best-response vertices")

    cells = None
    if prune_ce:
        cells = {sub.profile_at(k) for k in ce_support_closure(sub)}
    raw, _ = _bimatrix_components(sub, cells, budget)
    for (rows_in, cols_in), (sv, v2), (tv, v1) in raw:
        supports = (tuple(back[0](s) for s in rows_in), tuple(back[1](s) for s in cols_in))
        comps.append(SupportComponent(
            supports,
            (Polytope(tuple(lift(v, 0) for v in sv)), Polytope(tuple(lift(v, 1) for v in tv))),
            (v1, v2)))
    return NashEquilibriumSet(tuple(sorted(comps, key=_component_key)))


def _payoffs(g: Game, prof: MixedProfile) -> Point:
    from eqpayoffs.core import expected_payoffs

    return expected_payoffs(g, prof)


def _component_key(c: SupportComponent):
    return (c.supports, c.strategies[0].vertices)


def nep_rectangles(g: Game, budget: int = DEFAULT_BUDGET) -> RectangleUnion:
    """Canonical union of the payoff rectangles of all support components."""
    return nash_support_enumeration(g, budget).payoff_rectangles()


# -- n players -------------------------------------------------------------------


def _mixture_polytope(g: Game, supports, mixer: int, fixed: dict[int, int],
                      responders: Sequence[int]):
    """Mixtures of ``mixer`` over its support keeping ``responders``' pure
    choices optimal, with every support strategy used; ``None`` if empty.

    All other players play the pure strategies in ``fixed``.
    """
    sup = supports[mixer]
    k = len(sup)
    rows, rel, rhs = [], [], []
    cone = []
    for p in responders:
        s_p = fixed[p]
        for t in range(g.strategy_counts[p]):
            if t == s_p:
                continue
            diff = []
            for a in sup:
                prof = dict(fixed)
                prof[mixer] = a
                base = [prof[q] for q in range(g.num_players)]
                dev = list(base)
                dev[p] = t
                diff.append(g.payoff(base)[p] - g.payoff(dev)[p])
            rows.append(dict(enumerate(diff)))
            rel.append(GE)
            rhs.append(0)
            cone.append(diff)
    rows.append({j: 1 for j in range(k)})
    rel.append(EQ)
    rhs.append(1)
    for j in range(k):
        rows.append({j: 1, k: -1})
        rel.append(GE)
        rhs.append(0)
    res = lp_solve(LinearProgram([0] * k + [1], rows, rel, rhs, [0] * k + [Fraction(0)]))
    if res.status is not Status.OPTIMAL or res.value == 0:
        return None
    verts = []
    for v in polytope_vertices(cone, k):
        full = [Fraction(0)] * g.strategy_counts[mixer]
        for j, a in enumerate(sup):
            full[a] = v[j]
        verts.append(tuple(full))
    return verts


def nash_equilibria(g: Game, budget: int = DEFAULT_BUDGET) -> NashEquilibriumSet:
    """All Nash equilibria for any number of players.

    Bimatrix games are delegated to :func:`nash_support_enumeration`.  For
    more players, supports are enumerated inside the CE support closure;
    components where at most two players mix are solved exactly (the
    players who mix only face linear conditions, and the pure players'
    conditions are multilinear so checking vertex combinations suffices).
    Anything else raises :class:`GameError` rather than guess.
    """
    if g.num_players == 2:
        return nash_support_enumeration(g, budget)
    alive = dominance_prune(g)
    sub = _subgame(g, alive)
    n = sub.num_players
    cells = {sub.profile_at(k) for k in ce_support_closure(sub)}
    prefixes = [set() for _ in range(n + 1)]
    for c in cells:
        for k in range(n + 1):
            prefixes[k].add(c[:k])
    comps = []
    examined = 0

    def build(chosen):
        nonlocal examined
        k = len(chosen)
        if k == n:
            examined += 1
            if examined > budget:
                raise BudgetExceeded(f"more than {budget} support profiles survive pruning", examined)
            comp = _solve_support(sub, tuple(chosen))
            if comp is not None:
                comps.append(comp)
            return
        heads = list(itertools.product(*chosen))
        allowed = [s for s in range(sub.strategy_counts[k])
                   if all(h + (s,) in prefixes[k + 1] for h in heads)]
        for sup in _subsets(allowed):
            build(chosen + [sup])

    build([])
    out = []
    for supports, strategies in comps:
        lifted = []
        for k, poly in enumerate(strategies):
            verts = []
            for v in poly:
                full = [Fraction(0)] * g.strategy_counts[k]
                for s, w in enumerate(v):
                    full[alive[k][s]] = w
                verts.append(tuple(full))
            lifted.append(Polytope(tuple(verts)))
        pays = [_payoffs(g, MixedProfile(combo)) for combo in
                itertools.product(*(p.vertices for p in lifted))]
        box = tuple((min(u[i] for u in pays), max(u[i] for u in pays)) for i in range(n))
        sup_orig = tuple(tuple(alive[k][s] for s in supports[k]) for k in range(n))
        out.append(SupportComponent(sup_orig, tuple(lifted), box))
    return NashEquilibriumSet(tuple(sorted(out, key=_component_key)), "product supports")


def _solve_support(g: Game, supports):
    n = g.num_players
    mixers = [k for k in range(n) if len(supports[k]) > 1]
    if len(mixers) > 2:
        raise GameError(f"support {supports} has {len(mixers)} mixing players; "
                        "exact n-player enumeration stops at two")
    pure = {k: supports[k][0] for k in range(n) if k not in mixers}
    unit = lambda k, s: tuple(Fraction(int(t == s)) for t in range(g.strategy_counts[k]))  # noqa: E731
    if not mixers:
        prof = MixedProfile(tuple(unit(k, pure[k]) for k in range(n)))
        return (supports, [[v] for v in prof.strategies]) if is_nash(g, prof) else None
    if len(mixers) == 1:
        a = mixers[0]
        # the mixer must be indifferent across its support and not want to leave it
        vals = {}
        for s in range(g.strategy_counts[a]):
            prof = dict(pure)
            prof[a] = s
            vals[s] = g.payoff([prof[q] for q in range(n)])[a]
        top = max(vals.values())
        if any(vals[s] != top for s in supports[a]):
            return None
        verts = _mixture_polytope(g, supports, a, pure, [k for k in range(n) if k != a])
        if verts is None:
            return None
        strategies = [[unit(k, pure[k])] if k != a else verts for k in range(n)]
        return supports, strategies
    a, b = mixers
    xa = _two_mixer_side(g, supports, a, b, pure)
    if xa is None:
        return None
    xb = _two_mixer_side(g, supports, b, a, pure)
    if xb is None:
        return None
    strategies = [[unit(k, pure[k])] if k not in mixers else (xa if k == a else xb)
                  for k in range(n)]
    checks = [is_nash(g, MixedProfile(combo)).is_equilibrium
              for combo in itertools.product(*strategies)]
    if all(checks):
        return supports, strategies
    raise GameError(f"support {supports}: pure players' conditions hold only on part of "
                    "the product of mixtures; not resolved exactly")


def _two_mixer_side(g: Game, supports, mixer: int, other: int, pure: dict[int, int]):
    """Mixtures of ``mixer`` keeping ``other``'s support optimal (others pure)."""
    n = g.num_players
    sup_m, sup_o = supports[mixer], supports[other]
    # other's payoff for each own pure strategy t as a linear function of mixer's weights
    def coeffs(t):
        out = []
        for s in sup_m:
            prof = dict(pure)
            prof[mixer] = s
            prof[other] = t
            out.append(g.payoff([prof[q] for q in range(n)])[other])
        return out
    k = len(sup_m)
    t0 = sup_o[0]
    c0 = coeffs(t0)
    rows, rel, rhs, cone = [], [], [], []
    for t in range(g.strategy_counts[other]):
        if t == t0:
            continue
        diff = [x - y for x, y in zip(c0, coeffs(t))]
        if t in sup_o:
            rows.append(dict(enumerate(diff)))
            rel.append(EQ)
            cone += [diff, [-v for v in diff]]
        else:
            rows.append(dict(enumerate(diff)))
            rel.append(GE)
            cone.append(diff)
        rhs.append(0)
    rows.append({j: 1 for j in range(k)})
    rel.append(EQ)
    rhs.append(1)
    for j in range(k):
        rows.append({j: 1, k: -1})
        rel.append(GE)
        rhs.append(0)
    res = lp_solve(LinearProgram([0] * k + [1], rows, rel, rhs))
    if res.status is not Status.OPTIMAL or res.value == 0:
        return None
    verts = []
    for v in polytope_vertices(cone, k):
        full = [Fraction(0)] * g.strategy_counts[mixer]
        for j, s in enumerate(sup_m):
            full[s] = v[j]
        verts.append(tuple(full))
    return verts
