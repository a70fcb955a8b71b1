"""Games realising prescribed Nash and correlated equilibrium payoff sets.

Profiles are 0-based.  Constructors that need positive data run in strict
mode by default and raise :class:`ConstructionError` on bad input.  With
``auto_shift=True`` the data is first translated by the smallest nonnegative
integer shift that makes it valid; the game is built and then translated
back, so the returned game realises the untranslated targets.  Equilibria do
not move under such translations; only payoffs do.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from eqpayoffs.core import (
    CorrelatedDistribution,
    Game,
    MixedProfile,
    Point,
    Polytope,
    RectangleUnion,
    normalize_positive,
    point,
    rational,
)

GRID = 1000


class ConstructionError(ValueError):
    """Input violates a constructor precondition."""


class ContainmentError(ConstructionError):
    """The target polytope misses part of the equilibrium payoff set."""

    def __init__(self, message: str, witness: Point) -> None:
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class PerturbationParams:
    alpha: Fraction
    ball_radius: Fraction = Fraction(0)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", rational(self.alpha))
        object.__setattr__(self, "ball_radius", rational(self.ball_radius))
        if self.alpha <= 0:
            raise ConstructionError("alpha must be positive")
        if self.ball_radius < 0:
            raise ConstructionError("ball radius must be nonnegative")


Block = Game | Sequence[Fraction]


def assemble(groups: Sequence[Sequence[int]], block: Callable[[tuple[int, ...]], Block]) -> Game:
    """Build a game from blocks.

    ``groups[k]`` lists the sizes of player k's strategy groups.  For every
    tuple of group indices ``block`` returns either a game of the matching
    shape or a constant payoff vector filling the whole block.
    """
    lookup = []
    for sizes in groups:
        table = []
        for gi, size in enumerate(sizes):
            table.extend((gi, local) for local in range(size))
        lookup.append(table)
    cache: dict[tuple[int, ...], Block] = {}

    def payoff(profile):
        key = tuple(lookup[k][s][0] for k, s in enumerate(profile))
        if key not in cache:
            b = block(key)
            if isinstance(b, Game):
                want = tuple(groups[k][g] for k, g in enumerate(key))
                if b.strategy_counts != want:
                    raise ValueError(f"block {key} has shape {b.strategy_counts}, expected {want}")
            else:
                b = point(b)
            cache[key] = b
        b = cache[key]
        if isinstance(b, Game):
            return b.payoff(tuple(lookup[k][s][1] for k, s in enumerate(profile)))
        return b

    return Game.from_function([sum(s) for s in groups], payoff)


def _require(points: Iterable[Point], floor: Fraction, what: str, strict: bool = True) -> None:
    for p in points:
        for v in p:
            if (strict and v <= floor) or (not strict and v < floor):
                rel = "greater than" if strict else "at least"
                raise ConstructionError(f"{what}: coordinate {v} of {p} must be {rel} {floor}")


def _points(vertices: Iterable[Iterable[object]], dim: int | None = None) -> list[Point]:
    pts = [point(v) for v in vertices]
    if not pts:
        raise ConstructionError("at least one point is required")
    d = len(pts[0]) if dim is None else dim
    if any(len(p) != d for p in pts):
        raise ConstructionError(f"all points must have dimension {d}")
    return pts


def _shift_for(points: Sequence[Point], floor: Fraction = Fraction(1)) -> Point:
    """Smallest nonnegative integer shift moving every coordinate to >= floor."""
    shift, _ = normalize_positive([tuple(v - floor + 1 for v in p) for p in points])
    return shift


def _sub(p: Sequence[Fraction], t: Sequence[Fraction]) -> Point:
    return tuple(a - b for a, b in zip(p, t))


def _add(p: Sequence[Fraction], t: Sequence[Fraction]) -> Point:
    return tuple(a + b for a, b in zip(p, t))


def _shifted(points: Sequence[Point], floor: Fraction, build: Callable[[list[Point]], Game]) -> Game:
    t = _shift_for(points, floor)
    game = build([_add(p, t) for p in points])
    return game.translated([-v for v in t]) if any(t) else game


# -- diagonal games -------------------------------------------------------


def perturbed_diagonal_game(points: Sequence[Sequence[object]], alpha: object = 0) -> Game:
    """m x m bimatrix game with ``(x_i, y_i)`` on the diagonal.

    Row m pays player 1 ``x_i - alpha`` in column i and column m pays
    player 2 ``y_i - alpha`` in row i; everything else is 0.
    """
    alpha = rational(alpha)
    pts = _points(points, 2)
    if alpha < 0:
        raise ConstructionError("alpha must be nonnegative")
    _require(pts, alpha, "perturbed diagonal game")
    m = len(pts)

    def payoff(s):
        i, j = s
        if i == j:
            return pts[i]
        if i == m - 1:
            return (pts[j][0] - alpha, 0)
        if j == m - 1:
            return (0, pts[i][1] - alpha)
        return (0, 0)

    return Game.from_function((m, m), payoff)


def diagonal_game(vertices: Sequence[Sequence[object]], *, auto_shift: bool = False) -> Game:
    """Game whose CE payoffs are conv(vertices) and NE payoffs the vertices."""
    pts = _points(vertices, 2)
    if auto_shift:
        return _shifted(pts, Fraction(1), diagonal_game)
    return perturbed_diagonal_game(pts, 0)


def diagonal_game_n(
    vertices: Sequence[Sequence[object]], alpha: object = 0, *, auto_shift: bool = False
) -> Game:
    """n-player diagonal game: players 3..n are dummies with one strategy.

    Dummies receive their coordinate on the diagonal and 0 elsewhere.
    """
    alpha = rational(alpha)
    pts = _points(vertices)
    n = len(pts[0])
    if n < 3:
        raise ConstructionError("diagonal_game_n needs at least three players")
    if auto_shift:
        return _shifted(pts, alpha + 1, lambda q: diagonal_game_n(q, alpha))
    _require(pts, alpha, "n-player diagonal game")
    m = len(pts)
    zero = (Fraction(0),) * n

    def payoff(s):
        i, j = s[0], s[1]
        if i == j:
            return pts[i]
        out = list(zero)
        if i == m - 1:
            out[0] = pts[j][0] - alpha
        elif j == m - 1:
            out[1] = pts[i][1] - alpha
        return out

    return Game.from_function((m, m) + (1,) * (n - 2), payoff)


# -- rectangle unions -----------------------------------------------------


def rectangle_union_game(u: RectangleUnion, *, auto_shift: bool = False) -> Game:
    """2m x 2m bimatrix game whose Nash payoff set is the union ``u``.

    Block i pays ``(a_i or b_i, c_i or d_i)`` (column picks player 1's
    payoff, row picks player 2's).  The last block-column gives player 2
    ``B_i`` and the last block-row gives player 1 ``A_i``; other off-diagonal
    blocks are zero.
    """
    rects = list(u.rectangles)
    if auto_shift:
        t = _shift_for([(a, c) for a, _, c, _ in rects])
        if any(t):
            return rectangle_union_game(u.translated(t)).translated([-v for v in t])
    for r in rects:
        if min(r) <= 0:
            raise ConstructionError(f"rectangle {r} needs strictly positive bounds")
    m = len(rects)

    def block_a(i):
        a, b, _, _ = rects[i]
        return (a, b)

    def block_b(i):
        _, _, c, d = rects[i]
        return (c, d)

    def block(key):
        bi, bj = key
        if bi == bj:
            (a, b), (c, d) = block_a(bi), block_b(bi)
            return Game.from_rows([[(a, c), (b, c)], [(a, d), (b, d)]])
        if bj == m - 1:
            c, d = block_b(bi)
            return Game.from_rows([[(0, c), (0, c)], [(0, d), (0, d)]])
        if bi == m - 1:
            a, b = block_a(bj)
            return Game.from_rows([[(a, 0), (b, 0)], [(a, 0), (b, 0)]])
        return (0, 0)

    return assemble([[2] * m, [2] * m], block)


# -- cycle blocks and adjoining a correlated payoff ------------------------


def cycle_block(x: object, y: object) -> Game:
    """3 x 3 zero-diagonal block; its uniform off-diagonal CE pays (x, y)."""
    x, y = rational(x), rational(y)
    hi, lo = (x + 1, y - 1), (x - 1, y + 1)
    z = (0, 0)
    return Game.from_rows([[z, hi, lo], [lo, z, hi], [hi, lo, z]])


def cycle_block_n(p: Sequence[object]) -> Game:
    """Cycle block for n >= 3 players; players 3..n are constant dummies."""
    p = point(p)
    if len(p) < 3:
        raise ConstructionError("cycle_block_n needs at least three coordinates")
    base = cycle_block(p[0], p[1])
    rest = p[2:]
    return Game(
        (3, 3) + (1,) * len(rest),
        tuple(tuple(u) + rest for u in base.table),
    )


def cycle_profiles(offset: int = 0, extra: tuple[int, ...] = ()) -> list[tuple[int, ...]]:
    """The six off-diagonal profiles of a cycle block starting at ``offset``."""
    return [(offset + i, offset + j) + extra for i in range(3) for j in range(3) if i != j]


def adjoin_ce_point(g: Game, p: Sequence[object], *, auto_shift: bool = False) -> Game:
    """Adjoin ``p`` to the correlated payoffs of ``g`` keeping its Nash set.

    Player i's strategies are the cycle-block strategies followed by those of
    ``g``.  If everybody picks cycle strategies the payoffs are those of the
    cycle block at ``p``; if everybody picks strategies of ``g`` they are
    those of ``g``; otherwise player k gets ``p_k`` when it chose in ``g``
    and 0 when it chose a cycle strategy.

    Strict mode needs ``p_1, p_2 >= 1`` (the uniform off-diagonal
    distribution is only an equilibrium then), every other coordinate of
    ``p`` and every payoff of ``g`` strictly positive.
    """
    p = point(p)
    n = g.num_players
    if len(p) != n:
        raise ConstructionError(f"point has dimension {len(p)}, game has {n} players")
    if auto_shift:
        t = _shift_for(list(g.table) + [p])
        if any(t):
            return adjoin_ce_point(g.translated(t), _add(p, t)).translated([-v for v in t])
        return adjoin_ce_point(g, p)
    if p[0] < 1 or p[1] < 1:
        raise ConstructionError(f"adjoined point {p} needs its first two coordinates >= 1")
    _require([p[2:]], Fraction(0), "adjoined point")
    _require(g.table, Fraction(0), "base game payoffs")

    cycle = cycle_block(p[0], p[1]) if n == 2 else cycle_block_n(p)
    groups = [[3 if k < 2 else 1, g.strategy_counts[k]] for k in range(n)]

    def block(key):
        if all(b == 0 for b in key):
            return cycle
        if all(b == 1 for b in key):
            return g
        return tuple(p[k] if b == 1 else 0 for k, b in enumerate(key))

    return assemble(groups, block)


# -- prescribing both payoff sets -----------------------------------------


def _show(p: Sequence[Fraction]) -> str:
    return ", ".join(str(v) for v in p)


def _outside_vertex(p: Polytope, pts: Iterable[Point]) -> Point | None:
    from eqpayoffs.geometry import polytope_contains

    for x in pts:
        if not polytope_contains(p, x):
            return x
    return None


def fold_adjoin(g: Game, vertices: Iterable[Sequence[object]]) -> Game:
    for v in vertices:
        g = adjoin_ce_point(g, v, auto_shift=True)
    return g


def prescribe_payoffs(g: Game, p: Polytope, *, budget: int | None = None) -> Game:
    """Bimatrix game with the Nash payoffs of ``g`` and correlated payoffs ``p``.

    ``p`` must contain the Nash payoff set of ``g``.
    """
    from eqpayoffs.equilibria import nep_rectangles

    if g.num_players != 2 or p.dimension != 2:
        raise ConstructionError("prescribe_payoffs is for bimatrix games and planar polytopes")
    u = nep_rectangles(g, **({} if budget is None else {"budget": budget}))
    witness = _outside_vertex(p, u.corners())
    if witness is not None:
        raise ContainmentError(f"Nash payoff ({_show(witness)}) lies outside the polytope", witness)
    return fold_adjoin(rectangle_union_game(u, auto_shift=True), p.vertices)


def prescribe_payoffs_n(g: Game, p: Polytope) -> Game:
    """Game with the Nash payoffs of ``g`` and correlated payoffs ``p``.

    ``p`` must contain the correlated payoff set of ``g``.
    """
    from eqpayoffs.equilibria import ce_payoff_polytope

    if p.dimension != g.num_players:
        raise ConstructionError("polytope dimension differs from the number of players")
    witness = _outside_vertex(p, ce_payoff_polytope(g).vertices)
    if witness is not None:
        raise ContainmentError(f"correlated payoff ({_show(witness)}) lies outside the polytope", witness)
    return fold_adjoin(g, p.vertices)


# -- perturbed families ---------------------------------------------------


def perturbed_full_game(
    u_points: Sequence[Sequence[object]],
    p_vertices: Sequence[Sequence[object]],
    alpha: object,
    *,
    auto_shift: bool = False,
    filler: Sequence[object] = (1, 1, 1),
) -> Game:
    """Cycle blocks for ``p_vertices`` on top of the diagonal game of ``u_points``.

    Two players: a (3q + m) square game with margin blocks
    ``(0, y'_i - alpha)`` and ``(x'_j - alpha, 0)``.  Three or more players:
    player 3 picks between a left matrix (cycle blocks, margins, ``filler``
    payoffs ``(x, y, 0)`` on the bottom-right) and a right matrix
    (``(0, 0, z'_i - alpha)`` on top-left, ``(0, y, z)``, ``(x, 0, z)`` and the
    n-player diagonal game) ; players 4..n are dummies.
    """
    alpha = rational(alpha)
    us = _points(u_points)
    ps = _points(p_vertices, len(us[0]))
    n = len(us[0])
    if alpha < 0:
        raise ConstructionError("alpha must be nonnegative")
    if auto_shift:
        t = _shift_for(us + ps, alpha + 2)
        if any(t):
            shifted = perturbed_full_game(
                [_add(p, t) for p in us], [_add(p, t) for p in ps], alpha, filler=filler
            )
            return shifted.translated([-v for v in t])
    _require(us + ps, alpha, "perturbed game")
    if any(p[0] < 1 or p[1] < 1 for p in ps):
        raise ConstructionError("cycle-block vertices need their first two coordinates >= 1")
    q, m = len(ps), len(us)
    if n == 2:
        g_alpha = perturbed_diagonal_game(us, alpha)

        def block(key):
            bi, bj = key
            if bi < q and bj < q:
                return cycle_block(*ps[bi]) if bi == bj else (0, 0)
            if bi < q:
                return (0, ps[bi][1] - alpha)
            if bj < q:
                return (ps[bj][0] - alpha, 0)
            return g_alpha

        return assemble([[3] * q + [m], [3] * q + [m]], block)

    fx, fy, fz = point(filler)
    g_alpha = diagonal_game_n(us, alpha)
    zeros = (Fraction(0),) * n

    def with_(*pairs):
        out = list(zeros)
        for k, v in pairs:
            out[k] = v
        return tuple(out)

    def block(key):
        bi, bj, b3 = key[0], key[1], key[2]
        left = b3 == 0
        if bi < q and bj < q:
            if left:
                return cycle_block_n(ps[bi]) if bi == bj else zeros
            return with_((2, ps[bi][2] - alpha))
        if bi < q:
            return with_((1, ps[bi][1] - alpha)) if left else with_((1, fy), (2, fz))
        if bj < q:
            return with_((0, ps[bj][0] - alpha)) if left else with_((0, fx), (2, fz))
        return with_((0, fx), (1, fy)) if left else g_alpha

    groups = [[3] * q + [m], [3] * q + [m], [1, 1]] + [[1]] * (n - 3)
    return assemble(groups, block)


def designated_equilibria(
    u_points: Sequence[Sequence[object]], p_vertices: Sequence[Sequence[object]]
) -> tuple[list[MixedProfile], list[CorrelatedDistribution]]:
    """The Nash equilibria and extreme non-Nash CE that the family is built on.

    Nash: the diagonal pure profiles of the bottom-right block.  Correlated:
    the uniform off-diagonal distribution of each cycle block.
    """
    us, ps = _points(u_points), _points(p_vertices)
    n = len(us[0])
    q, m = len(ps), len(us)
    counts = (3 * q + m, 3 * q + m) + ((2,) + (1,) * (n - 3) if n > 2 else ())
    nash_tail = (1,) + (0,) * (n - 3) if n > 2 else ()
    ce_tail = (0,) * (n - 2)
    nash = [MixedProfile.pure(counts, (3 * q + i, 3 * q + i) + nash_tail) for i in range(m)]
    ce = [CorrelatedDistribution.uniform(cycle_profiles(3 * b, ce_tail)) for b in range(q)]
    return nash, ce


@dataclass(frozen=True)
class GammaFamily:
    """The one-parameter family ``alpha -> Gamma_alpha`` with its targets.

    With ``auto_shift`` every member is built from data lifted above
    ``alpha + 2`` and translated back, which keeps the cycle-block
    equilibria strict for targets with small coordinates.
    """

    u_points: tuple[Point, ...]
    p_vertices: tuple[Point, ...]
    auto_shift: bool = False

    def __init__(self, u_points: Iterable[Iterable[object]], p_vertices: Iterable[Iterable[object]],
                 auto_shift: bool = False) -> None:
        object.__setattr__(self, "u_points", tuple(_points(u_points)))
        object.__setattr__(self, "p_vertices", tuple(_points(p_vertices, len(self.u_points[0]))))
        object.__setattr__(self, "auto_shift", auto_shift)

    def game(self, alpha: object) -> Game:
        return perturbed_full_game(self.u_points, self.p_vertices, alpha, auto_shift=self.auto_shift)

    def designated(self) -> tuple[list[MixedProfile], list[CorrelatedDistribution]]:
        return designated_equilibria(self.u_points, self.p_vertices)


def sample_ball(g: Game, radius: object, seed: int) -> Game:
    """A game from the open ball of the given radius around ``g``.

    Each payoff entry moves by ``k * radius / 1000`` with ``k`` uniform on
    ``-999..999``, drawn from ``random.Random(seed)`` in profile order,
    player by player.
    """
    radius = rational(radius)
    if radius < 0:
        raise ConstructionError("radius must be nonnegative")
    if radius == 0:
        return g
    rng = random.Random(seed)
    step = radius / GRID
    table = tuple(
        tuple(v + rng.randint(-(GRID - 1), GRID - 1) * step for v in u) for u in g.table
    )
    return Game(g.strategy_counts, table)


def game_size(g: Game) -> int:
    return math.prod(g.strategy_counts)
