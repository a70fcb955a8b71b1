"""Exact scalars, normal-form games and the value types for payoff sets.

Every number in this package is a :class:`fractions.Fraction`.  Profiles are
0-based tuples of strategy indices; the text formats in :mod:`eqpayoffs.formats`
use 1-based indices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Rational = Fraction
Point = tuple[Fraction, ...]
Profile = tuple[int, ...]


class GameError(ValueError):
    """Raised for malformed games, profiles or distributions."""


class BudgetExceeded(RuntimeError):
    """An enumeration needed more work than its budget allows."""

    def __init__(self, message: str, count: int | None = None) -> None:
        super().__init__(message)
        self.count = count


def rational(value: object) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: their binary expansion is almost never what the
    caller meant, and every construction here relies on exact ties.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not payoffs")
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def point(values: Iterable[object]) -> Point:
    return tuple(rational(v) for v in values)


def _strides(counts: Sequence[int]) -> tuple[int, ...]:
    strides = [1] * len(counts)
    for k in range(len(counts) - 2, -1, -1):
        strides[k] = strides[k + 1] * counts[k + 1]
    return tuple(strides)


@dataclass(frozen=True)
class Game:
    """An n-player normal-form game with a dense payoff table.

    ``table`` lists the payoff vector of every pure profile in
    ``itertools.product`` order (the last player's index varies fastest).
    """

    strategy_counts: tuple[int, ...]
    table: tuple[Point, ...]
    _strides: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        counts = tuple(int(k) for k in self.strategy_counts)
        if len(counts) < 2:
            raise GameError("a game needs at least two players")
        if any(k < 1 for k in counts):
            raise GameError(f"every player needs a strategy: {counts}")
        table = tuple(point(p) for p in self.table)
        if len(table) != math.prod(counts):
            raise GameError(
                f"payoff table has {len(table)} entries, expected {math.prod(counts)}"
            )
        if any(len(p) != len(counts) for p in table):
            raise GameError("every payoff vector needs one entry per player")
        object.__setattr__(self, "strategy_counts", counts)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_strides", _strides(counts))

    @classmethod
    def from_function(
        cls, counts: Sequence[int], payoff: Callable[[Profile], Iterable[object]]
    ) -> Game:
        profiles = itertools.product(*(range(k) for k in counts))
        return cls(tuple(counts), tuple(point(payoff(s)) for s in profiles))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Sequence[object]]]) -> Game:
        """Bimatrix game from ``rows[i][j] == (a_ij, b_ij)``."""
        if not rows or not rows[0]:
            raise GameError("empty payoff matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise GameError("ragged payoff matrix")
        return cls((len(rows), width), tuple(point(c) for r in rows for c in r))

    @classmethod
    def from_matrices(cls, a: Sequence[Sequence[object]], b: Sequence[Sequence[object]]) -> Game:
        return cls.from_rows([[(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)])

    @property
    def num_players(self) -> int:
        return len(self.strategy_counts)

    @property
    def num_profiles(self) -> int:
        return len(self.table)

    def profiles(self) -> Iterator[Profile]:
        return itertools.product(*(range(k) for k in self.strategy_counts))

    def index(self, profile: Sequence[int]) -> int:
        if len(profile) != self.num_players:
            raise GameError(f"profile {tuple(profile)} has the wrong length")
        idx = 0
        for s, k, stride in zip(profile, self.strategy_counts, self._strides):
            if not 0 <= s < k:
                raise GameError(f"profile {tuple(profile)} out of range")
            idx += s * stride
        return idx

    def profile_at(self, index: int) -> Profile:
        out = []
        for k, stride in zip(self.strategy_counts, self._strides):
            out.append((index // stride) % k)
        return tuple(out)

    def payoff(self, profile: Sequence[int]) -> Point:
        return self.table[self.index(profile)]

    __getitem__ = payoff

    def rows(self) -> list[list[Point]]:
        """Nested ``[i][j]`` view of a bimatrix game."""
        if self.num_players != 2:
            raise GameError("rows() needs a two-player game")
        m, n = self.strategy_counts
        return [list(self.table[i * n:(i + 1) * n]) for i in range(m)]

    def translated(self, shift: Sequence[object]) -> Game:
        """Add ``shift[k]`` to every payoff of player k."""
        t = point(shift)
        if len(t) != self.num_players:
            raise GameError("shift has the wrong dimension")
        return Game(
            self.strategy_counts,
            tuple(tuple(u + d for u, d in zip(p, t)) for p in self.table),
        )

    def payoff_points(self) -> list[Point]:
        return list(self.table)


@dataclass(frozen=True)
class MixedProfile:
    """One probability vector per player."""

    strategies: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        strategies = tuple(tuple(rational(p) for p in s) for s in self.strategies)
        for i, s in enumerate(strategies):
            if not s or any(p < 0 for p in s) or sum(s) != 1:
                raise GameError(f"player {i} does not have a probability vector: {s}")
        object.__setattr__(self, "strategies", strategies)

    @classmethod
    def pure(cls, counts: Sequence[int], profile: Sequence[int]) -> MixedProfile:
        return cls(tuple(
            tuple(Fraction(int(j == s)) for j in range(k)) for k, s in zip(counts, profile)
        ))

    @property
    def num_players(self) -> int:
        return len(self.strategies)

    def support(self, player: int) -> tuple[int, ...]:
        return tuple(j for j, p in enumerate(self.strategies[player]) if p)

    def is_pure(self) -> bool:
        return all(len(self.support(i)) == 1 for i in range(self.num_players))

    def product(self) -> CorrelatedDistribution:
        supports = [self.support(i) for i in range(self.num_players)]
        weights = {}
        for s in itertools.product(*supports):
            w = Fraction(1)
            for i, si in enumerate(s):
                w *= self.strategies[i][si]
            weights[s] = w
        return CorrelatedDistribution.from_mapping(weights)


@dataclass(frozen=True)
class CorrelatedDistribution:
    """A distribution over pure profiles, stored sparsely (zeros omitted)."""

    weights: tuple[tuple[Profile, Fraction], ...]

    def __post_init__(self) -> None:
        merged: dict[Profile, Fraction] = {}
        for s, w in self.weights:
            s = tuple(int(i) for i in s)
            merged[s] = merged.get(s, Fraction(0)) + rational(w)
        if any(w < 0 for w in merged.values()):
            raise GameError("negative probability")
        if sum(merged.values()) != 1:
            raise GameError("probabilities do not sum to 1")
        items = tuple(sorted((s, w) for s, w in merged.items() if w))
        if len({len(s) for s, _ in items}) > 1:
            raise GameError("profiles of different lengths")
        object.__setattr__(self, "weights", items)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Sequence[int], object]) -> CorrelatedDistribution:
        return cls(tuple((tuple(s), w) for s, w in mapping.items()))

    @classmethod
    def point_mass(cls, profile: Sequence[int]) -> CorrelatedDistribution:
        return cls(((tuple(profile), Fraction(1)),))

    @classmethod
    def uniform(cls, profiles: Iterable[Sequence[int]]) -> CorrelatedDistribution:
        profiles = [tuple(s) for s in profiles]
        return cls(tuple((s, Fraction(1, len(profiles))) for s in profiles))

    def as_dict(self) -> dict[Profile, Fraction]:
        return dict(self.weights)

    def mass(self, profile: Sequence[int]) -> Fraction:
        return self.as_dict().get(tuple(profile), Fraction(0))

    def support(self) -> tuple[Profile, ...]:
        return tuple(s for s, _ in self.weights)

    def marginal(self, player: int) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for s, w in self.weights:
            out[s[player]] = out.get(s[player], Fraction(0)) + w
        return out

    def mix(self, other: CorrelatedDistribution, lam: object) -> CorrelatedDistribution:
        """``lam * self + (1 - lam) * other``."""
        lam = rational(lam)
        merged: dict[Profile, Fraction] = {}
        for s, w in self.weights:
            merged[s] = merged.get(s, Fraction(0)) + lam * w
        for s, w in other.weights:
            merged[s] = merged.get(s, Fraction(0)) + (1 - lam) * w
        return CorrelatedDistribution.from_mapping(merged)


@dataclass(frozen=True)
class Polytope:
    """Convex hull of a vertex list; the list is canonical after construction.

    Canonical means deduplicated, non-extreme points removed and sorted, so
    two polytopes are equal as sets iff their vertex tuples are equal.
    """

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        pts = [point(v) for v in self.vertices]
        if not pts:
            raise GameError("a polytope needs at least one vertex")
        if len({len(p) for p in pts}) != 1:
            raise GameError("vertices of different dimensions")
        from eqpayoffs.geometry import extreme_points

        object.__setattr__(self, "vertices", tuple(extreme_points(pts)))

    @classmethod
    def from_points(cls, points: Iterable[Iterable[object]]) -> Polytope:
        return cls(tuple(point(p) for p in points))

    @property
    def dimension(self) -> int:
        return len(self.vertices[0])

    def translated(self, shift: Sequence[object]) -> Polytope:
        t = point(shift)
        return Polytope(tuple(tuple(a + b for a, b in zip(v, t)) for v in self.vertices))


Rectangle = tuple[Fraction, Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class RectangleUnion:
    """Finite union of closed rectangles ``[a, b] x [c, d]``."""

    rectangles: tuple[Rectangle, ...]

    def __post_init__(self) -> None:
        rects = []
        for r in self.rectangles:
            if len(r) != 4:
                raise GameError(f"rectangle needs four bounds: {r}")
            a, b, c, d = point(r)
            if a > b or c > d:
                raise GameError(f"rectangle bounds out of order: {(a, b, c, d)}")
            rects.append((a, b, c, d))
        if not rects:
            raise GameError("empty rectangle union")
        object.__setattr__(self, "rectangles", tuple(rects))

    @classmethod
    def from_points(cls, points: Iterable[Sequence[object]]) -> RectangleUnion:
        """Union of degenerate rectangles, one per point."""
        return cls(tuple((p[0], p[0], p[1], p[1]) for p in points))

    def corners(self) -> list[Point]:
        out = []
        for a, b, c, d in self.rectangles:
            out.extend([(a, c), (a, d), (b, c), (b, d)])
        return out

    def contains(self, x: Sequence[object]) -> bool:
        px, py = point(x)
        return any(a <= px <= b and c <= py <= d for a, b, c, d in self.rectangles)

    def translated(self, shift: Sequence[object]) -> RectangleUnion:
        tx, ty = point(shift)
        return RectangleUnion(tuple(
            (a + tx, b + tx, c + ty, d + ty) for a, b, c, d in self.rectangles
        ))

    def canonical(self) -> RectangleUnion:
        from eqpayoffs.geometry import rectangle_union_canonicalize

        return rectangle_union_canonicalize(self)


def payoff_of_distribution(g: Game, mu: CorrelatedDistribution) -> Point:
    """Expected payoff vector ``sum_s mu(s) u(s)``."""
    total = [Fraction(0)] * g.num_players
    for s, w in mu.weights:
        u = g.payoff(s)
        for k in range(g.num_players):
            total[k] += w * u[k]
    return tuple(total)


def expected_payoffs(g: Game, profile: MixedProfile) -> Point:
    if profile.num_players != g.num_players:
        raise GameError("profile and game disagree on the number of players")
    for i, s in enumerate(profile.strategies):
        if len(s) != g.strategy_counts[i]:
            raise GameError(f"player {i} vector has the wrong length")
    return payoff_of_distribution(g, profile.product())


def normalize_positive(points: Sequence[Sequence[object]]) -> tuple[Point, list[Point]]:
    """Smallest nonnegative integer shift making every coordinate at least 1.

    Returns ``(shift, shifted_points)``.  Coordinates that already are at
    least 1 are left alone.
    """
    pts = [point(p) for p in points]
    if not pts:
        raise ValueError("normalize_positive needs at least one point")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points of different dimensions")
    shift = tuple(
        Fraction(max(0, math.ceil(1 - min(p[k] for p in pts)))) for k in range(dim)
    )
    return shift, [tuple(a + t for a, t in zip(p, shift)) for p in pts]
