"""Exact convex geometry under the max-norm.

Everything here works on :class:`fractions.Fraction` coordinates.  Polytopes
are V-represented; H-representations are derived on demand by brute force
over vertex subsets, which is exact and cheap for the small vertex counts
that equilibrium payoff sets have.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from eqpayoffs.core import GameError, Point, Polytope, Rectangle, RectangleUnion, point, rational
from eqpayoffs.lp import GE, LE, EQ, LinearProgram, Status, lp_solve


class GeometryError(GameError):
    pass


Halfspace = tuple[Point, Fraction]  # a.x <= b  (or a.x == b for equations)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def _primitive(v: Sequence[Fraction]) -> Point:
    """Scale ``v`` to a primitive integer vector (same direction)."""
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    return tuple(Fraction(x // g) for x in ints) if g else tuple(Fraction(0) for _ in v)


def _row_basis(vectors: Iterable[Sequence[Fraction]]) -> list[Point]:
    """Reduced row echelon basis of the span of ``vectors``."""
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    for v in vectors:
        v = list(v)
        for b, p in zip(basis, pivots):
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, b)]
        lead = next((j for j, x in enumerate(v) if x), None)
        if lead is None:
            continue
        f = v[lead]
        v = [x / f for x in v]
        for i, b in enumerate(basis):
            if b[lead]:
                g = b[lead]
                basis[i] = [x - g * y for x, y in zip(b, v)]
        basis.append(v)
        pivots.append(lead)
    return [tuple(b) for b in basis]


def null_space(rows: Sequence[Sequence[Fraction]], dim: int) -> list[Point]:
    """Basis of ``{x : r.x = 0 for r in rows}``."""
    basis = _row_basis(rows)
    pivots = [next(j for j, x in enumerate(b) if x) for b in basis]
    out = []
    for free in range(dim):
        if free in pivots:
            continue
        v = [Fraction(0)] * dim
        v[free] = Fraction(1)
        for b, p in zip(basis, pivots):
            v[p] = -b[free]
        out.append(_primitive(v))
    return out


def affine_dimension(points: Sequence[Sequence[Fraction]]) -> int:
    p0 = points[0]
    return len(_row_basis(_sub(p, p0) for p in points[1:]))


# -- hulls ---------------------------------------------------------------


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_2d(points: Iterable[Sequence[object]]) -> list[Point]:
    """Extreme points of a planar set in counter-clockwise order.

    Monotone chain, starting at the lexicographically smallest point;
    collinear points are dropped.
    """
    pts = sorted({point(p) for p in points})
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) > 1 else hull[:1]


def _in_hull_lp(x: Point, others: Sequence[Point]) -> bool:
    n = len(others)
    rows = [{j: q[k] for j, q in enumerate(others)} for k in range(len(x))]
    rows.append({j: 1 for j in range(n)})
    lp = LinearProgram([0] * n, rows, [EQ] * len(rows), list(x) + [1])
    return lp_solve(lp).status is Status.OPTIMAL


def extreme_points(points: Iterable[Sequence[object]]) -> list[Point]:
    """Deduplicated extreme points, sorted lexicographically."""
    pts = sorted({point(p) for p in points})
    if len(pts) <= 2:
        return pts
    dim = len(pts[0])
    if dim == 1:
        return [pts[0], pts[-1]]
    if dim == 2:
        return sorted(hull_2d(pts))
    keep = []
    for i, p in enumerate(pts):
        if not _in_hull_lp(p, pts[:i] + pts[i + 1:]):
            keep.append(p)
    return keep


def convex_hull(points: Iterable[Sequence[object]], dim: int | None = None) -> Polytope:
    pts = [point(p) for p in points]
    if not pts:
        raise GeometryError("convex hull of an empty set")
    d = len(pts[0]) if dim is None else dim
    if d not in (2, 3) or any(len(p) != d for p in pts):
        raise GeometryError(f"convex hulls are supported in dimension 2 and 3, not {d}")
    return Polytope(tuple(pts))


@lru_cache(maxsize=4096)
def _halfspaces(vertices: tuple[Point, ...]) -> tuple[tuple[Halfspace, ...], tuple[Halfspace, ...]]:
    p0 = vertices[0]
    dim = len(p0)
    span = _row_basis(_sub(p, p0) for p in vertices[1:])
    equations = tuple((a, _dot(a, p0)) for a in null_space(span, dim))
    k = len(span)
    if k == 0:
        return equations, ()
    facets: dict[Point, Fraction] = {}
    for subset in itertools.combinations(vertices, k):
        q0 = subset[0]
        face = [_sub(q, q0) for q in subset[1:]]
        # normal inside the affine hull, orthogonal to the face
        coeff_rows = [[_dot(b, f) for b in span] for f in face]
        sol = null_space(coeff_rows, k)
        if len(sol) != 1:
            continue
        n = _primitive([_dot([c for c in sol[0]], [b[i] for b in span]) for i in range(dim)])
        h = _dot(n, q0)
        vals = [_dot(n, v) for v in vertices]
        if all(v <= h for v in vals):
            facets[n] = h
        elif all(v >= h for v in vals):
            facets[tuple(-x for x in n)] = -h
    return equations, tuple(sorted(facets.items()))


def halfspaces(p: Polytope) -> tuple[tuple[Halfspace, ...], tuple[Halfspace, ...]]:
    """``(equations, inequalities)`` describing ``p``: ``a.x = b`` and ``a.x <= b``."""
    return _halfspaces(p.vertices)


def polytope_contains(p: Polytope, x: Sequence[object]) -> bool:
    x = point(x)
    if len(x) != p.dimension:
        raise GeometryError("dimension mismatch")
    eqs, ineqs = halfspaces(p)
    return all(_dot(a, x) == b for a, b in eqs) and all(_dot(a, x) <= b for a, b in ineqs)


def polytope_subset(p: Polytope, q: Polytope) -> bool:
    return all(polytope_contains(q, v) for v in p.vertices)


def polytope_equal(p: Polytope, q: Polytope) -> bool:
    return p.dimension == q.dimension and polytope_subset(p, q) and polytope_subset(q, p)


def polygon_from_halfplanes(constraints: Sequence[Halfspace]) -> Polytope:
    """Bounded planar polygon ``{x : a.x <= b}`` from its inequalities."""
    cons = [(point(a), rational(b)) for a, b in constraints]
    cands = []
    for (a1, b1), (a2, b2) in itertools.combinations(cons, 2):
        det = a1[0] * a2[1] - a1[1] * a2[0]
        if det == 0:
            continue
        x = ((b1 * a2[1] - b2 * a1[1]) / det, (a1[0] * b2 - a2[0] * b1) / det)
        if all(_dot(a, x) <= b for a, b in cons):
            cands.append(x)
    if not cands:
        raise GeometryError("half-planes define an empty or unbounded region")
    return Polytope(tuple(cands))


# -- directions and support functions -------------------------------------


@dataclass(frozen=True)
class Direction:
    """Nonzero direction, scaled so the first nonzero entry has modulus 1.

    Only positive rescaling is applied, so ``Direction((-2, 1))`` is
    ``(-1, 1/2)`` and keeps pointing the same way.
    """

    vector: Point

    def __post_init__(self) -> None:
        v = point(self.vector)
        lead = next((x for x in v if x), None)
        if lead is None:
            raise GeometryError("direction must be nonzero")
        object.__setattr__(self, "vector", tuple(x / abs(lead) for x in v))

    def __iter__(self):
        return iter(self.vector)

    def __len__(self) -> int:
        return len(self.vector)


def canonical_directions_2d() -> list[Direction]:
    """The 16 primitive integer directions with entries in ``[-2, 2]``."""
    out = []
    for a in range(-2, 3):
        for b in range(-2, 3):
            if (a, b) != (0, 0) and math.gcd(a, b) == 1:
                out.append(Direction((a, b)))
    return out


SetLike = Union[Polytope, RectangleUnion, Sequence[Sequence[object]]]


def support_function(s: SetLike, d: Sequence[object]) -> Fraction:
    d = point(d)
    return max(_dot(d, v) for v in _vertices_of(s))


# -- rectangle unions -----------------------------------------------------


def _rect_inside(r: Rectangle, s: Rectangle) -> bool:
    return s[0] <= r[0] and r[1] <= s[1] and s[2] <= r[2] and r[3] <= s[3]


def rectangle_union_canonicalize(u: RectangleUnion) -> RectangleUnion:
    rects = sorted(set(u.rectangles))
    keep = [r for r in rects if not any(s != r and _rect_inside(r, s) for s in rects)]
    return RectangleUnion(tuple(keep))


def _sample_coords(values: Iterable[Fraction]) -> list[Fraction]:
    xs = sorted(set(values))
    mids = [(a + b) / 2 for a, b in zip(xs, xs[1:])]
    return sorted(xs + mids)


def rectangle_union_subset(a: RectangleUnion, b: RectangleUnion) -> bool:
    """``a ⊆ b``, tested on one sample point per cell of the joint grid."""
    rects = a.rectangles + b.rectangles
    xs = _sample_coords(v for r in rects for v in r[:2])
    ys = _sample_coords(v for r in rects for v in r[2:])
    return all(b.contains((x, y)) for x in xs for y in ys if a.contains((x, y)))


def rectangle_union_equal(a: RectangleUnion, b: RectangleUnion) -> bool:
    return rectangle_union_subset(a, b) and rectangle_union_subset(b, a)


# -- Hausdorff distance ---------------------------------------------------


@dataclass(frozen=True)
class DistanceBound:
    """Certified enclosure ``lower <= d <= upper`` when no exact value is available."""

    lower: Fraction
    upper: Fraction


@dataclass(frozen=True)
class _Piece:
    vertices: tuple[Point, ...]
    box: bool  # axis-aligned box (points included)


def _pieces(s: SetLike) -> tuple[list[_Piece], bool]:
    """Convex pieces of ``s`` and whether ``s`` itself is convex."""
    if isinstance(s, Polytope):
        verts = s.vertices
        lo = tuple(map(min, zip(*verts)))
        hi = tuple(map(max, zip(*verts)))
        is_box = set(verts) == set(itertools.product(*({a, b} for a, b in zip(lo, hi))))
        return [_Piece(verts, is_box)], True
    if isinstance(s, RectangleUnion):
        pieces = [_Piece(tuple(extreme_points([(a, c), (b, c), (a, d), (b, d)])), True)
                  for a, b, c, d in s.rectangles]
        return pieces, len(pieces) == 1
    pts = sorted({point(p) for p in s})
    if not pts:
        raise GeometryError("distance to an empty set")
    return [_Piece((p,), True) for p in pts], len(pts) == 1


def _vertices_of(s: SetLike) -> list[Point]:
    return [v for piece in _pieces(s)[0] for v in piece.vertices]


def _box_distance(x: Point, piece: _Piece) -> Fraction:
    lo = map(min, zip(*piece.vertices))
    hi = map(max, zip(*piece.vertices))
    return max(max(l - xi, xi - h, Fraction(0)) for xi, l, h in zip(x, lo, hi))


def point_distance(x: Sequence[object], piece_vertices: Sequence[Sequence[object]]) -> Fraction:
    """Max-norm distance from ``x`` to the convex hull of ``piece_vertices``."""
    x = point(x)
    verts = [point(v) for v in piece_vertices]
    n, d = len(verts), len(x)
    # variables: lambda_0..n-1, t
    rows, rel, rhs = [], [], []
    for k in range(d):
        rows.append({**{j: v[k] for j, v in enumerate(verts)}, n: -1})
        rel.append(LE)
        rhs.append(x[k])
        rows.append({**{j: v[k] for j, v in enumerate(verts)}, n: 1})
        rel.append(GE)
        rhs.append(x[k])
    rows.append({j: 1 for j in range(n)})
    rel.append(EQ)
    rhs.append(1)
    lp = LinearProgram([0] * n + [1], rows, rel, rhs, maximize=False)
    return lp_solve(lp).value


def _piece_distance(x: Point, piece: _Piece) -> Fraction:
    if piece.box:
        return _box_distance(x, piece)
    return point_distance(x, piece.vertices)


def _set_distance(x: Point, pieces: Sequence[_Piece]) -> Fraction:
    return min(_piece_distance(x, p) for p in pieces)


def _sum_normals(piece: _Piece, dim: int) -> list[Point] | None:
    """Normals covering every facet of ``piece`` ⊕ (max-norm unit ball).

    ``None`` when the dimension is too high to list them exactly.
    """
    units = []
    for i in range(dim):
        e = [Fraction(0)] * dim
        e[i] = Fraction(1)
        units.append(tuple(e))
        units.append(tuple(-x for x in e))
    if piece.box:
        return units
    if dim > 3:
        return None
    eqs, ineqs = _halfspaces(piece.vertices)
    normals = set(units)
    normals.update(a for a, _ in ineqs)
    for a, _ in eqs:
        normals.add(a)
        normals.add(tuple(-x for x in a))
    if dim == 3:
        for p, q in itertools.combinations(piece.vertices, 2):
            e = _sub(q, p)
            for u in units[::2]:
                c = (e[1] * u[2] - e[2] * u[1], e[2] * u[0] - e[0] * u[2], e[0] * u[1] - e[1] * u[0])
                if any(c):
                    c = _primitive(c)
                    normals.add(c)
                    normals.add(tuple(-x for x in c))
    return sorted(normals)


def _directed_convex(source: Sequence[Point], targets: Sequence[_Piece]) -> Fraction | DistanceBound:
    """``sup_{x in conv(source)} d(x, union of targets)``."""
    best = max(_set_distance(v, targets) for v in source)
    if len(source) == 1 or len(targets) == 1:
        return best  # distance to one convex piece is convex in x
    dim = len(source[0])
    normal_sets = [_sum_normals(t, dim) for t in targets]
    if any(ns is None for ns in normal_sets):
        upper = min(max(_piece_distance(v, t) for v in source) for t in targets)
        return best if best == upper else DistanceBound(best, upper)

    # d_k(x) = max_n (n.x - h_k(n)) / |n|_1; maximise t with d_k(x) >= t for all k
    branches = []
    for t, normals in zip(targets, normal_sets):
        branches.append([(n, max(_dot(n, v) for v in t.vertices), sum(abs(c) for c in n))
                         for n in normals])
    feq, fineq = _halfspaces(tuple(extreme_points(source)))
    base_rows, base_rel, base_rhs = [], [], []
    for a, b in feq:
        base_rows.append(dict(enumerate(a)))
        base_rel.append(EQ)
        base_rhs.append(b)
    for a, b in fineq:
        base_rows.append(dict(enumerate(a)))
        base_rel.append(LE)
        base_rhs.append(b)
    free = [None] * (dim + 1)
    objective = [0] * dim + [1]

    def relax(chosen):
        rows, rel, rhs = list(base_rows), list(base_rel), list(base_rhs)
        for n, h, w in chosen:
            # n.x - h >= w t
            rows.append({**dict(enumerate(n)), dim: -w})
            rel.append(GE)
            rhs.append(h)
        res = lp_solve(LinearProgram(objective, rows, rel, rhs, free))
        if res.status is Status.UNBOUNDED:
            return None
        return res.value if res.status is Status.OPTIMAL else Fraction(-1)

    def search(k, chosen):
        nonlocal best
        if k == len(branches):
            return
        for choice in branches[k]:
            value = relax(chosen + [choice])
            if value is None or value > best:
                if k + 1 == len(branches):
                    best = value
                else:
                    search(k + 1, chosen + [choice])

    search(0, [])
    return max(best, Fraction(0))


def directed_distance(a: SetLike, b: SetLike) -> Fraction | DistanceBound:
    """``sup_{x in a} inf_{y in b} |x - y|_inf``."""
    source, _ = _pieces(a)
    targets, convex = _pieces(b)
    dims = {len(v) for p in source + targets for v in p.vertices}
    if len(dims) != 1:
        raise GeometryError("dimension mismatch")
    lows, highs = [], []
    for piece in source:
        r = _directed_convex(piece.vertices, targets)
        lo, hi = (r.lower, r.upper) if isinstance(r, DistanceBound) else (r, r)
        lows.append(lo)
        highs.append(hi)
    lo, hi = max(lows), max(highs)
    return lo if lo == hi else DistanceBound(lo, hi)


def hausdorff_distance(a: SetLike, b: SetLike) -> Fraction | DistanceBound:
    """Max-norm Hausdorff distance; exact unless a :class:`DistanceBound` is returned."""
    ab, ba = directed_distance(a, b), directed_distance(b, a)
    lo = max(x.lower if isinstance(x, DistanceBound) else x for x in (ab, ba))
    hi = max(x.upper if isinstance(x, DistanceBound) else x for x in (ab, ba))
    return lo if lo == hi else DistanceBound(lo, hi)


def epsilon_close(a: SetLike, b: SetLike, epsilon: object) -> bool:
    """``hausdorff_distance(a, b) < epsilon`` (strict)."""
    eps = rational(epsilon)
    d = hausdorff_distance(a, b)
    if isinstance(d, DistanceBound):
        if d.upper < eps:
            return True
        if d.lower >= eps:
            return False
        raise GeometryError(f"distance enclosure [{d.lower}, {d.upper}] straddles {eps}")
    return d < eps
