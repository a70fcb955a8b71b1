"""Double description method for cones inside the nonnegative orthant.

The cone is ``{z >= 0 : g.z >= 0 for g in rows}``.  Constraints are added
one at a time to the orthant; rays are primitive integer vectors and the
set of constraints each ray makes tight is a bitmask, so adjacency is the
usual combinatorial test.  Equations are passed as a pair of opposite
inequalities.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from eqpayoffs.core import BudgetExceeded


def _int_row(row: Sequence[Fraction]) -> list[int]:
    den = math.lcm(*(Fraction(v).denominator for v in row))
    return [int(Fraction(v) * den) for v in row]


def _primitive(v: list[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def cone_rays(rows: Sequence[Sequence[Fraction]], dim: int,
              budget: int | None = None) -> list[tuple[int, ...]]:
    """Extreme rays of ``{z in R^dim : z >= 0, row.z >= 0}``, sorted."""
    rays: list[tuple[tuple[int, ...], int]] = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        rays.append((tuple(e), ((1 << dim) - 1) & ~(1 << i)))
    generated = len(rays)
    for k, row in enumerate(rows):
        g = _int_row(row)
        bit = 1 << (dim + k)
        pos, zero, neg = [], [], []
        for r in rays:
            v = sum(a * b for a, b in zip(g, r[0]) if a)
            (pos if v > 0 else zero if v == 0 else neg).append((r, v))
        if not neg:
            rays = [r for r, _ in pos] + [(r[0], r[1] | bit) for r, _ in zero]
            continue
        masks = [r[1] for r in rays]
        new = []
        for (p, vp) in pos:
            for (n, vn) in neg:
                common = p[1] & n[1]
                if common.bit_count() < dim - 2:
                    continue
                if any(m & common == common and m != p[1] and m != n[1] for m in masks):
                    continue
                vec = _primitive([vp * b - vn * a for a, b in zip(p[0], n[0])])
                new.append((vec, common | bit))
        generated += len(new)
        if budget is not None and generated > budget:
            raise BudgetExceeded(f"double description generated more than {budget} rays",
                                 generated)
        rays = [r for r, _ in pos] + [(r[0], r[1] | bit) for r, _ in zero] + new
    return sorted({r for r, _ in rays})


def polytope_vertices(rows: Sequence[Sequence[Fraction]], dim: int,
                      budget: int | None = None) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{z >= 0 : row.z >= 0, sum(z) = 1}``."""
    out = []
    for ray in cone_rays(rows, dim, budget):
        s = sum(ray)
        if s > 0:
            out.append(tuple(Fraction(x, s) for x in ray))
    return sorted(set(out))
