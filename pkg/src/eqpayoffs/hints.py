"""Floating-point hints for the exact engine.

Nothing here is trusted: every value produced is re-checked in exact
arithmetic by its consumer, so a poor hint can only cost tightness.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from eqpayoffs.core import Game, GameError, point
from eqpayoffs.equilibria.correlated import ce_constraints


@lru_cache(maxsize=4)
def _float_rows(g: Game):
    import numpy as np

    system = ce_constraints(g)
    a_ub = np.zeros((len(system.rows), g.num_profiles))
    for i, row in enumerate(system.rows):
        for k, c in row.coefficients:
            a_ub[i, k] = -float(c)
    a_ub.setflags(write=False)
    return a_ub


def proposed_multipliers(g: Game, d: Sequence[object]) -> tuple[Fraction, ...]:
    """Near-optimal incentive multipliers from a floating-point LP solve.

    The result is only a proposal, rounded to small rationals and clipped at
    zero; :func:`ce_support_bracket` turns any nonnegative proposal into an
    exact upper bound, so floating-point error can loosen the bound but
    never invalidate it.
    """
    import numpy as np
    from scipy.optimize import linprog

    d = point(d)
    system = ce_constraints(g)
    n = g.num_profiles
    a_ub = _float_rows(g)
    c = np.array([-float(sum((x * y for x, y in zip(d, u)), Fraction(0))) for u in g.table])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(system.rows)),
                  A_eq=np.ones((1, n)), b_eq=[1.0], bounds=(0, None), method="highs")
    if res.status != 0:
        raise GameError(f"floating-point CE solve failed: {res.message}")  # pragma: no cover
    out = []
    for m in res.ineqlin.marginals:
        w = Fraction(-float(m)).limit_denominator(10**6)
        out.append(w if w > 0 else Fraction(0))
    return tuple(out)
