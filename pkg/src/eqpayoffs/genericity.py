"""Sampled robustness checks around Gamma_alpha.

For each game drawn from the ball around Gamma_alpha this checks that

* the designated equilibria of Gamma_0 are still strict,
* the Nash payoff set (exact, by support enumeration) is epsilon-close to U,
* the correlated payoff set is epsilon-close to P.

The last check does not solve the CE polytope exactly.  An inner polygon
(verified CE witnesses) and an outer polygon (weak-duality bounds in a
fan of directions) enclose it, and both the support-function gaps and a
Hausdorff bound are taken from that enclosure, so every pass is a proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from eqpayoffs.constructors import GammaFamily, sample_ball
from eqpayoffs.core import Game, Point, Polytope, RectangleUnion, rational
from eqpayoffs.equilibria import (
    ce_constraints,
    ce_payoff_enclosure,
    is_correlated_equilibrium,
    is_nash,
    nash_support_enumeration,
)
from eqpayoffs.geometry import (
    DistanceBound,
    canonical_directions_2d,
    halfspaces,
    hausdorff_distance,
    support_function,
)
from eqpayoffs.hints import proposed_multipliers


@dataclass(frozen=True)
class SampleVerdict:
    seed: int | None
    strict: bool
    nep_distance: Fraction
    cep_distance: Fraction  # certified upper bound
    support_gaps: tuple[tuple[Point, Fraction], ...]  # certified upper bounds
    epsilon: Fraction

    @property
    def nep_close(self) -> bool:
        return self.nep_distance < self.epsilon

    @property
    def cep_close(self) -> bool:
        return self.cep_distance < self.epsilon and all(g < self.epsilon for _, g in self.support_gaps)

    @property
    def passed(self) -> bool:
        return self.strict and self.nep_close and self.cep_close


def _upper(d: Fraction | DistanceBound) -> Fraction:
    return d.upper if isinstance(d, DistanceBound) else d


def check_game(family: GammaFamily, g: Game, epsilon: object, *,
               seed: int | None = None, budget: int = 2**24) -> SampleVerdict:
    eps = rational(epsilon)
    nash, ce = family.designated()
    system = ce_constraints(g)
    strict = all(is_nash(g, p).strict for p in nash) and all(
        is_correlated_equilibrium(g, mu, system).strict for mu in ce)

    target_u = RectangleUnion.from_points(family.u_points)
    nep = nash_support_enumeration(g, budget).payoff_rectangles()
    nep_distance = _upper(hausdorff_distance(nep, target_u))

    target_p = Polytope(family.p_vertices)
    canon = [d.vector for d in canonical_directions_2d()]
    normals = [a for a, _ in halfspaces(target_p)[1]]
    witnesses = list(ce) + [p.product() for p in nash]
    enclosure = ce_payoff_enclosure(g, canon + normals, witnesses, proposed_multipliers)
    gaps = []
    for d, lo, hi in enclosure.brackets[:len(canon)]:
        h = support_function(target_p, d)
        gaps.append((d, max(hi - h, h - lo)))
    return SampleVerdict(seed, strict, nep_distance, enclosure.distance_bound(target_p),
                         tuple(gaps), eps)


def run_trials(family: GammaFamily, alpha: object, radius: object, seed: int, trials: int,
               epsilon: object, budget: int = 2**24) -> list[SampleVerdict]:
    """Trial ``k`` samples ``B(Gamma_alpha, radius)`` with seed ``seed + k``."""
    base = family.game(alpha)
    out = []
    for k in range(trials):
        g = sample_ball(base, radius, seed + k)
        out.append(check_game(family, g, epsilon, seed=seed + k, budget=budget))
    return out


def summarize(verdicts: Sequence[SampleVerdict]) -> dict[str, int]:
    return {
        "trials": len(verdicts),
        "passed": sum(v.passed for v in verdicts),
        "strict": sum(v.strict for v in verdicts),
        "nep_close": sum(v.nep_close for v in verdicts),
        "cep_close": sum(v.cep_close for v in verdicts),
    }
