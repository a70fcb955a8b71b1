"""Certified perturbation budgets for the Gamma_alpha family.

A game in the open ball of radius ``r`` moves every payoff by less than
``r``, so each incentive difference ``u_i(s) - u_i(t_i, s_-i)`` moves by
less than ``2 r``.  A pure Nash deviation with slack ``L`` therefore survives
any ``r <= L / 2``, and a CE row whose recommended strategy has marginal
``m`` survives ``r <= L / (2 m)``.  The safe radius is the least of these
ratios; ``alpha`` is certified when it is at least ``alpha / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

from eqpayoffs.core import CorrelatedDistribution, Game, GameError, MixedProfile, rational
from eqpayoffs.equilibria.correlated import ce_constraints


class _Family(Protocol):
    def game(self, alpha: object) -> Game: ...

    def designated(self) -> tuple[list[MixedProfile], list[CorrelatedDistribution]]: ...


@dataclass(frozen=True)
class SlackWitness:
    """The incentive inequality that limits the radius."""

    kind: str  # "nash" or "ce"
    index: int
    player: int
    recommended: int
    deviation: int
    slack: Fraction
    weight: Fraction

    @property
    def radius(self) -> Fraction:
        return self.slack / (2 * self.weight)


@dataclass(frozen=True)
class PerturbationCertificate:
    alpha: Fraction
    certified: bool
    radius: Fraction
    witness: SlackWitness

    @property
    def required(self) -> Fraction:
        return self.alpha / 2


def _nash_witnesses(g: Game, nash: list[MixedProfile]) -> list[SlackWitness]:
    out = []
    for idx, mp in enumerate(nash):
        if not mp.is_pure():
            raise GameError("designated Nash equilibria must be pure")
        prof = tuple(mp.support(i)[0] for i in range(mp.num_players))
        base = g.payoff(prof)
        for i, k in enumerate(g.strategy_counts):
            for t in range(k):
                if t != prof[i]:
                    dev = prof[:i] + (t,) + prof[i + 1:]
                    out.append(SlackWitness("nash", idx, i, prof[i], t,
                                            base[i] - g.payoff(dev)[i], Fraction(1)))
    return out


def _ce_witnesses(g: Game, ce: list[CorrelatedDistribution]) -> list[SlackWitness]:
    system = ce_constraints(g)
    out = []
    for idx, mu in enumerate(ce):
        weights = {g.index(p): w for p, w in mu.weights}
        marginals = [mu.marginal(i) for i in range(g.num_players)]
        for row in system.rows:
            m = marginals[row.player].get(row.recommended)
            if m:
                out.append(SlackWitness("ce", idx, row.player, row.recommended,
                                        row.deviation, row.value(weights), m))
    return out


def verify_perturbation_budget(family: _Family, alpha: object) -> PerturbationCertificate:
    """Certify that every designated equilibrium stays strict on ``B(Gamma_alpha, alpha/2)``.

    Not certified when some slack is nonpositive (the witness is that
    inequality; ``radius`` is then 0) or when the safe radius falls short
    of ``alpha / 2``.
    """
    alpha = rational(alpha)
    g = family.game(alpha)
    nash, ce = family.designated()
    rows = _nash_witnesses(g, nash) + _ce_witnesses(g, ce)
    bad = [w for w in rows if w.slack <= 0]
    if bad:
        worst = min(bad, key=lambda w: (w.slack, w.kind, w.index, w.player, w.recommended, w.deviation))
        return PerturbationCertificate(alpha, False, Fraction(0), worst)
    worst = min(rows, key=lambda w: (w.radius, w.kind, w.index, w.player, w.recommended, w.deviation))
    return PerturbationCertificate(alpha, worst.radius >= alpha / 2, worst.radius, worst)
