"""Verification engine: exact LP, correlated and Nash equilibria, strictness."""

from eqpayoffs.lp import LinearProgram, LPResult, Status, check_certificate, lp_solve
from eqpayoffs.equilibria.correlated import (
    CeCheck,
    CeEnclosure,
    CeRow,
    CeSystem,
    ce_constraints,
    ce_optimal_multipliers,
    ce_payoff_enclosure,
    ce_payoff_polytope,
    ce_support_bracket,
    ce_support_closure,
    ce_support_function,
    ce_vertex_enumeration,
    ce_vertex_payoffs,
    is_correlated_equilibrium,
)
from eqpayoffs.equilibria.nash import (
    NashCheck,
    NashEquilibriumSet,
    SupportComponent,
    dominance_prune,
    is_nash,
    nash_equilibria,
    nash_support_enumeration,
    nep_rectangles,
    pure_payoffs,
)
from eqpayoffs.equilibria.perturbation import (
    PerturbationCertificate,
    SlackWitness,
    verify_perturbation_budget,
)
