from fractions import Fraction

from hypothesis import given, strategies as st

from eqpayoffs.constructors import adjoin_ce_point, cycle_profiles, diagonal_game, rectangle_union_game
from eqpayoffs.core import CorrelatedDistribution, Game, MixedProfile, Polytope, RectangleUnion
from eqpayoffs.equilibria import (
    ce_constraints,
    ce_payoff_enclosure,
    ce_payoff_polytope,
    ce_support_closure,
    ce_support_function,
    ce_vertex_enumeration,
    ce_vertex_payoffs,
    is_correlated_equilibrium,
    nash_support_enumeration,
)
from eqpayoffs.geometry import canonical_directions_2d, halfspaces, polytope_contains, polytope_equal, polytope_subset

from oracles import brute_force_ce_payoffs, brute_force_ce_vertices, is_extreme_ce

small = st.integers(min_value=-3, max_value=3)


def games(shape):
    n = shape[0] * shape[1]
    return st.lists(st.tuples(small, small), min_size=n, max_size=n).map(
        lambda t: Game(shape, tuple(t)))


def test_constraint_counts():
    assert len(ce_constraints(Game.from_rows([[(1, 1)] * 2] * 2)).rows) == 4
    three = Game((3, 3, 1), tuple((i, j, 0) for i in range(3) for j in range(3)))
    assert len(ce_constraints(three).rows) == 12


def test_nu_in_the_adjoin_game():
    g = adjoin_ce_point(Game((1, 1), ((1, 1),)), (3, 3))
    nu = CorrelatedDistribution.uniform(cycle_profiles())
    check = is_correlated_equilibrium(g, nu)
    # moving into the base game ties with the block payoff
    assert check and not check.strict and check.min_slack == 0


def test_dominated_point_mass_is_rejected(prisoners):
    check = is_correlated_equilibrium(prisoners, CorrelatedDistribution.point_mass((0, 0)))
    assert not check
    assert check.violated.recommended == 0 and check.violated.deviation == 1
    assert check.violation < 0


def test_coordination_diagonal_mix(coordination):
    mu = CorrelatedDistribution.uniform([(0, 0), (1, 1)])
    check = is_correlated_equilibrium(coordination, mu)
    assert check and check.min_slack == Fraction(1, 2)


def test_payoff_polytope_examples(matching_pennies):
    g = diagonal_game([(1, 2), (3, 4)])
    assert polytope_equal(ce_payoff_polytope(g), Polytope(((1, 2), (3, 4))))
    assert ce_payoff_polytope(matching_pennies).vertices == ((0, 0),)
    assert brute_force_ce_payoffs(matching_pennies) == {(0, 0)}


def test_rectangle_game_payoffs_are_the_hull():
    u = RectangleUnion(((1, 2, 1, 2), (3, 5, 2, 4)))
    cep = ce_payoff_polytope(rectangle_union_game(u))
    assert polytope_equal(cep, Polytope(tuple(u.corners())))


def test_vertex_enumeration_examples():
    assert ce_vertex_enumeration(Game((1, 1), ((4, 4),))) == [CorrelatedDistribution.point_mass((0, 0))]
    g = diagonal_game([(1, 2), (3, 4)])
    assert ce_vertex_enumeration(g) == sorted(
        [CorrelatedDistribution.point_mass((0, 0)), CorrelatedDistribution.point_mass((1, 1))],
        key=lambda mu: mu.weights)


def test_adjoin_game_extreme_points():
    g = adjoin_ce_point(Game((1, 1), ((1, 1),)), (3, 3))
    verts = ce_vertex_enumeration(g)
    nu = CorrelatedDistribution.uniform(cycle_profiles())
    assert set(verts) == {CorrelatedDistribution.point_mass((3, 3)), nu}
    assert all(is_extreme_ce(g, mu) for mu in verts)
    assert sorted(ce_vertex_payoffs(g, verts)) == [(1, 1), (3, 3)]


@given(games((2, 2)))
def test_vertex_enumeration_matches_basis_oracle(g):
    expected = brute_force_ce_vertices(g)
    got = {tuple(mu.mass(p) for p in g.profiles()) for mu in ce_vertex_enumeration(g)}
    assert got == expected


@given(st.one_of(games((2, 2)), games((2, 3))))
def test_payoff_polytope_matches_oracle(g):
    assert polytope_equal(ce_payoff_polytope(g), Polytope(tuple(brute_force_ce_payoffs(g))))


@given(games((2, 3)))
def test_nash_products_are_correlated(g):
    for c in nash_support_enumeration(g).components:
        for prof in c.vertex_profiles():
            assert is_correlated_equilibrium(g, prof.product())


@given(games((3, 2)))
def test_support_closure_covers_every_vertex(g):
    closure = set(ce_support_closure(g))
    for mu in ce_vertex_enumeration(g):
        assert {g.index(p) for p, _ in mu.weights} <= closure


@given(games((2, 3)))
def test_enclosure_sandwiches_the_exact_set(g):
    dirs = [d.vector for d in canonical_directions_2d()]
    witnesses = ce_vertex_enumeration(g)
    enc = ce_payoff_enclosure(g, dirs, witnesses[:2])
    exact = ce_payoff_polytope(g)
    assert polytope_subset(enc.inner, exact)
    assert polytope_subset(exact, enc.outer)
    assert enc.distance_bound(exact) >= 0
    values = ce_support_function(g, dirs)
    for (d, lo, hi), v in zip(enc.brackets, values):
        assert lo <= v <= hi


def test_enclosure_is_tight_with_exact_multipliers():
    g = diagonal_game([(1, 2), (3, 4), (4, 1)])
    exact = ce_payoff_polytope(g)
    _, facets = halfspaces(exact)
    dirs = [d.vector for d in canonical_directions_2d()] + [a for a, _ in facets]
    enc = ce_payoff_enclosure(g, dirs, ce_vertex_enumeration(g))
    assert polytope_equal(enc.outer, exact) and polytope_equal(enc.inner, exact)
    assert enc.distance_bound(exact) == 0


def test_enclosure_ignores_non_equilibrium_witnesses(prisoners):
    bad = CorrelatedDistribution.point_mass((0, 0))
    good = MixedProfile.pure((2, 2), (1, 1)).product()
    enc = ce_payoff_enclosure(prisoners, [d.vector for d in canonical_directions_2d()], [bad, good])
    assert enc.inner.vertices == ((1, 1),)
    assert polytope_contains(enc.outer, (1, 1))
