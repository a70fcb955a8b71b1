from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from eqpayoffs.constructors import (
    ConstructionError,
    ContainmentError,
    GammaFamily,
    adjoin_ce_point,
    cycle_block,
    cycle_block_n,
    cycle_profiles,
    designated_equilibria,
    diagonal_game,
    diagonal_game_n,
    perturbed_diagonal_game,
    perturbed_full_game,
    prescribe_payoffs,
    prescribe_payoffs_n,
    rectangle_union_game,
    sample_ball,
)
from eqpayoffs.core import CorrelatedDistribution, Game, Polytope, RectangleUnion, payoff_of_distribution
from eqpayoffs.equilibria import (
    ce_payoff_polytope,
    is_correlated_equilibrium,
    is_nash,
    nash_equilibria,
    nep_rectangles,
)
from eqpayoffs.geometry import polytope_equal, rectangle_union_equal

from oracles import brute_force_ce_payoffs

F = Fraction


def rows(g):
    return [[g[(i, j)] for j in range(g.strategy_counts[1])] for i in range(g.strategy_counts[0])]


def test_diagonal_game_examples():
    assert diagonal_game([(1, 1)]).table == ((1, 1),)
    g = diagonal_game([(1, 2), (3, 4)])
    assert rows(g) == [[(1, 2), (0, 2)], [(1, 0), (3, 4)]]
    assert brute_force_ce_payoffs(g) == {(1, 2), (3, 4)}


def test_diagonal_game_four_points_layout():
    pts = [(1, 5), (2, 6), (3, 7), (4, 8)]
    r = rows(diagonal_game(pts))
    for i in range(4):
        for j in range(4):
            if i == j:
                assert r[i][j] == pts[i]
            elif i == 3:
                assert r[i][j] == (pts[j][0], 0)
            elif j == 3:
                assert r[i][j] == (0, pts[i][1])
            else:
                assert r[i][j] == (0, 0)


def test_diagonal_game_needs_positive_points_unless_shifted():
    with pytest.raises(ConstructionError):
        diagonal_game([(0, 1), (2, 2)])
    g = diagonal_game([(0, 1), (2, 2)], auto_shift=True)
    assert polytope_equal(ce_payoff_polytope(g), Polytope(((0, 1), (2, 2))))


def test_diagonal_game_n():
    assert diagonal_game_n([(1, 1, 1)]).table == ((1, 1, 1),)
    g = diagonal_game_n([(1, 2, 3), (4, 5, 6)])
    assert g.strategy_counts == (2, 2, 1)
    assert g[(0, 0, 0)] == (1, 2, 3) and g[(1, 1, 0)] == (4, 5, 6)
    assert g[(1, 0, 0)] == (1, 0, 0) and g[(0, 1, 0)] == (0, 2, 0)
    assert polytope_equal(ce_payoff_polytope(g), Polytope(((1, 2, 3), (4, 5, 6))))
    nash = nash_equilibria(g)
    assert sorted(nash.payoff_points(g)) == [(1, 2, 3), (4, 5, 6)]


def test_rectangle_union_game_examples():
    assert rows(rectangle_union_game(RectangleUnion(((1, 2, 3, 4),)))) == [
        [(1, 3), (2, 3)], [(1, 4), (2, 4)]]
    flat = rectangle_union_game(RectangleUnion(((2, 2, 5, 5),)))
    assert set(flat.table) == {(2, 5)}
    u = RectangleUnion(((1, 2, 1, 2), (3, 4, 3, 4)))
    g = rectangle_union_game(u)
    r = rows(g)
    assert r[0][2] == (0, 1) and r[1][3] == (0, 2)  # (0, B_1)
    assert r[2][0] == (1, 0) and r[3][1] == (2, 0)  # (A_1, 0)
    assert r[2][2] == (3, 3) and r[3][3] == (4, 4)
    assert rectangle_union_equal(nep_rectangles(g), u)


def test_cycle_block():
    c = cycle_block(1, 1)
    assert rows(c)[0] == [(0, 0), (2, 0), (0, 2)]
    assert set(cycle_block(0, 0).table) <= {(0, 0), (1, -1), (-1, 1)}
    x, y = F(7, 3), F(5, 2)
    nu = CorrelatedDistribution.uniform(cycle_profiles())
    assert payoff_of_distribution(cycle_block(x, y), nu) == (x, y)


def test_cycle_block_n():
    c = cycle_block_n((1, 1, 5))
    assert c.strategy_counts == (3, 3, 1)
    assert c[(0, 1, 0)] == (2, 0, 5)
    assert all(c[(i, i, 0)] == (0, 0, 5) for i in range(3))
    nu = CorrelatedDistribution.uniform(cycle_profiles(extra=(0,)))
    assert payoff_of_distribution(cycle_block_n((3, 4, 5)), nu) == (3, 4, 5)


def test_adjoin_example():
    g = adjoin_ce_point(Game((1, 1), ((1, 1),)), (3, 3))
    r = rows(g)
    assert r[3][3] == (1, 1)
    assert all(r[3][j] == (3, 0) and r[j][3] == (0, 3) for j in range(3))
    assert [row[:3] for row in r[:3]] == rows(cycle_block(3, 3))
    assert polytope_equal(ce_payoff_polytope(g), Polytope(((1, 1), (3, 3))))
    assert sorted(nash_equilibria(g).payoff_points(g)) == [(1, 1)]


def test_adjoin_rejects_small_points():
    with pytest.raises(ConstructionError):
        adjoin_ce_point(Game((1, 1), ((1, 1),)), (F(1, 2), 3))
    g = adjoin_ce_point(Game((1, 1), ((1, 1),)), (F(1, 2), 3), auto_shift=True)
    assert polytope_equal(ce_payoff_polytope(g), Polytope(((1, 1), (F(1, 2), 3))))


def test_prescribe_examples():
    g = prescribe_payoffs(Game((1, 1), ((2, 2),)), Polytope(((1, 1), (3, 3))))
    assert polytope_equal(ce_payoff_polytope(g), Polytope(((1, 1), (3, 3))))
    assert rectangle_union_equal(nep_rectangles(g), RectangleUnion(((2, 2, 2, 2),)))

    single = prescribe_payoffs(Game((1, 1), ((2, 2),)), Polytope(((2, 2),)))
    assert polytope_equal(ce_payoff_polytope(single), Polytope(((2, 2),)))


def test_prescribe_on_rectangle_game_gives_hull_of_nash_payoffs():
    u = RectangleUnion(((1, 2, 1, 2), (3, 4, 3, 4)))
    base = rectangle_union_game(u)
    hull = Polytope(tuple(u.corners()))
    g = prescribe_payoffs(base, hull)
    assert polytope_equal(ce_payoff_polytope(g), hull)
    assert polytope_equal(ce_payoff_polytope(base), hull)


def test_prescribe_reports_the_outside_point():
    with pytest.raises(ContainmentError) as err:
        prescribe_payoffs(Game((1, 1), ((2, 2),)), Polytope(((3, 3), (4, 4))))
    assert err.value.witness == (2, 2)
    assert "(2, 2)" in str(err.value)


def test_prescribe_n_example():
    g = prescribe_payoffs_n(Game((1, 1, 1), ((1, 1, 1),)), Polytope(((1, 1, 1), (2, 2, 2))))
    assert g.num_players == 3
    assert polytope_equal(ce_payoff_polytope(g), Polytope(((1, 1, 1), (2, 2, 2))))
    assert nash_equilibria(g).payoff_points(g) == [(1, 1, 1)]
    same = prescribe_payoffs_n(Game((1, 1, 1), ((1, 1, 1),)), Polytope(((1, 1, 1),)))
    assert polytope_equal(ce_payoff_polytope(same), Polytope(((1, 1, 1),)))


def test_perturbed_diagonal_game():
    pts = [(1, 1), (2, 2)]
    assert perturbed_diagonal_game(pts, 0) == diagonal_game(pts)
    # margins carry the row (column) point's own coordinate minus alpha
    assert rows(perturbed_diagonal_game(pts, F(1, 4))) == [
        [(1, 1), (0, F(3, 4))], [(F(3, 4), 0), (2, 2)]]


def test_perturbed_full_game_at_zero_is_the_adjoin_game():
    g = perturbed_full_game([(1, 1)], [(3, 3)], 0)
    assert g == adjoin_ce_point(Game((1, 1), ((1, 1),)), (3, 3))


def test_designated_equilibria_are_equilibria_of_every_member():
    fam = GammaFamily([(3, 3), (5, 4)], [(2, 2), (6, 6)])
    nash, ce = fam.designated()
    for alpha in (0, F(1, 10)):
        g = fam.game(alpha)
        assert all(is_nash(g, p) for p in nash)
        assert all(is_correlated_equilibrium(g, mu) for mu in ce)
    g = fam.game(F(1, 10))
    assert [payoff_of_distribution(g, mu) for mu in ce] == [(2, 2), (6, 6)]


def test_three_player_family_designated_equilibria():
    nash, ce = designated_equilibria([(2, 2, 2)], [(3, 3, 3)])
    g = perturbed_full_game([(2, 2, 2)], [(3, 3, 3)], F(1, 10))
    assert g.strategy_counts == (4, 4, 2)
    assert all(is_nash(g, p).strict for p in nash)
    assert all(is_correlated_equilibrium(g, mu).strict for mu in ce)


def test_sample_ball_basics():
    g = diagonal_game([(1, 2), (3, 4)])
    assert sample_ball(g, 0, 7) is g
    assert sample_ball(g, F(1, 10), 7) == sample_ball(g, F(1, 10), 7)
    assert sample_ball(g, F(1, 10), 7) != sample_ball(g, F(1, 10), 8)


@given(st.fractions(min_value=F(1, 100), max_value=2, max_denominator=100), st.integers(0, 10**6))
def test_sample_ball_stays_strictly_inside(radius, seed):
    g = diagonal_game([(1, 2), (3, 4)])
    h = sample_ball(g, radius, seed)
    assert all(abs(a - b) < radius for u, v in zip(g.table, h.table) for a, b in zip(u, v))
