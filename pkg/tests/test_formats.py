from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from eqpayoffs.constructors import diagonal_game
from eqpayoffs.core import CorrelatedDistribution, Game, Polytope, RectangleUnion
from eqpayoffs.equilibria import lp_solve, nash_support_enumeration
from eqpayoffs.formats import (
    FormatError,
    format_certificate,
    format_distributions,
    format_game,
    format_nash_set,
    format_polytope,
    format_rectangle_union,
    lp_certificate,
    parse_certificate,
    parse_distributions,
    parse_game,
    parse_points,
    parse_polytope,
    parse_rectangle_union,
)
from eqpayoffs.lp import LE, LinearProgram

value = st.fractions(min_value=-50, max_value=50, max_denominator=9)

GAME = """egf 1  # header
players 2
strategies 1 2
payoff 1 1 : 1 1/2
payoff 1 2 : -3 0
"""


def test_parse_game():
    g = parse_game(GAME)
    assert g.strategy_counts == (1, 2)
    assert g[(0, 0)] == (1, Fraction(1, 2))
    assert format_game(g).startswith("egf 1\nplayers 2\nstrategies 1 2\npayoff 1 1 : 1 1/2\n")


@given(st.tuples(st.integers(1, 3), st.integers(1, 3)).flatmap(lambda c: st.lists(
    st.tuples(value, value), min_size=c[0] * c[1], max_size=c[0] * c[1]).map(
        lambda t: Game(c, tuple(t)))))
def test_game_round_trip(g):
    text = format_game(g)
    assert parse_game(text) == g
    assert format_game(parse_game(text)) == text


@pytest.mark.parametrize("text, line, column", [
    ("egf 2\nplayers 2\nstrategies 1 1\n", 1, 1),
    ("egf 1\nplayers 2\nstrategies 1 1\npayoff 1 1 : 1 q\n", 4, 16),
    ("egf 1\nplayers 2\nstrategies 1 2\npayoff 1 3 : 1 1\n", 4, 10),
    ("egf 1\nplayers 2\nstrategies 1 1\npayoff 1 1 : 1 1\npayoff 1 1 : 2 2\n", 5, 8),
    ("egf 1\nplayers 2\nstrategies 1 2\npayoff 1 1 : 1 1\n", 4, 1),
    ("egf 1\nplayers 2\nstrategies 1 1\npayoff 1 1 1 1\n", 4, 14),
    ("egf 1\nplayers x\nstrategies 1 1\n", 2, 9),
])
def test_game_errors_carry_positions(text, line, column):
    with pytest.raises(FormatError) as err:
        parse_game(text, "g.egf")
    assert (err.value.line, err.value.column) == (line, column)
    assert str(err.value).startswith(f"g.egf:{line}:{column}: ")


def test_payoff_sets():
    p = parse_polytope("# vertices\n0 0\n2 0\n1/2 1\n")
    assert p == Polytope(((0, 0), (2, 0), (Fraction(1, 2), 1)))
    assert parse_polytope(format_polytope(p)) == p
    u = parse_rectangle_union("1 2 3 4\n0 0 1 1\n")
    assert format_rectangle_union(u) == "0 0 1 1\n1 2 3 4\n"
    with pytest.raises(FormatError):
        parse_rectangle_union("2 1 0 0\n")
    with pytest.raises(FormatError) as err:
        parse_points("1 2\n3\n")
    assert err.value.line == 2
    with pytest.raises(FormatError):
        parse_points("# nothing\n")


def test_distributions_round_trip():
    mus = [CorrelatedDistribution.point_mass((0, 1)),
           CorrelatedDistribution.uniform([(0, 0), (1, 1), (2, 0)])]
    text = format_distributions(mus)
    assert text.splitlines()[0] == "vertex 1"
    assert parse_distributions(text) == mus
    with pytest.raises(FormatError):
        parse_distributions("mass 1 1 : 1/2\n")


def test_nash_set_listing(coordination):
    text = format_nash_set(nash_support_enumeration(coordination))
    assert text.count("component ") == 3
    assert "support 1 : 1 2" in text


def test_certificates():
    text = format_certificate("demo", [("x", (1, Fraction(1, 2))), ("skip", None), ("ok", "yes")])
    assert text == "cert demo\nx : 1 1/2\nok : yes\n"
    assert parse_certificate(text) == ("demo", {"x": ["1", "1/2"], "ok": ["yes"]})
    lp = lp_solve(LinearProgram([1], [[1]], [LE], [3]))
    kind, fields = parse_certificate(lp_certificate(lp))
    assert kind == "lp" and fields["value"] == ["3"]


def test_writers_are_deterministic():
    g = diagonal_game([(1, 2), (3, 4)])
    assert format_game(g) == format_game(Game(g.strategy_counts, g.table))
    assert format_rectangle_union(RectangleUnion(((1, 2, 3, 4),))) == "1 2 3 4\n"
