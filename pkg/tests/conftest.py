from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import settings

from eqpayoffs.core import Game

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def coordination() -> Game:
    return Game.from_rows([[(1, 1), (0, 0)], [(0, 0), (1, 1)]])


@pytest.fixture
def matching_pennies() -> Game:
    return Game.from_rows([[(1, -1), (-1, 1)], [(-1, 1), (1, -1)]])


@pytest.fixture
def prisoners() -> Game:
    # row 1 strictly dominates row 0 for both players
    return Game.from_rows([[(3, 3), (0, 5)], [(5, 0), (1, 1)]])


def half() -> Fraction:
    return Fraction(1, 2)
