"""Games with prescribed Nash and correlated equilibrium payoff sets, verified exactly."""

__version__ = "0.1.0"
