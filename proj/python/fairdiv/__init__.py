"""Welfare-maximizing allocation menus.

Solvers for the market-clearing pure-option menu, shadow costs of supply,
stochastic-dominance optimality certificates, the optimal two-good menu
size, and Monte Carlo menu evaluation. The heavy lifting happens in the
compiled extension; every function accepts plain lists and returns dicts.
"""

from ._core import (
    ValueModel,
    certify,
    lottery_fixed_point,
    optimize_menu_size,
    ratio_monotonicity,
    shadow_costs,
    simulate,
    solve_ceei,
    unit_demand_slack,
)

__all__ = [
    "ValueModel",
    "certify",
    "lottery_fixed_point",
    "optimize_menu_size",
    "ratio_monotonicity",
    "shadow_costs",
    "simulate",
    "solve_ceei",
    "unit_demand_slack",
]
