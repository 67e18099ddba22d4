"""Monte Carlo ALM engine for participating life-insurance general accounts.

Pricing models, exact scenario simulation, the yearly balance-sheet
recursion, and standard-formula SCR valuation.  See README.md for the CLI.
"""

__version__ = "0.1.0"

from .curves import MarketCurve
from .rates import (
    HullWhiteModel,
    ShiftFunction,
    VasicekPPModel,
    calibrate_hw_theta,
    calibrate_shift,
    curve_from_model,
)
from .shocks import ShockSpec, apply_shock, builtin_shock, forward_rate

__all__ = [
    "MarketCurve",
    "ShiftFunction",
    "VasicekPPModel",
    "HullWhiteModel",
    "calibrate_shift",
    "calibrate_hw_theta",
    "curve_from_model",
    "ShockSpec",
    "builtin_shock",
    "apply_shock",
    "forward_rate",
    "__version__",
]
