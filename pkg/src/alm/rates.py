"""Gaussian short-rate models with a deterministic piecewise-constant shift.

The working model is a mean-reverting Gaussian factor ``x_t`` plus a
deterministic staircase shift ``phi``:

    r_t = x_t + phi(t),      dx_t = k (theta - x_t) dt + sigma_r dZ_t

Zero-coupon prices are analytic,

    P(x, t, T) = A(T-t) * exp( -int_t^T phi(s) ds
                               - x * g_k(T-t) - theta * (T-t - g_k(T-t)) ),

with ``g_k(u) = (1 - exp(-k u)) / k`` and
``A(u) = exp( sigma_r^2/(2 k^2) (u - g_k(u)) - sigma_r^2/(4k) g_k(u)^2 )``,
the exponential of half the variance of the integrated factor.

Because ``phi`` is piecewise constant on unit intervals, fitting the model to
an annual pillar curve is an exact bootstrap (each pillar equation is linear
in one staircase value) -- no root finding, round-trip error is at machine
precision.

A Hull-White variant (mean reversion toward a staircase ``vartheta``) is kept
for comparison purposes only; it exhibits large oscillations in the fitted
staircase after regulatory curve shocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import MarketCurve

__all__ = [
    "ShiftFunction",
    "VasicekPPModel",
    "HullWhiteModel",
    "HorizonError",
    "g_factor",
    "convexity_factor",
    "calibrate_shift",
    "calibrate_hw_theta",
    "curve_from_model",
    "log_price_table",
]


def g_factor(k: float, u: float) -> float:
    """g_k(u) = (1 - exp(-k u)) / k, the duration of the Gaussian factor.

    Uses expm1 so the value stays accurate down to k near zero.
    """
    if u == 0.0:
        return 0.0
    return -math.expm1(-k * u) / k


def convexity_factor(k: float, sigma_r: float, u: float) -> float:
    """The A(u) term of the zero-coupon price.

    ``A(u) = exp( sigma^2/(2 k^2) (u - g_k(u)) - sigma^2/(4k) g_k(u)^2 )``,
    i.e. exp of half the variance of the integrated factor, so that the
    price equals the exact Gaussian expectation E[exp(-int x)] and matches
    the exact-simulation discount factors.
    """
    g = g_factor(k, u)
    s2 = sigma_r * sigma_r
    return math.exp(s2 / (2.0 * k**2) * (u - g) - s2 / (4.0 * k) * g * g)


class HorizonError(ValueError):
    """Pricing request beyond the calibrated shift horizon."""


@dataclass(frozen=True)
class ShiftFunction:
    """Piecewise-constant deterministic shift.

    ``values[i]`` is the shift on the interval ``[i, i+1)``; the horizon is
    ``len(values)`` years.  The cumulative integral at integer points is
    precomputed so that ``int_a^b phi`` is exact.
    """

    values: np.ndarray = field()
    _cum: np.ndarray = field(repr=False, compare=False, default=None)

    def __init__(self, values) -> None:
        arr = np.atleast_1d(np.asarray(values, dtype=np.float64)).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("shift needs at least one annual value")
        if not np.all(np.isfinite(arr)):
            raise ValueError("shift values must be finite")
        arr.flags.writeable = False
        cum = np.concatenate(([0.0], np.cumsum(arr)))
        cum.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def zero(cls, horizon: int) -> "ShiftFunction":
        return cls(np.zeros(int(horizon)))

    @property
    def horizon(self) -> int:
        return int(self.values.size)

    def value_at(self, t: float) -> float:
        """phi(t), right-continuous staircase."""
        if t < 0.0 or t >= self.horizon:
            raise HorizonError(f"shift defined on [0, {self.horizon}), asked at t={t}")
        return float(self.values[int(math.floor(t))])

    def integral(self, a: float, b: float) -> float:
        """Exact int_a^b phi(s) ds for 0 <= a <= b <= horizon."""
        if a > b:
            raise ValueError("integral bounds must satisfy a <= b")
        if a < 0.0 or b > self.horizon:
            raise HorizonError(
                f"shift horizon is {self.horizon}y, integral asked on [{a}, {b}]"
            )
        return self._partial(b) - self._partial(a)

    def _partial(self, t: float) -> float:
        i = int(math.floor(t))
        if i == t and i <= self.horizon:
            return float(self._cum[i])
        return float(self._cum[i] + (t - i) * self.values[i])

    def cumulative(self) -> np.ndarray:
        """Integer-grid integrals: entry t is int_0^t phi, t = 0..horizon."""
        return self._cum


@dataclass(frozen=True)
class VasicekPPModel:
    """Mean-reverting Gaussian factor plus deterministic staircase shift.

    Parameters
    ----------
    x0, theta : float
        Initial level and mean-reversion level of the factor (per year).
    k : float
        Mean-reversion speed, must be positive.
    sigma_r : float
        Factor volatility, non-negative.
    shift : ShiftFunction
        Staircase shift; ``r_t = x_t + shift(t)``.
    """

    x0: float
    theta: float
    k: float
    sigma_r: float
    shift: ShiftFunction

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise ValueError(f"mean-reversion speed k must be > 0, got {self.k}")
        if self.sigma_r < 0.0:
            raise ValueError(f"sigma_r must be >= 0, got {self.sigma_r}")

    # -- pricing --------------------------------------------------------------

    def zcb_price(self, x: float, t: float, mat: float) -> float:
        """Zero-coupon bond price P(t, mat) given factor level ``x`` at ``t``.

        Raises
        ------
        HorizonError
            If ``mat`` exceeds the shift horizon.
        """
        if not 0.0 <= t <= mat:
            raise ValueError(f"need 0 <= t <= maturity, got t={t}, maturity={mat}")
        if mat > self.shift.horizon:
            raise HorizonError(
                f"maturity {mat}y exceeds shift horizon {self.shift.horizon}y"
            )
        u = mat - t
        g = g_factor(self.k, u)
        a = convexity_factor(self.k, self.sigma_r, u)
        return a * math.exp(
            -self.shift.integral(t, mat) - x * g - self.theta * (u - g)
        )

    def swap_rate(self, x: float, t: float, n: int) -> float:
        """Par coupon of an ``n``-year annual bond issued at ``t``."""
        if n < 1:
            raise ValueError(f"swap tenor must be >= 1 year, got {n}")
        annuity = sum(self.zcb_price(x, t, t + i) for i in range(1, n + 1))
        if annuity <= 0.0:
            raise ValueError(f"degenerate curve: annuity factor {annuity} <= 0")
        return (1.0 - self.zcb_price(x, t, t + n)) / annuity

    def bond_price(self, x: float, t: float, n: int, coupon: float) -> float:
        """Price of an annual-coupon bond with ``n`` years left, unit nominal."""
        if n < 1:
            raise ValueError(f"bond maturity must be >= 1 year, got {n}")
        pv = sum(coupon * self.zcb_price(x, t, t + i) for i in range(1, n + 1))
        return pv + self.zcb_price(x, t, t + n)

    def basket_price(self, x: float, t: float, coupons) -> float:
        """Equally weighted basket of bonds maturing in 1..n years.

        ``coupons[i-1]`` is the coupon of the bond maturing at ``t + i``.
        """
        cs = np.atleast_1d(np.asarray(coupons, dtype=np.float64))
        if cs.size == 0:
            raise ValueError("basket needs at least one bond")
        n = cs.size
        return sum(self.bond_price(x, t, i, cs[i - 1]) for i in range(1, n + 1)) / n

    def short_rate(self, x: float, t: float) -> float:
        return x + self.shift.value_at(t)

    def with_shift(self, shift: ShiftFunction) -> "VasicekPPModel":
        return replace(self, shift=shift)


@dataclass(frozen=True)
class HullWhiteModel:
    """Gaussian short rate mean-reverting toward a staircase level.

    ``r_t`` reverts at speed ``k`` toward ``vartheta(t)``, a piecewise
    constant function (``theta_values[i]`` on ``[i, i+1)``).
    """

    r0: float
    k: float
    sigma_r: float
    theta_values: np.ndarray

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise ValueError(f"mean-reversion speed k must be > 0, got {self.k}")
        if self.sigma_r < 0.0:
            raise ValueError(f"sigma_r must be >= 0, got {self.sigma_r}")
        arr = np.atleast_1d(np.asarray(self.theta_values, dtype=np.float64)).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "theta_values", arr)

    @property
    def horizon(self) -> int:
        return int(self.theta_values.size)

    def zcb_price(self, r: float, t: int, mat: int) -> float:
        """P(t, mat) given short rate ``r`` at integer time ``t``."""
        t, mat = int(t), int(mat)
        if not 0 <= t <= mat:
            raise ValueError(f"need 0 <= t <= maturity, got t={t}, maturity={mat}")
        if mat > self.horizon:
            raise HorizonError(f"maturity {mat}y exceeds staircase horizon {self.horizon}y")
        u = mat - t
        g = g_factor(self.k, u)
        a = convexity_factor(self.k, self.sigma_r, u)
        # int_t^mat (1 - exp(-k (mat - s))) vartheta(s) ds, staircase-exact
        acc = 0.0
        for i in range(t, mat):
            w = 1.0 - math.exp(-self.k * (mat - i - 1)) * g_factor(self.k, 1.0)
            acc += self.theta_values[i] * w
        return a * math.exp(-r * g - acc)


def calibrate_shift(
    curve: MarketCurve, x0: float, theta: float, k: float, sigma_r: float
) -> ShiftFunction:
    """Fit the staircase shift so the model reprices every curve pillar.

    The pillar equation is linear in each staircase value, so the bootstrap
    is closed form: with ``V(t)`` the unshifted Gaussian-model price,

        int_0^t phi = log V(t) - log P_mkt(0, t),

    and the staircase value on ``[t-1, t)`` is the increment of that
    integral.  Round-trip repricing agrees to machine precision.
    """
    h = curve.max_maturity
    cum = np.empty(h + 1)
    cum[0] = 0.0
    for t in range(1, h + 1):
        g = g_factor(k, float(t))
        a = convexity_factor(k, sigma_r, float(t))
        log_v = math.log(a) - x0 * g - theta * (t - g)
        log_mkt = -t * curve.rate(t)
        cum[t] = log_v - log_mkt
    return ShiftFunction(np.diff(cum))


def calibrate_hw_theta(
    curve: MarketCurve, r0: float, k: float, sigma_r: float
) -> HullWhiteModel:
    """Fit the Hull-White staircase to an annual pillar curve, closed form.

    Same bootstrap idea as :func:`calibrate_shift`: each pillar adds one
    staircase value with a strictly positive weight ``1 - g_k(1)``.
    """
    h = curve.max_maturity
    g1 = g_factor(k, 1.0)
    thetas = np.empty(h)
    for t in range(1, h + 1):
        g = g_factor(k, float(t))
        a = convexity_factor(k, sigma_r, float(t))
        # log P_mkt = log A - r0 g - sum_i theta_i w_{t,i}
        acc = math.log(a) - r0 * g + t * curve.rate(t)
        for i in range(t - 1):
            acc -= thetas[i] * (1.0 - math.exp(-k * (t - i - 1)) * g1)
        thetas[t - 1] = acc / (1.0 - g1)
    return HullWhiteModel(r0=r0, k=k, sigma_r=sigma_r, theta_values=thetas)


def curve_from_model(model: VasicekPPModel, max_maturity: int) -> MarketCurve:
    """Annual pillar curve implied by a model at time 0."""
    if max_maturity > model.shift.horizon:
        raise HorizonError(
            f"requested {max_maturity} pillars, shift horizon {model.shift.horizon}y"
        )
    rates = [
        -math.log(model.zcb_price(model.x0, 0.0, t)) / t
        for t in range(1, max_maturity + 1)
    ]
    return MarketCurve(rates)


def log_price_table(model: VasicekPPModel, t_max: int, n: int) -> np.ndarray:
    """Deterministic part of log P(t, t+i) for t = 0..t_max, i = 0..n.

    The path-dependent part is ``-x_t * g_k(i)``; the full price is
    ``exp(table[t, i] - x * g[i])``.  Used to precompute pricing inputs
    for the simulation kernels.
    """
    if t_max + n > model.shift.horizon:
        raise HorizonError(
            f"need shift horizon >= {t_max + n}y, got {model.shift.horizon}y"
        )
    cum = model.shift.cumulative()
    out = np.zeros((t_max + 1, n + 1))
    for i in range(1, n + 1):
        g = g_factor(model.k, float(i))
        log_a = math.log(convexity_factor(model.k, model.sigma_r, float(i)))
        base = log_a - model.theta * (i - g)
        for t in range(t_max + 1):
            out[t, i] = base - (cum[t + i] - cum[t])
    return out
