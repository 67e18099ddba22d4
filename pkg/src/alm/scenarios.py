"""Exact joint simulation of the rate factor, its integral and the equity driver.

One scenario set holds, per path and per year, the Gaussian factor ``x_t``,
its running integral ``I_t = int_0^t x ds`` and the equity Brownian ``W_t``.
The annual increments are drawn from their exact trivariate normal law (the
factor is an Ornstein-Uhlenbeck process driven by
``Z^gamma = gamma W + sqrt(1-gamma^2) Z``), so there is no discretization
bias at any step size.

The same set is replayed under every stress scenario: a different staircase
shift only changes deterministic multipliers of the discount factors and
equity prices, which keeps central and shocked estimates path-paired.

Noise is counter-based: path ``i`` draws from a Philox stream whose counter
block is indexed by ``i``, so a path is a function of ``(seed, i)`` alone --
independent of the path count and of any parallel scheduling.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .rates import ShiftFunction, VasicekPPModel

__all__ = ["EquityParams", "ScenarioSet", "DerivedPaths", "simulate", "derive",
           "transition_covariance"]

GENERATOR_ID = "philox4x64/path-counter/v1"


@dataclass(frozen=True)
class EquityParams:
    """Lognormal equity index: initial level, volatility, rate correlation."""

    s0: float = 1.0
    sigma_s: float = 0.1
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not self.s0 > 0.0:
            raise ValueError(f"s0 must be > 0, got {self.s0}")
        if self.sigma_s < 0.0:
            raise ValueError(f"sigma_s must be >= 0, got {self.sigma_s}")
        if not -1.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [-1, 1], got {self.gamma}")


def transition_covariance(k: float, sigma_r: float, gamma: float) -> np.ndarray:
    """Covariance of (dW, xi_x, xi_I) over one year.

    ``xi_x`` and ``xi_I`` are the martingale parts of the factor and of its
    integral: conditional on ``x_t``,

        x_{t+1} = theta + (x_t - theta) e^{-k}     + xi_x
        I_{t+1} = I_t + theta + (x_t - theta) g_1  + xi_I

    The six entries come from the standard OU integrals; they are verified
    against a fine-step Euler oracle in the test suite.
    """
    g1 = -math.expm1(-k) / k
    g2 = -math.expm1(-2.0 * k) / (2.0 * k)
    s2 = sigma_r * sigma_r
    cov = np.array(
        [
            [1.0, gamma * sigma_r * g1, gamma * sigma_r * (1.0 - g1) / k],
            [gamma * sigma_r * g1, s2 * g2, s2 * (g1 - g2) / k],
            [gamma * sigma_r * (1.0 - g1) / k, s2 * (g1 - g2) / k,
             s2 * (1.0 - 2.0 * g1 + g2) / (k * k)],
        ]
    )
    return cov


def _transition_chol(k: float, sigma_r: float, gamma: float) -> np.ndarray:
    if sigma_r == 0.0:
        ell = np.zeros((3, 3))
        ell[0, 0] = 1.0
        return ell
    return np.linalg.cholesky(transition_covariance(k, sigma_r, gamma))


@dataclass(frozen=True)
class ScenarioSet:
    """Simulated factor paths on the annual grid.

    Arrays are ``(n_paths, horizon + 1)``; column ``t`` is the value at year
    ``t`` with ``x[:, 0] = x0``, ``integ[:, 0] = w[:, 0] = 0``.
    """

    x: np.ndarray
    integ: np.ndarray
    w: np.ndarray
    seed: int
    generator_id: str
    x0: float
    theta: float
    k: float
    sigma_r: float
    gamma: float

    @property
    def n_paths(self) -> int:
        return int(self.x.shape[0])

    @property
    def horizon(self) -> int:
        return int(self.x.shape[1] - 1)

    def dump_csv(self, path: str) -> None:
        """Debug dump, one row per (path, year)."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            wtr = csv.writer(fh)
            wtr.writerow(["path", "t", "x", "integral", "w"])
            for p in range(self.n_paths):
                for t in range(self.horizon + 1):
                    wtr.writerow(
                        [p, t, repr(self.x[p, t]), repr(self.integ[p, t]),
                         repr(self.w[p, t])]
                    )


def path_noise(seed: int, index: int, horizon: int) -> np.ndarray:
    """Standard-normal draws for one path, shape (horizon, 3).

    Streams are Philox blocks 2^128 apart, indexed by the path number in the
    third counter word, so the draw depends on (seed, index) only.
    """
    bitgen = np.random.Philox(key=np.uint64(seed), counter=[0, 0, int(index), 0])
    return np.random.Generator(bitgen).standard_normal((horizon, 3))


def simulate(model: VasicekPPModel, equity: EquityParams, horizon: int,
             n_paths: int, seed: int) -> ScenarioSet:
    """Draw ``n_paths`` exact joint paths over ``horizon`` years.

    Only the factor parameters of ``model`` and the correlation loading of
    ``equity`` enter: the staircase shift and the equity volatility are
    applied later in :func:`derive`, so one set serves every stress scenario.
    """
    if horizon < 1 or n_paths < 1:
        raise ValueError(f"need horizon >= 1 and n_paths >= 1, got {horizon}, {n_paths}")
    k, theta, sig = model.k, model.theta, model.sigma_r
    ell = _transition_chol(k, sig, equity.gamma)
    eps = np.empty((n_paths, horizon, 3))
    for p in range(n_paths):
        eps[p] = path_noise(seed, p, horizon)
    shocks = eps @ ell.T  # (n_paths, horizon, 3): (dW, xi_x, xi_I)

    ek = math.exp(-k)
    g1 = -math.expm1(-k) / k
    x = np.empty((n_paths, horizon + 1))
    integ = np.empty((n_paths, horizon + 1))
    w = np.empty((n_paths, horizon + 1))
    x[:, 0] = model.x0
    integ[:, 0] = 0.0
    w[:, 0] = 0.0
    for t in range(horizon):
        drift = x[:, t] - theta
        x[:, t + 1] = theta + drift * ek + shocks[:, t, 1]
        integ[:, t + 1] = integ[:, t] + theta + drift * g1 + shocks[:, t, 2]
        w[:, t + 1] = w[:, t] + shocks[:, t, 0]
    return ScenarioSet(
        x=x, integ=integ, w=w, seed=int(seed), generator_id=GENERATOR_ID,
        x0=model.x0, theta=theta, k=k, sigma_r=sig, gamma=equity.gamma,
    )


@dataclass(frozen=True)
class DerivedPaths:
    """Per-path discount factors, equity prices and short rates for one scenario.

    ``d[:, t] = exp(-I_t - int_0^t phi)`` and
    ``s[:, t] = s0 * exp(I_t + int_0^t phi + sigma_s W_t - sigma_s^2 t / 2)``,
    times the constant equity-shock multiplier for ``t >= 1`` when an equity
    stress is active.
    """

    d: np.ndarray
    s: np.ndarray
    r_short: np.ndarray
    equity_multiplier: float = 1.0


def derive(paths: ScenarioSet, shift: ShiftFunction, equity: EquityParams,
           s_eq: float | None = None) -> DerivedPaths:
    """Replay a scenario set under a given shift and optional equity shock.

    Same noise, different shift: discounts and equity prices pick up the
    deterministic factor ``exp(+-int phi)``; an equity shock multiplies prices
    by ``1 + s_eq`` from year 1 on (the time-0 allocation is untouched).
    """
    horizon = paths.horizon
    if shift.horizon <= horizon:
        raise ValueError(
            f"shift horizon {shift.horizon}y must exceed scenario horizon {horizon}y"
        )
    cum = shift.cumulative()[: horizon + 1]
    years = np.arange(horizon + 1, dtype=np.float64)
    d = np.exp(-paths.integ - cum[None, :])
    log_s = (paths.integ + cum[None, :]
             + equity.sigma_s * paths.w
             - 0.5 * equity.sigma_s**2 * years[None, :])
    s = equity.s0 * np.exp(log_s)
    mult = 1.0
    if s_eq is not None and s_eq != 0.0:
        if not -1.0 < s_eq <= 0.0:
            raise ValueError(f"equity shock must lie in (-1, 0], got {s_eq}")
        mult = 1.0 + s_eq
        s[:, 1:] *= mult
    phi_at = shift.values[: horizon + 1]
    r_short = paths.x + phi_at[None, :]
    return DerivedPaths(d=d, s=s, r_short=r_short, equity_multiplier=mult)
