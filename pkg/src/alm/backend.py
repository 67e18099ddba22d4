"""Kernel backend selection: numba-compiled path loop or vectorized numpy.

The environment variable ``ALM_BACKEND`` picks the lane (``numba``,
``numpy``, or ``auto`` = numba when importable).  Both backends run the
same recursion; the test suite holds them to near machine agreement, and
results are independent of the worker count (each path owns its output
slots, reductions happen in fixed path order).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ._core import LEDGER_WIDTH

__all__ = ["KernelInputs", "PathOutputs", "available_backends", "default_backend",
           "run_paths", "set_threads"]


@dataclass(frozen=True)
class KernelInputs:
    """Everything one valuation run feeds the path kernels."""

    x: np.ndarray         # (N, T+1) factor paths
    s: np.ndarray         # (N, T+1) equity prices
    d: np.ndarray         # (N, T+1) discount factors
    r: np.ndarray         # (N, T+1) short rates
    lnpdet: np.ndarray    # (T+1, n+1) deterministic log prices
    g: np.ndarray         # (n+1,)
    coupons0: np.ndarray  # (n,) initial coupons
    q0: float
    horizon: int
    n: int
    n_p: int
    proxy: int
    w_s: float
    r_g: float
    pi_pr: float
    rho_bar: float
    p_low: float
    dsr_max: float
    alpha_s: float
    beta_s: float
    comp_eta: float       # < 0: competitor is the short rate

    @property
    def n_paths(self) -> int:
        return int(self.x.shape[0])


@dataclass
class PathOutputs:
    bof: np.ndarray       # (N,) discounted shareholder P&L per path
    bel: np.ndarray       # (N,) discounted policyholder outflow per path
    r_ph: np.ndarray      # (N, T+1)
    p_e: np.ndarray       # (N, T+1)
    avg_coupon: np.ndarray
    case: np.ndarray      # (N, T+1) int8
    bailouts: np.ndarray  # (N,) int32
    fails: np.ndarray     # (N,) int32
    ledger: np.ndarray | None = None

    @classmethod
    def allocate(cls, n_paths: int, horizon: int, dump_ledger: bool) -> "PathOutputs":
        shape = (n_paths, horizon + 1)
        return cls(
            bof=np.zeros(n_paths),
            bel=np.zeros(n_paths),
            r_ph=np.full(shape, np.nan),
            p_e=np.full(shape, np.nan),
            avg_coupon=np.full(shape, np.nan),
            case=np.full(shape, -2, dtype=np.int8),
            bailouts=np.zeros(n_paths, dtype=np.int32),
            fails=np.zeros(n_paths, dtype=np.int32),
            ledger=np.zeros((n_paths, horizon + 1, LEDGER_WIDTH)) if dump_ledger else None,
        )


def available_backends() -> tuple[str, ...]:
    try:
        import numba  # noqa: F401
        return ("numba", "numpy")
    except ImportError:
        return ("numpy",)


def default_backend() -> str:
    env = os.environ.get("ALM_BACKEND", "auto").lower()
    if env in ("numba", "numpy"):
        return env
    if env != "auto":
        raise ValueError(f"ALM_BACKEND must be auto, numba or numpy, got {env!r}")
    return available_backends()[0]


def set_threads(k: int | None) -> None:
    """Cap the numba worker count; has no effect on results."""
    if k is None:
        return
    try:
        import numba
        numba.set_num_threads(max(1, int(k)))
    except ImportError:
        pass


def run_paths(inputs: KernelInputs, backend: str | None = None,
              dump_ledger: bool = False) -> PathOutputs:
    """Run every path through the yearly recursion on the chosen backend."""
    name = backend or default_backend()
    if name == "numba":
        from ._backend_numba import run as _run
    elif name == "numpy":
        from ._backend_numpy import run as _run
    else:
        raise ValueError(f"unknown backend {name!r}")
    out = PathOutputs.allocate(inputs.n_paths, inputs.horizon, dump_ledger)
    _run(inputs, out)
    return out
