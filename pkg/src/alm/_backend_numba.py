"""Numba lane: the scalar path kernel compiled, paths run in parallel.

Each prange iteration owns its output slices, so the result is bit-identical
for any thread count and path order.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from . import _core
from .backend import KernelInputs, PathOutputs

_run_path = njit(cache=True)(_core.run_path)


@njit(parallel=True, cache=True)
def _drive(x, s, d, r, lnpdet, g, coupons0, q0, horizon, n, n_p, proxy,
           w_s, r_g, pi_pr, rho_bar, p_low, dsr_max, alpha_s, beta_s,
           comp_eta, bof, bel, rph, pe, avgc, case, bails, fails, ledger, dump):
    for p in prange(x.shape[0]):
        led = ledger[p] if dump else ledger[0]
        res = _run_path(
            x[p], s[p], d[p], r[p], lnpdet, g, coupons0, q0,
            horizon, n, n_p, proxy, w_s, r_g, pi_pr, rho_bar,
            p_low, dsr_max, alpha_s, beta_s, comp_eta,
            rph[p], pe[p], avgc[p], case[p], led,
        )
        bof[p] = res[0]
        bel[p] = res[1]
        bails[p] = res[2]
        fails[p] = res[3]


def run(inp: KernelInputs, out: PathOutputs) -> None:
    dump = out.ledger is not None
    ledger = out.ledger if dump else np.zeros((1, 0, _core.LEDGER_WIDTH))
    _drive(
        inp.x, inp.s, inp.d, inp.r, inp.lnpdet, inp.g, inp.coupons0,
        float(inp.q0), inp.horizon, inp.n, inp.n_p, inp.proxy,
        inp.w_s, inp.r_g, inp.pi_pr, inp.rho_bar, inp.p_low, inp.dsr_max,
        inp.alpha_s, inp.beta_s, inp.comp_eta,
        out.bof, out.bel, out.r_ph, out.p_e, out.avg_coupon, out.case,
        out.bailouts, out.fails, ledger, dump,
    )
