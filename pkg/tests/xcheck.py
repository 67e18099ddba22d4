"""Shared helpers: run the kernels on a deterministic oracle config."""

import numpy as np

from alm import _core
from alm.backend import run_paths
from alm.engine import LiabilityParams
from alm.rates import ShiftFunction, VasicekPPModel
from alm.scenarios import EquityParams, simulate
from alm.valuation import build_inputs

CASE_IDS = {"A": 0, "B": 1, "C": 2, "D": 3, "-": -1}

COLMAP = {
    "fi": _core.LED_FI, "cif": _core.LED_CIF, "cof": _core.LED_COF,
    "gap": _core.LED_GAP, "cgl_s": _core.LED_CGL_S, "cgl_b": _core.LED_CGL_B,
    "r_ph": _core.LED_RPH, "td": _core.LED_TD, "am": _core.LED_AM,
    "pnl": _core.LED_PNL, "dcr": _core.LED_DCR, "mr": _core.LED_MR,
    "psr": _core.LED_PSR, "cr": _core.LED_CR, "bv_s": _core.LED_BV_S,
    "bv_b": _core.LED_BV_B, "phi_s": _core.LED_PHI_S, "phi_b": _core.LED_PHI_B,
    "alpha": _core.LED_ALPHA, "rho": _core.LED_RHO,
    "p_e_next": _core.LED_PE_NEXT, "avg_coupon": _core.LED_AVGC,
    "lgl": _core.LED_LGL,
}


def liability_from_cfg(cfg):
    rule = "max_with_eta" if cfg.get("comp_rule") == "max_eta" else "short_rate"
    return LiabilityParams(
        r_g=cfg["r_g"], pi_pr=cfg["pi_pr"], rho_bar=cfg["rho_bar"],
        p_low=cfg["p_low"], dsr_max=cfg["dsr_max"], alpha_s=cfg["alpha_s"],
        beta_s=cfg["beta_s"], competitor_rule=rule, eta=cfg.get("eta", 0.9),
    )


def models_from_cfg(cfg):
    shift = ShiftFunction(cfg["shift"])
    central_shift = ShiftFunction(cfg.get("central_shift", cfg["shift"]))
    model = VasicekPPModel(x0=cfg["x0"], theta=cfg["theta"], k=cfg["k"],
                           sigma_r=0.0, shift=shift)
    return model, model.with_shift(central_shift)


def kernel_run(cfg, backend="numpy", s_eq=None, dump=True):
    model, central = models_from_cfg(cfg)
    eq = EquityParams(s0=cfg["s0"], sigma_s=0.0, gamma=0.0)
    liab = liability_from_cfg(cfg)
    scn = simulate(model, eq, cfg["horizon"], 1, seed=1)
    inp = build_inputs(scn, model, central, eq, liab, cfg["w_s"], cfg["n"],
                       engine=cfg.get("engine", "ladder"), s_eq=s_eq)
    return run_paths(inp, backend=backend, dump_ledger=dump)


def diff_vs_oracle(cfg, result, oracle_out):
    """Worst |kernel - oracle| over bof, bel and every ledger field."""
    worst = max(abs(result.bof[0] - oracle_out["bof"]),
                abs(result.bel[0] - oracle_out["bel"]))
    mismatches = []
    led = result.ledger[0]
    for y in oracle_out["years"]:
        t = y["t"]
        for key, col in COLMAP.items():
            if key in y and np.isfinite(y[key]):
                err = abs(led[t, col] - y[key])
                worst = max(worst, err)
                if err > 1e-9:
                    mismatches.append((t, key, led[t, col], y[key]))
        if "case" in y and led[t, _core.LED_CASE] != CASE_IDS[y["case"]]:
            mismatches.append((t, "case", led[t, _core.LED_CASE], y["case"]))
            worst = max(worst, 1.0)
    return worst, mismatches


def make_cfg(shift, w_s, r_g=0.0, n=3, horizon=6, rho=0.5, comp="short_rate",
             x0=0.02, theta=0.02, k=0.2, p_low=0.05, dsr_max=0.3,
             alpha_s=-0.05, beta_s=-0.01, engine="ladder", central_shift=None,
             pi_pr=0.9, eta=0.9, s0=1.0):
    cfg = dict(x0=x0, theta=theta, k=k, shift=list(shift), s0=s0, w_s=w_s,
               r_g=r_g, pi_pr=pi_pr, rho_bar=rho, p_low=p_low,
               dsr_max=dsr_max, alpha_s=alpha_s, beta_s=beta_s,
               comp_rule=comp, eta=eta, n=n, horizon=horizon, engine=engine)
    if central_shift is not None:
        cfg["central_shift"] = list(central_shift)
    return cfg
