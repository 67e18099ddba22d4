"""Monte Carlo valuation: own funds, best-estimate liabilities, SCR modules.

Basic Own-Funds are the discounted shareholder P&L flows, Best-Estimate
Liabilities the discounted policyholder outflows; together they account for
the whole initial reserve (no-leakage).  SCR modules are paired-path drops
of the own funds under each regulatory stress, aggregated with the standard
correlation factor.

All valuations under one scenario set share the same paths; shocked runs
replay them with a recalibrated staircase shift or an equity multiplier, so
module estimates are differences of coupled runs with small standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .backend import KernelInputs, PathOutputs, run_paths
from .curves import MarketCurve
from .engine import LiabilityParams
from .rates import (
    ShiftFunction,
    VasicekPPModel,
    calibrate_shift,
    curve_from_model,
    g_factor,
    log_price_table,
)
from .scenarios import EquityParams, ScenarioSet, derive, simulate
from .shocks import ShockSpec, apply_shock, builtin_shock

__all__ = [
    "ValuationResult",
    "ScrReport",
    "build_market",
    "build_inputs",
    "value",
    "scr",
    "sweep",
    "durations",
]


@dataclass(frozen=True)
class ValuationResult:
    """One BOF/BEL estimate with per-year diagnostics."""

    scenario: str
    bof: float
    bof_se: float
    bel: float
    bel_se: float
    n_paths: int
    mean_r_ph: np.ndarray      # (T+1,), slot t = year t, terminal included
    mean_p_e: np.ndarray       # (T+1,), slot t = exit proportion for (t, t+1)
    mean_avg_coupon: np.ndarray
    case_freq: np.ndarray      # (T+1, 4) frequencies of cases A..D
    bailout_paths: int
    failed_paths: int
    bof_paths: np.ndarray = field(repr=False)
    bel_paths: np.ndarray = field(repr=False)
    ledger: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class ScrReport:
    """Standard-formula market-risk modules from one coupled set of runs."""

    bof_central: float
    bof_equity: float
    bof_up: float
    bof_down: float
    se_central: float
    se_equity_diff: float
    se_up_diff: float
    se_down_diff: float
    scr_eq: float
    scr_up: float
    scr_down: float
    scr_int: float
    scr_mkt: float
    epsilon: float

    def as_dict(self) -> dict:
        return {
            "scr_eq": self.scr_eq, "scr_up": self.scr_up,
            "scr_down": self.scr_down, "scr_int": self.scr_int,
            "scr_mkt": self.scr_mkt, "epsilon": self.epsilon,
            "bof": {
                "central": self.bof_central, "equity": self.bof_equity,
                "up": self.bof_up, "down": self.bof_down,
            },
            "se": {
                "central": self.se_central, "equity_diff": self.se_equity_diff,
                "up_diff": self.se_up_diff, "down_diff": self.se_down_diff,
            },
        }


@dataclass(frozen=True)
class MarketSetup:
    """Central and shocked models calibrated to one base curve."""

    base_curve: MarketCurve
    central: VasicekPPModel
    shocked: dict  # kind -> VasicekPPModel ("ir_up", "ir_down")
    shock_specs: dict


def build_market(
    x0: float, theta: float, k: float, sigma_r: float, horizon: int,
    regime: str = "eiopa2012", base_curve: MarketCurve | None = None,
    s_eq: float = -0.39, min_move: float = 0.0,
    shock_specs: dict | None = None,
) -> MarketSetup:
    """Calibrate the central model and its up/down-shocked twins.

    Without an input curve, the base curve is the one the factor model
    itself implies (so the central staircase is flat zero); with a pillar
    curve from file the staircase absorbs the difference exactly.  The
    shocked models keep the factor parameters and refit only the staircase.
    """
    plain = VasicekPPModel(x0=x0, theta=theta, k=k, sigma_r=sigma_r,
                           shift=ShiftFunction.zero(horizon))
    if base_curve is None:
        base_curve = curve_from_model(plain, horizon)
    elif base_curve.max_maturity < horizon:
        raise ValueError(
            f"curve has {base_curve.max_maturity} pillars, need {horizon}"
        )
    central = plain.with_shift(calibrate_shift(base_curve, x0, theta, k, sigma_r))
    specs = shock_specs or {
        kind: builtin_shock(kind, regime=regime, s_eq=s_eq, min_move=min_move)
        for kind in ("ir_up", "ir_down")
    }
    shocked = {}
    for kind in ("ir_up", "ir_down"):
        curve = apply_shock(base_curve, specs[kind])
        shocked[kind] = plain.with_shift(calibrate_shift(curve, x0, theta, k, sigma_r))
    specs = dict(specs)
    specs["equity"] = builtin_shock("equity", regime=regime, s_eq=s_eq)
    return MarketSetup(base_curve=base_curve, central=central, shocked=shocked,
                       shock_specs=specs)


def build_inputs(
    scenarios: ScenarioSet,
    pricing_model: VasicekPPModel,
    central_model: VasicekPPModel,
    equity: EquityParams,
    liab: LiabilityParams,
    w_s: float,
    n: int,
    engine: str = "ladder",
    s_eq: float | None = None,
) -> KernelInputs:
    """Assemble kernel inputs for one valuation run.

    ``pricing_model`` carries the run's staircase (shocked or central);
    ``central_model`` prices the initial at-par allocation, which always
    happens before any stress.
    """
    horizon = scenarios.horizon
    dp = derive(scenarios, pricing_model.shift, equity, s_eq)
    lnpdet = log_price_table(pricing_model, horizon, n)
    g = np.array([g_factor(pricing_model.k, float(i)) for i in range(n + 1)])
    coupons0 = np.array(
        [central_model.swap_rate(central_model.x0, 0.0, i) for i in range(1, n + 1)]
    )
    if engine == "proxy":
        n_p = n // 2
        if n_p < 2:
            raise ValueError(f"proxy engine needs n >= 4, got n={n}")
        c0 = central_model.swap_rate(central_model.x0, 0.0, n_p)
        ladder_value = pricing_model.basket_price(pricing_model.x0, 0.0, coupons0)
        unit = pricing_model.bond_price(pricing_model.x0, 0.0, n_p, c0)
        q0 = (1.0 - w_s) * ladder_value / unit
        coupons0 = np.full(n, c0)
        proxy = 1
    elif engine == "ladder":
        n_p = n
        q0 = 1.0 - w_s
        proxy = 0
    else:
        raise ValueError(f"engine must be 'ladder' or 'proxy', got {engine!r}")
    comp_eta = liab.eta if liab.competitor_rule == "max_with_eta" else -1.0
    return KernelInputs(
        x=scenarios.x, s=dp.s, d=dp.d, r=dp.r_short, lnpdet=lnpdet, g=g,
        coupons0=coupons0, q0=q0, horizon=horizon, n=n, n_p=n_p, proxy=proxy,
        w_s=w_s, r_g=liab.r_g, pi_pr=liab.pi_pr, rho_bar=liab.rho_bar,
        p_low=liab.p_low, dsr_max=liab.dsr_max, alpha_s=liab.alpha_s,
        beta_s=liab.beta_s, comp_eta=comp_eta,
    )


def _aggregate(scenario: str, out: PathOutputs) -> ValuationResult:
    n_paths = out.bof.size
    horizon = out.r_ph.shape[1] - 1
    sqrt_n = math.sqrt(n_paths)
    bof = float(out.bof.mean())
    bel = float(out.bel.mean())
    bof_se = float(out.bof.std(ddof=1) / sqrt_n) if n_paths > 1 else math.nan
    bel_se = float(out.bel.std(ddof=1) / sqrt_n) if n_paths > 1 else math.nan
    case_freq = np.zeros((horizon + 1, 4))
    for c in range(4):
        case_freq[:, c] = (out.case == c).mean(axis=0)
    return ValuationResult(
        scenario=scenario, bof=bof, bof_se=bof_se, bel=bel, bel_se=bel_se,
        n_paths=n_paths,
        mean_r_ph=_nanmean_cols(out.r_ph),
        mean_p_e=_nanmean_cols(out.p_e),
        mean_avg_coupon=_nanmean_cols(out.avg_coupon),
        case_freq=case_freq,
        bailout_paths=int((out.bailouts > 0).sum()),
        failed_paths=int((out.fails > 0).sum()),
        bof_paths=out.bof, bel_paths=out.bel, ledger=out.ledger,
    )


def _nanmean_cols(arr: np.ndarray) -> np.ndarray:
    out = np.full(arr.shape[1], np.nan)
    for j in range(arr.shape[1]):
        col = arr[:, j]
        good = ~np.isnan(col)
        if good.any():
            out[j] = col[good].mean()
    return out


def value(
    scenarios: ScenarioSet,
    pricing_model: VasicekPPModel,
    central_model: VasicekPPModel,
    equity: EquityParams,
    liab: LiabilityParams,
    w_s: float,
    n: int,
    engine: str = "ladder",
    s_eq: float | None = None,
    scenario_name: str = "central",
    backend: str | None = None,
    dump_ledger: bool = False,
) -> ValuationResult:
    """One full valuation run over a scenario set."""
    inputs = build_inputs(scenarios, pricing_model, central_model, equity,
                          liab, w_s, n, engine, s_eq)
    out = run_paths(inputs, backend=backend, dump_ledger=dump_ledger)
    return _aggregate(scenario_name, out)


def scr(
    scenarios: ScenarioSet,
    market: MarketSetup,
    equity: EquityParams,
    liab: LiabilityParams,
    w_s: float,
    n: int,
    engine: str = "ladder",
    s_eq: float = -0.39,
    backend: str | None = None,
) -> tuple[ScrReport, dict]:
    """Four coupled valuations and the standard-formula aggregation.

    The equity stress replays the same paths with the post-allocation price
    multiplier; the curve stresses replay them under the refitted staircase.
    Module estimates are means of per-path BOF differences, so their
    standard errors reflect the pairing.
    """
    runs = {
        "central": value(scenarios, market.central, market.central, equity,
                         liab, w_s, n, engine, None, "central", backend),
        "equity": value(scenarios, market.central, market.central, equity,
                        liab, w_s, n, engine, s_eq, "equity", backend),
        "up": value(scenarios, market.shocked["ir_up"], market.central, equity,
                    liab, w_s, n, engine, None, "up", backend),
        "down": value(scenarios, market.shocked["ir_down"], market.central,
                      equity, liab, w_s, n, engine, None, "down", backend),
    }
    sqrt_n = math.sqrt(scenarios.n_paths)

    def diff_se(a: ValuationResult, b: ValuationResult) -> float:
        if scenarios.n_paths < 2:
            return math.nan
        return float((a.bof_paths - b.bof_paths).std(ddof=1) / sqrt_n)

    central = runs["central"]
    scr_eq = max(central.bof - runs["equity"].bof, 0.0)
    scr_up = max(central.bof - runs["up"].bof, 0.0)
    scr_down = max(central.bof - runs["down"].bof, 0.0)
    scr_int = max(scr_up, scr_down)
    eps = 0.5 if scr_down > scr_up else 0.0
    scr_mkt = math.sqrt(scr_eq**2 + scr_int**2 + 2.0 * eps * scr_eq * scr_int)
    report = ScrReport(
        bof_central=central.bof, bof_equity=runs["equity"].bof,
        bof_up=runs["up"].bof, bof_down=runs["down"].bof,
        se_central=central.bof_se,
        se_equity_diff=diff_se(central, runs["equity"]),
        se_up_diff=diff_se(central, runs["up"]),
        se_down_diff=diff_se(central, runs["down"]),
        scr_eq=scr_eq, scr_up=scr_up, scr_down=scr_down, scr_int=scr_int,
        scr_mkt=scr_mkt, epsilon=eps,
    )
    return report, runs


def sweep(
    axis: str,
    grid,
    market_args: dict,
    equity: EquityParams,
    liab: LiabilityParams,
    w_s: float,
    n: int,
    horizon: int,
    n_paths: int,
    seed: int,
    engine: str = "ladder",
    s_eq: float = -0.39,
    backend: str | None = None,
) -> list[dict]:
    """SCR report per grid point along one axis (w_s, n, or gamma).

    The scenario set is shared along the whole grid except the correlation
    axis, where each gamma draws its own set (still reused by the four
    valuations at that point).
    """
    if axis not in ("w_s", "n", "gamma"):
        raise ValueError(f"sweep axis must be w_s, n or gamma, got {axis!r}")
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    rows = []
    scn = None
    for point in grid:
        ws_i, n_i, gamma_i = w_s, n, equity.gamma
        if axis == "w_s":
            ws_i = float(point)
        elif axis == "n":
            n_i = int(point)
        else:
            gamma_i = float(point)
        eq_i = replace(equity, gamma=gamma_i)
        market = build_market(horizon=horizon + n_i, **market_args)
        if scn is None or axis == "gamma":
            scn = simulate(market.central, eq_i, horizon, n_paths, seed)
        report, runs = scr(scn, market, eq_i, liab, ws_i, n_i, engine, s_eq,
                           backend)
        row = {"axis": axis, "value": point}
        row.update(report.as_dict())
        row["bel_central"] = runs["central"].bel
        rows.append(row)
    return rows


def durations(
    market_args: dict,
    equity: EquityParams,
    liab: LiabilityParams,
    w_s: float,
    n_grid,
    horizon: int,
    n_paths: int,
    seed: int,
    bump: float = 1e-4,
    backend: str | None = None,
) -> list[dict]:
    """Asset and liability rate sensitivities per ladder length.

    Central finite differences in the initial factor level: the asset side
    reprices the initial ladder analytically, the liability side revalues
    the whole portfolio on shifted paths (exact factor-shift replay keeps
    the noise common across the bump).
    """
    rows = []
    for n_i in n_grid:
        n_i = int(n_i)
        market = build_market(horizon=horizon + n_i, **market_args)
        central = market.central
        scn = simulate(central, equity, horizon, n_paths, seed)
        coupons0 = np.array(
            [central.swap_rate(central.x0, 0.0, i) for i in range(1, n_i + 1)]
        )
        w_b = 1.0 - w_s

        def ladder_mv(x0b: float) -> float:
            return w_b * central.basket_price(x0b, 0.0, coupons0)

        d_asset = (ladder_mv(central.x0 + bump) - ladder_mv(central.x0 - bump)) / (2 * bump)

        def bel_at(x0b: float) -> float:
            shifted = _shift_paths(scn, central.k, x0b - central.x0)
            res = value(shifted, central, central, equity, liab, w_s, n_i,
                        "ladder", None, "central", backend)
            return res.bel

        d_bel = (bel_at(central.x0 + bump) - bel_at(central.x0 - bump)) / (2 * bump)
        rows.append({"n": n_i, "d_asset": d_asset, "d_bel": d_bel})
    return rows


def _shift_paths(scn: ScenarioSet, k: float, h: float) -> ScenarioSet:
    """Exact common-noise replay of the factor paths with x0 bumped by h.

    The factor map is affine in the initial level: ``x_t`` shifts by
    ``h e^{-kt}`` and the integral by ``h g_k(t)``.
    """
    if h == 0.0:
        return scn
    t = np.arange(scn.horizon + 1, dtype=np.float64)
    decay = np.exp(-k * t)
    gk = np.array([g_factor(k, float(u)) for u in t])
    return replace(
        scn,
        x=scn.x + h * decay[None, :],
        integ=scn.integ + h * gk[None, :],
        x0=scn.x0 + h,
    )
