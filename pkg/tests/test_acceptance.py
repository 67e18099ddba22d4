"""Acceptance gate: the quantitative reproduction targets and the exact
property suite, one criterion per test, each printing a PASS/FAIL line.

Scale criteria run the moderate-rates preset at 50,000 paths with a fixed
seed; sweep criteria use reduced path counts (their targets are locations
and ratios, not levels).  Criteria 1 and 3 carry reproduction targets that
an exactly-conserving engine cannot fully hit; see the repository notes for
the measured analysis.  They are asserted as stated regardless.
"""

import math

import numpy as np
import pytest

from alm.backend import run_paths, set_threads
from alm.config import preset
from alm.engine import LiabilityParams
from alm.rates import ShiftFunction, VasicekPPModel, calibrate_hw_theta, calibrate_shift
from alm.scenarios import EquityParams, simulate
from alm.shocks import apply_shock, builtin_shock
from alm.valuation import build_inputs, build_market, durations, scr, value
from oracle import run_deterministic
from xcheck import diff_vs_oracle, kernel_run
from test_oracle_match import random_cfg

SEED = 12345
N_FULL = 50_000
N_SWEEP = 20_000


def report(num, ok, detail):
    line = f"CRITERION {num}: {'PASS' if ok else 'FAIL'} -- {detail}"
    print(f"\n{line}")
    assert ok, line


@pytest.fixture(scope="module")
def paper2pct():
    cfg = preset("paper-2pct")
    market = build_market(x0=cfg.x0, theta=cfg.theta, k=cfg.k,
                          sigma_r=cfg.sigma_r, horizon=cfg.horizon + cfg.n,
                          regime=cfg.regime, s_eq=cfg.s_eq)
    scn = simulate(market.central, cfg.equity(), cfg.horizon, N_FULL, SEED)
    return cfg, market, scn


@pytest.fixture(scope="module")
def basket_scr(paper2pct):
    cfg, market, scn = paper2pct
    return scr(scn, market, cfg.equity(), cfg.liability(), cfg.w_s, cfg.n,
               "ladder", cfg.s_eq)


@pytest.fixture(scope="module")
def proxy_scr(paper2pct):
    cfg, market, scn = paper2pct
    return scr(scn, market, cfg.equity(), cfg.liability(), cfg.w_s, cfg.n,
               "proxy", cfg.s_eq)


def test_criterion_1_central_bof(basket_scr):
    report_, runs = basket_scr
    c = runs["central"]
    lo, hi = c.bof - 1.96 * c.bof_se, c.bof + 1.96 * c.bof_se
    within = abs(c.bof - 0.0208) <= 0.0010
    overlaps = lo <= 0.0210 and hi >= 0.0206
    report(
        1, within and overlaps,
        f"central BOF {c.bof:.5f} (target 0.0208 +- 0.0010: "
        f"{'ok' if within else 'out'}); our CI [{lo:.5f}, {hi:.5f}] vs "
        f"target band [0.0206, 0.0210]: {'overlap' if overlaps else 'no overlap'}",
    )


def test_criterion_2_basket_scr_modules(basket_scr):
    rep, _ = basket_scr
    checks = [
        ("scr_eq", rep.scr_eq, 0.0072, 0.0008),
        ("scr_down", rep.scr_down, 0.0078, 0.0010),
        ("scr_up", rep.scr_up, 0.0063, 0.0010),
    ]
    details = ", ".join(f"{k}={v:.4f} (target {t}+-{tol})"
                        for k, v, t, tol in checks)
    ok = all(abs(v - t) <= tol for _, v, t, tol in checks)
    report(2, ok, details)


def test_criterion_3_proxy_reproduction(proxy_scr):
    rep, _ = proxy_scr
    agg = math.sqrt(rep.scr_eq ** 2 + rep.scr_int ** 2
                    + 2 * rep.epsilon * rep.scr_eq * rep.scr_int)
    consistent = abs(agg - rep.scr_mkt) < 5e-5
    bof_ok = abs(rep.bof_up - 0.0053) <= 0.0012
    mkt_ok = abs(rep.scr_mkt - 0.0170) <= 0.0015 and rep.epsilon == 0.0
    report(
        3, bof_ok and mkt_ok and consistent,
        f"proxy BOF_up={rep.bof_up:.4f} (target 0.0053+-0.0012), "
        f"scr_mkt={rep.scr_mkt:.4f} eps={rep.epsilon} (target 0.0170+-0.0015 "
        f"at eps=0), aggregation consistent to 4dp: {consistent}",
    )


def test_criterion_4_no_leakage(paper2pct, basket_scr, proxy_scr):
    cfg, market, scn = paper2pct
    worst = 0.0
    rows = []
    for label, runs in (("basket", basket_scr[1]), ("proxy", proxy_scr[1])):
        res = runs["central"]
        total = res.bof_paths + res.bel_paths
        se = total.std(ddof=1) / math.sqrt(total.size)
        z = (total.mean() - 1.0) / se
        worst = max(worst, abs(z) / 3.0)
        rows.append(f"{label} 2pct: leak={total.mean() - 1:+.1e} ({abs(z):.1f} se)")
    low = preset("paper-lowyield")
    market_l = build_market(x0=low.x0, theta=low.theta, k=low.k,
                            sigma_r=low.sigma_r, horizon=low.horizon + low.n,
                            regime=low.regime, s_eq=low.s_eq)
    scn_l = simulate(market_l.central, low.equity(), low.horizon, N_SWEEP, SEED)
    res = value(scn_l, market_l.central, market_l.central, low.equity(),
                low.liability(), low.w_s, low.n)
    total = res.bof_paths + res.bel_paths
    se = total.std(ddof=1) / math.sqrt(total.size)
    z = (total.mean() - 1.0) / se
    worst = max(worst, abs(z) / 3.0)
    rows.append(f"low-yield: leak={total.mean() - 1:+.1e} ({abs(z):.1f} se)")
    # noiseless configuration: exact to machine precision
    det = kernel_run(random_cfg(np.random.default_rng(1), "ladder"), "numpy",
                     dump=False)
    det_leak = abs(det.bof[0] + det.bel[0] - 1.0)
    rows.append(f"deterministic: leak={det_leak:.1e}")
    ok = worst <= 1.0 and det_leak < 1e-11
    report(4, ok, "; ".join(rows))


def test_criterion_5_ladder_length_sweep(paper2pct):
    cfg, market, _ = paper2pct
    eq, liab = cfg.equity(), cfg.liability()
    scn = simulate(market.central, eq, cfg.horizon, N_SWEEP, SEED)
    grid = [14, 16, 17, 18, 19, 20, 21, 22, 23, 24, 26]
    gaps = []
    for n_i in grid:
        m_i = build_market(x0=cfg.x0, theta=cfg.theta, k=cfg.k,
                           sigma_r=cfg.sigma_r, horizon=cfg.horizon + n_i,
                           regime=cfg.regime, s_eq=cfg.s_eq)
        up = value(scn, m_i.shocked["ir_up"], m_i.central, eq, liab,
                   cfg.w_s, n_i, scenario_name="up")
        down = value(scn, m_i.shocked["ir_down"], m_i.central, eq, liab,
                     cfg.w_s, n_i, scenario_name="down")
        gaps.append(up.bof - down.bof)
    crossings = [
        (grid[i], grid[i + 1])
        for i in range(len(grid) - 1)
        if gaps[i] == 0.0 or (gaps[i] > 0) != (gaps[i + 1] > 0)
    ]
    bof_ok = any(17 <= a and b <= 23 for a, b in crossings)
    dur_rows = durations(
        dict(x0=cfg.x0, theta=cfg.theta, k=cfg.k, sigma_r=cfg.sigma_r,
             regime=cfg.regime, s_eq=cfg.s_eq),
        eq, liab, cfg.w_s, [6, 8, 9, 10, 11, 12, 13, 14], cfg.horizon,
        10_000, SEED)
    dgap = [r["d_asset"] - r["d_bel"] for r in dur_rows]
    dns = [r["n"] for r in dur_rows]
    dcross = [
        (dns[i], dns[i + 1])
        for i in range(len(dgap) - 1)
        if (dgap[i] > 0) != (dgap[i + 1] > 0)
    ]
    dur_ok = any(8 <= a and b <= 12 for a, b in dcross)
    report(
        5, bof_ok and dur_ok,
        f"BOF_up/BOF_down crossing(s) at {crossings} (need within [17, 23]); "
        f"duration crossing(s) at {dcross} (need within [8, 12])",
    )


def test_criterion_6_correlation_sweep_jump(paper2pct):
    cfg, market, _ = paper2pct
    liab = cfg.liability()
    grid = [round(-0.9 + 0.15 * i, 2) for i in range(13)]
    reports = []
    for gamma in grid:
        eq = EquityParams(s0=cfg.s0, sigma_s=cfg.sigma_s, gamma=gamma)
        scn = simulate(market.central, eq, cfg.horizon, N_SWEEP, SEED)
        rep, _ = scr(scn, market, eq, liab, cfg.w_s, cfg.n, "ladder", cfg.s_eq)
        reports.append(rep)
    jump = None
    for a, b in zip(reports, reports[1:]):
        if (a.scr_down > a.scr_up) != (b.scr_down > b.scr_up):
            # the epsilon switch: size it at the switch point by comparing
            # the two epsilon conventions on the same modules
            side = b if b.scr_down > b.scr_up else a
            with_eps = math.sqrt(side.scr_eq ** 2 + side.scr_int ** 2
                                 + side.scr_eq * side.scr_int)
            without = math.sqrt(side.scr_eq ** 2 + side.scr_int ** 2)
            jump = (with_eps - without) / without
            break
    ok = jump is not None and jump >= 0.15
    report(
        6, ok,
        f"epsilon switch jump = {('%.1f%%' % (100 * jump)) if jump is not None else 'none found'}"
        f" (need >= 15%); scr_down-scr_up sign flips across gamma grid",
    )


def test_criterion_7_staircase_vs_level_oscillation():
    base_model = VasicekPPModel(x0=0.02, theta=0.02, k=0.2, sigma_r=0.01,
                                shift=ShiftFunction.zero(60))
    from alm.rates import curve_from_model
    base = curve_from_model(base_model, 50)
    shocked = apply_shock(base, builtin_shock("ir_up"))
    phi = calibrate_shift(shocked, 0.02, 0.02, 0.2, 0.01)
    hw = calibrate_hw_theta(shocked, 0.02 * 1.70, 0.2, 0.01)
    phi_move = np.abs(np.diff(phi.values[:40])).max()
    hw_move = np.abs(np.diff(hw.theta_values[:40])).max()
    ratio = hw_move / phi_move
    report(
        7, ratio >= 3.0,
        f"max year-over-year change: level fit {hw_move:.4f} vs staircase "
        f"shift {phi_move:.4f}, ratio {ratio:.1f} (need >= 3)",
    )


def test_criterion_8_low_yield_shifts_and_coupons():
    cfg = preset("paper-lowyield")
    market = build_market(x0=cfg.x0, theta=cfg.theta, k=cfg.k,
                          sigma_r=cfg.sigma_r, horizon=45, regime=cfg.regime,
                          s_eq=cfg.s_eq)
    diff = market.shocked["ir_up"].shift.values - market.shocked["ir_down"].shift.values
    crossings = [t for t in range(25, 40) if diff[t] * diff[t + 1] < 0]
    cross_ok = len(crossings) > 0
    market_run = build_market(x0=cfg.x0, theta=cfg.theta, k=cfg.k,
                              sigma_r=cfg.sigma_r,
                              horizon=cfg.horizon + cfg.n,
                              regime=cfg.regime, s_eq=cfg.s_eq)
    scn = simulate(market_run.central, cfg.equity(), cfg.horizon, N_SWEEP, SEED)
    down = value(scn, market_run.shocked["ir_down"], market_run.central,
                 cfg.equity(), cfg.liability(), cfg.w_s, cfg.n,
                 scenario_name="down")
    min_coupon = np.nanmin(down.mean_avg_coupon)
    report(
        8, cross_ok and min_coupon < 0.0,
        f"up/down staircase shifts cross at year(s) {crossings} (need in "
        f"[25, 40]); down-shock minimum mean coupon {min_coupon:.4f} (need < 0)",
    )


def test_criterion_9_randomized_deterministic_oracle():
    rng = np.random.default_rng(6021)
    worst = 0.0
    count = 0
    for i in range(22):
        engine = "proxy" if i % 3 == 2 else "ladder"
        cfg = random_cfg(rng, engine)
        s_eq = -0.39 if i % 4 == 0 else None
        ocfg = dict(cfg, eq_mult=1 + s_eq) if s_eq else cfg
        ora = run_deterministic(ocfg)
        out = kernel_run(cfg, "numba", s_eq=s_eq)
        w, mism = diff_vs_oracle(cfg, out, ora)
        worst = max(worst, w)
        count += 1
        if w >= 1e-10:
            break
    ok = worst < 1e-10
    report(
        9, ok,
        f"{count} randomized noiseless configs vs independent oracle, worst "
        f"ledger-field gap {worst:.1e} (need < 1e-10)",
    )


def test_criterion_10_invariant_suite(paper2pct):
    from alm import _core
    cfg, market, _ = paper2pct
    rng = np.random.default_rng(31415)
    msgs = []
    ok = True

    # par identity and calibration round trip over 1000 random states
    par_worst = rt_worst = 0.0
    for _ in range(1000):
        model = VasicekPPModel(
            x0=rng.uniform(-0.01, 0.05), theta=rng.uniform(0.0, 0.05),
            k=rng.uniform(0.05, 1.2), sigma_r=rng.uniform(0.0, 0.02),
            shift=ShiftFunction.zero(40))
        x = rng.uniform(-0.02, 0.07)
        t = float(rng.integers(0, 8))
        n = int(rng.integers(1, 15))
        c = model.swap_rate(x, t, n)
        par_worst = max(par_worst, abs(model.bond_price(x, t, n, c) - 1.0))
    for _ in range(60):
        x0, th = rng.uniform(-0.005, 0.04, size=2)
        k, sig = rng.uniform(0.05, 1.0), rng.uniform(0.0, 0.02)
        curve = __import__("alm.rates", fromlist=["curve_from_model"]) \
            .curve_from_model(VasicekPPModel(x0=x0, theta=th, k=k, sigma_r=sig,
                                             shift=ShiftFunction.zero(45)), 40)
        shift = calibrate_shift(curve, x0, th, k + 0.1, sig)
        model = VasicekPPModel(x0=x0, theta=th, k=k + 0.1, sigma_r=sig, shift=shift)
        for t in range(1, 41):
            rt_worst = max(rt_worst,
                           abs(model.zcb_price(x0, 0.0, t) - curve.discount(t)))
    ok &= par_worst < 1e-12 and rt_worst < 1e-12
    msgs.append(f"par identity {par_worst:.1e}, round trip {rt_worst:.1e}")

    # path-level invariants on a 2000-path stochastic run with full ledger
    eq, liab = cfg.equity(), cfg.liability()
    scn = simulate(market.central, eq, cfg.horizon, 2000, SEED + 1)
    inp = build_inputs(scn, market.central, market.central, eq, liab,
                       cfg.w_s, cfg.n)
    out = run_paths(inp, backend="numba", dump_ledger=True)
    led = out.ledger
    years = slice(1, cfg.horizon)
    cases = out.case[:, years]
    partition_ok = np.isin(cases, [0, 1, 2, 3]).all()
    rph_ok = np.nanmin(out.r_ph[:, years]) >= liab.r_g - 1e-12
    nonneg_ok = all(
        led[:, years, col].min() >= -1e-12
        for col in (_core.LED_MR, _core.LED_PSR, _core.LED_CR, _core.LED_BV_S,
                    _core.LED_BV_B, _core.LED_PHI_S, _core.LED_PHI_B))
    bal = led[:, years, _core.LED_BV_S] + led[:, years, _core.LED_BV_B] \
        - led[:, years, _core.LED_MR] - led[:, years, _core.LED_PSR]
    ident_worst = np.abs(bal / (led[:, years, _core.LED_MR] + 1e-30)).max()
    samesign_ok = (led[:, years, _core.LED_CGL_S]
                   * led[:, years, _core.LED_LGL]).min() >= -1e-15
    ok &= partition_ok and rph_ok and nonneg_ok and samesign_ok
    ok &= ident_worst < 1e-8
    msgs.append(f"case partition {partition_ok}, floor {rph_ok}, "
                f"non-negativity {nonneg_ok}, same-sign {samesign_ok}, "
                f"balance identity {ident_worst:.1e}")

    # bit-identical results across worker counts
    set_threads(1)
    one = run_paths(inp, backend="numba")
    set_threads(2)
    two = run_paths(inp, backend="numba")
    set_threads(None)
    bits_ok = (np.array_equal(one.bof, two.bof)
               and np.array_equal(one.bel, two.bel)
               and np.array_equal(one.r_ph, two.r_ph, equal_nan=True))
    ok &= bits_ok
    msgs.append(f"thread-count bit-stability {bits_ok}")

    report(10, ok, "; ".join(msgs))
