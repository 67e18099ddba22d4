"""Pure-numpy lane: the same yearly recursion vectorized across paths.

Mirrors ``_core.run_path`` block by block with (N,)-shaped state arrays and
masks where the scalar kernel branches.  Kept as the fallback when numba is
unavailable and as an independent implementation the numba lane is checked
against.
"""

from __future__ import annotations

import numpy as np

from . import _core
from .backend import KernelInputs, PathOutputs


def _dsr(delta, p_low, dsr_max, alpha_s, beta_s):
    ramp = dsr_max * (beta_s - delta) / (beta_s - alpha_s)
    out = np.where(delta < alpha_s, dsr_max, np.where(delta > beta_s, 0.0, ramp))
    return p_low + out


def _safe(x, floor=0.0):
    return np.where(x > floor, x, 1.0)


def run(inp: KernelInputs, out: PathOutputs) -> None:
    n_paths = inp.n_paths
    horizon, n, n_p, proxy = inp.horizon, inp.n, inp.n_p, bool(inp.proxy)
    w_s, w_b = inp.w_s, 1.0 - inp.w_s
    r_g, pi_pr, rho_bar = inp.r_g, inp.pi_pr, inp.rho_bar
    comp_eta = inp.comp_eta
    dump = out.ledger is not None

    mr = np.full(n_paths, 1.0)
    psr = np.zeros(n_paths)
    cr = np.zeros(n_paths)
    bv_s = np.full(n_paths, w_s)
    bv_b = np.full(n_paths, w_b)
    phi_s = np.full(n_paths, w_s / inp.s[0, 0])
    q = np.full(n_paths, float(inp.q0))
    coupons = np.tile(inp.coupons0, (n_paths, 1))
    r_ph_prev = np.full(n_paths, r_g)
    live = np.ones(n_paths, dtype=bool)

    p_e = np.full(n_paths, _dsr(np.zeros(1), inp.p_low, inp.dsr_max,
                                inp.alpha_s, inp.beta_s)[0])
    out.p_e[:, 0] = p_e
    out.avg_coupon[:, 0] = coupons[:, 0] if proxy else coupons.mean(axis=1)
    out.case[:, 0] = _core.CASE_NONE
    g = inp.g

    for t in range(1, horizon):
        x_t = inp.x[:, t]
        s_t = inp.s[:, t]
        disc = np.exp(inp.lnpdet[t, 1:n + 1][None, :] - x_t[:, None] * g[1:n + 1][None, :])
        cum = np.cumsum(disc, axis=1)
        swap = (1.0 - disc) / cum

        # step 1
        if proxy:
            fi = q * coupons[:, 0]
            nominal = np.zeros(n_paths)
        else:
            fi = q * coupons.sum(axis=1) / n
            nominal = q / n
        cif = fi + nominal
        bv_b1 = bv_b - nominal

        # step 2
        cof = p_e * mr * (1.0 + 0.5 * r_g)
        mr2 = (1.0 - p_e) * mr
        gap = cif - cof
        fi_tilde = fi - 0.5 * r_g * p_e * mr

        # step 3: market value
        if proxy:
            unit_held = coupons[:, 0] * cum[:, n_p - 2] + disc[:, n_p - 2] \
                if n_p >= 2 else np.ones(n_paths)
            held = q * unit_held
            c_mix = swap[:, n - 1] / n + (1.0 - 1.0 / n) * coupons[:, 0]
            unit_new = c_mix * cum[:, n_p - 1] + disc[:, n_p - 1]
            q2 = held / unit_new
            bond_value = held
        else:
            aged_unit = (
                (coupons[:, 1:] * cum[:, : n - 1]).sum(axis=1)
                + disc[:, : n - 1].sum(axis=1)
            ) / n
            unit_ref = aged_unit + 1.0 / n
            bond_value = q * aged_unit
        mv = gap + phi_s * s_t + bond_value

        mb = (mv <= 0.0) & live  # bailout rows, handled at the end of the year
        ok = live & ~mb
        mv_ok = np.where(mv > 0.0, mv, 1.0)

        # equity leg
        target_s = w_s * mv_ok
        phi_s3 = target_s / s_t
        cgl_s = np.zeros(n_paths)
        if w_s == 0.0:
            bv_s3 = bv_s.copy()
        else:
            dphi = phi_s3 - phi_s
            phis_safe = _safe(phi_s)
            buy = dphi >= 0.0
            bv_s3 = np.where(buy, bv_s + dphi * s_t, bv_s * (1.0 + dphi / phis_safe))
            cgl_s = np.where(buy, 0.0, -dphi * (s_t - bv_s / phis_safe))

        # bond leg
        target_b = w_b * mv_ok
        if proxy:
            dphi_b = target_b / unit_new - q2
            buy_b = dphi_b >= 0.0
            q2_safe = _safe(q2)
            cgl_b = np.where(buy_b, 0.0, -dphi_b * (unit_new - bv_b1 / q2_safe))
            bv_b3 = np.where(buy_b, bv_b1 + dphi_b * unit_new,
                             bv_b1 * (1.0 + dphi_b / q2_safe))
            q3 = q2 + dphi_b
            cn = coupons.copy()
            cn[:, 0] = c_mix
            unit_now = unit_new
        else:
            q_safe = _safe(q)
            reference = q * unit_ref
            buy_b = target_b >= reference
            delta_b = np.where(buy_b, target_b - reference, 0.0)
            q3 = np.where(buy_b, q + delta_b, target_b / unit_ref)
            sold = np.where(buy_b, 0.0, q - q3)
            cgl_b = sold * (aged_unit - bv_b1 / q_safe)
            bv_b3 = np.where(
                buy_b, bv_b1 + delta_b + q / n,
                bv_b1 * (1.0 - sold / q_safe) + q3 / n,
            )
            cn = np.empty_like(coupons)
            mixed = (q[:, None] * coupons[:, 1:] + delta_b[:, None] * swap[:, : n - 1]) \
                / _safe(q3)[:, None]
            cn[:, : n - 1] = np.where(buy_b[:, None], mixed, coupons[:, 1:])
            cn[:, n - 1] = swap[:, n - 1]
            fresh = (q == 0.0)
            if fresh.any():
                cn[fresh] = swap[fresh]
                cgl_b[fresh] = 0.0
                bv_b3[fresh] = bv_b1[fresh] + target_b[fresh]
                q3[fresh] = target_b[fresh]
            unit_now = ((cn * cum).sum(axis=1) + disc.sum(axis=1)) / n

        level = cr + cgl_b
        cr_new = np.maximum(level, 0.0)
        overflow = np.maximum(-level, 0.0)
        dcr = cr_new - cr

        # step 4: crediting
        diff = target_s - bv_s3
        gain = np.maximum(diff, 0.0)
        loss = np.maximum(-diff, 0.0)
        b0 = cgl_s - loss
        td0 = fi_tilde - overflow + rho_bar * (psr + b0) \
            - (1.0 - rho_bar) * np.maximum(-b0, 0.0)
        b1 = cgl_s + gain
        td1 = fi_tilde - overflow + rho_bar * (psr + b1) \
            - (1.0 - rho_bar) * np.maximum(-b1, 0.0)

        base = mr2 + psr
        base_safe = _safe(base)
        rg_amt = r_g * base
        r_comp = inp.r[:, t].copy()
        if comp_eta >= 0.0:
            r_comp = np.maximum(r_comp, comp_eta * r_ph_prev)
        m_target = np.maximum(rg_amt, r_comp * base)

        is_a = pi_pr * td0 >= m_target
        is_b = ~is_a & (pi_pr * td1 >= m_target) & (td1 - td0 > 1e-14)
        is_c = ~is_a & ~is_b & (rg_amt <= pi_pr * td1)
        is_d = ~(is_a | is_b | is_c)

        alpha = np.where(
            is_a, 0.0,
            np.where(is_b, (m_target / pi_pr - td0) / _safe(td1 - td0, 0.0), 1.0),
        )
        rho = np.where(is_d, 1.0, rho_bar)
        td_d = fi_tilde - overflow + psr + b1
        td_t = np.where(is_d, td_d, td0 + alpha * (td1 - td0))
        r_ph_amt = np.where(
            is_a, pi_pr * td0,
            np.where(is_b, m_target,
                     np.where(is_c, pi_pr * td1,
                              np.maximum(pi_pr * td_d, rg_amt))),
        )
        lgl_t = -(1.0 - alpha) * loss + alpha * gain
        bucket_t = cgl_s + lgl_t
        r_ph = r_ph_amt / base_safe
        mr_new = mr2 * (1.0 + r_ph)
        psr_new = psr * r_ph + (1.0 - rho) * (psr + np.maximum(bucket_t, 0.0))
        bv_s4 = bv_s3 + lgl_t
        am = (1.0 - pi_pr) * td_t - np.maximum(rg_amt - pi_pr * td_t, 0.0)
        pinv = np.exp(-(inp.lnpdet[t - 1, 1] - inp.x[:, t - 1] * g[1]))
        pnl = am + cr * (pinv - 1.0)

        # step 5: externalization
        ext = am + dcr
        bv4 = bv_s4 + bv_b3
        bad = ok & (ext >= 0.0) & ((ext >= bv4) | (ext >= mv_ok))
        if bad.any():
            out.fails[bad] = 1
            live = live & ~bad
            ok = ok & ~bad
        pos = ext >= 0.0
        bfrac = 1.0 - np.where(pos, ext, 0.0) / _safe(bv4)
        mfrac = 1.0 - np.where(pos, ext, 0.0) / mv_ok
        buyamt = np.where(pos, 0.0, -ext)
        bv_s_new = np.where(pos, bv_s4 * bfrac, bv_s4 + w_s * buyamt)
        bv_b_new = np.where(pos, bv_b3 * bfrac, bv_b3 + w_b * buyamt)
        phi_s_new = np.where(pos, phi_s3 * mfrac, phi_s3 + w_s * buyamt / s_t)
        q_new = np.where(pos, q3 * mfrac, q3 + w_b * buyamt / unit_now)

        delta_sr = r_ph - r_comp
        p_e_new = _dsr(delta_sr, inp.p_low, inp.dsr_max, inp.alpha_s, inp.beta_s)
        case = np.where(is_a, _core.CASE_A,
                        np.where(is_b, _core.CASE_B,
                                 np.where(is_c, _core.CASE_C, _core.CASE_D)))

        # bailout rows: shareholders pay the claims, portfolio rebuilt at market
        if mb.any():
            out.bailouts[mb] += 1
            mvb = mv[mb] + cof[mb]
            dead = mb.copy()
            dead[mb] = mvb <= 0.0
            if dead.any():
                out.fails[dead] = 1
                live = live & ~dead
                mb = mb & ~dead
                mvb = mv[mb] + cof[mb]
            phi_s_new[mb] = w_s * mvb / s_t[mb]
            bv_s_new[mb] = w_s * mvb
            bv_b_new[mb] = w_b * mvb
            if proxy:
                cn[mb, 0] = c_mix[mb]
                q_new[mb] = w_b * mvb / unit_new[mb]
            else:
                cn[mb] = swap[mb]
                q_new[mb] = w_b * mvb
            cr_new[mb] = cr[mb]
            r_ph = np.where(mb, r_g, r_ph)
            mr_new[mb] = mr2[mb] * (1.0 + r_g)
            psr_new[mb] = psr[mb] * (1.0 + r_g)
            pnl[mb] = -cof[mb]
            case[mb] = _core.CASE_BAILOUT
            p_e_new = np.where(
                mb,
                _dsr(r_g - r_comp, inp.p_low, inp.dsr_max, inp.alpha_s, inp.beta_s),
                p_e_new,
            )

        upd = live
        mr = np.where(upd, mr_new, mr)
        psr = np.where(upd, psr_new, psr)
        cr = np.where(upd, cr_new, cr)
        bv_s = np.where(upd, bv_s_new, bv_s)
        bv_b = np.where(upd, bv_b_new, bv_b)
        phi_s = np.where(upd, phi_s_new, phi_s)
        q = np.where(upd, q_new, q)
        coupons = np.where(upd[:, None], cn, coupons)
        r_ph_prev = np.where(upd, r_ph, r_ph_prev)
        p_e = np.where(upd, p_e_new, p_e)

        out.bof += np.where(upd, inp.d[:, t] * pnl, 0.0)
        out.bel += np.where(upd, inp.d[:, t] * cof, 0.0)
        out.r_ph[:, t] = np.where(upd, r_ph, np.nan)
        out.p_e[:, t] = np.where(upd, p_e, np.nan)
        avgc = coupons[:, 0] if proxy else coupons.mean(axis=1)
        out.avg_coupon[:, t] = np.where(upd, avgc, np.nan)
        out.case[:, t] = np.where(upd, case, _core.CASE_NONE)

        if dump:
            led = out.ledger[:, t, :]
            for col, arr in (
                (_core.LED_FI, fi), (_core.LED_CIF, cif), (_core.LED_COF, cof),
                (_core.LED_GAP, gap), (_core.LED_CGL_S, cgl_s),
                (_core.LED_CGL_B, cgl_b), (_core.LED_LGL, lgl_t),
                (_core.LED_CASE, case.astype(float)), (_core.LED_ALPHA, alpha),
                (_core.LED_RHO, rho), (_core.LED_RPH, r_ph),
                (_core.LED_PE_NEXT, p_e), (_core.LED_TD, td_t),
                (_core.LED_AM, am), (_core.LED_PNL, pnl), (_core.LED_DCR, dcr),
                (_core.LED_MR, mr), (_core.LED_PSR, psr), (_core.LED_CR, cr),
                (_core.LED_BV_S, bv_s), (_core.LED_BV_B, bv_b),
                (_core.LED_PHI_S, phi_s), (_core.LED_PHI_B, q),
                (_core.LED_AVGC, out.avg_coupon[:, t]),
            ):
                led[:, col] = np.where(upd, arr, 0.0)

    # -- terminal liquidation --------------------------------------------------
    t = horizon
    x_t = inp.x[:, t]
    s_t = inp.s[:, t]
    if proxy:
        fi = q * coupons[:, 0]
        bv_b1 = bv_b.copy()
        disc = np.exp(inp.lnpdet[t, 1:n_p][None, :] - x_t[:, None] * g[1:n_p][None, :])
        cum = np.cumsum(disc, axis=1) if n_p > 1 else np.zeros((n_paths, 0))
        pmat = np.exp(inp.lnpdet[t, n_p - 1] - x_t * g[n_p - 1]) if n_p > 1 \
            else np.ones(n_paths)
        annuity = cum[:, -1] if n_p > 1 else np.zeros(n_paths)
        cgl_b = q * (coupons[:, 0] * annuity + pmat) - bv_b1
    else:
        fi = q * coupons.sum(axis=1) / n
        bv_b1 = bv_b - q / n
        disc = np.exp(inp.lnpdet[t, 1:n][None, :] - x_t[:, None] * g[1:n][None, :])
        cum = np.cumsum(disc, axis=1)
        aged_total = (coupons[:, 1:] * cum).sum(axis=1) + disc.sum(axis=1)
        cgl_b = q * aged_total / n - bv_b1
    cgl_s = np.where(phi_s > 0.0, phi_s * s_t - bv_s, 0.0)
    level = cr + cgl_b
    cr_final = np.maximum(level, 0.0)
    overflow = np.maximum(-level, 0.0)
    td_t = fi - overflow + psr + cgl_s
    base = mr + psr
    rg_amt = r_g * base
    r_ph_amt = np.maximum(pi_pr * td_t, rg_amt)
    r_ph = r_ph_amt / _safe(base)
    mr_final = mr * (1.0 + r_ph)
    psr_final = psr * r_ph
    am = (1.0 - pi_pr) * td_t - np.maximum(rg_amt - pi_pr * td_t, 0.0)
    pinv = np.exp(-(inp.lnpdet[t - 1, 1] - inp.x[:, t - 1] * g[1]))
    pnl = am + cr * (pinv - 1.0) + cr_final
    cof = mr_final + psr_final
    out.bof += np.where(live, inp.d[:, t] * pnl, 0.0)
    out.bel += np.where(live, inp.d[:, t] * cof, 0.0)
    out.r_ph[:, t] = np.where(live, r_ph, np.nan)
    if dump:
        led = out.ledger[:, t, :]
        for col, arr in (
            (_core.LED_FI, fi), (_core.LED_COF, cof), (_core.LED_CGL_S, cgl_s),
            (_core.LED_CGL_B, cgl_b), (_core.LED_TD, td_t), (_core.LED_RPH, r_ph),
            (_core.LED_AM, am), (_core.LED_PNL, pnl), (_core.LED_MR, mr_final),
            (_core.LED_PSR, psr_final), (_core.LED_CR, cr_final),
        ):
            led[:, col] = np.where(live, arr, 0.0)
