"""Fused per-path kernel for the yearly balance-sheet recursion.

One self-contained scalar function walks a single path through every year:
income, claims, reallocation, crediting decision, margin externalization,
and the terminal liquidation.  It is written against the numba nopython
subset (plain floats, small float64 work arrays, no helper calls) so the
same source runs compiled under the numba backend and interpreted as the
slow reference; the vectorized numpy backend mirrors it array-wise.

Inputs are per-path rows of the derived scenario arrays plus the
deterministic pricing table ``lnpdet[t, i] = log P(t, t+i) + x_t * g[i]``
(the factor part is added back inside).  Outputs are the discounted P&L and
claim sums plus per-year diagnostics, written into caller-owned slices so
parallel path scheduling never races.

Sign and branch conventions follow the balance-sheet recursion exactly; the
one deliberate deviation is the margin externalization step, which removes
the externalized amount at market value (book values still drop by the
accounting amount).  This keeps the post-step book identity
``BV = MR + PSR`` and makes the no-leakage identity ``BOF + BEL = MR_0``
exact instead of approximate.
"""

import math

import numpy as np

# case labels
CASE_A, CASE_B, CASE_C, CASE_D = 0, 1, 2, 3
CASE_BAILOUT = -1
CASE_NONE = -2

# ledger column layout (one row per year when the dump buffer is enabled)
LED_FI, LED_CIF, LED_COF, LED_GAP, LED_CGL_S, LED_CGL_B, LED_LGL, LED_CASE, \
    LED_ALPHA, LED_RHO, LED_RPH, LED_PE_NEXT, LED_TD, LED_AM, LED_PNL, \
    LED_DCR, LED_MR, LED_PSR, LED_CR, LED_BV_S, LED_BV_B, LED_PHI_S, \
    LED_PHI_B, LED_AVGC = range(24)
LEDGER_WIDTH = 24


def run_path(
    x_row,        # (T+1,) factor path
    s_row,        # (T+1,) equity price path (shift + equity-shock applied)
    d_row,        # (T+1,) discount factors exp(-int_0^t r)
    r_row,        # (T+1,) short rate (factor + staircase)
    lnpdet,       # (T+1, n+1) deterministic part of log P(t, t+i)
    g,            # (n+1,) factor-duration values g_k(i)
    coupons0,     # (n,) initial ladder coupons (proxy uses slot 0)
    q0,           # initial bond quantity
    horizon,      # T, final year
    n,            # ladder length / coupon-mix tenor
    n_p,          # proxy bond maturity (unused for the ladder engine)
    proxy,        # 0 = ladder, 1 = single-bond proxy
    w_s, r_g, pi_pr, rho_bar,
    p_low, dsr_max, alpha_s, beta_s,
    comp_eta,     # competitor rule: < 0 means short rate, else max(r, eta * prev)
    rph_out,      # (T+1,) credited rate per year (slot t = year t)
    pe_out,       # (T+1,) exit proportion decided at t for (t, t+1)
    avgc_out,     # (T+1,) average coupon after the year-t reallocation
    case_out,     # (T+1,) int8 crediting case labels
    ledger,       # (T+1, 24) float64 dump buffer, or (0, 0) to disable
):
    """Returns (bof_path, bel_path, bailout_years, fail_flag)."""
    dump = ledger.shape[0] > 0

    mr = 1.0
    psr = 0.0
    cr = 0.0
    bv_s = w_s
    bv_b = 1.0 - w_s
    w_b = 1.0 - w_s
    phi_s = w_s / s_row[0]
    q = q0
    coupons = coupons0.copy()
    cwork = np.empty(n)
    disc = np.empty(n + 1)
    cum = np.empty(n + 1)

    # surrender proportion for year (0, 1): spread convention is zero at t = 0
    delta0 = 0.0
    if delta0 < alpha_s:
        p_e = p_low + dsr_max
    elif delta0 > beta_s:
        p_e = p_low
    else:
        p_e = p_low + dsr_max * (beta_s - delta0) / (beta_s - alpha_s)
    pe_out[0] = p_e
    if proxy == 1:
        avgc_out[0] = coupons[0]
    else:
        avgc_out[0] = coupons.mean()
    case_out[0] = CASE_NONE
    rph_out[0] = np.nan
    r_ph_prev = r_g

    bof = 0.0
    bel = 0.0
    bailouts = 0
    fail = 0

    for t in range(1, horizon):
        x_t = x_row[t]
        s_t = s_row[t]
        for i in range(1, n + 1):
            disc[i] = math.exp(lnpdet[t, i] - x_t * g[i])
        cum[0] = 0.0
        for i in range(1, n + 1):
            cum[i] = cum[i - 1] + disc[i]

        # -- step 1: coupon income and matured nominal -----------------------
        if proxy == 1:
            fi = q * coupons[0]
            nominal = 0.0
        else:
            csum = 0.0
            for i in range(n):
                csum += coupons[i]
            fi = q * csum / n
            nominal = q / n
        cif = fi + nominal
        bv_b1 = bv_b - nominal

        # -- step 2: claim payment -------------------------------------------
        cof = p_e * mr * (1.0 + 0.5 * r_g)
        mr2 = (1.0 - p_e) * mr
        gap = cif - cof
        fi_tilde = fi - 0.5 * r_g * p_e * mr

        # -- step 3: reallocation --------------------------------------------
        if proxy == 1:
            held = q * (coupons[0] * cum[n_p - 1] + disc[n_p - 1])
            c_mix = (1.0 - disc[n]) / cum[n] / n + (1.0 - 1.0 / n) * coupons[0]
            unit_new = c_mix * cum[n_p] + disc[n_p]
            q2 = held / unit_new       # maturity roll, value preserving, no CGL
            bond_value = held
        else:
            acc = 0.0
            for i in range(1, n):
                acc += coupons[i] * cum[i] + disc[i]
            aged_unit = acc / n
            unit_ref = aged_unit + 1.0 / n
            bond_value = q * aged_unit
        mv = gap + phi_s * s_t + bond_value

        if mv <= 0.0 or not math.isfinite(mv):
            # bailout: shareholders pay the claims, the portfolio is rebuilt
            # self-financing at target weights with books reset to market
            bailouts += 1
            mv = mv + cof
            if mv <= 0.0 or not math.isfinite(mv):
                fail = 1
                break
            pnl = -cof
            phi_s = w_s * mv / s_t
            bv_s = w_s * mv
            bv_b = w_b * mv
            if proxy == 1:
                c_mix = (1.0 - disc[n]) / cum[n] / n + (1.0 - 1.0 / n) * coupons[0]
                coupons[0] = c_mix
                q = w_b * mv / (c_mix * cum[n_p] + disc[n_p])
            else:
                for i in range(1, n + 1):
                    coupons[i - 1] = (1.0 - disc[i]) / cum[i]
                q = w_b * mv
            r_ph = r_g
            mr = mr2 * (1.0 + r_g)
            psr = psr * (1.0 + r_g)
            r_comp = r_row[t]
            if comp_eta >= 0.0 and comp_eta * r_ph_prev > r_comp:
                r_comp = comp_eta * r_ph_prev
            delta_sr = r_ph - r_comp
            if delta_sr < alpha_s:
                p_e = p_low + dsr_max
            elif delta_sr > beta_s:
                p_e = p_low
            else:
                p_e = p_low + dsr_max * (beta_s - delta_sr) / (beta_s - alpha_s)
            r_ph_prev = r_ph
            bof += d_row[t] * pnl
            bel += d_row[t] * cof
            rph_out[t] = r_ph
            pe_out[t] = p_e
            if proxy == 1:
                avgc_out[t] = coupons[0]
            else:
                avgc_out[t] = coupons.mean()
            case_out[t] = CASE_BAILOUT
            if dump:
                ledger[t, LED_COF] = cof
                ledger[t, LED_PNL] = pnl
                ledger[t, LED_CASE] = CASE_BAILOUT
                ledger[t, LED_MR] = mr
                ledger[t, LED_PSR] = psr
                ledger[t, LED_CR] = cr
            continue

        # equity leg
        target_s = w_s * mv
        phi_s3 = target_s / s_t
        cgl_s = 0.0
        if w_s == 0.0:
            bv_s3 = bv_s
        else:
            dphi = phi_s3 - phi_s
            if dphi >= 0.0:
                bv_s3 = bv_s + dphi * s_t
            else:
                cgl_s = -dphi * (s_t - bv_s / phi_s)
                bv_s3 = bv_s * (1.0 + dphi / phi_s)

        # bond leg
        target_b = w_b * mv
        cgl_b = 0.0
        if proxy == 1:
            dphi_b = target_b / unit_new - q2
            if dphi_b >= 0.0:
                bv_b3 = bv_b1 + dphi_b * unit_new
            else:
                cgl_b = -dphi_b * (unit_new - bv_b1 / q2)
                bv_b3 = bv_b1 * (1.0 + dphi_b / q2)
            q3 = q2 + dphi_b
            cwork[0] = c_mix
            unit_now = unit_new
        else:
            if q == 0.0:
                q3 = target_b
                for i in range(1, n + 1):
                    cwork[i - 1] = (1.0 - disc[i]) / cum[i]
                bv_b3 = bv_b1 + target_b
            else:
                reference = q * unit_ref
                if target_b >= reference:
                    delta_b = target_b - reference
                    q3 = q + delta_b
                    for i in range(1, n):
                        sw = (1.0 - disc[i]) / cum[i]
                        cwork[i - 1] = (q * coupons[i] + delta_b * sw) / q3
                    cwork[n - 1] = (1.0 - disc[n]) / cum[n]
                    bv_b3 = bv_b1 + delta_b + q / n
                else:
                    q3 = target_b / unit_ref
                    sold = q - q3
                    cgl_b = sold * (aged_unit - bv_b1 / q)
                    bv_b3 = bv_b1 * (1.0 - sold / q) + q3 / n
                    for i in range(1, n):
                        cwork[i - 1] = coupons[i]
                    cwork[n - 1] = (1.0 - disc[n]) / cum[n]
            unit_now = 0.0
            for i in range(1, n + 1):
                unit_now += cwork[i - 1] * cum[i] + disc[i]
            unit_now /= n

        level = cr + cgl_b
        cr_new = level if level > 0.0 else 0.0
        overflow = -level if level < 0.0 else 0.0
        dcr = cr_new - cr

        # -- step 4: crediting decision --------------------------------------
        diff_s = target_s - bv_s3
        gain = diff_s if diff_s > 0.0 else 0.0
        loss = -diff_s if diff_s < 0.0 else 0.0

        # amount to distribute at the two staircase corners (alpha = 0, 1)
        b0 = cgl_s - loss
        td0 = fi_tilde - overflow + rho_bar * (psr + b0)
        if b0 < 0.0:
            td0 -= (1.0 - rho_bar) * (-b0)
        b1 = cgl_s + gain
        td1 = fi_tilde - overflow + rho_bar * (psr + b1)
        if b1 < 0.0:
            td1 -= (1.0 - rho_bar) * (-b1)

        rg_amt = r_g * (mr2 + psr)
        r_comp = r_row[t]
        if comp_eta >= 0.0 and comp_eta * r_ph_prev > r_comp:
            r_comp = comp_eta * r_ph_prev
        m_target = rg_amt if rg_amt > r_comp * (mr2 + psr) else r_comp * (mr2 + psr)

        if pi_pr * td0 >= m_target:
            case = CASE_A
            alpha_t = 0.0
            rho_t = rho_bar
            r_ph_amt = pi_pr * td0
            td_t = td0
        elif pi_pr * td1 >= m_target and td1 - td0 > 1e-14:
            case = CASE_B
            alpha_t = (m_target / pi_pr - td0) / (td1 - td0)
            rho_t = rho_bar
            r_ph_amt = m_target
            td_t = td0 + alpha_t * (td1 - td0)
        elif rg_amt <= pi_pr * td1:
            case = CASE_C
            alpha_t = 1.0
            rho_t = rho_bar
            r_ph_amt = pi_pr * td1
            td_t = td1
        else:
            case = CASE_D
            alpha_t = 1.0
            rho_t = 1.0
            td_t = fi_tilde - overflow + psr + b1
            r_ph_amt = pi_pr * td_t
            if rg_amt > r_ph_amt:
                r_ph_amt = rg_amt

        lgl_t = -(1.0 - alpha_t) * loss + alpha_t * gain
        bucket_t = cgl_s + lgl_t
        r_ph = r_ph_amt / (mr2 + psr)
        mr = mr2 * (1.0 + r_ph)
        psr = psr * r_ph + (1.0 - rho_t) * (psr + (bucket_t if bucket_t > 0.0 else 0.0))
        bv_s4 = bv_s3 + lgl_t
        bail_term = rg_amt - pi_pr * td_t
        am = (1.0 - pi_pr) * td_t - (bail_term if bail_term > 0.0 else 0.0)
        pinv = math.exp(-(lnpdet[t - 1, 1] - x_row[t - 1] * g[1]))
        pnl = am + cr * (pinv - 1.0)

        # -- step 5: externalize the margin and the reserve movement ---------
        ext = am + dcr
        bv4 = bv_s4 + bv_b3
        if ext >= 0.0:
            if ext >= bv4 or ext >= mv:
                fail = 1
                break
            bfrac = 1.0 - ext / bv4
            mfrac = 1.0 - ext / mv
            bv_s = bv_s4 * bfrac
            bv_b = bv_b3 * bfrac
            phi_s = phi_s3 * mfrac
            q = q3 * mfrac
        else:
            buy = -ext
            bv_s = bv_s4 + w_s * buy
            bv_b = bv_b3 + w_b * buy
            phi_s = phi_s3 + w_s * buy / s_t
            q = q3 + w_b * buy / unit_now
        cr = cr_new
        for i in range(n):
            coupons[i] = cwork[i]

        r_comp_next = r_comp
        delta_sr = r_ph - r_comp_next
        if delta_sr < alpha_s:
            p_e = p_low + dsr_max
        elif delta_sr > beta_s:
            p_e = p_low
        else:
            p_e = p_low + dsr_max * (beta_s - delta_sr) / (beta_s - alpha_s)
        r_ph_prev = r_ph

        bof += d_row[t] * pnl
        bel += d_row[t] * cof
        rph_out[t] = r_ph
        pe_out[t] = p_e
        if proxy == 1:
            avgc_out[t] = coupons[0]
        else:
            avgc_out[t] = coupons.mean()
        case_out[t] = case
        if dump:
            ledger[t, LED_FI] = fi
            ledger[t, LED_CIF] = cif
            ledger[t, LED_COF] = cof
            ledger[t, LED_GAP] = gap
            ledger[t, LED_CGL_S] = cgl_s
            ledger[t, LED_CGL_B] = cgl_b
            ledger[t, LED_LGL] = lgl_t
            ledger[t, LED_CASE] = case
            ledger[t, LED_ALPHA] = alpha_t
            ledger[t, LED_RHO] = rho_t
            ledger[t, LED_RPH] = r_ph
            ledger[t, LED_PE_NEXT] = p_e
            ledger[t, LED_TD] = td_t
            ledger[t, LED_AM] = am
            ledger[t, LED_PNL] = pnl
            ledger[t, LED_DCR] = dcr
            ledger[t, LED_MR] = mr
            ledger[t, LED_PSR] = psr
            ledger[t, LED_CR] = cr
            ledger[t, LED_BV_S] = bv_s
            ledger[t, LED_BV_B] = bv_b
            ledger[t, LED_PHI_S] = phi_s
            ledger[t, LED_PHI_B] = q
            ledger[t, LED_AVGC] = avgc_out[t]

    # -- closing at the final date --------------------------------------------
    t = horizon
    if fail == 0:
        x_t = x_row[t]
        s_t = s_row[t]
        if proxy == 1:
            fi = q * coupons[0]
            bv_b1 = bv_b
            pmat = math.exp(lnpdet[t, n_p - 1] - x_t * g[n_p - 1]) if n_p > 1 else 1.0
            cumv = 0.0
            for i in range(1, n_p):
                cumv += math.exp(lnpdet[t, i] - x_t * g[i])
            cgl_b = q * (coupons[0] * cumv + pmat) - bv_b1
        else:
            csum = 0.0
            for i in range(n):
                csum += coupons[i]
            fi = q * csum / n
            bv_b1 = bv_b - q / n
            acc = 0.0
            cumv = 0.0
            for i in range(1, n):
                pv = math.exp(lnpdet[t, i] - x_t * g[i])
                cumv += pv
                acc += coupons[i] * cumv + pv
            cgl_b = q * acc / n - bv_b1
        cgl_s = phi_s * s_t - bv_s if phi_s > 0.0 else 0.0
        level = cr + cgl_b
        cr_final = level if level > 0.0 else 0.0
        td_t = fi - (-level if level < 0.0 else 0.0) + psr + cgl_s
        rg_amt = r_g * (mr + psr)
        r_ph_amt = pi_pr * td_t
        if rg_amt > r_ph_amt:
            r_ph_amt = rg_amt
        r_ph = r_ph_amt / (mr + psr)
        mr_final = mr * (1.0 + r_ph)
        psr_final = psr * r_ph
        bail_term = rg_amt - pi_pr * td_t
        am = (1.0 - pi_pr) * td_t - (bail_term if bail_term > 0.0 else 0.0)
        pinv = math.exp(-(lnpdet[t - 1, 1] - x_row[t - 1] * g[1]))
        pnl = am + cr * (pinv - 1.0) + cr_final
        cof = mr_final + psr_final
        bof += d_row[t] * pnl
        bel += d_row[t] * cof
        rph_out[t] = r_ph
        pe_out[t] = np.nan
        avgc_out[t] = np.nan
        case_out[t] = CASE_NONE
        if dump:
            ledger[t, LED_FI] = fi
            ledger[t, LED_COF] = cof
            ledger[t, LED_CGL_S] = cgl_s
            ledger[t, LED_CGL_B] = cgl_b
            ledger[t, LED_TD] = td_t
            ledger[t, LED_RPH] = r_ph
            ledger[t, LED_AM] = am
            ledger[t, LED_PNL] = pnl
            ledger[t, LED_MR] = mr_final
            ledger[t, LED_PSR] = psr_final
            ledger[t, LED_CR] = cr_final

    return bof, bel, bailouts, fail
