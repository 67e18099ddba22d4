"""Yearly balance-sheet recursion: public single-path API.

The insurer's year at each reallocation date runs in five steps: collect
coupon income and matured nominal, pay surrendering policyholders, rebuild
the asset side at target weights (realizing gains or losses on what is
sold), decide the crediting rate, and externalize the shareholders' margin
together with the capitalization-reserve movement.

This module is the readable, object-level implementation used for single
paths, unit tests and ledger inspection.  The Monte Carlo valuation layer
runs the fused kernels in ``_core`` / ``_backend_*`` instead; both are held
to agree with each other and with an independent arithmetic oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .ladder import (
    CouponLadder,
    annual_income,
    reallocate,
    update_capitalization_reserve,
)
from .rates import VasicekPPModel

__all__ = [
    "LiabilityParams",
    "BalanceSheet",
    "YearLedger",
    "CreditingOutcome",
    "initialize",
    "surrender_rate",
    "competitor_rate",
    "decide_crediting",
    "step_year",
    "close_at_year_end",
    "ProxyBook",
    "initialize_proxy",
    "proxy_step_year",
    "proxy_close",
]

COMPETITOR_RULES = ("short_rate", "max_with_eta")
CASE_NAMES = ("A", "B", "C", "D")


@dataclass(frozen=True)
class LiabilityParams:
    """Contract and management parameters of the with-profits pool."""

    r_g: float = 0.015          # minimum guaranteed rate
    pi_pr: float = 0.9          # participation rate, legal floor 0.85
    rho_bar: float = 0.5        # profit-sharing-reserve smoothing factor
    p_low: float = 0.05         # structural surrender rate
    dsr_max: float = 0.3        # cap of the dynamic surrender rate
    alpha_s: float = -0.05      # massive-surrender threshold
    beta_s: float = -0.01       # surrender triggering threshold
    competitor_rule: str = "short_rate"
    eta: float = 0.9

    def __post_init__(self) -> None:
        if self.r_g < 0.0:
            raise ValueError(f"r_g must be >= 0, got {self.r_g}")
        if not 0.85 <= self.pi_pr <= 1.0:
            raise ValueError(f"pi_pr must lie in [0.85, 1], got {self.pi_pr}")
        if not 0.0 < self.rho_bar <= 1.0:
            raise ValueError(f"rho_bar must lie in (0, 1], got {self.rho_bar}")
        if not 0.0 < self.p_low < 1.0:
            raise ValueError(f"p_low must lie in (0, 1), got {self.p_low}")
        if not 0.0 < self.dsr_max < 1.0 - self.p_low:
            raise ValueError(
                f"dsr_max must lie in (0, 1 - p_low), got {self.dsr_max}"
            )
        if not self.alpha_s < self.beta_s:
            raise ValueError(
                f"need alpha_s < beta_s, got {self.alpha_s} >= {self.beta_s}"
            )
        if self.competitor_rule not in COMPETITOR_RULES:
            raise ValueError(
                f"competitor_rule must be one of {COMPETITOR_RULES}, "
                f"got {self.competitor_rule!r}"
            )
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")


@dataclass(frozen=True)
class BalanceSheet:
    """Insurer state right after the reallocation at year ``t``."""

    mr: float
    psr: float
    cr: float
    bv_s: float
    bv_b: float
    phi_s: float
    ladder: CouponLadder
    r_ph_prev: float
    t: int


@dataclass(frozen=True)
class YearLedger:
    """Every intermediate quantity of one reallocation year."""

    t: int
    fi: float
    cif: float
    cof: float
    gap: float
    cgl_s: float
    cgl_b: float
    lgl: float
    case: str
    alpha: float
    rho: float
    r_ph: float
    p_e_next: float
    td: float
    am: float
    pnl: float
    dcr: float
    avg_coupon: float
    bailout: bool = False


@dataclass(frozen=True)
class CreditingOutcome:
    case: str
    alpha: float
    rho: float
    r_ph_amount: float
    r_ph: float
    td: float
    mr: float
    psr: float
    am: float
    lgl: float


def initialize(mr0: float, w_s: float, model: VasicekPPModel, s0: float,
               n: int) -> BalanceSheet:
    """Initial allocation: equity at ``S_0``, a fresh at-par ladder for the rest.

    Book values equal market values and there are no reserves yet.
    """
    if not mr0 > 0.0:
        raise ValueError(f"mr0 must be > 0, got {mr0}")
    if not 0.0 <= w_s <= 1.0:
        raise ValueError(f"w_s must lie in [0, 1], got {w_s}")
    ladder = CouponLadder.at_par(model, model.x0, 0.0, n, (1.0 - w_s) * mr0)
    return BalanceSheet(
        mr=mr0, psr=0.0, cr=0.0, bv_s=w_s * mr0, bv_b=(1.0 - w_s) * mr0,
        phi_s=w_s * mr0 / s0, ladder=ladder, r_ph_prev=0.0, t=0,
    )


def surrender_rate(delta: float, params: LiabilityParams) -> float:
    """Exit proportion: structural rate plus the dynamic surrender ramp.

    ``delta`` is the credited-minus-competitor spread; the ramp is maximal
    below the massive-surrender threshold and vanishes above the triggering
    threshold.
    """
    if delta < params.alpha_s:
        return params.p_low + params.dsr_max
    if delta > params.beta_s:
        return params.p_low
    frac = (params.beta_s - delta) / (params.beta_s - params.alpha_s)
    return params.p_low + params.dsr_max * frac


def competitor_rate(r_short: float, r_ph_prev: float,
                    params: LiabilityParams) -> float:
    if params.competitor_rule == "max_with_eta":
        return max(r_short, params.eta * r_ph_prev)
    return r_short


def decide_crediting(
    fi_tilde: float,
    overflow: float,
    psr_prev: float,
    cgl_s: float,
    latent_gain: float,
    latent_loss: float,
    mr2: float,
    r_comp: float,
    params: LiabilityParams,
) -> CreditingOutcome:
    """Pick the crediting case, the realized latent fraction and the reserves.

    The distributable amount is affine and nondecreasing in the latent
    fraction ``alpha`` (realized equity gains and the latent position always
    carry the same sign), so the four cases partition the state space and
    the interior case solves a linear equation.
    """
    base = mr2 + psr_prev
    if not base > 0.0:
        raise ValueError("crediting needs mr2 + psr > 0")

    def lgl(alpha: float) -> float:
        return -(1.0 - alpha) * latent_loss + alpha * latent_gain

    def td(alpha: float, rho: float) -> float:
        bucket = cgl_s + lgl(alpha)
        return (fi_tilde - overflow + rho * (psr_prev + bucket)
                - (1.0 - rho) * max(-bucket, 0.0))

    rho_bar, pi = params.rho_bar, params.pi_pr
    rg_amt = params.r_g * base
    m_target = max(rg_amt, r_comp * base)
    td0 = td(0.0, rho_bar)
    td1 = td(1.0, rho_bar)

    if pi * td0 >= m_target:
        case, alpha, rho, amount = "A", 0.0, rho_bar, pi * td0
    elif pi * td1 >= m_target and td1 - td0 > 1e-14:
        alpha = (m_target / pi - td0) / (td1 - td0)
        case, rho, amount = "B", rho_bar, m_target
    elif rg_amt <= pi * td1:
        case, alpha, rho, amount = "C", 1.0, rho_bar, pi * td1
    else:
        case, alpha, rho = "D", 1.0, 1.0
        amount = max(pi * td(1.0, 1.0), rg_amt)

    td_val = td(alpha, rho)
    r_ph = amount / base
    bucket = cgl_s + lgl(alpha)
    mr_new = mr2 * (1.0 + r_ph)
    psr_new = psr_prev * r_ph + (1.0 - rho) * (psr_prev + max(bucket, 0.0))
    am = (1.0 - pi) * td_val - max(rg_amt - pi * td_val, 0.0)
    return CreditingOutcome(
        case=case, alpha=alpha, rho=rho, r_ph_amount=amount, r_ph=r_ph,
        td=td_val, mr=mr_new, psr=psr_new, am=am, lgl=lgl(alpha),
    )


def _externalize(amount: float, mv: float, bv_s4: float, bv_b3: float,
                 phi_s3: float, q3: float, w_s: float, s_t: float,
                 unit_basket: float):
    """Step 5: hand the margin and reserve movement over in kind.

    Books drop by the accounting amount (the balance-sheet identity needs
    exactly that); positions drop by the matching market-value fraction so
    shareholders receive the accounting amount at market value and the
    valuation identity BOF + BEL = MR_0 stays exact.  Negative amounts are
    shareholder injections spent at target weights.
    """
    bv4 = bv_s4 + bv_b3
    if amount >= 0.0:
        if amount >= bv4 or amount >= mv:
            raise FloatingPointError("externalized margin exceeds the portfolio")
        bfrac = 1.0 - amount / bv4
        mfrac = 1.0 - amount / mv
        return bv_s4 * bfrac, bv_b3 * bfrac, phi_s3 * mfrac, q3 * mfrac
    buy = -amount
    w_b = 1.0 - w_s
    return (
        bv_s4 + w_s * buy,
        bv_b3 + w_b * buy,
        phi_s3 + w_s * buy / s_t,
        q3 + w_b * buy / unit_basket,
    )


def step_year(
    sheet: BalanceSheet,
    s_t: float,
    model: VasicekPPModel,
    x_t: float,
    x_prev: float,
    p_e_prev: float,
    w_s: float,
    params: LiabilityParams,
) -> tuple[BalanceSheet, YearLedger]:
    """Advance the sheet from year ``t-1`` to year ``t`` (non-terminal)."""
    t = sheet.t + 1
    n = sheet.ladder.n
    w_b = 1.0 - w_s

    # step 1: income
    fi, nominal, bv_b1 = annual_income(sheet.ladder)
    cif = fi + nominal

    # step 2: claims
    cof = p_e_prev * sheet.mr * (1.0 + 0.5 * params.r_g)
    mr2 = (1.0 - p_e_prev) * sheet.mr
    gap = cif - cof
    fi_tilde = fi - 0.5 * params.r_g * p_e_prev * sheet.mr

    # step 3: reallocation
    aged = sheet.ladder.coupons[1:]
    aged_value = (
        sheet.ladder.quantity
        * sum(model.bond_price(x_t, t, i, aged[i - 1]) for i in range(1, n))
        / n
    )
    mv = gap + sheet.phi_s * s_t + aged_value
    r_short = model.short_rate(x_t, float(t))
    r_comp = competitor_rate(r_short, sheet.r_ph_prev, params)

    if mv <= 0.0:
        return _bailout(sheet, mv, cof, mr2, s_t, model, x_t, t, w_s, params, r_comp)

    target_s = w_s * mv
    phi_s3 = target_s / s_t
    cgl_s = 0.0
    if w_s == 0.0:
        bv_s3 = sheet.bv_s
    else:
        dphi = phi_s3 - sheet.phi_s
        if dphi >= 0.0:
            bv_s3 = sheet.bv_s + dphi * s_t
        else:
            cgl_s = -dphi * (s_t - sheet.bv_s / sheet.phi_s)
            bv_s3 = sheet.bv_s * (1.0 + dphi / sheet.phi_s)

    realloc = reallocate(
        sheet.ladder.quantity, bv_b1, aged, w_b * mv, model, x_t, float(t)
    )
    cr_new, overflow = update_capitalization_reserve(sheet.cr, realloc.cgl)
    dcr = cr_new - sheet.cr

    # step 4: crediting
    diff = target_s - bv_s3
    outcome = decide_crediting(
        fi_tilde, overflow, sheet.psr, cgl_s, max(diff, 0.0), max(-diff, 0.0),
        mr2, r_comp, params,
    )
    bv_s4 = bv_s3 + outcome.lgl
    pinv = 1.0 / model.zcb_price(x_prev, t - 1.0, float(t))
    pnl = outcome.am + sheet.cr * (pinv - 1.0)

    # step 5: externalization
    unit_basket = model.basket_price(x_t, float(t), realloc.ladder.coupons)
    bv_s5, bv_b5, phi_s5, q5 = _externalize(
        outcome.am + dcr, mv, bv_s4, realloc.ladder.book_value, phi_s3,
        realloc.ladder.quantity, w_s, s_t, unit_basket,
    )
    new_ladder = CouponLadder(realloc.ladder.coupons, quantity=q5, book_value=bv_b5)
    p_e_next = surrender_rate(outcome.r_ph - r_comp, params)

    new_sheet = BalanceSheet(
        mr=outcome.mr, psr=outcome.psr, cr=cr_new, bv_s=bv_s5, bv_b=bv_b5,
        phi_s=phi_s5, ladder=new_ladder, r_ph_prev=outcome.r_ph, t=t,
    )
    led = YearLedger(
        t=t, fi=fi, cif=cif, cof=cof, gap=gap, cgl_s=cgl_s, cgl_b=realloc.cgl,
        lgl=outcome.lgl, case=outcome.case, alpha=outcome.alpha,
        rho=outcome.rho, r_ph=outcome.r_ph, p_e_next=p_e_next, td=outcome.td,
        am=outcome.am, pnl=pnl, dcr=dcr, avg_coupon=new_ladder.average_coupon,
    )
    return new_sheet, led


def _bailout(sheet, mv, cof, mr2, s_t, model, x_t, t, w_s, params, r_comp):
    """Shareholders pay the claims; portfolio rebuilt at market, rate floored."""
    mv = mv + cof
    if mv <= 0.0:
        raise FloatingPointError("portfolio value non-positive even after bailout")
    w_b = 1.0 - w_s
    ladder = CouponLadder.at_par(model, x_t, float(t), sheet.ladder.n, w_b * mv)
    r_ph = params.r_g
    new_sheet = BalanceSheet(
        mr=mr2 * (1.0 + r_ph), psr=sheet.psr * (1.0 + r_ph), cr=sheet.cr,
        bv_s=w_s * mv, bv_b=w_b * mv, phi_s=w_s * mv / s_t, ladder=ladder,
        r_ph_prev=r_ph, t=t,
    )
    led = YearLedger(
        t=t, fi=0.0, cif=0.0, cof=cof, gap=0.0, cgl_s=0.0, cgl_b=0.0, lgl=0.0,
        case="-", alpha=0.0, rho=1.0, r_ph=r_ph,
        p_e_next=surrender_rate(r_ph - r_comp, params), td=0.0, am=0.0,
        pnl=-cof, dcr=0.0, avg_coupon=ladder.average_coupon, bailout=True,
    )
    return new_sheet, led


def close_at_year_end(
    sheet: BalanceSheet,
    s_t: float,
    model: VasicekPPModel,
    x_t: float,
    x_prev: float,
    params: LiabilityParams,
) -> tuple[float, float, YearLedger]:
    """Liquidate at the final date: realize everything, release the reserves.

    Policyholders that exited during the last year and the survivors are
    paid together; the capitalization reserve goes back to shareholders.
    Returns ``(pnl, cof, ledger)``.
    """
    t = sheet.t + 1
    n = sheet.ladder.n
    fi, nominal, bv_b1 = annual_income(sheet.ladder)
    aged = sheet.ladder.coupons[1:]
    aged_value = (
        sheet.ladder.quantity
        * sum(model.bond_price(x_t, t, i, aged[i - 1]) for i in range(1, n))
        / n
    )
    cgl_b = aged_value - bv_b1
    cgl_s = sheet.phi_s * s_t - sheet.bv_s if sheet.phi_s > 0.0 else 0.0
    cr_final, overflow = update_capitalization_reserve(sheet.cr, cgl_b)
    td = fi - overflow + sheet.psr + cgl_s
    base = sheet.mr + sheet.psr
    rg_amt = params.r_g * base
    amount = max(params.pi_pr * td, rg_amt)
    r_ph = amount / base
    mr_final = sheet.mr * (1.0 + r_ph)
    psr_final = sheet.psr * r_ph
    am = (1.0 - params.pi_pr) * td - max(rg_amt - params.pi_pr * td, 0.0)
    pinv = 1.0 / model.zcb_price(x_prev, t - 1.0, float(t))
    pnl = am + sheet.cr * (pinv - 1.0) + cr_final
    cof = mr_final + psr_final
    led = YearLedger(
        t=t, fi=fi, cif=fi + nominal, cof=cof, gap=0.0, cgl_s=cgl_s,
        cgl_b=cgl_b, lgl=0.0, case="-", alpha=1.0, rho=1.0, r_ph=r_ph,
        p_e_next=math.nan, td=td, am=am, pnl=pnl, dcr=cr_final - sheet.cr,
        avg_coupon=math.nan,
    )
    return pnl, cof, led


# -- single-bond proxy variant ------------------------------------------------


@dataclass(frozen=True)
class ProxyBook:
    """Single-bond book of the no-cash-flow-matching proxy."""

    coupon: float
    quantity: float
    book_value: float
    maturity: int  # rolled back to this every year


def initialize_proxy(
    mr0: float, w_s: float, central: VasicekPPModel,
    pricing: VasicekPPModel, n: int,
) -> tuple[ProxyBook, float]:
    """Initial proxy position, scaled to carry the same curve-shock hit.

    The coupon is the central par rate for maturity ``n // 2``; the quantity
    is set so the proxy bond position is worth exactly what the ladder would
    be worth under the pricing (possibly shocked) model.  Book values are
    set pre-shock, like the ladder's.  Returns ``(book, quantity)``.
    """
    n_p = n // 2
    if n_p < 2:
        raise ValueError(f"proxy engine needs n >= 4, got n={n}")
    coupon = central.swap_rate(central.x0, 0.0, n_p)
    ladder_coupons = [central.swap_rate(central.x0, 0.0, i) for i in range(1, n + 1)]
    ladder_value = pricing.basket_price(pricing.x0, 0.0, ladder_coupons)
    unit = pricing.bond_price(pricing.x0, 0.0, n_p, coupon)
    quantity = (1.0 - w_s) * mr0 * ladder_value / unit
    book = ProxyBook(coupon=coupon, quantity=quantity,
                     book_value=(1.0 - w_s) * mr0, maturity=n_p)
    return book, quantity


def proxy_step_year(
    sheet: BalanceSheet,
    book: ProxyBook,
    s_t: float,
    model: VasicekPPModel,
    x_t: float,
    x_prev: float,
    p_e_prev: float,
    w_s: float,
    n: int,
    params: LiabilityParams,
) -> tuple[BalanceSheet, ProxyBook, YearLedger]:
    """Same pipeline as :func:`step_year` with the single-bond book.

    No nominal matures (the bond is rolled back to its target maturity
    before the reallocation, value-preserving and free of realized gains);
    the coupon mixes one n-th of the long swap rate per year.
    """
    t = sheet.t + 1
    n_p = book.maturity
    w_b = 1.0 - w_s

    fi = book.quantity * book.coupon
    cif = fi
    cof = p_e_prev * sheet.mr * (1.0 + 0.5 * params.r_g)
    mr2 = (1.0 - p_e_prev) * sheet.mr
    gap = cif - cof
    fi_tilde = fi - 0.5 * params.r_g * p_e_prev * sheet.mr

    held = book.quantity * model.bond_price(x_t, t, n_p - 1, book.coupon)
    c_mix = (model.swap_rate(x_t, float(t), n) / n
             + (1.0 - 1.0 / n) * book.coupon)
    unit_new = model.bond_price(x_t, float(t), n_p, c_mix)
    q2 = held / unit_new
    mv = gap + sheet.phi_s * s_t + held
    r_short = model.short_rate(x_t, float(t))
    r_comp = competitor_rate(r_short, sheet.r_ph_prev, params)
    if mv <= 0.0:
        mv = mv + cof
        if mv <= 0.0:
            raise FloatingPointError("portfolio value non-positive even after bailout")
        r_ph = params.r_g
        new_book = ProxyBook(coupon=c_mix, quantity=w_b * mv / unit_new,
                             book_value=w_b * mv, maturity=n_p)
        new_sheet = BalanceSheet(
            mr=mr2 * (1.0 + r_ph), psr=sheet.psr * (1.0 + r_ph), cr=sheet.cr,
            bv_s=w_s * mv, bv_b=w_b * mv, phi_s=w_s * mv / s_t,
            ladder=sheet.ladder, r_ph_prev=r_ph, t=t,
        )
        led = YearLedger(
            t=t, fi=fi, cif=cif, cof=cof, gap=gap, cgl_s=0.0, cgl_b=0.0,
            lgl=0.0, case="-", alpha=0.0, rho=1.0, r_ph=r_ph,
            p_e_next=surrender_rate(r_ph - r_comp, params), td=0.0, am=0.0,
            pnl=-cof, dcr=0.0, avg_coupon=c_mix, bailout=True,
        )
        return new_sheet, new_book, led

    target_s = w_s * mv
    phi_s3 = target_s / s_t
    cgl_s = 0.0
    if w_s == 0.0:
        bv_s3 = sheet.bv_s
    else:
        dphi = phi_s3 - sheet.phi_s
        if dphi >= 0.0:
            bv_s3 = sheet.bv_s + dphi * s_t
        else:
            cgl_s = -dphi * (s_t - sheet.bv_s / sheet.phi_s)
            bv_s3 = sheet.bv_s * (1.0 + dphi / sheet.phi_s)

    target_b = w_b * mv
    dphi_b = target_b / unit_new - q2
    cgl_b = 0.0
    if dphi_b >= 0.0:
        bv_b3 = book.book_value + dphi_b * unit_new
    else:
        cgl_b = -dphi_b * (unit_new - book.book_value / q2)
        bv_b3 = book.book_value * (1.0 + dphi_b / q2)
    q3 = q2 + dphi_b

    cr_new, overflow = update_capitalization_reserve(sheet.cr, cgl_b)
    dcr = cr_new - sheet.cr

    diff = target_s - bv_s3
    outcome = decide_crediting(
        fi_tilde, overflow, sheet.psr, cgl_s, max(diff, 0.0), max(-diff, 0.0),
        mr2, r_comp, params,
    )
    bv_s4 = bv_s3 + outcome.lgl
    pinv = 1.0 / model.zcb_price(x_prev, t - 1.0, float(t))
    pnl = outcome.am + sheet.cr * (pinv - 1.0)

    bv_s5, bv_b5, phi_s5, q5 = _externalize(
        outcome.am + dcr, mv, bv_s4, bv_b3, phi_s3, q3, w_s, s_t, unit_new,
    )
    new_book = ProxyBook(coupon=c_mix, quantity=q5, book_value=bv_b5, maturity=n_p)
    p_e_next = surrender_rate(outcome.r_ph - r_comp, params)
    new_sheet = BalanceSheet(
        mr=outcome.mr, psr=outcome.psr, cr=cr_new, bv_s=bv_s5, bv_b=bv_b5,
        phi_s=phi_s5, ladder=sheet.ladder, r_ph_prev=outcome.r_ph, t=t,
    )
    led = YearLedger(
        t=t, fi=fi, cif=cif, cof=cof, gap=gap, cgl_s=cgl_s, cgl_b=cgl_b,
        lgl=outcome.lgl, case=outcome.case, alpha=outcome.alpha,
        rho=outcome.rho, r_ph=outcome.r_ph, p_e_next=p_e_next, td=outcome.td,
        am=outcome.am, pnl=pnl, dcr=dcr, avg_coupon=c_mix,
    )
    return new_sheet, new_book, led


def proxy_close(
    sheet: BalanceSheet,
    book: ProxyBook,
    s_t: float,
    model: VasicekPPModel,
    x_t: float,
    x_prev: float,
    params: LiabilityParams,
) -> tuple[float, float, YearLedger]:
    """Terminal liquidation of the proxy book (no nominal inflow)."""
    t = sheet.t + 1
    fi = book.quantity * book.coupon
    value = book.quantity * model.bond_price(x_t, t, book.maturity - 1, book.coupon)
    cgl_b = value - book.book_value
    cgl_s = sheet.phi_s * s_t - sheet.bv_s if sheet.phi_s > 0.0 else 0.0
    cr_final, overflow = update_capitalization_reserve(sheet.cr, cgl_b)
    td = fi - overflow + sheet.psr + cgl_s
    base = sheet.mr + sheet.psr
    rg_amt = params.r_g * base
    amount = max(params.pi_pr * td, rg_amt)
    r_ph = amount / base
    mr_final = sheet.mr * (1.0 + r_ph)
    psr_final = sheet.psr * r_ph
    am = (1.0 - params.pi_pr) * td - max(rg_amt - params.pi_pr * td, 0.0)
    pinv = 1.0 / model.zcb_price(x_prev, t - 1.0, float(t))
    pnl = am + sheet.cr * (pinv - 1.0) + cr_final
    cof = mr_final + psr_final
    led = YearLedger(
        t=t, fi=fi, cif=fi, cof=cof, gap=0.0, cgl_s=cgl_s, cgl_b=cgl_b,
        lgl=0.0, case="-", alpha=1.0, rho=1.0, r_ph=r_ph, p_e_next=math.nan,
        td=td, am=am, pnl=pnl, dcr=cr_final - sheet.cr, avg_coupon=math.nan,
    )
    return pnl, cof, led
