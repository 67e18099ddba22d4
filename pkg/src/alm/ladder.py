"""The equally weighted bond ladder and its book-value mechanics.

The insurer holds, per unit of ladder quantity, ``1/n`` bonds of each time to
maturity ``1..n``.  Maturing nominal comes in once a year, the books drop the
matured nominal, and the yearly reallocation either tops the ladder up with
at-par purchases (coupon mixing, no realized gains) or scales it down
pro-rata (realizing the gap between the aged basket's market price and its
unit book value).  Realized bond gains and losses feed the capitalization
reserve, a shareholder-side buffer floored at zero.

All functions are pure; the ALM engine owns the state hand-off (in
particular the coupon aging between the income step and the reallocation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rates import VasicekPPModel

__all__ = [
    "CouponLadder",
    "BondReallocResult",
    "annual_income",
    "reallocate",
    "update_capitalization_reserve",
]


@dataclass(frozen=True)
class CouponLadder:
    """Equally weighted bond basket state.

    ``coupons[i-1]`` is the coupon of the rung maturing in ``i`` years;
    ``quantity`` is the total number of basket units (each unit holds ``1/n``
    of every rung); ``book_value`` is the ladder's total book value.
    """

    coupons: np.ndarray = field()
    quantity: float = 0.0
    book_value: float = 0.0

    def __init__(self, coupons, quantity: float = 0.0, book_value: float = 0.0) -> None:
        arr = np.atleast_1d(np.asarray(coupons, dtype=np.float64)).copy()
        if arr.size == 0:
            raise ValueError("ladder needs at least one rung")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ladder coupons must be finite")
        if quantity < 0.0 or book_value < 0.0:
            raise ValueError("ladder quantity and book value must be >= 0")
        arr.flags.writeable = False
        object.__setattr__(self, "coupons", arr)
        object.__setattr__(self, "quantity", float(quantity))
        object.__setattr__(self, "book_value", float(book_value))

    @property
    def n(self) -> int:
        return int(self.coupons.size)

    @property
    def average_coupon(self) -> float:
        return float(self.coupons.mean())

    def market_value(self, model: VasicekPPModel, x: float, t: float) -> float:
        return self.quantity * model.basket_price(x, t, self.coupons)

    @classmethod
    def at_par(cls, model: VasicekPPModel, x: float, t: float, n: int,
               amount: float) -> "CouponLadder":
        """Fresh ladder bought at par: every rung carries its swap rate.

        The basket unit value is then exactly 1, so ``amount`` currency buys
        ``amount`` units and books at ``amount``.
        """
        coupons = np.array([model.swap_rate(x, t, i) for i in range(1, n + 1)])
        return cls(coupons, quantity=amount, book_value=amount)


@dataclass(frozen=True)
class BondReallocResult:
    ladder: CouponLadder
    cgl: float           # realized capital gain/loss (zero in the purchase branch)
    market_value: float  # post-trade market value, equals the target


def annual_income(ladder: CouponLadder) -> tuple[float, float, float]:
    """Coupon income, matured nominal, and the book value net of that nominal.

    Returns ``(fi, nominal, book_value_after)`` where ``fi`` is the total
    coupon payment ``quantity * mean(coupons)`` and ``nominal = quantity / n``
    is the maturing one-year rung, removed from the books.
    """
    fi = ladder.quantity * ladder.average_coupon
    nominal = ladder.quantity / ladder.n
    return fi, nominal, ladder.book_value - nominal


def reallocate(
    quantity: float,
    book_value: float,
    aged_coupons,
    target: float,
    model: VasicekPPModel,
    x: float,
    t: float,
) -> BondReallocResult:
    """Rebuild the equally weighted ladder at market value ``target``.

    ``aged_coupons`` is the post-income view: rung ``i`` (maturity ``t + i``)
    carries last year's rung-``i+1`` coupon, for ``i = 1..n-1``.  The
    reference value is what the ladder would be worth after buying the same
    ``quantity/n`` of new n-year rungs at par.  Above it, the shortfall is
    covered by at-par purchases across all rungs with coupon mixing and no
    realized gains; below it, every rung is scaled down pro-rata and the gap
    between the aged basket price and unit book value is realized.
    """
    if target < 0.0:
        raise ValueError(f"bond target must be >= 0, got {target}")
    aged = np.atleast_1d(np.asarray(aged_coupons, dtype=np.float64))
    n = aged.size + 1

    disc = np.array([model.zcb_price(x, t, t + i) for i in range(1, n + 1)])
    cum = np.cumsum(disc)
    swap = (1.0 - disc) / cum  # par coupon per tenor 1..n

    # unit value of the aged rungs (maturities 1..n-1), per ladder unit
    bond_vals = aged * cum[: n - 1] + disc[: n - 1]
    aged_unit = float(bond_vals.sum()) / n
    unit_ref = aged_unit + 1.0 / n  # plus one at-par n-year rung
    reference = quantity * unit_ref

    if quantity == 0.0:
        # degenerate: nothing held, buy a fresh par ladder
        ladder = CouponLadder.at_par(model, x, t, n, target)
        return BondReallocResult(ladder=ladder, cgl=0.0, market_value=target)

    if target >= reference:
        delta = target - reference
        new_quantity = quantity + delta
        mixed = np.empty(n)
        mixed[: n - 1] = (quantity * aged + delta * swap[: n - 1]) / new_quantity
        mixed[n - 1] = swap[n - 1]
        new_book = book_value + delta + quantity / n
        ladder = CouponLadder(mixed, quantity=new_quantity, book_value=new_book)
        return BondReallocResult(ladder=ladder, cgl=0.0, market_value=target)

    new_quantity = target / unit_ref
    sold = quantity - new_quantity
    cgl = sold * (aged_unit - book_value / quantity)
    new_book = book_value * (1.0 - sold / quantity) + new_quantity / n
    coupons = np.empty(n)
    coupons[: n - 1] = aged
    coupons[n - 1] = swap[n - 1]
    ladder = CouponLadder(coupons, quantity=new_quantity, book_value=new_book)
    return BondReallocResult(ladder=ladder, cgl=cgl, market_value=target)


def update_capitalization_reserve(cr_prev: float, cgl: float) -> tuple[float, float]:
    """Positive-part reserve update.

    Returns ``(cr_new, overflow_loss)``: realized bond losses beyond the
    reserve spill into ``overflow_loss`` and reduce the year's distributable
    income; gains accumulate in the reserve.
    """
    if cr_prev < 0.0:
        raise ValueError(f"capitalization reserve must be >= 0, got {cr_prev}")
    level = cr_prev + cgl
    if level >= 0.0:
        return level, 0.0
    return 0.0, -level
