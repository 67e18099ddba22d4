"""Annual-pillar zero curves.

Curves are stored at integer maturities only (1, 2, ..., max_maturity) with
continuously compounded zero rates.  Anything intra-year is priced off a
short-rate model, never off curve interpolation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = ["MarketCurve"]


@dataclass(frozen=True)
class MarketCurve:
    """Zero-coupon yield curve on the annual grid.

    Parameters
    ----------
    rates : array-like
        Continuously compounded zero rates ``R(0, t)`` for
        ``t = 1, ..., len(rates)``.  Negative rates are allowed.
    """

    rates: np.ndarray = field()

    def __init__(self, rates) -> None:
        arr = np.atleast_1d(np.asarray(rates, dtype=np.float64)).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("curve needs at least one annual pillar")
        if not np.all(np.isfinite(arr)):
            raise ValueError("curve rates must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "rates", arr)

    @property
    def max_maturity(self) -> int:
        return int(self.rates.size)

    def rate(self, t: int) -> float:
        """Zero rate R(0, t) at an integer pillar."""
        t = int(t)
        if not 1 <= t <= self.max_maturity:
            raise ValueError(f"pillar {t} outside curve range [1, {self.max_maturity}]")
        return float(self.rates[t - 1])

    def discount(self, t: int) -> float:
        """Discount factor exp(-t * R(0, t))."""
        return float(np.exp(-t * self.rate(t)))

    def discounts(self) -> np.ndarray:
        """All pillar discount factors, index i holds P(0, i+1)."""
        t = np.arange(1, self.max_maturity + 1, dtype=np.float64)
        return np.exp(-t * self.rates)

    def maturities(self) -> np.ndarray:
        return np.arange(1, self.max_maturity + 1)

    # -- CSV interface (header: maturity,zero_rate) --------------------------

    @classmethod
    def from_csv(cls, path_or_text: str) -> "MarketCurve":
        """Load a curve from a CSV file path or CSV text.

        Expected header ``maturity,zero_rate``; maturities must be the
        contiguous integers 1..H in increasing order.
        """
        text = path_or_text
        if "\n" not in path_or_text and "," not in path_or_text:
            with open(path_or_text, "r", encoding="utf-8") as fh:
                text = fh.read()
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != [
            "maturity",
            "zero_rate",
        ]:
            raise ValueError("curve CSV must have header 'maturity,zero_rate'")
        rows = [(float(r["maturity"]), float(r["zero_rate"])) for r in reader]
        if not rows:
            raise ValueError("curve CSV has no rows")
        mats = [m for m, _ in rows]
        expected = list(range(1, len(rows) + 1))
        if any(abs(m - e) > 0 for m, e in zip(mats, expected)):
            raise ValueError(
                f"curve maturities must be contiguous integers 1..{len(rows)}, got {mats}"
            )
        return cls([r for _, r in rows])

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["maturity", "zero_rate"])
        for t, r in zip(self.maturities(), self.rates):
            w.writerow([int(t), repr(float(r))])
        return out.getvalue()
