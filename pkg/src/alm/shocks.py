"""Regulatory stress scenarios for the yield curve and the equity index.

Two built-in stress-factor sets are shipped: the December 2012 multiplicative
shocks and the February 2018 recommendation that adds an additive term so the
stress still bites when rates are near zero or negative.

Shocked pillar rates:

    R'(0, t) = (1 + s_t) * R(0, t) + b_t

with the tabulated factors for t = 1..20, linear interpolation of ``s``
between years 20 and 90 toward +/-20%, constant beyond, and linear phase-out
of ``b`` between years 20 and 60.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .curves import MarketCurve

__all__ = ["ShockSpec", "builtin_shock", "apply_shock", "forward_rate"]

# December 2012 stress factors, t = 1..20.
_S_UP_2012 = np.array(
    [0.70, 0.70, 0.64, 0.59, 0.55, 0.52, 0.49, 0.47, 0.44, 0.42,
     0.39, 0.37, 0.35, 0.34, 0.33, 0.31, 0.30, 0.29, 0.27, 0.26]
)
_S_DOWN_2012 = np.array(
    [-0.75, -0.65, -0.56, -0.50, -0.46, -0.42, -0.39, -0.36, -0.33, -0.31,
     -0.30, -0.29, -0.28, -0.27, -0.28, -0.28, -0.28, -0.28, -0.29, -0.29]
)

# February 2018 recommendation: multiplicative plus additive terms, t = 1..20.
_S_UP_2018 = np.array(
    [0.61, 0.53, 0.49, 0.46, 0.45, 0.41, 0.37, 0.34, 0.32, 0.30,
     0.30, 0.30, 0.30, 0.29, 0.28, 0.28, 0.27, 0.26, 0.26, 0.25]
)
_S_DOWN_2018 = np.array(
    [-0.58, -0.51, -0.44, -0.40, -0.40, -0.38, -0.37, -0.38, -0.39, -0.40,
     -0.41, -0.42, -0.43, -0.44, -0.45, -0.47, -0.48, -0.49, -0.49, -0.50]
)
_B_UP_2018 = np.array(
    [0.0214, 0.0186, 0.0172, 0.0161, 0.0158, 0.0144, 0.0130, 0.0119, 0.0112, 0.0105,
     0.0105, 0.0105, 0.0105, 0.0102, 0.0098, 0.0098, 0.0095, 0.0091, 0.0091, 0.0088]
)
_B_DOWN_2018 = np.array(
    [-0.0116, -0.0099, -0.0083, -0.0074, -0.0071, -0.0067, -0.0063, -0.0062,
     -0.0061, -0.0061, -0.0060, -0.0060, -0.0059, -0.0058, -0.0057, -0.0056,
     -0.0055, -0.0054, -0.0052, -0.0050]
)

_TABLE_YEARS = 20   # tabulated pillars
_S_TAIL_YEAR = 90   # s reaches +/- s_inf here and stays flat
_B_ZERO_YEAR = 60   # b phased out linearly by here
_S_INF = 0.20

KINDS = ("central", "equity", "ir_up", "ir_down")
REGIMES = ("eiopa2012", "eiopa2018")


@dataclass(frozen=True)
class ShockSpec:
    """One stress scenario: a curve shock table and/or an equity shock.

    ``kind`` is one of ``central`` (no stress), ``equity`` (stock value drops
    by ``|s_eq|`` right after the initial allocation) or ``ir_up``/``ir_down``
    (curve stress per the factor tables).
    """

    kind: str
    regime: str = "eiopa2012"
    s_table: np.ndarray = field(default=None)
    b_table: np.ndarray = field(default=None)
    s_eq: float = -0.39
    min_move: float = 0.0  # optional 1% minimum rate move (2012 footnote), off by default

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"shock kind must be one of {KINDS}, got {self.kind!r}")
        if self.regime not in REGIMES:
            raise ValueError(f"shock regime must be one of {REGIMES}, got {self.regime!r}")
        if not -1.0 < self.s_eq <= 0.0:
            raise ValueError(f"equity shock must lie in (-1, 0], got {self.s_eq}")
        for name in ("s_table", "b_table"):
            tab = getattr(self, name)
            if tab is not None:
                arr = np.asarray(tab, dtype=np.float64).copy()
                if arr.shape != (_TABLE_YEARS,):
                    raise ValueError(f"{name} must have {_TABLE_YEARS} entries")
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)

    def is_curve_shock(self) -> bool:
        return self.kind in ("ir_up", "ir_down")

    def s_at(self, t: int) -> float:
        """Multiplicative stress factor at integer maturity ``t``."""
        self._require_curve_kind()
        if t < 1:
            raise ValueError(f"maturity must be >= 1, got {t}")
        tab = self.s_table
        if t <= _TABLE_YEARS:
            return float(tab[t - 1])
        s_inf = _S_INF if self.kind == "ir_up" else -_S_INF
        if t >= _S_TAIL_YEAR:
            return s_inf
        s20 = float(tab[_TABLE_YEARS - 1])
        w = (t - _TABLE_YEARS) / (_S_TAIL_YEAR - _TABLE_YEARS)
        return s20 + (s_inf - s20) * w

    def b_at(self, t: int) -> float:
        """Additive stress term at integer maturity ``t`` (zero under 2012)."""
        self._require_curve_kind()
        if t < 1:
            raise ValueError(f"maturity must be >= 1, got {t}")
        if self.b_table is None:
            return 0.0
        if t <= _TABLE_YEARS:
            return float(self.b_table[t - 1])
        if t >= _B_ZERO_YEAR:
            return 0.0
        b20 = float(self.b_table[_TABLE_YEARS - 1])
        w = (t - _TABLE_YEARS) / (_B_ZERO_YEAR - _TABLE_YEARS)
        return b20 * (1.0 - w)

    def _require_curve_kind(self) -> None:
        if not self.is_curve_shock():
            raise ValueError(f"{self.kind!r} is not a curve shock")


def builtin_shock(kind: str, regime: str = "eiopa2012", s_eq: float = -0.39,
                  min_move: float = 0.0) -> ShockSpec:
    """ShockSpec with the built-in factor tables for one regime."""
    if kind in ("central", "equity"):
        return ShockSpec(kind=kind, regime=regime, s_eq=s_eq, min_move=min_move)
    if regime == "eiopa2012":
        s = _S_UP_2012 if kind == "ir_up" else _S_DOWN_2012
        b = None
    else:
        s = _S_UP_2018 if kind == "ir_up" else _S_DOWN_2018
        b = _B_UP_2018 if kind == "ir_up" else _B_DOWN_2018
    return ShockSpec(kind=kind, regime=regime, s_table=s, b_table=b,
                     s_eq=s_eq, min_move=min_move)


def shock_tables_from_csv(path_or_text: str, regime: str = "eiopa2012",
                          s_eq: float = -0.39) -> dict:
    """Read a (t, s_up, s_down, b_up, b_down) CSV into up/down ShockSpecs.

    Rows must cover t = 1..20 in order.  Returns ``{"ir_up": ..., "ir_down": ...}``.
    """
    text = path_or_text
    if "\n" not in path_or_text and "," not in path_or_text:
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    need = ["t", "s_up", "s_down", "b_up", "b_down"]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != need:
        raise ValueError(f"shock CSV must have header {','.join(need)}")
    rows = list(reader)
    if len(rows) != _TABLE_YEARS:
        raise ValueError(f"shock CSV must have {_TABLE_YEARS} rows, got {len(rows)}")
    cols = {k: np.array([float(r[k]) for r in rows]) for k in need}
    if not np.array_equal(cols["t"], np.arange(1, _TABLE_YEARS + 1)):
        raise ValueError("shock CSV column t must be 1..20 in order")
    return {
        "ir_up": ShockSpec(kind="ir_up", regime=regime, s_table=cols["s_up"],
                           b_table=cols["b_up"], s_eq=s_eq),
        "ir_down": ShockSpec(kind="ir_down", regime=regime, s_table=cols["s_down"],
                             b_table=cols["b_down"], s_eq=s_eq),
    }


def apply_shock(curve: MarketCurve, spec: ShockSpec) -> MarketCurve:
    """Shocked pillar curve R'(0,t) = (1 + s_t) R(0,t) + b_t.

    Negative shocked rates are kept as-is; the optional ``min_move`` floor
    (the 2012 footnote's minimum 1% move) is applied only when configured.
    """
    if not spec.is_curve_shock():
        raise ValueError(f"cannot shock a curve with a {spec.kind!r} spec")
    out = np.empty(curve.max_maturity)
    sign = 1.0 if spec.kind == "ir_up" else -1.0
    for t in range(1, curve.max_maturity + 1):
        r = curve.rate(t)
        shocked = (1.0 + spec.s_at(t)) * r + spec.b_at(t)
        if spec.min_move > 0.0:
            limit = r + sign * spec.min_move
            shocked = max(shocked, limit) if sign > 0 else min(shocked, limit)
        out[t - 1] = shocked
    return MarketCurve(out)


def forward_rate(curve: MarketCurve, t: int) -> float:
    """One-year forward rate f(0, t) = (t+1) R(0, t+1) - t R(0, t).

    ``t = 0`` returns the one-year spot rate.
    """
    t = int(t)
    if t < 0 or t + 1 > curve.max_maturity:
        raise ValueError(f"need 0 <= t <= {curve.max_maturity - 1}, got {t}")
    if t == 0:
        return curve.rate(1)
    return (t + 1) * curve.rate(t + 1) - t * curve.rate(t)
