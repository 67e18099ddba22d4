"""Run configuration: INI-style files, built-in presets, validation.

The grammar is plain ``key = value`` under three sections::

    [market]     s0, sigma_s, gamma, x0, theta, k, sigma_r
    [liability]  w_s, n, r_g, pi_pr, rho_bar, p_low, dsr_max,
                 alpha_s, beta_s, competitor_rule, eta
    [run]        horizon, n_paths, seed, regime, engine, experiment,
                 s_eq, min_move, curve_csv, shock_csv

Unknown keys are rejected; every domain constraint is re-validated at load
time with the offending key named.  Two presets carry the reference
parameter sets: ``paper-2pct`` (moderate rates, 2012 shocks) and
``paper-lowyield`` (0.5% rates, 2018 shocks).
"""

from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, replace

from .engine import COMPETITOR_RULES, LiabilityParams
from .scenarios import EquityParams
from .shocks import REGIMES

__all__ = ["RunConfig", "PRESETS", "load_config", "save_config", "preset"]

ENGINES = ("ladder", "proxy")
EXPERIMENTS = ("value", "scr", "sweep_ws", "sweep_n", "sweep_gamma", "durations")


@dataclass(frozen=True)
class RunConfig:
    """Everything one reproducible run needs."""

    # market model
    s0: float = 1.0
    sigma_s: float = 0.1
    gamma: float = 0.0
    x0: float = 0.02
    theta: float = 0.02
    k: float = 0.2
    sigma_r: float = 0.01
    # liability and management
    w_s: float = 0.05
    n: int = 20
    r_g: float = 0.015
    pi_pr: float = 0.9
    rho_bar: float = 0.5
    p_low: float = 0.05
    dsr_max: float = 0.3
    alpha_s: float = -0.05
    beta_s: float = -0.01
    competitor_rule: str = "short_rate"
    eta: float = 0.9
    # run controls
    horizon: int = 30
    n_paths: int = 50_000
    seed: int = 12345
    regime: str = "eiopa2012"
    engine: str = "ladder"
    experiment: str = "value"
    s_eq: float = -0.39
    min_move: float = 0.0
    curve_csv: str = ""
    shock_csv: str = ""

    def __post_init__(self) -> None:
        checks = [
            (self.s0 > 0.0, "s0", "must be > 0"),
            (self.sigma_s >= 0.0, "sigma_s", "must be >= 0"),
            (-1.0 <= self.gamma <= 1.0, "gamma", "must lie in [-1, 1]"),
            (self.k > 0.0, "k", "must be > 0"),
            (self.sigma_r >= 0.0, "sigma_r", "must be >= 0"),
            (0.0 <= self.w_s <= 1.0, "w_s", "must lie in [0, 1]"),
            (self.n >= 1, "n", "must be >= 1"),
            (self.horizon >= 1, "horizon", "must be >= 1"),
            (self.n_paths >= 1, "n_paths", "must be >= 1"),
            (self.regime in REGIMES, "regime", f"must be one of {REGIMES}"),
            (self.engine in ENGINES, "engine", f"must be one of {ENGINES}"),
            (self.experiment in EXPERIMENTS, "experiment",
             f"must be one of {EXPERIMENTS}"),
            (-1.0 < self.s_eq <= 0.0, "s_eq", "must lie in (-1, 0]"),
            (self.min_move >= 0.0, "min_move", "must be >= 0"),
        ]
        for ok, key, msg in checks:
            if not ok:
                raise ValueError(f"config key {key!r} {msg}, got {getattr(self, key)}")
        if self.engine == "proxy" and self.n // 2 < 2:
            raise ValueError(f"config key 'n' must be >= 4 for the proxy engine, got {self.n}")
        # liability constraints share the domain type's validation
        self.liability()

    def liability(self) -> LiabilityParams:
        try:
            return LiabilityParams(
                r_g=self.r_g, pi_pr=self.pi_pr, rho_bar=self.rho_bar,
                p_low=self.p_low, dsr_max=self.dsr_max, alpha_s=self.alpha_s,
                beta_s=self.beta_s, competitor_rule=self.competitor_rule,
                eta=self.eta,
            )
        except ValueError as exc:
            raise ValueError(f"config key {exc}") from None

    def equity(self) -> EquityParams:
        return EquityParams(s0=self.s0, sigma_s=self.sigma_s, gamma=self.gamma)


_SECTIONS = {
    "market": ("s0", "sigma_s", "gamma", "x0", "theta", "k", "sigma_r"),
    "liability": ("w_s", "n", "r_g", "pi_pr", "rho_bar", "p_low", "dsr_max",
                  "alpha_s", "beta_s", "competitor_rule", "eta"),
    "run": ("horizon", "n_paths", "seed", "regime", "engine", "experiment",
            "s_eq", "min_move", "curve_csv", "shock_csv"),
}
_STR_KEYS = {"competitor_rule", "regime", "engine", "experiment", "curve_csv",
             "shock_csv"}
_INT_KEYS = {"n", "horizon", "n_paths", "seed"}

PRESETS = {
    # moderate rates around 2%, December 2012 stress factors
    "paper-2pct": RunConfig(),
    # low-yield setting: 0.5% rates, February 2018 stress factors
    "paper-lowyield": RunConfig(
        x0=0.005, theta=0.005, w_s=0.08, n=10, r_g=0.0, p_low=0.1,
        regime="eiopa2018",
    ),
}


def preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return PRESETS[name]


def load_config(path_or_text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse an INI config; unknown sections or keys are errors.

    ``base`` provides defaults (e.g. a preset) that file keys override.
    """
    text = path_or_text
    if "\n" not in path_or_text and "=" not in path_or_text:
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"malformed config: {exc}") from None
    updates = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(
                f"unknown config section [{section}]; expected {sorted(_SECTIONS)}"
            )
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ValueError(f"unknown config key {key!r} in section [{section}]")
            if key in _STR_KEYS:
                updates[key] = raw.strip()
            elif key in _INT_KEYS:
                updates[key] = int(raw)
            else:
                updates[key] = float(raw)
    return replace(base or RunConfig(), **updates)


def save_config(cfg: RunConfig) -> str:
    """Serialize to the INI grammar; load(save(cfg)) == cfg."""
    out = io.StringIO()
    values = asdict(cfg)
    for section, keys in _SECTIONS.items():
        out.write(f"[{section}]\n")
        for key in keys:
            out.write(f"{key} = {values[key]!r}\n".replace("'", ""))
        out.write("\n")
    return out.getvalue()
