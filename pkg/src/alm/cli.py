"""Command line entry point: run one experiment, write artifacts + manifest.

    alm run --config FILE [--preset NAME] [--experiment E] [--paths N]
            [--seed S] [--threads K] [--out DIR] [--ledger-dump]

Outputs land in ``--out`` (default ``$ALM_OUT_DIR`` or ``./alm-out``):
``manifest.json`` plus, per experiment, ``valuation.csv`` / ``value.json``,
``scr.json``, ``sweep.csv``, ``durations.csv`` and optionally ``ledger.csv``.
Every artifact carries the manifest hash; rerunning the same config and seed
reproduces every byte (timestamps only in the manifest).

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict, replace

import numpy as np


from . import __version__
from .backend import default_backend, set_threads
from .config import RunConfig, load_config, preset
from .curves import MarketCurve
from .scenarios import GENERATOR_ID, simulate
from .shocks import shock_tables_from_csv
from .valuation import ValuationResult, build_market, durations, scr, sweep, value

WS_GRID = [0.0, 0.025, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3]
N_GRID = [4, 6, 8, 10, 12, 14, 16, 17, 18, 19, 20, 21, 22, 23, 25, 28, 30]
GAMMA_GRID = [round(-0.9 + 0.15 * i, 2) for i in range(13)]


def _manifest_hash(cfg: RunConfig) -> str:
    blob = json.dumps({"config": asdict(cfg), "version": __version__},
                      sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _write_csv(path: str, header: list[str], rows, mhash: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# manifest_hash={mhash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _write_json(path: str, payload: dict, mhash: str) -> None:
    payload = dict(payload)
    payload["manifest_hash"] = mhash
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _diag_rows(results: dict[str, ValuationResult]):
    rows = []
    for name, res in results.items():
        horizon = res.mean_r_ph.shape[0] - 1
        for t in range(horizon + 1):
            rows.append([
                name, t, res.mean_r_ph[t], res.mean_p_e[t],
                res.mean_avg_coupon[t], *(res.case_freq[t, c] for c in range(4)),
            ])
    return rows


def _dump_ledger(path: str, res: ValuationResult, mhash: str) -> None:
    from . import _core
    names = ["fi", "cif", "cof", "gap", "cgl_s", "cgl_b", "lgl", "case",
             "alpha", "rho", "r_ph", "p_e_next", "td", "am", "pnl", "dcr",
             "mr", "psr", "cr", "bv_s", "bv_b", "phi_s", "phi_b", "avg_coupon"]
    assert len(names) == _core.LEDGER_WIDTH
    led = res.ledger
    rows = []
    for p in range(led.shape[0]):
        for t in range(1, led.shape[1]):
            rows.append([p, t, *led[p, t, :]])
    _write_csv(path, ["path", "t", *names], rows, mhash)


def run_experiment(cfg: RunConfig, out_dir: str, ledger_dump: bool = False,
                   backend: str | None = None) -> dict:
    """Execute the configured experiment; returns {filename: sha256}."""
    os.makedirs(out_dir, exist_ok=True)
    mhash = _manifest_hash(cfg)
    liab = cfg.liability()
    equity = cfg.equity()
    market_args = dict(
        x0=cfg.x0, theta=cfg.theta, k=cfg.k, sigma_r=cfg.sigma_r,
        regime=cfg.regime, s_eq=cfg.s_eq, min_move=cfg.min_move,
    )
    if cfg.curve_csv:
        market_args["base_curve"] = MarketCurve.from_csv(cfg.curve_csv)
    if cfg.shock_csv:
        market_args["shock_specs"] = shock_tables_from_csv(
            cfg.shock_csv, regime=cfg.regime, s_eq=cfg.s_eq)

    files: list[str] = []
    exp = cfg.experiment

    if exp in ("value", "scr"):
        market = build_market(horizon=cfg.horizon + cfg.n, **market_args)
        scn = simulate(market.central, equity, cfg.horizon, cfg.n_paths, cfg.seed)
        if exp == "value":
            res = value(scn, market.central, market.central, equity, liab,
                        cfg.w_s, cfg.n, cfg.engine, None, "central", backend,
                        dump_ledger=ledger_dump)
            payload = {
                "experiment": "value", "bof": res.bof, "bel": res.bel,
                "bof_se": _json_float(res.bof_se), "bel_se": _json_float(res.bel_se),
                "n_paths": res.n_paths, "bailout_paths": res.bailout_paths,
                "failed_paths": res.failed_paths,
            }
            if res.n_paths < 2 or not math.isfinite(res.bof_se):
                payload["ci_flag"] = "confidence interval undefined for n_paths < 2"
            _write_json(os.path.join(out_dir, "value.json"), payload, mhash)
            files.append("value.json")
            results = {"central": res}
            if ledger_dump:
                _dump_ledger(os.path.join(out_dir, "ledger.csv"), res, mhash)
                files.append("ledger.csv")
        else:
            report, results = scr(scn, market, equity, liab, cfg.w_s, cfg.n,
                                  cfg.engine, cfg.s_eq, backend)
            _write_json(os.path.join(out_dir, "scr.json"),
                        {"experiment": "scr", **report.as_dict()}, mhash)
            files.append("scr.json")
        _write_csv(
            os.path.join(out_dir, "valuation.csv"),
            ["scenario", "t", "mean_r_ph", "mean_p_e", "mean_avg_coupon",
             "freq_case_a", "freq_case_b", "freq_case_c", "freq_case_d"],
            _diag_rows(results), mhash,
        )
        files.append("valuation.csv")

    elif exp in ("sweep_ws", "sweep_n", "sweep_gamma"):
        axis, grid = {
            "sweep_ws": ("w_s", WS_GRID),
            "sweep_n": ("n", N_GRID),
            "sweep_gamma": ("gamma", GAMMA_GRID),
        }[exp]
        rows = sweep(axis, grid, market_args, equity, liab, cfg.w_s, cfg.n,
                     cfg.horizon, cfg.n_paths, cfg.seed, cfg.engine, cfg.s_eq,
                     backend)
        header = ["axis", "value", "scr_eq", "scr_up", "scr_down", "scr_int",
                  "scr_mkt", "epsilon", "bof_central", "bof_equity", "bof_up",
                  "bof_down", "bel_central"]
        table = [
            [r["axis"], r["value"], r["scr_eq"], r["scr_up"], r["scr_down"],
             r["scr_int"], r["scr_mkt"], r["epsilon"], r["bof"]["central"],
             r["bof"]["equity"], r["bof"]["up"], r["bof"]["down"],
             r["bel_central"]]
            for r in rows
        ]
        _write_csv(os.path.join(out_dir, "sweep.csv"), header, table, mhash)
        files.append("sweep.csv")

    elif exp == "durations":
        rows = durations(market_args, equity, liab, cfg.w_s, N_GRID,
                         cfg.horizon, cfg.n_paths, cfg.seed, backend=backend)
        _write_csv(os.path.join(out_dir, "durations.csv"),
                   ["n", "d_asset", "d_bel"],
                   [[r["n"], r["d_asset"], r["d_bel"]] for r in rows], mhash)
        files.append("durations.csv")

    digests = {}
    for name in files:
        with open(os.path.join(out_dir, name), "rb") as fh:
            digests[name] = hashlib.sha256(fh.read()).hexdigest()
    return digests


def _json_float(x: float):
    return None if not math.isfinite(x) else x


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="alm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("--config", help="INI config file")
    run_p.add_argument("--preset", help="built-in preset name (paper-2pct, paper-lowyield)")
    run_p.add_argument("--experiment", help="override the experiment")
    run_p.add_argument("--paths", type=int, help="override the path count")
    run_p.add_argument("--seed", type=int, help="override the seed")
    run_p.add_argument("--threads", type=int, help="cap the numba worker count")
    run_p.add_argument("--out", help="output directory (default $ALM_OUT_DIR or ./alm-out)")
    run_p.add_argument("--ledger-dump", action="store_true",
                       help="write the per-(path, year) ledger CSV (value experiment)")
    run_p.add_argument("--backend", choices=("numba", "numpy"),
                       help="kernel backend (default: $ALM_BACKEND or numba)")
    args = parser.parse_args(argv)

    try:
        cfg = preset(args.preset) if args.preset else RunConfig()
        if args.config:
            cfg = load_config(args.config, base=cfg)
        overrides = {}
        if args.experiment:
            overrides["experiment"] = args.experiment
        if args.paths:
            overrides["n_paths"] = args.paths
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            cfg = replace(cfg, **overrides)
    except (ValueError, OSError) as exc:
        print(f"alm: configuration error: {exc}", file=sys.stderr)
        return 2

    out_dir = args.out or os.environ.get("ALM_OUT_DIR", "alm-out")
    set_threads(args.threads)
    started = time.time()
    try:
        digests = run_experiment(cfg, out_dir, ledger_dump=args.ledger_dump,
                                 backend=args.backend)
    except Exception as exc:  # noqa: BLE001 - boundary: report and exit 3
        report = {"error": type(exc).__name__, "message": str(exc)}
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "error.json"), "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
        print(f"alm: runtime error: {exc}", file=sys.stderr)
        return 3

    manifest = {
        "config": asdict(cfg),
        "seed": cfg.seed,
        "generator_id": GENERATOR_ID,
        "code_version": __version__,
        "backend": args.backend or default_backend(),
        "manifest_hash": _manifest_hash(cfg),
        "wall_time_s": round(time.time() - started, 3),
        "outputs": digests,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"alm: wrote {', '.join(sorted(digests))} to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
