"""
Command-line front end.

    rsqtsm price    --config FILE [--k K] [--maturity T] [--s0 S] [--regime I] [--mode exact|mc]
    rsqtsm curve    --config FILE [--maturity T ...]
    rsqtsm simulate --config FILE [--horizon T] [--seed N]
    rsqtsm validate --config FILE
    rsqtsm config   --config FILE          # echo the normalized configuration

Exit codes: 0 success, 1 a validation report failed, 2 bad input,
3 divergent expectation, 4 path budget exceeded.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Sequence, TextIO

from . import __version__
from .chain import ChainPath, make_path, simulate_chain
from .config import ModelConfig, load_config
from .dynamics import simulate_asset_path
from .errors import DivergentExpectation, ParseError, PathBudgetExceeded, RSQTSMError, TimeOutOfRange, ValidationError
from .oracle import gaussian_moment_report, mc_conditional_price, mc_unconditional_price, quadrature_conditional_price
from .pricing import PriceResult, bond_price, bond_price_chain_mc, yield_curve
from .random import make_stream

EXIT_OK = 0
EXIT_REPORT_FAILED = 1
EXIT_INVALID = 2
EXIT_DIVERGENT = 3
EXIT_BUDGET = 4

PRICE_COLUMNS = ("k", "T", "price", "yield")
SIMULATE_COLUMNS = ("k", "regime", "S", "r")

# (f, g) spot checks of the Gaussian moment run by `validate`.
_MOMENT_CHECKS = ((0.0, 0.0), (1.0, 0.0), (0.0, 0.25), (0.7, 0.3), (-1.5, -0.8))


def fmt(x) -> str:
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def emit(rows: list[tuple], columns: Sequence[str], output: str, out: TextIO) -> None:
    cells = [[fmt(v) for v in row] for row in rows]
    if output == "csv":
        out.write(",".join(columns) + "\n")
        for row in cells:
            out.write(",".join(row) + "\n")
    elif output == "json":
        records = [{c: json.loads(v) if v not in ("nan", "inf", "-inf") else None for c, v in zip(columns, row)} for row in cells]
        out.write(json.dumps(records, indent=2) + "\n")
    else:
        widths = [max(len(c), *(len(r[i]) for r in cells)) if cells else len(c) for i, c in enumerate(columns)]
        out.write("  ".join(c.rjust(w) for c, w in zip(columns, widths)) + "\n")
        for row in cells:
            out.write("  ".join(v.rjust(w) for v, w in zip(row, widths)) + "\n")


def _regime(args, cfg: ModelConfig) -> int:
    if args.regime is None:
        return cfg.i0
    if not 1 <= args.regime <= cfg.num_regimes:
        raise ValidationError(f"--regime {args.regime} outside 1..{cfg.num_regimes}")
    return args.regime - 1


def _state(args, cfg: ModelConfig) -> tuple[int, float, int]:
    k = cfg.k0 if args.k is None else args.k
    s = cfg.s0 if args.s0 is None else args.s0
    return k, s, _regime(args, cfg)


def _price(cfg: ModelConfig, args, k: int, T: int, s: float, i: int) -> PriceResult:
    max_paths = args.max_paths or cfg.engine.max_paths
    seed = cfg.engine.seed if args.seed is None else args.seed
    if args.mode == "mc":
        return bond_price_chain_mc(cfg.schedule, cfg.params, k, T, s, i, cfg.engine.mc_sims, seed)
    return bond_price(cfg.schedule, cfg.params, k, T, s, i, max_paths, threads=args.threads)


def cmd_price(cfg: ModelConfig, args, out: TextIO) -> int:
    k, s, i = _state(args, cfg)
    mats = args.maturity or [cfg.horizon]
    if len(mats) != 1:
        raise ValidationError("price takes a single --maturity; use `curve` for several")
    T = mats[0]
    res = _price(cfg, args, k, T, s, i)
    emit([(k, T, res.price, res.yield_)], PRICE_COLUMNS, args.output, out)
    if args.output == "table":
        out.write(f"mode={res.mode} paths={res.num_paths_used} se={fmt(res.standard_error)}\n")
    return EXIT_OK


def cmd_curve(cfg: ModelConfig, args, out: TextIO) -> int:
    k, s, i = _state(args, cfg)
    mats = args.maturity or list(range(k + 1, cfg.horizon + 1))
    seed = cfg.engine.seed if args.seed is None else args.seed
    curve = yield_curve(
        cfg.schedule,
        cfg.params,
        k,
        s,
        i,
        mats,
        args.max_paths or cfg.engine.max_paths,
        mode=args.mode,
        num_paths=cfg.engine.mc_sims,
        rng_seed=seed,
        threads=args.threads,
    )
    emit([(k, T, p, y) for T, p, y in curve.points], PRICE_COLUMNS, args.output, out)
    return EXIT_OK


def cmd_simulate(cfg: ModelConfig, args, out: TextIO) -> int:
    k, s, i = _state(args, cfg)
    horizon = args.horizon or cfg.horizon
    gen = make_stream(cfg.engine.seed if args.seed is None else args.seed)
    path = simulate_chain(cfg.schedule, k, i, horizon, gen)
    rows = [(t, path.states[t - k] + 1, S, r) for t, S, r in simulate_asset_path(cfg.params, path, s, gen)]
    emit(rows, SIMULATE_COLUMNS, args.output, out)
    return EXIT_OK


def validation_suite(cfg: ModelConfig, seed: int | None = None):
    """Oracle reports for a configuration, in a fixed order."""
    seed = cfg.engine.seed if seed is None else seed
    k, s, i = cfg.k0, cfg.s0, cfg.i0
    n = cfg.num_regimes
    span = cfg.horizon - k
    reports = [gaussian_moment_report(f, g) for f, g in _MOMENT_CHECKS]
    if span < 1:
        return reports
    quad_len = min(3, span)
    quad_paths = [(i,) * quad_len]
    if n > 1:
        quad_paths.append(tuple((i + j) % n for j in range(quad_len)))
    for states in quad_paths:
        path = make_path(cfg.schedule, k, states)
        rep = quadrature_conditional_price(cfg.params, path, s, cfg.engine.quad_nodes, rel_tol=cfg.engine.quadrature_tol)
        reports.append(dataclasses.replace(rep, label=f"quadrature regimes={_one_based(states)}"))
    mc_states = (i,) * min(5, span)
    rep = mc_conditional_price(cfg.params, make_path(cfg.schedule, k, mc_states), s, max(cfg.engine.mc_sims, 1000), seed)
    reports.append(dataclasses.replace(rep, label=f"monte carlo regimes={_one_based(mc_states)}"))
    T = min(cfg.horizon, k + 4)
    rep = mc_unconditional_price(
        cfg.params, cfg.schedule, k, T, s, i, max(cfg.engine.mc_sims, 1000), seed + 1, max_paths=cfg.engine.max_paths
    )
    reports.append(dataclasses.replace(rep, label=f"monte carlo k={k} T={T} regime={i + 1}"))
    return reports


def _one_based(states) -> str:
    return "-".join(str(x + 1) for x in states)


def cmd_validate(cfg: ModelConfig, args, out: TextIO) -> int:
    reports = validation_suite(cfg, args.seed)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        out.write(
            f"{status}  {r.target:<20} {r.label:<36} closed={fmt(r.closed_form)} oracle={fmt(r.oracle_value)} "
            f"se={fmt(r.standard_error)} tol={fmt(r.tolerance_used)}\n"
        )
    failed = sum(not r.passed for r in reports)
    out.write(f"{len(reports) - failed}/{len(reports)} reports passed\n")
    return EXIT_REPORT_FAILED if failed else EXIT_OK


def cmd_config(cfg: ModelConfig, args, out: TextIO) -> int:
    out.write(cfg.to_toml())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsqtsm", description="Regime-switching quadratic term structure pricer")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="TOML model configuration")
    common.add_argument("--k", type=int, help="valuation time (default: initial.k)")
    common.add_argument("--s0", type=float, help="asset level at time k (default: initial.s)")
    common.add_argument("--regime", type=int, help="1-based regime at time k (default: initial.regime)")
    common.add_argument("--seed", type=int, help="random seed (default: engine.seed)")
    common.add_argument("--output", choices=("table", "csv", "json"), default="table")
    common.add_argument("--threads", type=int, default=1, help="worker threads for exact enumeration")
    common.add_argument("--max-paths", type=int, dest="max_paths", help="path budget (default: engine.max_paths)")
    common.add_argument("--mode", choices=("exact", "mc"), default="exact")

    for name, helptext in (
        ("price", "price one zero-coupon bond"),
        ("curve", "prices and yields for several maturities"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--maturity", type=int, action="append", help="maturity T (repeatable)")
    p = sub.add_parser("simulate", parents=[common], help="simulate regime, asset and short rate")
    p.add_argument("--horizon", type=int, help="last simulated time + 1 (default: horizon)")
    sub.add_parser("validate", parents=[common], help="run the oracle checks")
    sub.add_parser("config", parents=[common], help="print the normalized configuration")
    return parser


_COMMANDS = {
    "price": cmd_price,
    "curve": cmd_curve,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "config": cmd_config,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args, out)
    except (ParseError, ValidationError, TimeOutOfRange) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    except DivergentExpectation as exc:
        where = ""
        if exc.time is not None and exc.path is not None:
            where = f" (backward step at time {exc.time}, regimes {_one_based(exc.path)} from that time on)"
        elif exc.time is not None:
            where = f" (backward step at time {exc.time})"
        err.write(f"error: divergent expectation{where}: {exc}\n")
        return EXIT_DIVERGENT
    except PathBudgetExceeded as exc:
        err.write(f"error: {exc} (try --mode mc)\n")
        return EXIT_BUDGET
    except RSQTSMError as exc:  # pragma: no cover
        err.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
