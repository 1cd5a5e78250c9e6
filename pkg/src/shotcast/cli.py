"""Command line entry point.

Exit codes: 0 success, 2 input or configuration error, 3 unknown team,
4 internal invariant violation.

Concurrent runs writing to the same output directory are not supported;
the last writer wins.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .elo import EloParams, EloTimeline, UnknownTeamError, run_history
from .evaluation import (
    OutcomeProbs,
    backtest,
    bias_scan,
    bookmaker_margin,
    evaluate_forecasts,
    outcome_of,
    rps,
)
from .match_data import DataError, Dataset, chronological_split, parse_csv
from .models import ForecasterSet
from .pipeline import (
    fit_forecasters,
    forecast_fixture,
    forecast_holdout,
    team_form,
    to_probs,
    training_rows,
)

logger = logging.getLogger("shotcast")

EXIT_INPUT = 2
EXIT_DOMAIN = 3
EXIT_INTERNAL = 4


class InvariantViolation(RuntimeError):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise InvariantViolation(msg)


def _load_data(cfg: RunConfig) -> tuple[Dataset, str]:
    if not os.path.isfile(cfg.data):
        raise DataError(f"data file not found: {cfg.data}")
    with open(cfg.data, "rb") as fh:
        raw = fh.read()
    return parse_csv(raw, cfg.odds_columns), hashlib.sha256(raw).hexdigest()


def _elo_params(cfg: RunConfig) -> EloParams:
    return EloParams(cfg.k_factor, cfg.scale_a, cfg.initial_rating)


def _sim_kwargs(cfg: RunConfig) -> dict:
    return dict(
        n_simulations=cfg.n_simulations,
        max_shots=cfg.max_shots,
        resample_ratings=cfg.resample_ratings,
        block_size=cfg.block_size,
        workers=cfg.workers,
    )


def _model_dir(cfg: RunConfig) -> str:
    return os.path.join(cfg.out, "models")


def _timeline_path(cfg: RunConfig) -> str:
    return os.path.join(cfg.out, "timeline.csv")


def _load_trained(cfg: RunConfig) -> tuple[ForecasterSet, EloTimeline]:
    try:
        forecasters = ForecasterSet.load(_model_dir(cfg))
        with open(_timeline_path(cfg), newline="") as fh:
            timeline = EloTimeline.read_csv(fh, _elo_params(cfg))
    except FileNotFoundError as exc:
        raise DataError(f"trained artifacts missing ({exc.filename}); run `train` first") from None
    return forecasters, timeline


def cmd_train(cfg: RunConfig) -> int:
    data, fingerprint = _load_data(cfg)
    train, _ = chronological_split(data, cfg.tail_n)
    timeline = run_history(data, _elo_params(cfg))
    rows = training_rows(data, timeline, range(len(train)))
    forecasters = fit_forecasters(rows, cfg.model, cfg.knn_k, cfg.mad_rescale)

    os.makedirs(cfg.out, exist_ok=True)
    files = forecasters.save(_model_dir(cfg))
    with open(_timeline_path(cfg), "w", newline="") as fh:
        timeline.write_csv(fh)
    files.append(_timeline_path(cfg))
    manifest = {
        "config_hash": cfg.digest(),
        "data_sha256": fingerprint,
        "n_records": len(data),
        "n_train": len(train),
        "skipped_rows": data.skipped,
        "files": [os.path.relpath(f, cfg.out) for f in files],
        "config": cfg.to_text(),
    }
    with open(os.path.join(cfg.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
    print(f"trained on {len(train)} matches; artifacts in {cfg.out}")
    return 0


def cmd_forecast(cfg: RunConfig, home: str, away: str) -> int:
    forecasters, timeline = _load_trained(cfg)
    home_form = team_form(timeline, home, cfg.window)
    away_form = team_form(timeline, away, cfg.window)
    mf = forecast_fixture(home_form, away_form, forecasters, seed=cfg.seed, **_sim_kwargs(cfg))
    _check(sum(mf.counts) == mf.n_simulations, "outcome counts do not cover all simulations")
    sys.stdout.write(mf.to_json(sort_keys=True) + "\n")
    return 0


def _holdout_forecasts(cfg: RunConfig, seed: int):
    data, _ = _load_data(cfg)
    train, holdout = chronological_split(data, cfg.tail_n)
    forecasters, timeline = _load_trained(cfg)
    indices = range(len(train), len(data))
    forecasts = forecast_holdout(data, indices, timeline, forecasters, window=cfg.window,
                                 seed=seed, **_sim_kwargs(cfg))
    return holdout, forecasts


def _run_report(cfg: RunConfig, holdout: Dataset, forecasts, run: int, seed: int) -> tuple[dict, dict]:
    actuals = [(r.home_goals, r.away_goals) for r in holdout]
    probs = [to_probs(mf) for mf in forecasts]
    report = evaluate_forecasts(
        [(p, {k: v for k, v in mf.point_scores.items()}) for p, mf in zip(probs, forecasts)],
        actuals,
    )
    results = [outcome_of(*a) for a in actuals]
    odds = [r.odds for r in holdout]
    ledgers = {}
    for strategy in (1, 2):
        ledger = backtest(probs, odds, strategy, results, bet_scope=cfg.bet_scope,
                          p_min=cfg.p_min, fixture_ids=range(len(holdout)))
        ledgers[strategy] = ledger
        report[f"strategy{strategy}_rentability"] = ledger.rentability
        report[f"strategy{strategy}_bets"] = len(ledger.bets)
    report["run"] = run
    report["seed"] = seed
    return report, ledgers


def _bookmaker_section(cfg: RunConfig, holdout: Dataset) -> dict:
    priced = [r for r in holdout if r.odds is not None]
    if not priced:
        return {"status": "no odds", "n": 0}
    margins = [bookmaker_margin(r.odds, cfg.margin_def) for r in priced]
    scores = [rps(OutcomeProbs.from_odds(r.odds), r.result) for r in priced]
    return {
        "n": len(priced),
        "margin": math.fsum(margins) / len(margins),
        "mean_rps": math.fsum(scores) / len(scores),
    }


def _average(reports: list[dict]) -> dict:
    keys = [k for k, v in reports[0].items() if isinstance(v, (int, float)) and k not in ("run", "seed", "n")]
    out = {"n": reports[0]["n"]}
    for k in keys:
        vals = [r[k] for r in reports if r.get(k) is not None]
        out[k] = math.fsum(vals) / len(vals) if vals else None
    for s in (1, 2):
        vals = [r[f"strategy{s}_rentability"] for r in reports if r[f"strategy{s}_rentability"] is not None]
        out[f"strategy{s}_rentability"] = math.fsum(vals) / len(vals) if vals else None
    return out


def cmd_evaluate(cfg: RunConfig, strategy: int | None, runs: int) -> int:
    if runs < 1:
        raise ConfigError("--runs must be >= 1")
    strategy = strategy or cfg.strategy
    per_run = []
    holdout = None
    for i in range(runs):
        seed = (cfg.seed + i) % 2**64
        holdout, forecasts = _holdout_forecasts(cfg, seed)
        report, ledgers = _run_report(cfg, holdout, forecasts, i, seed)
        per_run.append(report)
        name = "ledger.csv" if i == 0 else f"ledger_run{i:03d}.csv"
        with open(os.path.join(cfg.out, name), "w", newline="") as fh:
            ledgers[strategy].write_csv(fh)

    mean = _average(per_run)
    book = _bookmaker_section(cfg, holdout)
    betting = {}
    for s in (1, 2):
        rent = mean[f"strategy{s}_rentability"]
        if rent is None:
            betting[f"strategy{s}"] = "no bets"
        else:
            over = rent - book["margin"] if "margin" in book else None
            betting[f"strategy{s}"] = {"rentability": rent, "over_baseline": over}
    full = {
        "n_holdout": len(holdout),
        "runs": runs,
        "strategy": strategy,
        "metrics": {k: v for k, v in mean.items() if not k.startswith("strategy")},
        "betting": betting,
        "bookmaker": book,
        "per_run": per_run,
    }
    with open(os.path.join(cfg.out, "report.json"), "w") as fh:
        json.dump(full, fh, indent=2, sort_keys=True)
    sys.stdout.write(json.dumps(full, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_bias_scan(cfg: RunConfig) -> int:
    holdout, forecasts = _holdout_forecasts(cfg, cfg.seed)
    result = bias_scan([to_probs(mf) for mf in forecasts], [r.result for r in holdout], cfg.bias_grid)
    _check(any(m == result.best for m, _ in result.grid), "best multiplier not on grid")
    with open(os.path.join(cfg.out, "bias_scan.csv"), "w", newline="") as fh:
        result.write_csv(fh)
    print(f"best draw multiplier: {result.best!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="key=value config file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="unsigned 64-bit seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")

    parser = argparse.ArgumentParser(prog="shotcast", parents=[common],
                                     description="Shot-distribution soccer forecasts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("train", parents=[common], help="fit ratings and forecasters")
    fc = sub.add_parser("forecast", parents=[common], help="forecast one fixture")
    fc.add_argument("--home", required=True)
    fc.add_argument("--away", required=True)
    fc.add_argument("--sims", type=int, default=None)
    ev = sub.add_parser("evaluate", parents=[common], help="score the holdout set")
    ev.add_argument("--strategy", type=int, choices=(1, 2), default=None)
    ev.add_argument("--runs", type=int, default=1)
    sub.add_parser("bias-scan", parents=[common], help="draw multiplier scan on the holdout set")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(getattr(args, "config", None))
        cfg = cfg.replace(seed=getattr(args, "seed", None), out=getattr(args, "out", None))
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "forecast":
            if args.sims is not None:
                cfg = cfg.replace(n_simulations=args.sims)
            return cmd_forecast(cfg, args.home, args.away)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.strategy, args.runs)
        if args.command == "bias-scan":
            return cmd_bias_scan(cfg)
    except UnknownTeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ConfigError, DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    parser.error(f"unknown command {args.command}")
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
