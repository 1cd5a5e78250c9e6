"""End-to-end helpers: training rows, model fitting and fixture forecasts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .elo import EloTimeline, NormalSpec, UnknownTeamError, rating_distribution
from .evaluation import OutcomeProbs
from .match_data import Dataset, derive_targets
from .models import ForecasterSet, fit_knn, fit_two_stage
from .simulator import FixtureInput, MarketForecast, aggregate, simulate


@dataclass(frozen=True)
class TrainingRows:
    features: np.ndarray
    targets: np.ndarray


def training_rows(data: Dataset, timeline: EloTimeline, indices: Iterable[int] | None = None) -> dict[str, TrainingRows]:
    """Pre-match ratings and shot targets for the four forecasters.

    ``timeline`` must come from :func:`run_history` over a dataset whose
    first records are ``data`` (so match indices line up). Sides that took
    no shots are left out of the quality rows only.
    """
    if indices is None:
        indices = range(len(data))
    cols: dict[str, tuple[list, list]] = {
        name: ([], []) for name in ("home_quantity", "home_quality", "away_quantity", "away_quality")
    }
    for idx in indices:
        rec = data[idx]
        feat = timeline.match_ratings[idx]
        for side in ("home", "away"):
            t = derive_targets(rec, side)
            cols[f"{side}_quantity"][0].append(feat)
            cols[f"{side}_quantity"][1].append(t.shots)
            if t.usable_for_quality:
                cols[f"{side}_quality"][0].append(feat)
                cols[f"{side}_quality"][1].append(t.quality)
    return {
        name: TrainingRows(np.asarray(X, dtype=float).reshape(-1, 2), np.asarray(y, dtype=float))
        for name, (X, y) in cols.items()
    }


def fit_forecasters(
    rows: dict[str, TrainingRows],
    kind: Literal["ols", "knn"] = "ols",
    k: int = 50,
    mad_rescale: bool = True,
) -> ForecasterSet:
    fitted = {}
    for name, r in rows.items():
        side, target_kind = name.split("_")
        if kind == "ols":
            fitted[name] = fit_two_stage(r.features, r.targets, target_kind=target_kind,
                                         side=side, mad_rescale=mad_rescale)
        elif kind == "knn":
            fitted[name] = fit_knn(r.features, r.targets, min(k, len(r.targets)),
                                   target_kind=target_kind, side=side)
        else:
            raise ValueError(f"unknown model kind {kind!r}")
    return ForecasterSet(**fitted)


def team_form(
    timeline: EloTimeline,
    team: str,
    window: int = 10,
    before: int | None = None,
    strict: bool = True,
) -> NormalSpec:
    """Rating distribution for ``team``; newcomers get the initial rating when not ``strict``."""
    try:
        return rating_distribution(timeline, team, window, before)
    except UnknownTeamError:
        if strict:
            raise
        return NormalSpec(timeline.params.initial_rating, 0.0)


def fixture_seed(seed: int, fixture: int) -> int:
    """Independent 64-bit seed for one fixture of a run."""
    state = np.random.SeedSequence([seed, fixture]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def forecast_fixture(
    home: NormalSpec,
    away: NormalSpec,
    forecasters: ForecasterSet,
    *,
    n_simulations: int = 10_000,
    max_shots: int = 50,
    seed: int = 0,
    resample_ratings: str = "per_sim",
    block_size: int = 1024,
    workers: int | None = None,
) -> MarketForecast:
    fx = FixtureInput(home, away, forecasters, n_simulations, max_shots, seed,
                      resample_ratings, block_size)
    return aggregate(simulate(fx, workers=workers))


def forecast_holdout(
    data: Dataset,
    indices: Iterable[int],
    timeline: EloTimeline,
    forecasters: ForecasterSet,
    *,
    window: int = 10,
    seed: int = 0,
    **sim_kwargs,
) -> list[MarketForecast]:
    """Forecast each listed match using only ratings from earlier matches."""
    out = []
    for idx in indices:
        rec = data[idx]
        home = team_form(timeline, rec.home_team, window, before=idx, strict=False)
        away = team_form(timeline, rec.away_team, window, before=idx, strict=False)
        out.append(forecast_fixture(home, away, forecasters, seed=fixture_seed(seed, idx), **sim_kwargs))
    return out


def to_probs(mf: MarketForecast) -> OutcomeProbs:
    return OutcomeProbs(mf.p_home, mf.p_draw, mf.p_away)
