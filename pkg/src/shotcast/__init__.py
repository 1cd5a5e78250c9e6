"""Soccer match forecasts from simulated shot quantity and quality."""

__version__ = "0.1.0"

from .elo import EloParams, EloTimeline, NormalSpec, expected_score, rating_distribution, run_history, update
from .evaluation import (
    BetLedger,
    BiasScanResult,
    OutcomeProbs,
    adjust_draw,
    backtest,
    bias_scan,
    bookmaker_margin,
    evaluate_forecasts,
    fair_odds,
    rps,
    score_errors,
)
from .match_data import Dataset, MatchRecord, ShotTargets, chronological_split, derive_targets, parse_csv, write_csv
from .models import (
    DistributionForecaster,
    FeatureRow,
    ForecasterSet,
    LinearModel,
    NeighborModel,
    fit_knn,
    fit_ols,
    fit_two_stage,
    forecast,
)
from .simulator import (
    FixtureInput,
    MarketForecast,
    SimulationResult,
    aggregate,
    sample_shot_vector,
    simulate,
    win_probability_two_normals,
)
