"""Monte Carlo match simulation from shot quantity and quality distributions.

Each simulated match proceeds as follows, independently for both sides:

1. draw a home and an away rating from the teams' recent-form distributions;
2. forecast shot quantity and quality distributions from those ratings;
3. fill a ``max_shots``-wide row with per-shot conversion probabilities;
4. draw the number of shots and blank the columns beyond it;
5. score a goal wherever a U(0, 1) draw falls below the shot's probability.

Random streams
--------------
Simulations are cut into consecutive blocks of ``block_size``. Block ``b``
draws from ``PCG64(SeedSequence(seed, spawn_key=(b,)))``, which is the same
stream as ``SeedSequence(seed).spawn(b + 1)[b]``. With ``block_size=1`` every
simulation index owns its stream. Because blocks never share state, running
them on a thread pool gives the same result as running them in order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .elo import NormalSpec
from .models import ForecasterSet

# spawn key of the stream used when ratings are drawn once per fixture
ONCE_STREAM_KEY = 2**32

DEFAULT_GOAL_LINES = (0.5, 1.5, 2.5, 3.5, 4.5, 5.5)


def round_half_away(x):
    """Round to the nearest integer, halves away from zero."""
    x = np.asarray(x, dtype=float)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass(frozen=True, eq=False)
class FixtureInput:
    home_rating_dist: NormalSpec
    away_rating_dist: NormalSpec
    forecasters: ForecasterSet
    n_simulations: int = 10_000
    max_shots: int = 50
    seed: int = 0
    resample_ratings: Literal["per_sim", "once"] = "per_sim"
    block_size: int = 1024

    def __post_init__(self):
        if self.n_simulations < 1:
            raise ValueError("n_simulations must be >= 1")
        if self.max_shots < 1:
            raise ValueError("max_shots must be >= 1")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.resample_ratings not in ("per_sim", "once"):
            raise ValueError(f"resample_ratings must be 'per_sim' or 'once', got {self.resample_ratings!r}")


@dataclass(frozen=True, eq=False)
class SimulationResult:
    home_goals: np.ndarray
    away_goals: np.ndarray
    max_shots: int = 50
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.home_goals)


def sample_shot_vector(
    quality: NormalSpec,
    quantity: NormalSpec,
    max_shots: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Per-shot conversion probabilities for one side in one match."""
    n = int(round_half_away(rng.normal(quantity.mean, quantity.std)))
    n = min(max(n, 0), max_shots)
    return np.clip(rng.normal(quality.mean, quality.std, size=n), 0.0, 1.0)


def _side_goals(rng, qual_mean, qual_std, quant_mean, quant_std, max_shots):
    size = len(qual_mean)
    quality = rng.normal(qual_mean[:, None], qual_std[:, None], size=(size, max_shots))
    np.clip(quality, 0.0, 1.0, out=quality)
    shots = round_half_away(rng.normal(quant_mean, quant_std, size=size))
    shots = np.clip(shots, 0, max_shots).astype(np.int64)
    active = np.arange(max_shots)[None, :] < shots[:, None]
    scored = rng.random((size, max_shots)) < quality
    return (scored & active).sum(axis=1)


def _forecast_all(fc: ForecasterSet, elo_home, elo_away):
    out = []
    for model in (fc.home_quality, fc.home_quantity, fc.away_quality, fc.away_quantity):
        out.append(model.predict(elo_home, elo_away))
    return out


def _simulate_block(fx: FixtureInput, block: int, size: int, fixed):
    rng = block_rng(fx.seed, block)
    if fixed is None:
        h = fx.home_rating_dist
        a = fx.away_rating_dist
        elo_home = rng.normal(h.mean, h.std, size=size)
        elo_away = rng.normal(a.mean, a.std, size=size)
        (hq_m, hq_s), (hn_m, hn_s), (aq_m, aq_s), (an_m, an_s) = _forecast_all(
            fx.forecasters, elo_home, elo_away
        )
    else:
        (hq_m, hq_s), (hn_m, hn_s), (aq_m, aq_s), (an_m, an_s) = (
            (np.full(size, m[0]), np.full(size, s[0])) for m, s in fixed
        )
    home = _side_goals(rng, hq_m, hq_s, hn_m, hn_s, fx.max_shots)
    away = _side_goals(rng, aq_m, aq_s, an_m, an_s, fx.max_shots)
    return home, away


def simulate(fx: FixtureInput, workers: int | None = None) -> SimulationResult:
    """Run ``fx.n_simulations`` matches; bit-identical for a given input.

    Parameters
    ----------
    fx : FixtureInput
    workers : int, optional
        Thread count for running blocks concurrently. The result does not
        depend on this value.
    """
    fixed = None
    if fx.resample_ratings == "once":
        rng = block_rng(fx.seed, ONCE_STREAM_KEY)
        h = fx.home_rating_dist
        a = fx.away_rating_dist
        fixed = _forecast_all(fx.forecasters, rng.normal(h.mean, h.std, 1), rng.normal(a.mean, a.std, 1))

    starts = range(0, fx.n_simulations, fx.block_size)
    jobs = [(b, min(fx.block_size, fx.n_simulations - s)) for b, s in enumerate(starts)]
    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _simulate_block(fx, j[0], j[1], fixed), jobs))
    else:
        parts = [_simulate_block(fx, b, size, fixed) for b, size in jobs]
    home = np.concatenate([p[0] for p in parts])
    away = np.concatenate([p[1] for p in parts])
    return SimulationResult(home, away, fx.max_shots, fx.seed)


@dataclass(frozen=True)
class MarketForecast:
    p_home: float
    p_draw: float
    p_away: float
    score_distribution: dict[tuple[int, int], float]
    totals: dict[float, float]
    margins: dict[int, float]
    point_scores: dict[str, tuple[int, int]]
    n_simulations: int
    seed: int | None = None
    counts: tuple[int, int, int] = field(default=(0, 0, 0), compare=False)

    def to_dict(self) -> dict:
        return {
            "p": {"home": self.p_home, "draw": self.p_draw, "away": self.p_away},
            "scores": [[h, a, p] for (h, a), p in sorted(self.score_distribution.items())],
            "point": {k: list(v) for k, v in self.point_scores.items()},
            "totals": {f"over_{line}": p for line, p in sorted(self.totals.items())},
            "margins": {str(m): p for m, p in sorted(self.margins.items())},
            "n_simulations": self.n_simulations,
            "seed": self.seed,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _mode_score(home: np.ndarray, away: np.ndarray) -> tuple[int, int]:
    pairs, counts = np.unique(np.column_stack([home, away]), axis=0, return_counts=True)
    best = counts.max()
    tied = [tuple(int(v) for v in p) for p, c in zip(pairs, counts) if c == best]
    # more total goals first, then the lexicographically larger score
    return max(tied, key=lambda s: (s[0] + s[1], s[0], s[1]))


def aggregate(
    res: SimulationResult,
    goal_lines=DEFAULT_GOAL_LINES,
) -> MarketForecast:
    """Turn simulated scorelines into outcome, score and total-goal probabilities."""
    n = len(res.home_goals)
    if n == 0:
        raise ValueError("cannot aggregate an empty simulation result")
    home = np.asarray(res.home_goals)
    away = np.asarray(res.away_goals)
    n_home = int((home > away).sum())
    n_draw = int((home == away).sum())
    n_away = n - n_home - n_draw

    pairs, counts = np.unique(np.column_stack([home, away]), axis=0, return_counts=True)
    scores = {(int(h), int(a)): int(c) / n for (h, a), c in zip(pairs, counts)}

    total = home + away
    totals = {float(line): int((total > line).sum()) / n for line in goal_lines}
    margin_vals, margin_counts = np.unique(home - away, return_counts=True)
    margins = {int(m): int(c) / n for m, c in zip(margin_vals, margin_counts)}

    point = {
        "mean": (int(round_half_away(home.mean())), int(round_half_away(away.mean()))),
        "median": (int(round_half_away(np.median(home))), int(round_half_away(np.median(away)))),
        "mode": _mode_score(home, away),
    }
    return MarketForecast(
        p_home=n_home / n,
        p_draw=n_draw / n,
        p_away=n_away / n,
        score_distribution=scores,
        totals=totals,
        margins=margins,
        point_scores=point,
        n_simulations=n,
        seed=res.seed,
        counts=(n_home, n_draw, n_away),
    )


def win_probability_two_normals(
    dist_a: NormalSpec,
    dist_b: NormalSpec,
    n_sims: int = 1_000_000,
    seed: int = 0,
) -> float:
    """Chance that side A outscores side B when goals are normal draws.

    Goal samples are clamped at zero and rounded to whole goals before the
    comparison, so two sides with fixed means 1 and 2 never swap order.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    a = round_half_away(np.maximum(rng.normal(dist_a.mean, dist_a.std, n_sims), 0.0))
    b = round_half_away(np.maximum(rng.normal(dist_b.mean, dist_b.std, n_sims), 0.0))
    return float((a > b).mean())
