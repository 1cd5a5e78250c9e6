"""Synthetic league generator for tests and demonstrations.

Teams carry slowly drifting latent strengths. In each match a side's shot
count is Poisson and every shot converts independently, so goals are
Poisson with rate ``shots_rate * conversion``. Bookmaker prices are the
exact outcome probabilities of that model, shaded by a fixed overround.
"""

from __future__ import annotations

import io
from datetime import date, timedelta

import numpy as np
from scipy.stats import poisson

from .match_data import Dataset, MatchRecord, write_csv


def _outcome_probs(lam_home: float, lam_away: float, max_goals: int = 15) -> tuple[float, float, float]:
    g = np.arange(max_goals + 1)
    joint = np.outer(poisson.pmf(g, lam_home), poisson.pmf(g, lam_away))
    joint /= joint.sum()
    return float(np.tril(joint, -1).sum()), float(np.trace(joint)), float(np.triu(joint, 1).sum())


def generate_league(
    n_teams: int = 20,
    n_seasons: int = 3,
    seed: int = 0,
    *,
    base_shots: float = 12.0,
    base_conversion: float = 0.09,
    home_edge: float = 0.12,
    strength_spread: float = 0.2,
    drift: float = 0.02,
    overround: float = 0.06,
    start: date = date(2018, 8, 11),
    with_odds: bool = True,
) -> Dataset:
    """Double round-robin seasons between ``n_teams`` teams.

    Returns a :class:`Dataset` with shots, goals and (optionally) 1X2 odds.
    """
    rng = np.random.default_rng(seed)
    teams = [f"Team {i:02d}" for i in range(n_teams)]
    attack = rng.normal(0.0, strength_spread, n_teams)
    defence = rng.normal(0.0, strength_spread, n_teams)
    fixtures = [(h, a) for h in range(n_teams) for a in range(n_teams) if h != a]

    records = []
    day = start
    for _ in range(n_seasons):
        order = rng.permutation(len(fixtures))
        per_round = n_teams // 2
        for r0 in range(0, len(order), per_round):
            for j in order[r0 : r0 + per_round]:
                h, a = fixtures[j]
                diff_h = attack[h] - defence[a] + home_edge
                diff_a = attack[a] - defence[h]
                shots_h = base_shots * np.exp(0.6 * diff_h)
                shots_a = base_shots * np.exp(0.6 * diff_a)
                conv_h = base_conversion * np.exp(0.4 * diff_h)
                conv_a = base_conversion * np.exp(0.4 * diff_a)
                hs = int(rng.poisson(shots_h))
                as_ = int(rng.poisson(shots_a))
                hg = int(rng.binomial(hs, min(conv_h, 1.0)))
                ag = int(rng.binomial(as_, min(conv_a, 1.0)))
                odds = (None, None, None)
                if with_odds:
                    probs = _outcome_probs(shots_h * conv_h, shots_a * conv_a)
                    odds = tuple(round(1.0 / (p * (1 + overround)), 2) for p in probs)
                    odds = tuple(max(o, 1.01) for o in odds)
                records.append(MatchRecord(day, teams[h], teams[a], hg, ag, hs, as_, *odds))
            day += timedelta(days=7)
            attack += rng.normal(0.0, drift, n_teams)
            defence += rng.normal(0.0, drift, n_teams)
        day += timedelta(days=70)
    return Dataset(tuple(records))


def league_csv(**kwargs) -> str:
    """CSV text of :func:`generate_league`, in football-data column layout."""
    buf = io.StringIO()
    write_csv(generate_league(**kwargs), buf)
    return buf.getvalue()
