"""ELO ratings over a match history.

Ratings move by ``K * (outcome - expected)`` after every match, with the
expected score given by the logistic curve ``1 / (1 + 10 ** (-diff / a))``.
No home advantage and no margin-of-victory weighting are applied.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from types import MappingProxyType
from typing import Mapping, TextIO

from .match_data import Dataset


class UnknownTeamError(KeyError):
    """Raised when a team has no recorded rating history."""

    def __str__(self):
        return f"unknown team: {self.args[0]}"


@dataclass(frozen=True)
class NormalSpec:
    """Mean and standard deviation of a normal distribution."""

    mean: float
    std: float

    def __post_init__(self):
        if not self.std >= 0:
            raise ValueError(f"std must be non-negative, got {self.std}")


@dataclass(frozen=True)
class EloParams:
    k_factor: float = 32.0
    scale_a: float = 400.0
    initial_rating: float = 500.0

    def __post_init__(self):
        if not self.k_factor > 0:
            raise ValueError("k_factor must be positive")
        if not self.scale_a > 0:
            raise ValueError("scale_a must be positive")


DEFAULT_PARAMS = EloParams()


def expected_score(rating_i: float, rating_j: float, params: EloParams = DEFAULT_PARAMS) -> float:
    """Probability that team ``i`` beats team ``j``."""
    return 1.0 / (1.0 + 10.0 ** (-(rating_i - rating_j) / params.scale_a))


def update(
    rating_i: float,
    rating_j: float,
    outcome_i: float,
    params: EloParams = DEFAULT_PARAMS,
) -> tuple[float, float]:
    """Post-match ratings for both teams.

    ``outcome_i`` is 1 for a win by ``i``, 0.5 for a draw and 0 for a loss.
    The two rating changes cancel exactly in real arithmetic.
    """
    if outcome_i not in (0, 0.5, 1):
        raise ValueError(f"outcome must be one of 0, 0.5, 1; got {outcome_i!r}")
    delta = params.k_factor * (outcome_i - expected_score(rating_i, rating_j, params))
    return rating_i + delta, rating_j - delta


@dataclass(frozen=True)
class TimelineEntry:
    match_index: int
    date: date
    pre_rating: float
    post_rating: float


@dataclass(frozen=True)
class EloTimeline:
    """Per-team rating history produced by :func:`run_history`."""

    history: Mapping[str, tuple[TimelineEntry, ...]]
    current: Mapping[str, float]
    params: EloParams = field(default=DEFAULT_PARAMS)
    # (home, away) ratings going into each match, indexed like the dataset
    match_ratings: tuple[tuple[float, float], ...] = ()

    def __contains__(self, team: str) -> bool:
        return team in self.history

    @property
    def teams(self) -> list[str]:
        return list(self.history)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["team", "match_index", "date", "pre_rating", "post_rating"])
        rows = [(e.match_index, team, e) for team, entries in self.history.items() for e in entries]
        rows.sort(key=lambda t: (t[0], t[1]))
        for _, team, e in rows:
            writer.writerow([team, e.match_index, e.date.isoformat(), repr(e.pre_rating), repr(e.post_rating)])

    @classmethod
    def read_csv(cls, stream: TextIO, params: EloParams = DEFAULT_PARAMS) -> "EloTimeline":
        history: dict[str, list[TimelineEntry]] = {}
        for row in csv.DictReader(stream):
            entry = TimelineEntry(
                match_index=int(row["match_index"]),
                date=date.fromisoformat(row["date"]),
                pre_rating=float(row["pre_rating"]),
                post_rating=float(row["post_rating"]),
            )
            history.setdefault(row["team"], []).append(entry)
        frozen = {t: tuple(sorted(es, key=lambda e: e.match_index)) for t, es in history.items()}
        current = {t: es[-1].post_rating for t, es in frozen.items()}
        return cls(MappingProxyType(frozen), MappingProxyType(current), params)


def run_history(data: Dataset, params: EloParams = DEFAULT_PARAMS) -> EloTimeline:
    """Replay every match in order and record ratings before and after each."""
    ratings: dict[str, float] = {}
    history: dict[str, list[TimelineEntry]] = {}
    pre: list[tuple[float, float]] = []
    for idx, rec in enumerate(data):
        home = ratings.get(rec.home_team, params.initial_rating)
        away = ratings.get(rec.away_team, params.initial_rating)
        pre.append((home, away))
        outcome = {"home": 1.0, "draw": 0.5, "away": 0.0}[rec.result]
        new_home, new_away = update(home, away, outcome, params)
        ratings[rec.home_team] = new_home
        ratings[rec.away_team] = new_away
        history.setdefault(rec.home_team, []).append(TimelineEntry(idx, rec.date, home, new_home))
        history.setdefault(rec.away_team, []).append(TimelineEntry(idx, rec.date, away, new_away))
    frozen = {team: tuple(entries) for team, entries in history.items()}
    return EloTimeline(MappingProxyType(frozen), MappingProxyType(dict(ratings)), params, tuple(pre))


def rating_distribution(
    timeline: EloTimeline,
    team: str,
    window: int = 10,
    before: int | None = None,
) -> NormalSpec:
    """Mean and sample std of a team's last ``window`` post-match ratings.

    Parameters
    ----------
    timeline : EloTimeline
    team : str
    window : int
        Number of most recent matches to use.
    before : int, optional
        Only consider matches with index strictly below this value, which
        gives the rating form a team carried into match ``before``.

    Raises
    ------
    UnknownTeamError
        If the team has no qualifying matches.
    """
    if window < 1:
        raise ValueError("window must be positive")
    entries = timeline.history.get(team, ())
    if before is not None:
        entries = [e for e in entries if e.match_index < before]
    if not entries:
        raise UnknownTeamError(team)
    values = [e.post_rating for e in entries[-window:]]
    mean = math.fsum(values) / len(values)
    if len(values) == 1:
        return NormalSpec(mean, 0.0)
    var = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return NormalSpec(mean, math.sqrt(var))
