"""Forecast scoring, betting backtests and draw-bias calibration."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence, TextIO

import numpy as np

Outcome = Literal["home", "draw", "away"]
OUTCOMES: tuple[Outcome, ...] = ("home", "draw", "away")
_INDEX = {o: i for i, o in enumerate(OUTCOMES)}

DEFAULT_P_MIN = 0.001


@dataclass(frozen=True)
class OutcomeProbs:
    p_home: float
    p_draw: float
    p_away: float

    def __post_init__(self):
        for p in (self.p_home, self.p_draw, self.p_away):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probabilities must lie in [0, 1], got {p}")
        if abs(self.p_home + self.p_draw + self.p_away - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_home, self.p_draw, self.p_away)

    def __getitem__(self, outcome: Outcome) -> float:
        return self.as_tuple()[_INDEX[outcome]]

    @classmethod
    def from_odds(cls, odds: Sequence[float]) -> "OutcomeProbs":
        """Implied probabilities with the bookmaker margin removed proportionally."""
        inv = [1.0 / o for o in odds]
        total = math.fsum(inv)
        return cls(inv[0] / total, inv[1] / total, inv[2] / total)


def outcome_of(home_goals: int, away_goals: int) -> Outcome:
    if home_goals > away_goals:
        return "home"
    if home_goals < away_goals:
        return "away"
    return "draw"


def rps(probs: OutcomeProbs, actual: Outcome) -> float:
    """Ranked probability score over the ordered outcomes (home, draw, away).

    >>> rps(OutcomeProbs(1.0, 0.0, 0.0), "draw")
    0.5
    """
    idx = _INDEX[actual]
    c1 = probs.p_home
    c2 = probs.p_home + probs.p_draw
    o1 = 1.0 if idx == 0 else 0.0
    o2 = 1.0 if idx <= 1 else 0.0
    return ((c1 - o1) ** 2 + (c2 - o2) ** 2) / 2


def score_errors(pred: tuple[int, int], actual: tuple[int, int]) -> tuple[float, float]:
    """Squared and absolute error of a predicted scoreline, summed over both sides."""
    dh = pred[0] - actual[0]
    da = pred[1] - actual[1]
    return float(dh * dh + da * da), float(abs(dh) + abs(da))


@dataclass
class Forecast:
    """What the evaluator needs from one fixture's forecast."""

    probs: OutcomeProbs
    point_scores: Mapping[str, tuple[int, int]] = field(default_factory=dict)


def evaluate_forecasts(
    forecasts: Sequence[Forecast | tuple],
    actuals: Sequence[tuple[int, int]],
) -> dict:
    """Mean RPS plus RMSE/MAE for every point-score rule and the 1-1 baseline.

    ``forecasts`` items are :class:`Forecast` or ``(probs, point_scores)``
    pairs; ``actuals`` are final scores ``(home_goals, away_goals)``.
    RMSE is ``sqrt(mean(dh**2 + da**2))`` and MAE is ``mean(|dh| + |da|)``.
    """
    if len(forecasts) != len(actuals):
        raise ValueError(f"length mismatch: {len(forecasts)} forecasts, {len(actuals)} results")
    if not forecasts:
        raise ValueError("nothing to evaluate")
    items = [f if isinstance(f, Forecast) else Forecast(*f) for f in forecasts]

    rps_values = [rps(f.probs, outcome_of(*a)) for f, a in zip(items, actuals)]
    report = {"n": len(items), "mean_rps": math.fsum(rps_values) / len(items)}

    rules = sorted(set().union(*(f.point_scores.keys() for f in items)))
    for rule in rules:
        errs = [score_errors(f.point_scores[rule], a) for f, a in zip(items, actuals)]
        sq, ab = zip(*errs)
        report[f"rmse_{rule}"] = math.sqrt(math.fsum(sq) / len(sq))
        report[f"mae_{rule}"] = math.fsum(ab) / len(ab)

    base = [score_errors((1, 1), a) for a in actuals]
    report["baseline_rmse"] = math.sqrt(math.fsum(e[0] for e in base) / len(base))
    report["baseline_mae"] = math.fsum(e[1] for e in base) / len(base)
    return report


def fair_odds(p: float, p_min: float = DEFAULT_P_MIN) -> float:
    """Decimal odds implied by probability ``p`` (floored at ``p_min``)."""
    return 1.0 / max(p, p_min)


@dataclass(frozen=True)
class Bet:
    fixture: int | str
    market: Outcome
    stake: float
    odds: float
    won: bool

    @property
    def pnl(self) -> float:
        return self.stake * (self.odds - 1.0) if self.won else -self.stake


@dataclass
class BetLedger:
    bets: list[Bet] = field(default_factory=list)
    skipped: int = 0

    @property
    def staked(self) -> float:
        return math.fsum(b.stake for b in self.bets)

    @property
    def returned(self) -> float:
        return math.fsum(b.stake * b.odds for b in self.bets if b.won)

    @property
    def profit(self) -> float:
        return self.returned - self.staked

    @property
    def rentability(self) -> float | None:
        """Profit over stake, or None when nothing was staked."""
        staked = self.staked
        if staked <= 0:
            return None
        return (self.returned - staked) / staked

    def extend(self, other: "BetLedger") -> "BetLedger":
        return BetLedger(self.bets + other.bets, self.skipped + other.skipped)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["fixture", "market", "stake", "odds", "won", "pnl"])
        for b in self.bets:
            writer.writerow([b.fixture, b.market, repr(b.stake), repr(b.odds), int(b.won), repr(b.pnl)])


def backtest(
    model_probs: Sequence[OutcomeProbs],
    book_odds: Sequence[Sequence[float] | None],
    strategy: int,
    results: Sequence[Outcome],
    *,
    bet_scope: Literal["per_market", "best_market"] = "per_market",
    p_min: float = DEFAULT_P_MIN,
    fixture_ids: Sequence | None = None,
) -> BetLedger:
    """Value-bet every market where the bookmaker pays more than our fair odds.

    Strategy 1 stakes one unit per bet; strategy 2 stakes the model
    probability (the inverse of our fair odds). With ``bet_scope="best_market"``
    only the market with the largest expected value ``p * odds`` is bet.
    Fixtures without a full odds triple are skipped and counted.
    """
    if strategy not in (1, 2):
        raise ValueError(f"strategy must be 1 or 2, got {strategy!r}")
    if bet_scope not in ("per_market", "best_market"):
        raise ValueError(f"unknown bet_scope {bet_scope!r}")
    if not len(model_probs) == len(book_odds) == len(results):
        raise ValueError("model_probs, book_odds and results must be aligned")
    ids = list(range(len(results))) if fixture_ids is None else list(fixture_ids)

    ledger = BetLedger()
    for fid, probs, odds, result in zip(ids, model_probs, book_odds, results):
        if odds is None or len(odds) != 3 or any(o is None for o in odds):
            ledger.skipped += 1
            continue
        if any(not o > 1.0 for o in odds):
            raise ValueError(f"fixture {fid}: bookmaker odds must exceed 1.0")
        candidates = []
        for market, p, book in zip(OUTCOMES, probs.as_tuple(), odds):
            fair = fair_odds(p, p_min)
            if book > fair:
                candidates.append((market, book, 1.0 / fair))
        if bet_scope == "best_market" and candidates:
            candidates = [max(candidates, key=lambda c: c[2] * c[1])]
        for market, book, p in candidates:
            stake = 1.0 if strategy == 1 else p
            ledger.bets.append(Bet(fid, market, stake, float(book), market == result))
    return ledger


def bookmaker_margin(odds: Sequence[float], definition: Literal["inverse", "overround"] = "inverse") -> float:
    """Expected return of betting the whole book in proportion to 1/odds.

    ``inverse`` gives ``1/R - 1`` and ``overround`` gives ``1 - R``, where
    ``R`` is the sum of inverse odds. Both are negative for a book with a margin.
    """
    if any(not o > 1.0 for o in odds):
        raise ValueError("odds must exceed 1.0")
    total = math.fsum(1.0 / o for o in odds)
    if definition == "inverse":
        return 1.0 / total - 1.0
    if definition == "overround":
        return 1.0 - total
    raise ValueError(f"unknown margin definition {definition!r}")


def adjust_draw(probs: OutcomeProbs, multiplier: float) -> OutcomeProbs:
    """Scale the draw probability and renormalise the three outcomes."""
    if not multiplier > 0:
        raise ValueError("multiplier must be positive")
    h, d, a = probs.p_home, probs.p_draw * multiplier, probs.p_away
    total = h + d + a
    return OutcomeProbs(h / total, d / total, a / total)


@dataclass(frozen=True)
class BiasScanResult:
    grid: tuple[tuple[float, float], ...]
    best: float

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["multiplier", "mean_rps"])
        for m, score in self.grid:
            writer.writerow([repr(m), repr(score)])


def _mean_rps_array(P: np.ndarray, idx: np.ndarray) -> float:
    c1 = P[:, 0]
    c2 = P[:, 0] + P[:, 1]
    o1 = (idx == 0).astype(float)
    o2 = (idx <= 1).astype(float)
    return float(np.mean(((c1 - o1) ** 2 + (c2 - o2) ** 2) / 2))


def bias_scan(
    forecasts: Sequence[OutcomeProbs],
    actuals: Sequence[Outcome],
    grid: Sequence[float],
) -> BiasScanResult:
    """Mean RPS after :func:`adjust_draw` for every multiplier in ``grid``.

    The best multiplier minimises mean RPS; exact ties go to the multiplier
    closest to 1.
    """
    if len(grid) == 0:
        raise ValueError("grid must not be empty")
    if len(forecasts) != len(actuals):
        raise ValueError("forecasts and actuals differ in length")
    P = np.array([f.as_tuple() for f in forecasts], dtype=float)
    idx = np.array([_INDEX[a] for a in actuals])
    rows = []
    for m in grid:
        if not m > 0:
            raise ValueError("multipliers must be positive")
        adj = P.copy()
        adj[:, 1] *= m
        adj /= adj.sum(axis=1, keepdims=True)
        rows.append((float(m), _mean_rps_array(adj, idx)))
    best = min(rows, key=lambda r: (r[1], abs(r[0] - 1.0)))[0]
    return BiasScanResult(tuple(rows), best)
