import io
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from shotcast.evaluation import (
    BetLedger,
    Bet,
    Forecast,
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

ORDER = ("home", "draw", "away")


def rps_oracle(p, actual):
    """Generic ranked probability score: mean squared CDF gap over r-1 thresholds."""
    obs = [1.0 if o == actual else 0.0 for o in ORDER]
    total, cp, co = 0.0, 0.0, 0.0
    for i in range(len(ORDER) - 1):
        cp += p[i]
        co += obs[i]
        total += (cp - co) ** 2
    return total / (len(ORDER) - 1)


@st.composite
def probs(draw):
    w = [draw(st.floats(0, 1)) for _ in range(3)]
    assume(sum(w) > 1e-6)
    s = sum(w)
    return OutcomeProbs(w[0] / s, w[1] / s, 1 - w[0] / s - w[1] / s if 1 - w[0] / s - w[1] / s > 0 else 0.0)


def test_rps_examples():
    sure_home = OutcomeProbs(1, 0, 0)
    assert rps(sure_home, "home") == 0.0
    assert rps(sure_home, "draw") == 0.5
    assert rps(sure_home, "away") == 1.0
    assert rps(OutcomeProbs(1 / 3, 1 / 3, 1 / 3), "home") == pytest.approx(5 / 18, abs=1e-12)


@given(probs(), st.sampled_from(ORDER))
def test_rps_matches_oracle_and_bounds(p, actual):
    value = rps(p, actual)
    assert value == pytest.approx(rps_oracle(p.as_tuple(), actual), abs=1e-12)
    assert 0.0 <= value <= 1.0


@given(st.sampled_from(ORDER), probs())
def test_rps_zero_only_for_certain_truth(actual, p):
    if rps(p, actual) == 0.0:
        assert p[actual] == 1.0


@given(st.floats(0.001, 1.0))
def test_rps_ordinal(p):
    f = OutcomeProbs(p, 1 - p, 0.0)
    assert rps(f, "draw") < rps(f, "away")


def test_outcome_probs_validation():
    with pytest.raises(ValueError):
        OutcomeProbs(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        OutcomeProbs(-0.1, 0.6, 0.5)


# quadratic error of a single side: rows are forecasts 0..2, columns actual goals 0..2
TABLE1 = [[0, 1, 4], [1, 0, 1], [4, 1, 0]]


@pytest.mark.parametrize("forecast_goals", range(3))
@pytest.mark.parametrize("actual_goals", range(3))
def test_quadratic_error_grid_single_side(forecast_goals, actual_goals):
    sq, _ = score_errors((forecast_goals, 0), (actual_goals, 0))
    assert sq == TABLE1[forecast_goals][actual_goals]
    sq_away, _ = score_errors((0, forecast_goals), (0, actual_goals))
    assert sq_away == TABLE1[forecast_goals][actual_goals]


def test_score_errors_examples():
    assert score_errors((1, 1), (1, 1)) == (0, 0)
    assert score_errors((0, 1), (2, 0)) == (5, 3)


def test_evaluate_report_values():
    f = [Forecast(OutcomeProbs(1, 0, 0), {"mode": (0, 1)}), Forecast(OutcomeProbs(0, 1, 0), {"mode": (1, 1)})]
    rep = evaluate_forecasts(f, [(2, 1), (1, 1)])
    # squared errors 4 and 0
    assert rep["rmse_mode"] == pytest.approx(math.sqrt(2))
    assert rep["mae_mode"] == pytest.approx(1.0)
    assert rep["mean_rps"] == 0.0


def test_evaluate_metrics_decoupled():
    rep = evaluate_forecasts([(OutcomeProbs(1, 0, 0), {"median": (1, 1)})], [(1, 1)])
    assert rep["rmse_median"] == 0 and rep["mae_median"] == 0
    assert rep["mean_rps"] == 0.5
    assert rep["baseline_rmse"] == 0 and rep["baseline_mae"] == 0


def test_evaluate_length_mismatch():
    with pytest.raises(ValueError):
        evaluate_forecasts([(OutcomeProbs(1, 0, 0), {})], [(1, 0), (0, 0)])


def test_fair_odds():
    assert fair_odds(0.5) == 2.0
    assert fair_odds(0.25) == 4.0
    assert fair_odds(0.0) == pytest.approx(1000.0)


def test_backtest_value_home_win():
    p = [OutcomeProbs(0.5, 0.3, 0.2)]
    odds = [(2.5, 1.01, 1.01)]
    s1 = backtest(p, odds, 1, ["home"])
    s2 = backtest(p, odds, 2, ["home"])
    assert [b.market for b in s1.bets] == ["home"]
    assert s1.profit == pytest.approx(1.5)
    assert s2.bets[0].stake == 0.5 and s2.profit == pytest.approx(0.75)


def test_backtest_no_edge_no_bet():
    p = [OutcomeProbs(0.5, 0.3, 0.2)]
    for s in (1, 2):
        ledger = backtest(p, [(1.9, 1.01, 1.01)], s, ["home"])
        assert ledger.bets == [] and ledger.rentability is None


def test_backtest_equal_odds_no_bet():
    assert backtest([OutcomeProbs(0.5, 0.25, 0.25)], [(2.0, 4.0, 4.0)], 1, ["home"]).bets == []


def test_backtest_losing_draw_bet():
    ledger = backtest([OutcomeProbs(0.4, 0.4, 0.2)], [(1.01, 2.6, 1.01)], 1, ["home"])
    assert [(b.market, b.pnl) for b in ledger.bets] == [("draw", -1.0)]


def test_backtest_skips_missing_odds():
    p = [OutcomeProbs(0.5, 0.3, 0.2)] * 2
    ledger = backtest(p, [None, (2.5, 1.01, 1.01)], 1, ["home", "away"])
    assert ledger.skipped == 1 and len(ledger.bets) == 1


def test_backtest_best_market_scope():
    p = [OutcomeProbs(0.4, 0.35, 0.25)]
    per = backtest(p, [(3.0, 3.0, 5.0)], 1, ["away"])
    best = backtest(p, [(3.0, 3.0, 5.0)], 1, ["away"], bet_scope="best_market")
    assert len(per.bets) == 3
    assert [b.market for b in best.bets] == ["away"]


def test_all_losing_ledger():
    ledger = BetLedger([Bet(i, "home", 1.0, 2.0, False) for i in range(5)])
    assert ledger.rentability == -1.0
    assert BetLedger().rentability is None


@settings(max_examples=30)
@given(st.lists(st.tuples(probs(), st.sampled_from(ORDER)), min_size=1, max_size=20), st.sampled_from([1, 2]))
def test_backtest_reproducible(items, strategy):
    p, res = zip(*items)
    odds = [(2.1, 3.3, 3.9)] * len(items)
    a = backtest(p, odds, strategy, res)
    b = backtest(p, odds, strategy, res)
    assert a.bets == b.bets
    assert a.returned == pytest.approx(sum(x.stake * x.odds for x in a.bets if x.won))


def test_ledger_csv():
    buf = io.StringIO()
    BetLedger([Bet(0, "home", 1.0, 2.5, True)]).write_csv(buf)
    assert buf.getvalue().splitlines() == ["fixture,market,stake,odds,won,pnl", "0,home,1.0,2.5,1,1.5"]


def test_bookmaker_margin():
    assert bookmaker_margin((2.0, 3.0, 6.0)) == pytest.approx(0.0, abs=1e-15)
    assert bookmaker_margin((1.9, 3.4, 4.1)) == pytest.approx(-0.0604, abs=1e-4)
    assert bookmaker_margin((1.5, 1.5, 1.5)) == pytest.approx(-0.5)
    assert bookmaker_margin((1.5, 1.5, 1.5), "overround") == pytest.approx(-1.0)


def test_adjust_draw_examples():
    p = OutcomeProbs(0.5, 0.25, 0.25)
    assert adjust_draw(p, 1.0) == p
    adj = adjust_draw(p, 1.27)
    assert adj.as_tuple() == pytest.approx((0.4684, 0.2974, 0.2342), abs=1e-4)
    assert adjust_draw(OutcomeProbs(0, 1, 0), 0.3) == OutcomeProbs(0, 1, 0)


@given(probs(), st.floats(0.05, 5))
def test_adjust_draw_properties(p, m):
    assume(p.p_home + p.p_away > 0 or p.p_draw > 0)
    adj = adjust_draw(p, m)
    assert abs(sum(adj.as_tuple()) - 1) <= 1e-12
    if p.p_away > 0 and adj.p_away > 0:
        assert adj.p_home / adj.p_away == pytest.approx(p.p_home / p.p_away, rel=1e-9)


def _synthetic_forecasts(n, draw_bias, seed):
    rng = np.random.default_rng(seed)
    truth = rng.dirichlet([4, 2.5, 3], n)
    forecasts = [adjust_draw(OutcomeProbs(*t / t.sum()), 1 / draw_bias) for t in truth]
    u = rng.random(n)
    idx = (u[:, None] > np.cumsum(truth, axis=1)).sum(axis=1)
    actuals = [ORDER[min(i, 2)] for i in idx]
    return forecasts, actuals


def test_bias_scan_single_grid():
    f, a = _synthetic_forecasts(100, 1.0, 0)
    assert bias_scan(f, a, [1.3]).best == 1.3


def test_bias_scan_tie_prefers_one():
    f = [OutcomeProbs(0.5, 0.0, 0.5)] * 4
    a = ["home", "away"] * 2
    res = bias_scan(f, a, [0.9, 1.0, 1.1])
    assert res.best == 1.0


def test_bias_scan_csv():
    res = bias_scan([OutcomeProbs(0.4, 0.3, 0.3)], ["draw"], [1.0, 1.5])
    buf = io.StringIO()
    res.write_csv(buf)
    assert buf.getvalue().splitlines()[0] == "multiplier,mean_rps"
    assert len(buf.getvalue().splitlines()) == 3


def test_bias_scan_matches_scalar_rps():
    f, a = _synthetic_forecasts(300, 1.2, 3)
    res = bias_scan(f, a, [0.9, 1.2])
    for m, score in res.grid:
        direct = np.mean([rps(adjust_draw(p, m), o) for p, o in zip(f, a)])
        assert score == pytest.approx(direct, abs=1e-12)
