"""
Scoring forecasts and betting against a bookmaker
=================================================

Holdout matches are scored with the ranked probability score and with
scoreline errors, then every forecast is priced against the bookmaker.
"""

from shotcast.elo import run_history
from shotcast.synthetic import generate_league
from shotcast.evaluation import OutcomeProbs, backtest, bookmaker_margin, evaluate_forecasts, rps
from shotcast.match_data import chronological_split
from shotcast.pipeline import fit_forecasters, forecast_holdout, to_probs, training_rows

league = generate_league(n_teams=14, n_seasons=4, seed=4)
train, holdout = chronological_split(league, 120)
timeline = run_history(league)
forecasters = fit_forecasters(training_rows(league, timeline, range(len(train))))
forecasts = forecast_holdout(league, range(len(train), len(league)), timeline, forecasters,
                             seed=0, n_simulations=4000)

actuals = [(r.home_goals, r.away_goals) for r in holdout]
probs = [to_probs(mf) for mf in forecasts]
report = evaluate_forecasts([(p, mf.point_scores) for p, mf in zip(probs, forecasts)], actuals)
for key, value in sorted(report.items()):
    print(f"{key:20s} {value}")

# The bookmaker's own probabilities, after removing its margin
book = [OutcomeProbs.from_odds(r.odds) for r in holdout]
print("bookmaker rps", sum(rps(p, r.result) for p, r in zip(book, holdout)) / len(holdout))
print("margin", sum(bookmaker_margin(r.odds) for r in holdout) / len(holdout))

# Bet whenever the book pays more than our fair price
results = [r.result for r in holdout]
odds = [r.odds for r in holdout]
for strategy in (1, 2):
    ledger = backtest(probs, odds, strategy, results)
    print(f"strategy {strategy}: {len(ledger.bets)} bets, rentability {ledger.rentability}")
