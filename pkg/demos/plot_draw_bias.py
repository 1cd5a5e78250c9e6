"""
Looking for a draw bias
=======================

Scale the draw probability of every forecast by a common multiplier and
keep the multiplier with the lowest mean ranked probability score.
"""

import numpy as np

from shotcast.evaluation import OutcomeProbs, adjust_draw, bias_scan

rng = np.random.default_rng(0)
truth = rng.dirichlet([4.0, 2.5, 3.0], 50_000)
draws = rng.random(50_000)[:, None] > np.cumsum(truth, axis=1)
actuals = [("home", "draw", "away")[i] for i in draws.sum(axis=1).clip(max=2)]

# A forecaster that sees draws 20% less often than they happen
forecasts = [adjust_draw(OutcomeProbs(*(t / t.sum())), 1 / 1.2) for t in truth]

grid = np.round(np.arange(0.8, 1.51, 0.01), 2)
result = bias_scan(forecasts, actuals, grid)
print("best draw multiplier:", result.best)
for m, score in result.grid[::10]:
    print(f"{m:.2f}  {score:.5f}")
