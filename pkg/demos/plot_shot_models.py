"""
Shot quantity and quality as distributions
==========================================

A linear model gives the expected shot count from the two pre-match
ratings; a second linear model on the absolute residuals gives its spread.
"""

import numpy as np

from shotcast.elo import run_history
from shotcast.synthetic import generate_league
from shotcast.pipeline import fit_forecasters, training_rows

league = generate_league(n_teams=16, n_seasons=4, seed=1)
timeline = run_history(league)
rows = training_rows(league, timeline)
ols = fit_forecasters(rows, "ols")
knn = fit_forecasters(rows, "knn", k=50)

# Home shot count across a grid of rating gaps
gaps = np.array([-100.0, -50.0, 0.0, 50.0, 100.0])
home, away = 500 + gaps / 2, 500 - gaps / 2
for name, fs in (("ols", ols), ("knn", knn)):
    mean, std = fs.home_quantity.predict(home, away)
    print(name, np.round(mean, 2), np.round(std, 2))

# Conversion rate per shot, clamped to [0, 1]
mean, std = ols.home_quality.predict(home, away)
print("quality", np.round(mean, 3), np.round(std, 3))

# The fitted coefficients are plain numbers and round-trip through JSON
print(ols.home_quantity.to_dict())
