"""
Match ratings from results alone
================================

Every team starts at the same rating and trades points after each match.
"""

import numpy as np

from shotcast.elo import rating_distribution, run_history
from shotcast.synthetic import generate_league
from shotcast.elo import expected_score, update

# A single win between equals moves both sides by half the K factor
print(update(500, 500, 1.0))

# A 400 point gap means the stronger side is expected to take 10 of 11 points
print(expected_score(900, 500))

# Replay a small synthetic league
league = generate_league(n_teams=8, n_seasons=2, seed=3)
timeline = run_history(league)
table = sorted(timeline.current.items(), key=lambda kv: -kv[1])
for team, rating in table:
    print(f"{team}  {rating:7.2f}")

# Points only move between teams, so the average never drifts
print(np.mean(list(timeline.current.values())))

# Recent form: mean and spread of the last ten post-match ratings
leader = table[0][0]
print(leader, rating_distribution(timeline, leader, window=10))
