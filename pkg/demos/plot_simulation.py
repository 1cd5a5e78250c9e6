"""
Simulating a fixture shot by shot
=================================

Each simulation draws the two ratings, then a shot count and a vector of
per-shot conversion chances for each side, and finally the goals.
"""

from shotcast.elo import run_history
from shotcast.synthetic import generate_league
from shotcast.elo import NormalSpec
from shotcast.pipeline import fit_forecasters, forecast_fixture, team_form, training_rows
from shotcast.simulator import win_probability_two_normals

league = generate_league(n_teams=12, n_seasons=3, seed=2)
timeline = run_history(league)
forecasters = fit_forecasters(training_rows(league, timeline))

home = team_form(timeline, "Team 00")
away = team_form(timeline, "Team 07")
mf = forecast_fixture(home, away, forecasters, n_simulations=20_000, seed=42)

print(f"home {mf.p_home:.3f}  draw {mf.p_draw:.3f}  away {mf.p_away:.3f}")
print("point scores", mf.point_scores)
print("over 2.5", mf.totals[2.5])

top = sorted(mf.score_distribution.items(), key=lambda kv: -kv[1])[:5]
for (h, a), p in top:
    print(f"{h}-{a}  {p:.3f}")

# Spread matters even when means do not favour a side: a team expected to
# score one goal against two still wins sometimes once its goals vary.
print(win_probability_two_normals(NormalSpec(1, 0.5), NormalSpec(2, 0.0), 1_000_000))
print(win_probability_two_normals(NormalSpec(1, 0.5), NormalSpec(2, 0.5), 1_000_000))
