import io
import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shotcast.elo import (
    EloParams,
    EloTimeline,
    UnknownTeamError,
    expected_score,
    rating_distribution,
    run_history,
    update,
)
from shotcast.match_data import Dataset, MatchRecord

ratings = st.floats(-3000, 3000, allow_nan=False)


def test_expected_score_values():
    assert expected_score(500, 500) == 0.5
    assert expected_score(900, 500) == pytest.approx(10 / 11, abs=1e-12)
    assert expected_score(500, 900) == pytest.approx(1 / 11, abs=1e-12)


@given(ratings, ratings)
def test_expected_score_complementary(a, b):
    assert expected_score(a, b) + expected_score(b, a) == pytest.approx(1.0, abs=1e-12)


@given(ratings, st.floats(1, 500), ratings)
def test_expected_score_monotone(a, step, b):
    hi, lo = expected_score(a + step, b), expected_score(a, b)
    # strict in exact arithmetic; the logistic saturates in floats far out
    assert hi >= lo
    if abs(a - b) < 1000:
        assert hi > lo


def test_update_examples():
    assert update(500, 500, 0.5) == (500, 500)
    assert update(500, 500, 1) == (516, 484)
    new_i, new_j = update(900, 500, 0)
    assert new_i == pytest.approx(900 - 32 * 10 / 11, abs=1e-9)
    assert new_i == pytest.approx(870.909, abs=1e-3)
    assert new_j == pytest.approx(500 + 32 * 10 / 11, abs=1e-9)


@pytest.mark.parametrize("bad", [2, -1, 0.25])
def test_update_rejects_outcome(bad):
    with pytest.raises(ValueError):
        update(500, 500, bad)


@given(ratings, ratings, st.sampled_from([0, 0.5, 1]))
def test_update_zero_sum(a, b, o):
    na, nb = update(a, b, o)
    assert (na - a) + (nb - b) == pytest.approx(0.0, abs=1e-9)


def test_params_validation():
    with pytest.raises(ValueError):
        EloParams(k_factor=0)
    with pytest.raises(ValueError):
        EloParams(scale_a=-1)


def _match(day, h, a, hg, ag):
    return MatchRecord(date(2020, 1, day), h, a, hg, ag, 10, 10)


def test_run_history_empty():
    tl = run_history(Dataset(()))
    assert dict(tl.current) == {} and dict(tl.history) == {}


def test_run_history_single_match():
    tl = run_history(Dataset((_match(1, "A", "B", 2, 0),)))
    assert tl.current["A"] == 516 and tl.current["B"] == 484
    assert tl.history["A"][0].pre_rating == 500
    assert tl.match_ratings == ((500.0, 500.0),)


def test_late_entrant_starts_at_initial(league):
    recs = list(league.records[:49]) + [MatchRecord(league[48].date, "Newcomer", league[0].home_team, 1, 1, 5, 5)]
    tl = run_history(Dataset(tuple(recs)))
    assert tl.history["Newcomer"][0].pre_rating == 500
    assert tl.history["Newcomer"][0].match_index == 49


def test_timeline_chain_and_zero_sum(league):
    tl = run_history(league)
    for entries in tl.history.values():
        for prev, nxt in zip(entries, entries[1:]):
            assert prev.post_rating == nxt.pre_rating
    total = math.fsum(r - 500 for r in tl.current.values())
    assert abs(total) < 1e-6


def test_replay_is_pure(league):
    a, b = run_history(league), run_history(league)
    assert dict(a.history) == dict(b.history) and dict(a.current) == dict(b.current)


def test_round_robin_champion_finishes_top():
    teams = ["Top", "B", "C", "D", "E"]
    rng = np.random.default_rng(3)
    recs, day = [], 1
    for _ in range(4):
        for h in teams:
            for a in teams:
                if h == a:
                    continue
                if "Top" in (h, a):
                    hg, ag = (2, 0) if h == "Top" else (0, 2)
                else:
                    hg, ag = (int(x) for x in rng.integers(0, 3, 2))
                recs.append(_match(min(day, 28), h, a, hg, ag))
        day += 1
    tl = run_history(Dataset(tuple(recs)))
    best = max(tl.current, key=tl.current.get)
    assert best == "Top"
    assert all(tl.current["Top"] > v for t, v in tl.current.items() if t != "Top")


def _timeline_with(values):
    buf = io.StringIO()
    buf.write("team,match_index,date,pre_rating,post_rating\n")
    prev = 500.0
    for i, v in enumerate(values):
        buf.write(f"X,{i},2020-01-{i + 1:02d},{prev!r},{float(v)!r}\n")
        prev = v
    buf.seek(0)
    return EloTimeline.read_csv(buf)


def test_rating_distribution_constant():
    spec = rating_distribution(_timeline_with([510] * 10), "X")
    assert (spec.mean, spec.std) == (510, 0)


def test_rating_distribution_sample_std():
    spec = rating_distribution(_timeline_with([500, 516, 508]), "X")
    assert spec.mean == pytest.approx(508) and spec.std == pytest.approx(8.0)


def test_rating_distribution_window_and_before():
    tl = _timeline_with([400, 500, 516, 508])
    assert rating_distribution(tl, "X", window=3).mean == pytest.approx(508)
    spec = rating_distribution(tl, "X", window=10, before=1)
    assert (spec.mean, spec.std) == (400, 0)
    with pytest.raises(UnknownTeamError):
        rating_distribution(tl, "X", before=0)


def test_rating_distribution_unknown():
    with pytest.raises(UnknownTeamError, match="unknown team"):
        rating_distribution(_timeline_with([500]), "Nobody")


def test_timeline_csv_round_trip(league):
    tl = run_history(league)
    buf = io.StringIO()
    tl.write_csv(buf)
    assert buf.getvalue().splitlines()[0] == "team,match_index,date,pre_rating,post_rating"
    buf.seek(0)
    back = EloTimeline.read_csv(buf)
    assert dict(back.history) == dict(tl.history)
    assert dict(back.current) == dict(tl.current)
