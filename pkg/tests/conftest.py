import pytest

from shotcast.elo import run_history
from shotcast.pipeline import fit_forecasters, training_rows
from shotcast.synthetic import generate_league, league_csv


@pytest.fixture(scope="session")
def league():
    return generate_league(n_teams=12, n_seasons=4, seed=11)


@pytest.fixture(scope="session")
def league_timeline(league):
    return run_history(league)


@pytest.fixture(scope="session")
def league_forecasters(league, league_timeline):
    return fit_forecasters(training_rows(league, league_timeline), "ols")


@pytest.fixture
def league_file(tmp_path):
    path = tmp_path / "league.csv"
    path.write_text(league_csv(n_teams=10, n_seasons=3, seed=5))
    return path


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
