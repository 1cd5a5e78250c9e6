"""Match history ingestion, per-match model targets and chronological splits.

Input files follow the football-data.co.uk column naming::

    Date, HomeTeam, AwayTeam, FTHG, FTAG, HS, AS [, B365H, B365D, B365A]
"""

from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field
from datetime import date, datetime
from typing import BinaryIO, Iterator, Literal, Sequence, TextIO

logger = logging.getLogger(__name__)

Side = Literal["home", "away"]

REQUIRED_COLUMNS = ("Date", "HomeTeam", "AwayTeam", "FTHG", "FTAG", "HS", "AS")
DEFAULT_ODDS_COLUMNS = ("B365H", "B365D", "B365A")

_DATE_FORMATS = ("%Y-%m-%d", "%d/%m/%Y", "%d/%m/%y")


class DataError(ValueError):
    """Raised for malformed or unusable match data."""


@dataclass(frozen=True)
class MatchRecord:
    date: date
    home_team: str
    away_team: str
    home_goals: int
    away_goals: int
    home_shots: int
    away_shots: int
    odds_home: float | None = None
    odds_draw: float | None = None
    odds_away: float | None = None

    def __post_init__(self):
        for name in ("home_goals", "away_goals", "home_shots", "away_shots"):
            if getattr(self, name) < 0:
                raise DataError(f"{name} must be non-negative")
        for name in ("odds_home", "odds_draw", "odds_away"):
            value = getattr(self, name)
            if value is not None and not value > 1.0:
                raise DataError(f"{name} must be > 1.0, got {value}")

    @property
    def odds(self) -> tuple[float, float, float] | None:
        """The (home, draw, away) odds triple, or None if any price is missing."""
        triple = (self.odds_home, self.odds_draw, self.odds_away)
        if any(o is None for o in triple):
            return None
        return triple  # type: ignore[return-value]

    @property
    def result(self) -> str:
        if self.home_goals > self.away_goals:
            return "home"
        if self.home_goals < self.away_goals:
            return "away"
        return "draw"


@dataclass(frozen=True)
class Dataset:
    """Chronologically ordered, immutable collection of matches.

    ``skipped`` counts source rows that were dropped because a required
    field could not be parsed.
    """

    records: tuple[MatchRecord, ...]
    skipped: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.date < prev.date:
                raise DataError("records must be sorted by date")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[MatchRecord]:
        return iter(self.records)

    def __getitem__(self, idx):
        return self.records[idx]

    @property
    def teams(self) -> list[str]:
        seen = {}
        for r in self.records:
            seen.setdefault(r.home_team, None)
            seen.setdefault(r.away_team, None)
        return list(seen)


@dataclass(frozen=True)
class ShotTargets:
    shots: int
    quality: float
    # False when the side took no shots; such rows carry no quality label.
    usable_for_quality: bool = True


def parse_date(text: str) -> date:
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unrecognised date {text!r}")


def _parse_count(text: str) -> int:
    value = float(text)
    if value != int(value) or value < 0:
        raise ValueError(f"not a non-negative integer: {text!r}")
    return int(value)


def _parse_odds(text: str | None) -> float | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    return value if value > 1.0 else None


def _open_text(source) -> tuple[TextIO, bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8-sig"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8-sig"), newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline=""), False


def parse_csv(
    source: BinaryIO | TextIO | bytes | str | os.PathLike,
    odds_columns: Sequence[str] = DEFAULT_ODDS_COLUMNS,
) -> Dataset:
    """Parse a football-data style CSV into a date-sorted :class:`Dataset`.

    Parameters
    ----------
    source : binary/text stream, bytes or path
        CSV content with a header row.
    odds_columns : sequence of three str
        Columns holding the home/draw/away decimal odds. Missing columns or
        blank cells give ``None`` odds; the row is still kept.

    Raises
    ------
    DataError
        If a required column is absent or no data row could be parsed.
    """
    if len(odds_columns) != 3:
        raise ValueError("odds_columns must name exactly three columns")
    stream, owned = _open_text(source)
    try:
        reader = csv.DictReader(stream)
        header = reader.fieldnames
        if not header:
            raise DataError("empty dataset")
        header = [h.strip() for h in header]
        reader.fieldnames = header
        for col in REQUIRED_COLUMNS:
            if col not in header:
                raise DataError(f"missing required column: {col}")

        records: list[MatchRecord] = []
        skipped = 0
        for row in reader:
            if not any((v or "").strip() for v in row.values() if isinstance(v, str)):
                continue  # trailing blank lines are common in these files
            try:
                rec = MatchRecord(
                    date=parse_date(row["Date"]),
                    home_team=row["HomeTeam"].strip(),
                    away_team=row["AwayTeam"].strip(),
                    home_goals=_parse_count(row["FTHG"]),
                    away_goals=_parse_count(row["FTAG"]),
                    home_shots=_parse_count(row["HS"]),
                    away_shots=_parse_count(row["AS"]),
                    odds_home=_parse_odds(row.get(odds_columns[0])),
                    odds_draw=_parse_odds(row.get(odds_columns[1])),
                    odds_away=_parse_odds(row.get(odds_columns[2])),
                )
            except (ValueError, TypeError, AttributeError):
                skipped += 1
                continue
            if not rec.home_team or not rec.away_team:
                skipped += 1
                continue
            records.append(rec)
    finally:
        if owned:
            stream.close()
        elif isinstance(stream, io.TextIOWrapper):
            stream.detach()

    if not records:
        raise DataError("empty dataset")
    if skipped:
        logger.warning("skipped %d unparseable rows", skipped)
    # sorted() is stable, so same-day order follows the source file
    records.sort(key=lambda r: r.date)
    return Dataset(tuple(records), skipped=skipped)


def _fmt_odds(value: float | None) -> str:
    return "" if value is None else repr(value)


def write_csv(
    data: Dataset | Sequence[MatchRecord],
    stream: TextIO,
    odds_columns: Sequence[str] = DEFAULT_ODDS_COLUMNS,
) -> None:
    """Serialize records using the same column names :func:`parse_csv` reads."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([*REQUIRED_COLUMNS, *odds_columns])
    for r in data:
        writer.writerow([
            r.date.isoformat(), r.home_team, r.away_team,
            r.home_goals, r.away_goals, r.home_shots, r.away_shots,
            _fmt_odds(r.odds_home), _fmt_odds(r.odds_draw), _fmt_odds(r.odds_away),
        ])


def chronological_split(data: Dataset, tail_n: int) -> tuple[Dataset, Dataset]:
    """Split off the last ``tail_n`` matches as a holdout set."""
    if tail_n < 1:
        raise DataError(f"tail_n must be positive, got {tail_n}")
    if tail_n >= len(data):
        raise DataError(
            f"holdout size {tail_n} must be smaller than the dataset ({len(data)} records)"
        )
    cut = len(data) - tail_n
    return Dataset(data.records[:cut]), Dataset(data.records[cut:])


def derive_targets(rec: MatchRecord, side: Side) -> ShotTargets:
    """Shot count and goals-per-shot for one side of a match.

    Zero-shot sides get quality 0 and are flagged unusable for the quality
    model. Goals in excess of shots (own goals, data glitches) clamp the
    quality to 1.
    """
    if side == "home":
        goals, shots = rec.home_goals, rec.home_shots
    elif side == "away":
        goals, shots = rec.away_goals, rec.away_shots
    else:
        raise ValueError(f"side must be 'home' or 'away', got {side!r}")
    if shots == 0:
        return ShotTargets(shots=0, quality=0.0, usable_for_quality=False)
    return ShotTargets(shots=shots, quality=min(goals / shots, 1.0))
