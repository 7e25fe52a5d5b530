"""Event ingestion: provider play-by-play rows to typed events in metres.

The interchange format is a comma-separated table with a header row::

    game_id,half,time,team,player,type,subtype,start_x,end_x,start_y,end_y

Coordinates are percentages of pitch length (x) and width (y). Provider
``(type, subtype)`` codes are mapped to an :class:`EventKind` through an
editable :class:`Taxonomy` table; the default table ships with the package.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from enum import Enum
from importlib import resources
from typing import Callable, Iterable, NamedTuple, TextIO

logger = logging.getLogger(__name__)

PITCH_LENGTH = 105.0
PITCH_WIDTH = 68.0
GAME_MINUTES = 90.0

EVENT_COLUMNS = (
    "game_id", "half", "time", "team", "player", "type", "subtype",
    "start_x", "end_x", "start_y", "end_y",
)
LINEUP_COLUMNS = ("game_id", "player_id", "team_id", "position", "minute_on", "minute_off")
FIXTURE_COLUMNS = ("game_id", "home_team", "away_team", "home_goals", "away_goals", "date")
PLAYER_COLUMNS = ("player_id", "player_name", "team_id", "position", "birth_date")


class ParseError(ValueError):
    """A record could not be parsed; ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ValidationError(ParseError):
    """A record parsed but violates a domain bound."""


class EventKind(str, Enum):
    PASS = "Pass"
    SHOT = "Shot"
    DRIBBLE = "Dribble"
    SET_PIECE = "SetPiece"
    FOUL = "Foul"
    BALL_OUT = "BallOut"
    GOAL = "Goal"
    OTHER = "Other"


class SubKind(str, Enum):
    CROSS = "cross"
    HIGH_PASS = "high pass"
    CORNER = "corner"
    FREE_KICK = "free kick"
    GOAL_KICK = "goal kick"
    PENALTY = "penalty"
    OPEN_PLAY = "open-play"
    NONE = "none"


SET_PIECE_SUBKINDS = frozenset({SubKind.CORNER, SubKind.FREE_KICK, SubKind.GOAL_KICK, SubKind.PENALTY})

# Kinds that record a stoppage rather than a ball movement.
MARKER_KINDS = frozenset({EventKind.FOUL, EventKind.BALL_OUT, EventKind.GOAL})


class PitchPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True, slots=True)
class Event:
    game_id: int
    half: int
    timestamp: float
    team_id: int
    player_id: int
    kind: EventKind
    subkind: SubKind
    start: PitchPoint
    end: PitchPoint
    type_code: int = 0
    subtype_code: int = 0

    @property
    def is_set_piece(self) -> bool:
        return self.kind is EventKind.SET_PIECE or self.subkind in SET_PIECE_SUBKINDS


@dataclass(frozen=True, slots=True)
class Lineup:
    game_id: int
    player_id: int
    team_id: int
    position: str
    minute_on: float
    minute_off: float

    @property
    def started(self) -> bool:
        return self.minute_on == 0


@dataclass(frozen=True, slots=True)
class Fixture:
    game_id: int
    home_team: int
    away_team: int
    home_goals: int
    away_goals: int
    date: date

    @property
    def outcome(self) -> str:
        if self.home_goals > self.away_goals:
            return "home"
        if self.home_goals < self.away_goals:
            return "away"
        return "draw"

    @property
    def season(self) -> str:
        start = self.date.year if self.date.month >= 7 else self.date.year - 1
        return f"{start}/{start + 1}"


@dataclass(frozen=True, slots=True)
class PlayerInfo:
    player_id: int
    name: str
    team_id: int
    position: str
    birth_date: date | None


POSITIONS = ("GK", "DF", "MF", "FW")


class Taxonomy:
    """Mapping from provider ``(type, subtype)`` codes to event kinds.

    Unknown pairs map to ``(Other, none)``.
    """

    def __init__(self, table: dict[tuple[int, int], tuple[EventKind, SubKind]]):
        self._table = dict(table)

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, codes: tuple[int, int]) -> bool:
        return codes in self._table

    def lookup(self, type_code: int, subtype_code: int) -> tuple[EventKind, SubKind]:
        return self._table.get((type_code, subtype_code), (EventKind.OTHER, SubKind.NONE))

    def codes_for(self, kind: EventKind, subkind: SubKind | None = None) -> tuple[int, int]:
        """First provider code pair (in table order) carrying ``kind``/``subkind``."""
        for codes, (k, s) in self._table.items():
            if k is kind and (subkind is None or s is subkind):
                return codes
        raise KeyError((kind, subkind))

    def items(self):
        return self._table.items()

    @classmethod
    def from_csv(cls, stream: TextIO) -> "Taxonomy":
        reader = csv.DictReader(stream)
        table = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                codes = (int(row["type"]), int(row["subtype"]))
                table[codes] = (EventKind(row["kind"].strip()), SubKind(row["subkind"].strip()))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad taxonomy row {row!r}: {exc}", lineno) from exc
        return cls(table)

    def to_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["type", "subtype", "kind", "subkind"])
        for (t, s), (kind, sub) in self._table.items():
            writer.writerow([t, s, kind.value, sub.value])


def default_taxonomy() -> Taxonomy:
    text = resources.files("passvalue").joinpath("data/taxonomy.csv").read_text(encoding="utf-8")
    return Taxonomy.from_csv(io.StringIO(text))


def load_taxonomy(path) -> Taxonomy:
    with open(path, newline="", encoding="utf-8") as fh:
        return Taxonomy.from_csv(fh)


def to_pitch_meters(x_pct: float, y_pct: float,
                    length: float = PITCH_LENGTH, width: float = PITCH_WIDTH) -> PitchPoint:
    """Convert percent-of-pitch coordinates to metres."""
    if not (0.0 <= x_pct <= 100.0 and 0.0 <= y_pct <= 100.0):
        raise ValidationError(f"coordinate ({x_pct}, {y_pct}) outside [0, 100]")
    return PitchPoint(x_pct * length / 100.0, y_pct * width / 100.0)


def _to_percent(value: float, extent: float) -> float:
    # Nudge by ulps so that re-parsing reproduces ``value`` bit for bit.
    p = value * 100.0 / extent
    for _ in range(8):
        back = p * extent / 100.0
        if back == value:
            break
        p = math.nextafter(p, math.inf if back < value else -math.inf)
    return min(max(p, 0.0), 100.0)


def _field(row: list[str], i: int, cast, lineno: int, name: str):
    try:
        return cast(row[i].strip())
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad {name} value {row[i] if i < len(row) else None!r}", lineno) from exc


Orientation = Callable[[int, int, int], bool]


def _parse_row(row: list[str], lineno: int, taxonomy: Taxonomy, mirror: Orientation | None) -> Event:
    if len(row) != len(EVENT_COLUMNS):
        raise ParseError(f"expected {len(EVENT_COLUMNS)} fields, got {len(row)}", lineno)
    game_id = _field(row, 0, int, lineno, "game_id")
    half = _field(row, 1, int, lineno, "half")
    t = _field(row, 2, float, lineno, "time")
    team = _field(row, 3, int, lineno, "team")
    player = _field(row, 4, int, lineno, "player")
    type_code = _field(row, 5, int, lineno, "type")
    subtype_code = _field(row, 6, int, lineno, "subtype")
    sx, ex, sy, ey = (_field(row, i, float, lineno, EVENT_COLUMNS[i]) for i in range(7, 11))
    if half not in (1, 2):
        raise ValidationError(f"half must be 1 or 2, got {half}", lineno)
    if not (t >= 0 and math.isfinite(t)):
        raise ValidationError(f"time must be >= 0, got {t}", lineno)
    for name, v in zip(("start_x", "end_x", "start_y", "end_y"), (sx, ex, sy, ey)):
        if not 0.0 <= v <= 100.0:
            raise ValidationError(f"{name}={v} outside [0, 100]", lineno)
    start = to_pitch_meters(sx, sy)
    end = to_pitch_meters(ex, ey)
    if mirror is not None and mirror(game_id, half, team):
        start = PitchPoint(PITCH_LENGTH - start.x, PITCH_WIDTH - start.y)
        end = PitchPoint(PITCH_LENGTH - end.x, PITCH_WIDTH - end.y)
    kind, subkind = taxonomy.lookup(type_code, subtype_code)
    return Event(game_id, half, t, team, player, kind, subkind, start, end, type_code, subtype_code)


def parse_events(
    stream: TextIO,
    taxonomy: Taxonomy | None = None,
    *,
    strict: bool = False,
    errors: list[ParseError] | None = None,
    mirror: Orientation | None = None,
) -> dict[int, list[Event]]:
    """Parse an events table into per-game lists ordered by (half, time, row).

    Parameters
    ----------
    stream : text stream
        Header-bearing comma-separated table (see module docstring).
    taxonomy : Taxonomy, optional
        Code table; the packaged default is used when omitted.
    strict : bool
        Raise on the first bad record instead of skipping it.
    errors : list, optional
        Receives every skipped record's :class:`ParseError`.
    mirror : callable, optional
        ``mirror(game_id, half, team_id) -> bool``; when true the event's
        coordinates are reflected so the acting team attacks toward x = 105.
        Leave unset for provider data that is already attack-normalised.
    """
    taxonomy = taxonomy or default_taxonomy()
    reader = csv.reader(stream)
    header = next(reader, None)
    games: dict[int, list[Event]] = defaultdict(list)
    if header is None:
        return {}
    header = [h.strip() for h in header]
    if tuple(header) != EVENT_COLUMNS:
        missing = set(EVENT_COLUMNS) - set(header)
        if missing:
            raise ParseError(f"missing columns {sorted(missing)}", 1)
        order = [header.index(c) for c in EVENT_COLUMNS]
    else:
        order = None
    skipped = 0
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if order is not None and len(row) == len(header):
            row = [row[i] for i in order]
        try:
            ev = _parse_row(row, lineno, taxonomy, mirror)
        except ParseError as exc:
            if strict:
                raise
            skipped += 1
            logger.warning("skipping record: %s", exc)
            if errors is not None:
                errors.append(exc)
            continue
        games[ev.game_id].append(ev)
    if skipped:
        logger.warning("skipped %d malformed event records", skipped)
    # list.sort is stable, so ties keep ingestion order.
    return {g: sorted(evs, key=lambda e: (e.half, e.timestamp)) for g, evs in sorted(games.items())}


def read_events(path, taxonomy: Taxonomy | None = None, **kwargs) -> dict[int, list[Event]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_events(fh, taxonomy, **kwargs)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_events(games: dict[int, list[Event]] | Iterable[Event], stream: TextIO) -> None:
    """Serialise events back to the interchange format."""
    events = (e for evs in games.values() for e in evs) if isinstance(games, dict) else games
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(EVENT_COLUMNS)
    for e in events:
        writer.writerow([
            e.game_id, e.half, _fmt(e.timestamp), e.team_id, e.player_id, e.type_code, e.subtype_code,
            _fmt(_to_percent(e.start.x, PITCH_LENGTH)), _fmt(_to_percent(e.end.x, PITCH_LENGTH)),
            _fmt(_to_percent(e.start.y, PITCH_WIDTH)), _fmt(_to_percent(e.end.y, PITCH_WIDTH)),
        ])


def _rows(stream: TextIO, columns: tuple[str, ...]):
    reader = csv.DictReader(stream)
    missing = set(columns) - set(reader.fieldnames or columns)
    if missing:
        raise ParseError(f"missing columns {sorted(missing)}", 1)
    for lineno, row in enumerate(reader, start=2):
        yield lineno, row


def parse_lineups(stream: TextIO, game_minutes: float = GAME_MINUTES) -> list[Lineup]:
    out = []
    seen = set()
    for lineno, row in _rows(stream, LINEUP_COLUMNS):
        try:
            lu = Lineup(int(row["game_id"]), int(row["player_id"]), int(row["team_id"]),
                        row["position"].strip(), float(row["minute_on"]), float(row["minute_off"]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad lineup row: {exc}", lineno) from exc
        if lu.position not in POSITIONS:
            raise ValidationError(f"unknown position {lu.position!r}", lineno)
        if not 0 <= lu.minute_on < lu.minute_off <= game_minutes:
            raise ValidationError(f"bad minutes {lu.minute_on}-{lu.minute_off}", lineno)
        if (lu.game_id, lu.player_id) in seen:
            raise ValidationError(f"player {lu.player_id} listed twice in game {lu.game_id}", lineno)
        seen.add((lu.game_id, lu.player_id))
        out.append(lu)
    return out


def write_lineups(lineups: Iterable[Lineup], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(LINEUP_COLUMNS)
    for lu in lineups:
        writer.writerow([lu.game_id, lu.player_id, lu.team_id, lu.position,
                         _fmt(lu.minute_on), _fmt(lu.minute_off)])


def parse_fixtures(stream: TextIO) -> list[Fixture]:
    out = []
    for lineno, row in _rows(stream, FIXTURE_COLUMNS):
        try:
            out.append(Fixture(int(row["game_id"]), int(row["home_team"]), int(row["away_team"]),
                               int(row["home_goals"]), int(row["away_goals"]),
                               date.fromisoformat(row["date"].strip())))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad fixture row: {exc}", lineno) from exc
    return out


def write_fixtures(fixtures: Iterable[Fixture], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(FIXTURE_COLUMNS)
    for f in fixtures:
        writer.writerow([f.game_id, f.home_team, f.away_team, f.home_goals, f.away_goals, f.date.isoformat()])


def parse_players(stream: TextIO) -> dict[int, PlayerInfo]:
    out = {}
    for lineno, row in _rows(stream, PLAYER_COLUMNS):
        try:
            born = row["birth_date"].strip()
            info = PlayerInfo(int(row["player_id"]), row["player_name"], int(row["team_id"]),
                              row["position"].strip(), date.fromisoformat(born) if born else None)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad player row: {exc}", lineno) from exc
        out[info.player_id] = info
    return out


def write_players(players: Iterable[PlayerInfo], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PLAYER_COLUMNS)
    for p in players:
        writer.writerow([p.player_id, p.name, p.team_id, p.position,
                         p.birth_date.isoformat() if p.birth_date else ""])


def minutes_played(lineups: Iterable[Lineup], games: Iterable[int] | None = None) -> dict[int, float]:
    """Total minutes per player over ``games`` (all games when omitted)."""
    wanted = None if games is None else set(games)
    minutes: dict[int, float] = defaultdict(float)
    for lu in lineups:
        if wanted is None or lu.game_id in wanted:
            minutes[lu.player_id] += lu.minute_off - lu.minute_on
    return dict(minutes)
