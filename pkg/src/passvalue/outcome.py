"""Match outcome forecasts from player ratings, and their evaluation.

Team scores are modelled as independent Poisson variables whose means come
from summed starting-lineup ratings, rescaled to the goal distribution of a
calibration season. Win/draw/loss probabilities follow from the difference
of the two scores (Skellam distribution).
"""

from __future__ import annotations

import csv
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .events import POSITIONS, Fixture, Lineup

OUTCOMES = ("home", "draw", "away")
LAMBDA_FLOOR = 0.05
PRIOR = (0.4842, 0.2342, 0.2816)
TAIL_MASS = 1e-12
PROB_FLOOR = 1e-15


class ExcludedGame(Exception):
    """A team lacks a rated player in some line; the game is not forecast."""


@dataclass(frozen=True, slots=True)
class OutcomeForecast:
    p_home: float
    p_draw: float
    p_away: float

    def __post_init__(self):
        probs = (self.p_home, self.p_draw, self.p_away)
        if any(not 0.0 <= p <= 1.0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"invalid outcome probabilities {probs}")

    def prob(self, outcome: str) -> float:
        return (self.p_home, self.p_draw, self.p_away)[OUTCOMES.index(outcome)]


@dataclass(frozen=True, slots=True)
class TeamStrength:
    game_id: int
    team_id: int
    raw_sum: float
    lam: float | None = None


def line_averages(players: Iterable[tuple[str, float]]) -> dict[str, float]:
    """Mean rating per line from ``(position, rating)`` pairs of one team."""
    acc: dict[str, list[float]] = defaultdict(list)
    for pos, value in players:
        acc[pos].append(value)
    return {pos: sum(v) / len(v) for pos, v in acc.items()}


def team_strength(starters: Iterable[tuple[int, str]], ratings: Mapping[int, float],
                  averages: Mapping[str, float]) -> float:
    """Summed ratings of the starting lineup.

    Starters without their own rating take the team's average in their line.
    Raises :class:`ExcludedGame` when any line has no rated player.
    """
    missing = [line for line in POSITIONS if line not in averages]
    if missing:
        raise ExcludedGame(f"no rated player in line(s) {missing}")
    total = 0.0
    for pid, pos in starters:
        total += ratings[pid] if pid in ratings else averages[pos]
    return total


def goal_stats(fixtures: Iterable[Fixture]) -> tuple[float, float]:
    """Mean and (population) standard deviation of goals per team per game."""
    goals = [g for f in fixtures for g in (f.home_goals, f.away_goals)]
    if not goals:
        raise ValueError("no fixtures to compute goal statistics from")
    arr = np.asarray(goals, dtype=float)
    return float(arr.mean()), float(arr.std())


def rescale_strengths(raw_sums, goal_mean: float, goal_std: float,
                      floor: float = LAMBDA_FLOOR) -> np.ndarray:
    """Affine map matching the raw sums' mean and std to the goal statistics.

    The result is clamped below at ``floor``; constant raw sums all map to
    ``goal_mean``.
    """
    raw = np.asarray(raw_sums, dtype=float)
    if raw.size == 0:
        return raw.copy()
    sd = raw.std()
    if sd == 0 or not np.isfinite(sd):
        return np.full(raw.shape, max(goal_mean, floor))
    lam = goal_mean + goal_std * (raw - raw.mean()) / sd
    return np.maximum(lam, floor)


def _truncation(lam: float, tail: float) -> int:
    # Chernoff bound: P(X >= n) <= exp(-lam) * (e * lam / n) ** n for n > lam.
    n = max(1, math.ceil(lam))
    while True:
        if n > lam and -lam + n * (1 + math.log(lam) - math.log(n)) <= math.log(tail):
            return n
        n += 1


def _poisson_pmf(lam: float, n: int) -> np.ndarray:
    i = np.arange(n)
    lg = np.array([math.lgamma(k + 1.0) for k in range(n)])
    return np.exp(-lam + i * math.log(lam) - lg)


def _p_greater(p: np.ndarray, q: np.ndarray) -> float:
    # P(X > Y) = sum_x p[x] * P(Y <= x - 1)
    cdf_q = np.cumsum(q)
    below = np.concatenate([[0.0], cdf_q[np.minimum(np.arange(len(p) - 1), len(q) - 1)]])
    return float(p @ below)


def skellam_probs(lambda_home: float, lambda_away: float) -> OutcomeForecast:
    """Home/draw/away probabilities for independent Poisson scores.

    Computed by a truncated double sum; each score is cut where its Poisson
    tail is below 1e-12 / 2 and the retained mass is renormalised.
    """
    if not (lambda_home > 0 and lambda_away > 0):
        raise ValueError("Poisson means must be positive")
    n_h = _truncation(lambda_home, TAIL_MASS / 2)
    n_a = _truncation(lambda_away, TAIL_MASS / 2)
    ph = _poisson_pmf(lambda_home, n_h)
    pa = _poisson_pmf(lambda_away, n_a)
    ph /= ph.sum()
    pa /= pa.sum()
    n = min(n_h, n_a)
    draw = float(ph[:n] @ pa[:n])
    home = _p_greater(ph, pa)
    away = _p_greater(pa, ph)
    total = home + draw + away
    return OutcomeForecast(home / total, draw / total, away / total)


def log_loss(forecasts: Sequence[OutcomeForecast], outcomes: Sequence[str]) -> float:
    """Mean negative log-probability of the observed outcomes."""
    if len(forecasts) != len(outcomes):
        raise ValueError("forecasts and outcomes differ in length")
    if not forecasts:
        raise ValueError("no games to score")
    total = 0.0
    clamped = 0
    for f, o in zip(forecasts, outcomes):
        p = f.prob(o)
        if p < PROB_FLOOR:
            clamped += 1
            p = PROB_FLOOR
        total -= math.log(p)
    if clamped:
        warnings.warn(f"{clamped} observed outcome(s) had probability below {PROB_FLOOR}; clamped",
                      RuntimeWarning, stacklevel=2)
    return total / len(forecasts)


def baseline_prior() -> OutcomeForecast:
    return OutcomeForecast(*PRIOR)


@dataclass(frozen=True)
class RatedPlayer:
    player_id: int
    team_id: int
    position: str
    value: float


def starters_by_team(lineups: Iterable[Lineup]) -> dict[tuple[int, int], list[tuple[int, str]]]:
    out: dict[tuple[int, int], list[tuple[int, str]]] = defaultdict(list)
    for lu in lineups:
        if lu.started:
            out[(lu.game_id, lu.team_id)].append((lu.player_id, lu.position))
    return dict(out)


def forecast_games(fixtures: Sequence[Fixture], lineups: Iterable[Lineup],
                   rated: Iterable[RatedPlayer], goal_mean: float, goal_std: float
                   ) -> tuple[list[tuple[Fixture, OutcomeForecast]], list[int]]:
    """Forecast each fixture from a metric over rated players.

    ``rated`` holds one value per eligible player of the calibration period,
    tagged with team and line. Returns the forecasts and the ids of excluded
    games.
    """
    rated = list(rated)
    values = {r.player_id: r.value for r in rated}
    by_team: dict[int, list[tuple[str, float]]] = defaultdict(list)
    for r in rated:
        by_team[r.team_id].append((r.position, r.value))
    averages = {team: line_averages(v) for team, v in by_team.items()}
    starters = starters_by_team(lineups)
    kept, raw, excluded = [], [], []
    for fx in fixtures:
        try:
            sums = [team_strength(starters.get((fx.game_id, team), []), values, averages.get(team, {}))
                    for team in (fx.home_team, fx.away_team)]
        except ExcludedGame:
            excluded.append(fx.game_id)
            continue
        kept.append(fx)
        raw.extend(sums)
    lam = rescale_strengths(raw, goal_mean, goal_std)
    out = [(fx, skellam_probs(lam[2 * i], lam[2 * i + 1])) for i, fx in enumerate(kept)]
    return out, excluded


FORECAST_COLUMNS = ("game_id", "p_home", "p_draw", "p_away", "observed", "neg_log_likelihood")


def write_forecast_report(rows: Sequence[tuple[Fixture, OutcomeForecast]], summary: Mapping[str, float],
                          stream: TextIO) -> None:
    """Per-game forecasts, a blank line, then log loss per setting (ascending)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(FORECAST_COLUMNS)
    for fx, f in rows:
        p = max(f.prob(fx.outcome), PROB_FLOOR)
        writer.writerow([fx.game_id, repr(f.p_home), repr(f.p_draw), repr(f.p_away),
                         fx.outcome, repr(-math.log(p))])
    stream.write("\n")
    writer.writerow(["setting", "log_loss"])
    for name, value in sorted(summary.items(), key=lambda kv: (kv[1], kv[0])):
        writer.writerow([name, f"{value:.4f}"])
