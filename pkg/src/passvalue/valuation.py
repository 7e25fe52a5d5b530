"""Pass values as expected-reward differences, and per-90 player ratings."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

from .events import Event
from .knn_index import ClusterIndex, expected_reward, mean_of_first, nearest_labels
from .possession import Subsequence, enumerate_subsequences, pass_success, segment_possessions
from .traj import interpolate

PASS_VALUE_COLUMNS = ("game_id", "sequence_id", "pass_index", "player_id", "before", "after", "value")
RATING_COLUMNS = ("player_id", "player_name", "team", "position", "minutes",
                  "contribution_p90", "passes_p90", "pass_accuracy")


@dataclass(frozen=True, slots=True)
class PassValue:
    game_id: int
    sequence_id: int
    pass_index: int
    player_id: int
    before: float
    after: float
    value: float
    successful: bool = True


@dataclass(frozen=True, slots=True)
class PlayerRating:
    player_id: int
    contribution_p90: float
    total_value: float
    minutes: float
    passes_p90: float
    pass_accuracy: float
    n_passes: int
    position: str = ""
    team_id: int | None = None
    name: str = ""


def value_pass(index: ClusterIndex, sub_before: Subsequence | None, sub_after: Subsequence,
               successful: bool, k: int = 10) -> PassValue:
    """Value the pass that ends ``sub_after``.

    The reward before a sequence's first pass is zero, and so is the reward
    after an unsuccessful pass.
    """
    before = 0.0 if sub_before is None else expected_reward(index, sub_before, k)
    after = expected_reward(index, sub_after, k) if successful else 0.0
    p = sub_after.last_pass
    return PassValue(p.game_id, sub_after.parent, sub_after.pass_index, p.player_id,
                     before, after, after - before, successful)


def value_game_multi(index: ClusterIndex, events: Sequence[Event], ks: Sequence[int], *,
                     leave_one_out: bool = False, stats: dict | None = None) -> dict[int, list[PassValue]]:
    """Pass values of one game for several ``k`` at once.

    Each subsequence is searched once; the expected reward after pass ``i``
    is reused as the reward before pass ``i + 1``.
    """
    out: dict[int, list[PassValue]] = {k: [] for k in ks}
    fallback = index.global_mean_label
    for seq in segment_possessions(events):
        subs = enumerate_subsequences(seq)
        if not subs:
            continue
        pass_pos = seq.pass_indices
        ok = [pass_success(seq, i) for i in pass_pos]
        before = {k: 0.0 for k in ks}
        exclude = seq.sequence_id if leave_one_out else None
        for sub, success in zip(subs, ok):
            if success:
                labels = nearest_labels(index, interpolate(sub.events, index.final_duration),
                                        index.key_for(sub), exclude=exclude, stats=stats)
                after = {k: mean_of_first(labels, k, fallback) for k in ks}
            else:
                after = {k: 0.0 for k in ks}
            p = sub.last_pass
            for k in ks:
                out[k].append(PassValue(p.game_id, seq.sequence_id, sub.pass_index, p.player_id,
                                        before[k], after[k], after[k] - before[k], success))
            before = after
    return out


def value_game(index: ClusterIndex, events: Sequence[Event], k: int = 10, **kwargs) -> list[PassValue]:
    """One :class:`PassValue` per pass of the game, credited to the passer."""
    return value_game_multi(index, events, [k], **kwargs)[k]


def rate_players(
    pass_values: Iterable[PassValue],
    minutes: Mapping[int, float],
    min_minutes: float = 900.0,
    *,
    positions: Mapping[int, str] | None = None,
    teams: Mapping[int, int] | None = None,
    names: Mapping[int, str] | None = None,
) -> list[PlayerRating]:
    """Sum pass values per player and normalise per 90 minutes.

    Players with fewer than ``min_minutes`` are dropped. Output is sorted by
    contribution (descending), then player id.
    """
    total: dict[int, float] = defaultdict(float)
    count: dict[int, int] = defaultdict(int)
    good: dict[int, int] = defaultdict(int)
    for pv in pass_values:
        total[pv.player_id] += pv.value
        count[pv.player_id] += 1
        good[pv.player_id] += int(pv.successful)
    ratings = []
    for pid in sorted(count):
        mins = minutes.get(pid, 0.0)
        if mins <= 0:
            raise ValueError(f"player {pid} has pass values but no recorded minutes")
        if mins < min_minutes:
            continue
        ratings.append(PlayerRating(
            pid, total[pid] * 90.0 / mins, total[pid], mins, count[pid] * 90.0 / mins,
            good[pid] / count[pid], count[pid],
            (positions or {}).get(pid, ""), (teams or {}).get(pid), (names or {}).get(pid, "")))
    ratings.sort(key=lambda r: (-r.contribution_p90, r.player_id))
    return ratings


def write_pass_values(values: Iterable[PassValue], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PASS_VALUE_COLUMNS + ("successful",))
    for v in values:
        writer.writerow([v.game_id, v.sequence_id, v.pass_index, v.player_id,
                         repr(v.before), repr(v.after), repr(v.value), int(v.successful)])


def read_pass_values(stream: TextIO) -> list[PassValue]:
    out = []
    for row in csv.DictReader(stream):
        out.append(PassValue(int(row["game_id"]), int(row["sequence_id"]), int(row["pass_index"]),
                             int(row["player_id"]), float(row["before"]), float(row["after"]),
                             float(row["value"]), bool(int(row.get("successful") or 1))))
    return out


def write_ratings(ratings: Iterable[PlayerRating], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RATING_COLUMNS + ("total_value", "passes", "value_per_pass"))
    for r in ratings:
        writer.writerow([r.player_id, r.name or str(r.player_id), "" if r.team_id is None else r.team_id,
                         r.position, repr(r.minutes), repr(r.contribution_p90), repr(r.passes_p90),
                         repr(r.pass_accuracy), repr(r.total_value), r.n_passes,
                         repr(r.total_value / r.n_passes if r.n_passes else 0.0)])


def read_ratings(stream: TextIO) -> list[PlayerRating]:
    out = []
    for row in csv.DictReader(stream):
        out.append(PlayerRating(
            int(row["player_id"]), float(row["contribution_p90"]), float(row.get("total_value") or 0.0),
            float(row["minutes"]), float(row["passes_p90"]), float(row["pass_accuracy"]),
            int(row.get("passes") or 0), row["position"],
            int(row["team"]) if row["team"] else None, row["player_name"]))
    return out
