"""Find players with a passing profile close to a target player."""

from __future__ import annotations

import csv
import math
from datetime import date
from typing import Mapping, Sequence, TextIO

import numpy as np

from .valuation import PlayerRating

METRICS = ("contribution_p90", "passes_p90", "pass_accuracy")


def player_vectors(pool: Sequence[PlayerRating]) -> np.ndarray:
    """Min-max scaled (contribution, passes, accuracy) rows, one per player.

    A metric that is constant over the pool scales to 0 for everyone.
    """
    raw = np.array([[getattr(r, m) for m in METRICS] for r in pool], dtype=float).reshape(-1, 3)
    lo, hi = raw.min(axis=0, initial=np.inf), raw.max(axis=0, initial=-np.inf)
    span = np.where(hi > lo, hi - lo, 1.0)
    return np.where(hi > lo, (raw - lo) / span, 0.0)


def similarity(u: np.ndarray, v: np.ndarray) -> float:
    return 1.0 - float(np.linalg.norm(u - v)) / math.sqrt(3.0)


def similar_players(
    target: int,
    pool: Sequence[PlayerRating],
    *,
    born_after: date | None = None,
    birth_dates: Mapping[int, date | None] | None = None,
    min_minutes: float | None = None,
    top_n: int = 5,
) -> list[tuple[int, float]]:
    """Rank candidates by ``1 - ||u - v|| / sqrt(3)`` on normalised metrics.

    Normalisation runs over the candidates that pass the filters plus the
    target; the target itself is never returned. Ties go to the lower id.
    """
    by_id = {r.player_id: r for r in pool}
    if target not in by_id:
        raise KeyError(f"target player {target} not in pool")
    if born_after is not None and birth_dates is None:
        raise ValueError("born_after needs birth_dates")

    def keep(r: PlayerRating) -> bool:
        if r.player_id == target:
            return False
        if min_minutes is not None and r.minutes < min_minutes:
            return False
        if born_after is not None:
            born = birth_dates.get(r.player_id)
            if born is None or born <= born_after:
                return False
        return True

    candidates = sorted((r for r in pool if keep(r)), key=lambda r: r.player_id)
    if not candidates:
        return []
    vecs = player_vectors([by_id[target]] + candidates)
    scores = [(r.player_id, similarity(vecs[0], vecs[i + 1])) for i, r in enumerate(candidates)]
    scores.sort(key=lambda s: (-s[1], s[0]))
    return scores[:top_n]


def write_similar(rows: Sequence[tuple[int, float]], stream: TextIO,
                  names: Mapping[int, str] | None = None, teams: Mapping[int, object] | None = None) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["rank", "player_id", "player", "team", "similarity"])
    for rank, (pid, score) in enumerate(rows, start=1):
        writer.writerow([rank, pid, (names or {}).get(pid, str(pid)), (teams or {}).get(pid, ""),
                         f"{score:.4f}"])
