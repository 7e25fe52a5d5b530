"""Possession sequences and their pass-terminated subsequences."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence, TextIO

from .events import MARKER_KINDS, Event, EventKind, SubKind

SEQUENCE_COLUMNS = ("sequence_id", "game_id", "team_id", "first_event_index",
                    "last_event_index", "terminal_reason", "label")
# Sequence ids are game_id * SEQ_ID_STRIDE + ordinal within the game.
SEQ_ID_STRIDE = 100_000


class TerminalReason(str, Enum):
    TURNOVER = "Turnover"
    GOAL = "Goal"
    FOUL = "Foul"
    BALL_OUT = "BallOut"
    HALF_END = "HalfEnd"


@dataclass(frozen=True, slots=True)
class PossessionSequence:
    sequence_id: int
    game_id: int
    team_id: int
    events: tuple[Event, ...]
    terminal_reason: TerminalReason
    first_event_index: int
    label: float = 0.0

    @property
    def last_event_index(self) -> int:
        return self.first_event_index + len(self.events) - 1

    @property
    def final_action_index(self) -> int:
        """Position of the last event that is not a stoppage marker, or -1."""
        for i in range(len(self.events) - 1, -1, -1):
            if self.events[i].kind not in MARKER_KINDS:
                return i
        return -1

    @property
    def final_shot(self) -> Event | None:
        i = self.final_action_index
        if i >= 0 and self.events[i].kind is EventKind.SHOT:
            return self.events[i]
        return None

    @property
    def pass_indices(self) -> list[int]:
        return [i for i, e in enumerate(self.events) if e.kind is EventKind.PASS]


@dataclass(frozen=True, slots=True)
class Subsequence:
    parent: int
    pass_index: int
    events: tuple[Event, ...]
    label: float = 0.0

    @property
    def game_id(self) -> int:
        return self.events[0].game_id

    @property
    def last_pass(self) -> Event:
        return self.events[-1]


def segment_possessions(events: Sequence[Event]) -> list[PossessionSequence]:
    """Split one game's ordered events into same-team possession sequences.

    A sequence ends when the other team acts (turnover, or foul when the
    other team's event is a foul), when the acting team scores, fouls, puts
    the ball out of play or shoots, and at the end of each half. A shot may
    absorb an immediately following goal or ball-out marker by the same team.
    """
    seqs: list[PossessionSequence] = []
    cur: list[Event] = []
    first = 0
    closing = False  # a shot was taken; only trailing markers may join

    def close(reason: TerminalReason) -> None:
        nonlocal cur, closing
        if cur:
            e0 = cur[0]
            seqs.append(PossessionSequence(
                e0.game_id * SEQ_ID_STRIDE + len(seqs), e0.game_id, e0.team_id,
                tuple(cur), reason, first))
        cur = []
        closing = False

    for i, e in enumerate(events):
        if cur:
            head = cur[0]
            if e.half != head.half:
                close(TerminalReason.HALF_END)
            elif e.team_id != head.team_id:
                close(TerminalReason.FOUL if e.kind is EventKind.FOUL else TerminalReason.TURNOVER)
            elif closing:
                if e.kind is EventKind.GOAL:
                    cur.append(e)
                    close(TerminalReason.GOAL)
                    continue
                if e.kind is EventKind.BALL_OUT:
                    cur.append(e)
                    close(TerminalReason.BALL_OUT)
                    continue
                # Rebound play by the shooting team opens a new sequence.
                close(TerminalReason.TURNOVER)
        if not cur:
            first = i
        cur.append(e)
        if e.kind is EventKind.GOAL:
            close(TerminalReason.GOAL)
        elif e.kind is EventKind.BALL_OUT:
            close(TerminalReason.BALL_OUT)
        elif e.kind is EventKind.FOUL:
            close(TerminalReason.FOUL)
        elif e.kind is EventKind.SHOT:
            closing = True
    close(TerminalReason.HALF_END)
    return seqs


def pass_success(seq: PossessionSequence, i: int) -> bool:
    """Whether the pass at position ``i`` of ``seq`` kept the ball.

    Success is inferred from possession flow. A pass followed by any other
    action of the same sequence succeeded. A pass that is the sequence's
    final action failed on a turnover, on the ball leaving play, and on a
    foul by the passing team (offside); it succeeded when the opponent
    fouled, a goal followed, or the half ended.
    """
    ev = seq.events[i]
    if ev.kind is not EventKind.PASS:
        raise ValueError(f"event {i} of sequence {seq.sequence_id} is {ev.kind.value}, not a pass")
    if i != seq.final_action_index:
        return True
    reason = seq.terminal_reason
    if reason in (TerminalReason.TURNOVER, TerminalReason.BALL_OUT):
        return False
    if reason is TerminalReason.FOUL:
        last = seq.events[-1]
        return not (last.kind is EventKind.FOUL and last.team_id == ev.team_id)
    return True


def enumerate_subsequences(seq: PossessionSequence) -> list[Subsequence]:
    return [Subsequence(seq.sequence_id, n, seq.events[: i + 1], seq.label)
            for n, i in enumerate(seq.pass_indices)]


def label_sequences(seqs: Iterable[PossessionSequence], xg_model) -> list[PossessionSequence]:
    """Attach the xG of each sequence's final shot (0 for shotless sequences)."""
    from .xg import shot_probabilities

    seqs = list(seqs)
    shots = [(i, s.final_shot) for i, s in enumerate(seqs) if s.final_shot is not None]
    labels = [0.0] * len(seqs)
    if shots:
        probs = shot_probabilities(xg_model, [shot for _, shot in shots])
        for (i, _), p in zip(shots, probs):
            labels[i] = min(max(float(p), 0.0), 1.0)
    return [replace(s, label=lab) if lab else s for s, lab in zip(seqs, labels)]


def is_penalty(e: Event) -> bool:
    return e.kind is EventKind.SHOT and e.subkind is SubKind.PENALTY


def write_sequences(seqs: Iterable[PossessionSequence], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SEQUENCE_COLUMNS)
    for s in seqs:
        writer.writerow([s.sequence_id, s.game_id, s.team_id, s.first_event_index,
                         s.last_event_index, s.terminal_reason.value, repr(s.label)])
