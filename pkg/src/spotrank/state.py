"""Online per-question state: vote-delta ingestion, incremental maxima, ranking.

One ``QuestionState`` is a single-writer unit: callers must serialize
``apply_event`` per question (different questions are independent).  Reads go
through :meth:`QuestionState.snapshot`, which is immutable.  The cached maxima
make the common all-positive-deltas path O(1); a retraction that touches the
current maximum holder triggers a full rescan.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .scoring import (
    Maxima,
    ScoreBreakdown,
    ScoringConfig,
    VoteTally,
    combined_score,
    effective_maxima,
)


class UnknownQuestionError(ValueError):
    """Event routed to a state holding a different question."""


class NegativeCountError(ValueError):
    """Event would drive an up/down count below zero; the event is rejected."""


@dataclass(frozen=True)
class AnswerEntry:
    answer_id: str
    tally: VoteTally
    created_seq: int


@dataclass(frozen=True)
class VoteEvent:
    """A vote delta.  Retractions are negative deltas; at least one delta is nonzero."""

    question_id: str
    answer_id: str
    up_delta: int
    down_delta: int
    timestamp: int  # milliseconds

    def __post_init__(self):
        if self.up_delta == 0 and self.down_delta == 0:
            raise ValueError("vote event must change at least one count")


@dataclass(frozen=True)
class QuestionSnapshot:
    """Consistent read-only view of a question; later events never mutate it."""

    question_id: str
    entries: tuple[AnswerEntry, ...]
    raw_n_max: int
    raw_u_max: int
    raw_d_max: int
    event_count: int


@dataclass(frozen=True)
class RankedList:
    """Answers in non-increasing combined-score order.

    Ties break by higher up-count, then earlier creation.  ``maxima`` is the
    floored snapshot every breakdown in ``entries`` was scored against.
    """

    entries: tuple[tuple[str, ScoreBreakdown], ...]
    config: ScoringConfig
    maxima: Maxima

    def ids(self) -> tuple[str, ...]:
        return tuple(answer_id for answer_id, _ in self.entries)


def rank_answers(
    answers: Iterable[AnswerEntry],
    config: ScoringConfig,
    raw_maxima: tuple[int, int, int] | None = None,
) -> RankedList:
    """Score and order a batch of answers under one maxima snapshot.

    When ``raw_maxima`` is omitted it is computed from the answers themselves,
    then floored per ``config.n_max_floor``.
    """
    entries = list(answers)
    if raw_maxima is None:
        raw_maxima = scan_maxima(entries)
    maxima = effective_maxima(*raw_maxima, floor=config.n_max_floor)
    scored = [(entry, combined_score(entry.tally, maxima, config)) for entry in entries]
    scored.sort(key=lambda pair: (-pair[1].combined, -pair[0].tally.up, pair[0].created_seq))
    return RankedList(tuple((e.answer_id, b) for e, b in scored), config, maxima)


def scan_maxima(answers: Iterable[AnswerEntry]) -> tuple[int, int, int]:
    """Brute-force (n_max, u_max, d_max) over a collection; (0, 0, 0) when empty."""
    n_max = u_max = d_max = 0
    for entry in answers:
        t = entry.tally
        if t.n > n_max:
            n_max = t.n
        if t.up > u_max:
            u_max = t.up
        if t.down > d_max:
            d_max = t.down
    return (n_max, u_max, d_max)


class QuestionState:
    """All answers of one question plus cached raw vote maxima."""

    def __init__(self, question_id: str):
        self.question_id = question_id
        self._entries: dict[str, AnswerEntry] = {}
        self.raw_n_max = 0
        self.raw_u_max = 0
        self.raw_d_max = 0
        self.event_count = 0
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> tuple[AnswerEntry, ...]:
        return tuple(self._entries.values())

    def tally(self, answer_id: str) -> VoteTally | None:
        entry = self._entries.get(answer_id)
        return entry.tally if entry else None

    def apply_event(self, event: VoteEvent) -> bool:
        """Apply one vote delta; returns True iff any cached maximum changed.

        A True return signals that every answer's spotlight index is stale.
        Unknown answer ids are created on first sight with a zero tally.
        Rejected events (wrong question, count going negative) leave the state
        untouched.
        """
        if event.question_id != self.question_id:
            raise UnknownQuestionError(
                f"event for question {event.question_id!r} applied to {self.question_id!r}"
            )
        existing = self._entries.get(event.answer_id)
        old = existing.tally if existing else VoteTally(0, 0)
        new_up = old.up + event.up_delta
        new_down = old.down + event.down_delta
        if new_up < 0 or new_down < 0:
            raise NegativeCountError(
                f"event would drive answer {event.answer_id!r} to ({new_up}, {new_down})"
            )

        new = VoteTally(new_up, new_down)
        if existing is None:
            self._entries[event.answer_id] = AnswerEntry(event.answer_id, new, self._next_seq)
            self._next_seq += 1
        else:
            self._entries[event.answer_id] = AnswerEntry(
                event.answer_id, new, existing.created_seq
            )
        self.event_count += 1

        before = (self.raw_n_max, self.raw_u_max, self.raw_d_max)
        # a shrinking count only matters if this answer held the cached maximum
        rescan = (
            (new.n < old.n and old.n == self.raw_n_max)
            or (new.up < old.up and old.up == self.raw_u_max)
            or (new.down < old.down and old.down == self.raw_d_max)
        )
        if rescan:
            self.raw_n_max, self.raw_u_max, self.raw_d_max = self.recompute_maxima()
        else:
            if new.n > self.raw_n_max:
                self.raw_n_max = new.n
            if new.up > self.raw_u_max:
                self.raw_u_max = new.up
            if new.down > self.raw_d_max:
                self.raw_d_max = new.down
        return (self.raw_n_max, self.raw_u_max, self.raw_d_max) != before

    def recompute_maxima(self) -> tuple[int, int, int]:
        """Full-scan raw maxima, independent of the caches (for checks and rescans)."""
        return scan_maxima(self._entries.values())

    def rank(self, config: ScoringConfig) -> RankedList:
        """Rank all answers under the current maxima, floored per config."""
        return rank_answers(
            self._entries.values(),
            config,
            (self.raw_n_max, self.raw_u_max, self.raw_d_max),
        )

    def snapshot(self) -> QuestionSnapshot:
        return QuestionSnapshot(
            self.question_id,
            tuple(self._entries.values()),
            self.raw_n_max,
            self.raw_u_max,
            self.raw_d_max,
            self.event_count,
        )
