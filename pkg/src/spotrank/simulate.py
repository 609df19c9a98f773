"""Deterministic vote-stream simulation and ranking-stability metrics.

The stream generator is fully seeded so a (spec, scorers, cadence) triple
always yields the same trajectory, byte for byte.  Randomness comes from
splitmix64, a tiny portable 64-bit generator; each event draws two uniforms
from a single stream seeded with ``spec.seed``: the first picks the answer by
arrival weight, the second picks the vote direction against the answer's
up-probability.

Stability is quantified with Kendall tau-a over adjacent ranking snapshots
(rankings are strict total orders after tie-breaking, so no tie handling is
needed) plus cross-scorer agreement on the final ranking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .scoring import ScoringConfig, validate_config
from .state import QuestionState, RankedList, VoteEvent

SIM_QUESTION_ID = "sim"

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64: one additive step plus a 3-stage mix, all mod 2**64."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # top 53 bits -> uniform dyadic rational in [0, 1)
        return (self.next_u64() >> 11) * 2.0**-53


class RankingMismatchError(ValueError):
    """The two rankings are not permutations of the same id set."""


class TooFewElementsError(ValueError):
    """Kendall tau needs at least two elements."""


class TooFewSnapshotsError(ValueError):
    """Stability needs at least two recorded snapshots."""


@dataclass(frozen=True)
class AnswerProfile:
    """Ground-truth behaviour of one simulated answer."""

    answer_id: str
    up_probability: float
    arrival_weight: float

    def __post_init__(self):
        if not 0.0 <= self.up_probability <= 1.0:
            raise ValueError(f"up_probability must be in [0, 1], got {self.up_probability}")
        if not self.arrival_weight > 0.0:
            raise ValueError(f"arrival_weight must be positive, got {self.arrival_weight}")


@dataclass(frozen=True)
class StreamSpec:
    profiles: tuple[AnswerProfile, ...]
    total_events: int
    seed: int

    def __post_init__(self):
        if not self.profiles:
            raise ValueError("at least one answer profile is required")
        ids = [p.answer_id for p in self.profiles]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate answer_id in profiles")
        if self.total_events < 1:
            raise ValueError("total_events must be positive")


@dataclass(frozen=True)
class TrajectorySnapshot:
    event_index: int  # number of events applied when the snapshot was taken
    rankings: Mapping[str, RankedList]  # scorer label -> ranking


@dataclass(frozen=True, eq=False)
class Trajectory:
    snapshots: tuple[TrajectorySnapshot, ...]
    final_state: QuestionState
    scorer_labels: tuple[str, ...]


@dataclass(frozen=True)
class ScorerStability:
    mean_adjacent_tau: float
    rank_one_changes: int


@dataclass(frozen=True)
class StabilityReport:
    per_scorer: Mapping[str, ScorerStability]
    agreement: Mapping[tuple[str, str], float]  # final-ranking tau per scorer pair


def generate_events(spec: StreamSpec) -> list[VoteEvent]:
    """The seeded single-vote event stream; timestamp = event index in ms."""
    rng = SplitMix64(spec.seed)
    weights = [p.arrival_weight for p in spec.profiles]
    total_weight = sum(weights)
    events = []
    for i in range(spec.total_events):
        pick = rng.next_float() * total_weight
        chosen = spec.profiles[-1]
        acc = 0.0
        for profile, w in zip(spec.profiles, weights):
            acc += w
            if pick < acc:
                chosen = profile
                break
        is_up = rng.next_float() < chosen.up_probability
        events.append(
            VoteEvent(
                question_id=SIM_QUESTION_ID,
                answer_id=chosen.answer_id,
                up_delta=1 if is_up else 0,
                down_delta=0 if is_up else 1,
                timestamp=i,
            )
        )
    return events


def simulate(
    spec: StreamSpec,
    scorers: Mapping[str, ScoringConfig],
    cadence: int = 100,
) -> Trajectory:
    """Run the stream through a question state, ranking at a fixed cadence.

    Rankings are recorded after every ``cadence``-th event and after the final
    one.  Identical inputs always produce identical trajectories.
    """
    if not scorers:
        raise ValueError("at least one scorer is required")
    if cadence < 1:
        raise ValueError("cadence must be positive")
    for config in scorers.values():
        validate_config(config)

    state = QuestionState(SIM_QUESTION_ID)
    snapshots = []
    for i, event in enumerate(generate_events(spec), start=1):
        state.apply_event(event)
        if i % cadence == 0 or i == spec.total_events:
            rankings = {label: state.rank(config) for label, config in scorers.items()}
            snapshots.append(TrajectorySnapshot(i, rankings))
    return Trajectory(tuple(snapshots), state, tuple(scorers))


def kendall_tau(ranking_a: Sequence[str], ranking_b: Sequence[str]) -> float:
    """Tau-a rank correlation: (concordant - discordant) / (m*(m-1)/2).

    Both rankings must be permutations of the same id set with >= 2 elements.
    """
    m = len(ranking_a)
    if len(set(ranking_a)) != m or set(ranking_a) != set(ranking_b) or len(ranking_b) != m:
        raise RankingMismatchError("rankings must be permutations of one id set")
    if m < 2:
        raise TooFewElementsError("kendall tau needs at least 2 elements")
    position_b = {answer_id: i for i, answer_id in enumerate(ranking_b)}
    perm = [position_b[answer_id] for answer_id in ranking_a]
    discordant = sum(
        1 for i in range(m) for j in range(i + 1, m) if perm[i] > perm[j]
    )
    total = m * (m - 1) // 2
    return 1.0 - 2.0 * discordant / total


def _tau_or_one(ids_a: Sequence[str], ids_b: Sequence[str]) -> float:
    """Adjacent-snapshot tau over the common id set; vacuously 1.0 below 2 ids.

    Answers appear as the stream runs, so consecutive snapshots may not rank
    the same set; the comparison is restricted to ids present in both.
    """
    common = set(ids_a) & set(ids_b)
    if len(common) < 2:
        return 1.0
    return kendall_tau(
        [i for i in ids_a if i in common],
        [i for i in ids_b if i in common],
    )


def stability_report(trajectory: Trajectory) -> StabilityReport:
    """Aggregate adjacent-snapshot stability and cross-scorer final agreement."""
    snaps = trajectory.snapshots
    if len(snaps) < 2:
        raise TooFewSnapshotsError("need at least 2 snapshots to measure stability")

    per_scorer = {}
    for label in trajectory.scorer_labels:
        taus = []
        changes = 0
        for prev, cur in zip(snaps, snaps[1:]):
            ids_prev = prev.rankings[label].ids()
            ids_cur = cur.rankings[label].ids()
            taus.append(_tau_or_one(ids_prev, ids_cur))
            if ids_prev and ids_cur and ids_prev[0] != ids_cur[0]:
                changes += 1
        per_scorer[label] = ScorerStability(sum(taus) / len(taus), changes)

    final = snaps[-1].rankings
    agreement = {}
    labels = trajectory.scorer_labels
    for i, label_a in enumerate(labels):
        for label_b in labels[i + 1 :]:
            agreement[(label_a, label_b)] = _tau_or_one(
                final[label_a].ids(), final[label_b].ids()
            )
    return StabilityReport(per_scorer, agreement)
