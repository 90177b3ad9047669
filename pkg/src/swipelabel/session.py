"""Per-participant annotation session: deterministic deck order, next-item
delivery, swipe submission, postpone queue, undo, and resume.

The session is event-sourced. Every command validates its preconditions,
builds one event, and applies it through the same fold that replay uses, so
a session reconstructed from its event log is identical to the live one by
construction. Nothing is ever deleted: undo appends an event that marks an
earlier decision as undone.

Deck semantics: items come from the shuffled primary deck first, then from
the postpone queue in postpone order. A patch undone via "go back" jumps to
the front (most recently undone first). At every point each patch sits in
exactly one of four places: terminally labeled, pending in the primary deck
at or after the cursor, in the postpone queue, or on the undo-restore stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Sequence

from .errors import (
    NoOutstandingPresentation,
    NothingToUndo,
    PostponeNotConfigured,
    SessionClosed,
    UnassignedDirection,
    UndoDisabled,
)
from .model import (
    ActionKind,
    DeviceType,
    DirectionAction,
    DirectionMapping,
    StudyMode,
    SwipeDirection,
)
from .ordering import build_order
from .timefmt import format_utc_ms, parse_utc_ms, utcnow

# Durations beyond an hour mean the participant walked away or a clock is
# wrong; they are dropped from timing statistics rather than skewing them.
MAX_DURATION_MS = 3_600_000

PRESENTED = "presented"
DECIDED = "decided"
UNDONE = "undone"


@dataclass(frozen=True)
class SessionEvent:
    """One append-only log entry; payload is JSON-safe."""

    kind: str
    payload: dict


@dataclass(frozen=True)
class Presentation:
    patch_index: int
    presentation_index: int
    presented_at: datetime
    source: str  # "primary" | "queue" | "restore"


@dataclass
class AnnotationRecord:
    """One swipe decision, including postpones and later-undone decisions."""

    study_id: str
    participant_id: str
    patch_id: str
    patch_index: int
    sequence_index: int
    presentation_index: int
    direction: SwipeDirection
    action: DirectionAction
    presented_at: datetime
    decided_at: datetime
    duration_ms: int | None
    duration_clamped: bool
    postpone_count: int
    undo_generation: int
    device_type: DeviceType
    training_correct: bool | None
    undone: bool = False


@dataclass(frozen=True)
class SubmitResult:
    record: AnnotationRecord
    reveal: str | None  # ground-truth label, training mode only


class AnnotationSession:
    """Event-sourced session state for one (study, participant) pair."""

    def __init__(self, study_id: str, participant_id: str, n_items: int,
                 mapping: DirectionMapping | None = None,
                 mode: StudyMode = StudyMode.ANNOTATION,
                 ground_truth: Sequence[str | None] | None = None,
                 patch_ids: Sequence[str] | None = None,
                 closed: bool = False,
                 clock: Callable[[], datetime] = utcnow):
        self.study_id = study_id
        self.participant_id = participant_id
        self.n_items = n_items
        self.mapping = mapping or DirectionMapping.default()
        self.mode = mode
        self.ground_truth = list(ground_truth) if ground_truth else None
        self.patch_ids = list(patch_ids) if patch_ids else None
        self.closed = closed
        self.clock = clock

        self.order = build_order(study_id, participant_id, n_items)
        self.sequence_of = {patch: seq for seq, patch in enumerate(self.order)}

        self.cursor = 0
        self.postpone_queue: list[int] = []
        self.restore_stack: list[int] = []
        self.records: list[AnnotationRecord] = []
        self.terminal: dict[int, int] = {}     # patch index -> record index
        self.postpones: dict[int, int] = {}    # effective (non-undone) postpones
        self.undo_counts: dict[int, int] = {}
        self.outstanding: Presentation | None = None
        self.presentation_counter = 0
        self.events: list[SessionEvent] = []

    @classmethod
    def replay(cls, events: Sequence[SessionEvent], **kwargs) -> "AnnotationSession":
        """Reconstruct a session by folding its event log."""
        session = cls(**kwargs)
        for event in events:
            session._apply(event)
        return session

    # -- derived state ---------------------------------------------------

    @property
    def completed(self) -> bool:
        return len(self.terminal) == self.n_items

    def progress(self) -> dict:
        return {
            "total": self.n_items,
            "labeled": len(self.terminal),
            "postpone_remaining": len(self.postpone_queue),
            "completed": self.completed,
        }

    def patch_id_for(self, patch_index: int) -> str:
        if self.patch_ids is not None:
            return self.patch_ids[patch_index]
        return str(patch_index)

    def _next_source(self) -> tuple[str, int] | None:
        if self.restore_stack:
            return "restore", self.restore_stack[-1]
        if self.cursor < self.n_items:
            return "primary", self.order[self.cursor]
        if self.postpone_queue:
            return "queue", self.postpone_queue[0]
        return None

    # -- commands ----------------------------------------------------------

    def next_item(self, presented_at: datetime | None = None) -> Presentation | None:
        """The patch to show now, or None when the session is complete.

        Idempotent while a presentation is outstanding: asking again (page
        reload, resume) re-delivers the same presentation without logging a
        new one.
        """
        if self.closed:
            raise SessionClosed(f"study {self.study_id!r} is closed")
        if self.outstanding is not None:
            return self.outstanding
        source = self._next_source()
        if source is None:
            return None
        source_name, patch = source
        event = SessionEvent(PRESENTED, {
            "patch_index": patch,
            "presentation_index": self.presentation_counter,
            "presented_at": format_utc_ms(presented_at or self.clock()),
            "source": source_name,
        })
        self._apply(event)
        return self.outstanding

    def submit(self, direction: SwipeDirection,
               decided_at: datetime | None = None,
               client_duration_ms: int | None = None,
               device_type: DeviceType = DeviceType.UNKNOWN) -> SubmitResult:
        """Record the decision for the outstanding presentation."""
        if self.closed:
            raise SessionClosed(f"study {self.study_id!r} is closed")
        if self.outstanding is None:
            raise NoOutstandingPresentation(
                "no presentation awaiting a decision; fetch the next item first")
        action = self.mapping.action_for(direction)
        if action.kind is ActionKind.UNASSIGNED:
            raise UnassignedDirection(
                f"direction {direction.value!r} is not assigned in this study")

        presented = self.outstanding
        patch = presented.patch_index
        decided_at = decided_at or self.clock()
        duration_ms, clamped = self._duration(
            presented.presented_at, decided_at, client_duration_ms)
        if decided_at < presented.presented_at:
            # keep the record well-ordered; the suspect duration is already
            # flagged above
            decided_at = presented.presented_at

        training_correct = None
        reveal = None
        if self.mode is StudyMode.TRAINING and action.kind is ActionKind.LABEL:
            truth = self.ground_truth[patch] if self.ground_truth else None
            if truth is None:
                raise ValueError(f"training study lacks ground truth for patch {patch}")
            training_correct = action.class_name == truth
            reveal = truth

        postpone_count = self.postpones.get(patch, 0)
        if action.kind is ActionKind.POSTPONE:
            postpone_count += 1

        event = SessionEvent(DECIDED, {
            "patch_index": patch,
            "sequence_index": self.sequence_of[patch],
            "presentation_index": presented.presentation_index,
            "source": presented.source,
            "direction": direction.value,
            "action": action.kind.value,
            "label": action.class_name,
            "presented_at": format_utc_ms(presented.presented_at),
            "decided_at": format_utc_ms(decided_at),
            "duration_ms": duration_ms,
            "duration_clamped": clamped,
            "device_type": device_type.value,
            "postpone_count": postpone_count,
            "undo_generation": self.undo_counts.get(patch, 0),
            "training_correct": training_correct,
        })
        self._apply(event)
        return SubmitResult(record=self.records[-1], reveal=reveal)

    def request_postpone(self, **kwargs) -> SubmitResult:
        """Explicit postpone (UI button rather than a swipe)."""
        direction = self.mapping.postpone_direction
        if direction is None:
            raise PostponeNotConfigured("this study has no postpone direction")
        return self.submit(direction, **kwargs)

    def undo(self, undone_at: datetime | None = None) -> int:
        """Mark the most recent still-standing decision as undone and queue
        its patch for immediate re-presentation. Returns the patch index."""
        if self.closed:
            raise SessionClosed(f"study {self.study_id!r} is closed")
        target = None
        for idx in range(len(self.records) - 1, -1, -1):
            if not self.records[idx].undone:
                target = idx
                break
        if target is None:
            raise NothingToUndo("no decision to undo")
        if self.mode is StudyMode.TRAINING and any(
                r.action.kind is ActionKind.LABEL for r in self.records):
            raise UndoDisabled("undo is disabled once a correct answer was revealed")
        event = SessionEvent(UNDONE, {
            "record_index": target,
            "undone_at": format_utc_ms(undone_at or self.clock()),
        })
        self._apply(event)
        return self.records[target].patch_index

    # -- shared fold -------------------------------------------------------

    def _apply(self, event: SessionEvent) -> None:
        handler = {PRESENTED: self._apply_presented,
                   DECIDED: self._apply_decided,
                   UNDONE: self._apply_undone}[event.kind]
        handler(event.payload)
        self.events.append(event)

    def _apply_presented(self, p: dict) -> None:
        self.outstanding = Presentation(
            patch_index=p["patch_index"],
            presentation_index=p["presentation_index"],
            presented_at=parse_utc_ms(p["presented_at"]),
            source=p["source"],
        )
        self.presentation_counter = p["presentation_index"] + 1

    def _apply_decided(self, p: dict) -> None:
        patch = p["patch_index"]
        action = (DirectionAction.label(p["label"])
                  if p["action"] == ActionKind.LABEL.value
                  else DirectionAction.postpone())
        record = AnnotationRecord(
            study_id=self.study_id,
            participant_id=self.participant_id,
            patch_id=self.patch_id_for(patch),
            patch_index=patch,
            sequence_index=p["sequence_index"],
            presentation_index=p["presentation_index"],
            direction=SwipeDirection(p["direction"]),
            action=action,
            presented_at=parse_utc_ms(p["presented_at"]),
            decided_at=parse_utc_ms(p["decided_at"]),
            duration_ms=p["duration_ms"],
            duration_clamped=p["duration_clamped"],
            postpone_count=p["postpone_count"],
            undo_generation=p["undo_generation"],
            device_type=DeviceType(p["device_type"]),
            training_correct=p["training_correct"],
        )
        self.records.append(record)

        source = p["source"]
        if source == "primary":
            self.cursor += 1
        elif source == "queue":
            self.postpone_queue.pop(0)
        else:
            self.restore_stack.pop()

        if action.kind is ActionKind.LABEL:
            self.terminal[patch] = len(self.records) - 1
        else:
            self.postpone_queue.append(patch)
            self.postpones[patch] = self.postpones.get(patch, 0) + 1
        self.outstanding = None

    def _apply_undone(self, p: dict) -> None:
        record = self.records[p["record_index"]]
        record.undone = True
        patch = record.patch_index
        self.undo_counts[patch] = self.undo_counts.get(patch, 0) + 1
        if record.action.kind is ActionKind.LABEL:
            if self.terminal.get(patch) == p["record_index"]:
                del self.terminal[patch]
        else:
            self.postpones[patch] -= 1
        # the patch jumps to the front wherever it currently waits
        if patch in self.postpone_queue:
            self.postpone_queue.remove(patch)
        if patch in self.restore_stack:
            self.restore_stack.remove(patch)
        self.restore_stack.append(patch)
        # any outstanding presentation is abandoned; its patch stays in
        # whatever bucket it was presented from
        self.outstanding = None

    # -- integrity ---------------------------------------------------------

    def check_invariants(self) -> None:
        """Raise AssertionError if the four-way patch partition is broken."""
        terminal = set(self.terminal)
        pending = {self.order[i] for i in range(self.cursor, self.n_items)}
        queued = set(self.postpone_queue)
        restoring = set(self.restore_stack)
        buckets = [terminal, pending, queued, restoring]
        total = sum(len(b) for b in buckets)
        assert total == self.n_items, \
            f"partition counts {[len(b) for b in buckets]} do not sum to {self.n_items}"
        union = terminal | pending | queued | restoring
        assert union == set(range(self.n_items)), "partition does not cover the deck"
        assert len(self.postpone_queue) == len(queued), "duplicate in postpone queue"
        assert len(self.restore_stack) == len(restoring), "duplicate in restore stack"
        assert sorted(self.order) == list(range(self.n_items)), "order not a permutation"
        if self.outstanding is not None:
            patch = self.outstanding.patch_index
            assert patch in pending | queued | restoring, \
                "outstanding patch missing from its source bucket"
        indices = [r.presentation_index for r in self.records]
        assert indices == sorted(indices) and len(set(indices)) == len(indices), \
            "presentation indices not strictly increasing"

    @staticmethod
    def _duration(presented_at: datetime, decided_at: datetime,
                  client_duration_ms: int | None) -> tuple[int | None, bool]:
        """Client monotonic duration wins; server timestamp difference is the
        fallback; negative or > 1 h values are dropped and flagged."""
        if client_duration_ms is not None:
            if 0 <= client_duration_ms <= MAX_DURATION_MS:
                return int(client_duration_ms), False
            return None, True
        derived = round((decided_at - presented_at).total_seconds() * 1000)
        if 0 <= derived <= MAX_DURATION_MS:
            return derived, False
        return None, True
