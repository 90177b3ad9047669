"""CSV export of annotation results (RFC 4180, UTF-8, LF line endings).

Default mode writes one row per (participant, patch) terminal decision.
History mode writes every decision event, including postpones and undone
decisions. Either way row order is deterministic, so re-exporting an
unchanged study is byte-identical.
"""

from __future__ import annotations

import csv
import io

from ..model import StudyMode
from ..report import EXPORT_COLUMNS
from ..session import AnnotationRecord, AnnotationSession
from ..timefmt import format_utc_ms
from .storage import Store


def build_session(store: Store, study_id: str, participant_id: str
                  ) -> AnnotationSession:
    """Replay one participant's event log into a session."""
    config, _status = store.get_study(study_id)
    dataset = store.get_dataset(config.dataset_id)
    ground_truth = None
    if config.mode is StudyMode.TRAINING:
        ground_truth = [p.ground_truth for p in dataset.patches]
    return AnnotationSession.replay(
        store.events_for_session(study_id, participant_id),
        study_id=study_id,
        participant_id=participant_id,
        n_items=len(dataset.patches),
        mapping=config.mapping,
        mode=config.mode,
        ground_truth=ground_truth,
        patch_ids=[p.patch_id for p in dataset.patches],
    )


def _row(record: AnnotationRecord, filename: str) -> list[str]:
    def boolean(value):
        return "true" if value else "false"

    return [
        record.study_id,
        record.participant_id,
        filename,
        str(record.sequence_index),
        str(record.presentation_index),
        record.direction.value,
        record.action.class_name or "",
        format_utc_ms(record.presented_at),
        format_utc_ms(record.decided_at),
        "" if record.duration_ms is None else str(record.duration_ms),
        str(record.postpone_count),
        str(record.undo_generation),
        boolean(record.undone),
        record.device_type.value,
        "" if record.training_correct is None else boolean(record.training_correct),
    ]


def export_csv(store: Store, study_id: str, include_history: bool = False
               ) -> tuple[bytes, list[str]]:
    """CSV bytes plus warnings. A study without annotations yields the
    header-only file and a warning rather than an error."""
    config, _status = store.get_study(study_id)
    dataset = store.get_dataset(config.dataset_id)
    filenames = [p.filename for p in dataset.patches]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EXPORT_COLUMNS)

    rows = 0
    for participant_id in sorted(config.assigned_participants):
        session = build_session(store, study_id, participant_id)
        if include_history:
            records = sorted(session.records,
                             key=lambda r: (r.sequence_index, r.presentation_index))
        else:
            records = sorted((session.records[i] for i in session.terminal.values()),
                             key=lambda r: r.sequence_index)
        for record in records:
            writer.writerow(_row(record, filenames[record.patch_index]))
            rows += 1

    warnings = [] if rows else [f"study {study_id!r} has no annotations"]
    return buf.getvalue().encode("utf-8"), warnings
