"""Glue from the event log to the analytics layer: collect every
participant's terminal decisions into a label matrix and score the study."""

from __future__ import annotations

from ..agreement import LabelMatrix
from ..report import AgreementReport, build_report
from .export import build_session
from .storage import Store


def study_terminal_data(store: Store, study_id: str):
    """(cells, terminal records) across all assigned participants.

    Cells are keyed by (image filename, participant id): undone decisions
    and postpone events never appear, only each patch's final label.
    """
    config, _status = store.get_study(study_id)
    dataset = store.get_dataset(config.dataset_id)
    filenames = [p.filename for p in dataset.patches]
    cells: dict[tuple[str, str], str] = {}
    terminal = []
    for participant_id in sorted(config.assigned_participants):
        session = build_session(store, study_id, participant_id)
        for patch_index, record_index in session.terminal.items():
            record = session.records[record_index]
            cells[(filenames[patch_index], participant_id)] = record.action.class_name
            terminal.append(record)
    return cells, terminal


def study_report(store: Store, study_id: str,
                 categories: list[str] | None = None) -> AgreementReport:
    """Score a study from its live event log.

    Categories default to the study's configured class set, so classes no
    rater ever chose still show up in the counts table (with zeros).
    """
    config, _status = store.get_study(study_id)
    if categories is None:
        categories = config.mapping.class_names
    cells, terminal = study_terminal_data(store, study_id)
    dataset = store.get_dataset(config.dataset_id)
    matrix = LabelMatrix.from_cells(
        cells,
        items=sorted(p.filename for p in dataset.patches),
        raters=sorted(config.assigned_participants),
    )
    return build_report(matrix, terminal, categories=categories)
