"""Agreement report assembly and rendering.

Builds the full study report (pairwise percent agreement and Cohen's kappa,
Fleiss' kappa across all raters, per-rater timing means, per-class counts)
from a complete label matrix plus terminal annotation records, and renders it
as a plain-text table set or a JSON document. Also reads annotation CSV files
in the export schema back into scoreable form, so reports can be produced
from exported files alone.

Display rounding is half-up (percent and Cohen's kappa to 2 decimals,
Fleiss' kappa to 3, timing to 2); exact double-precision values are kept
internally and in the JSON output.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from itertools import combinations
from typing import Iterable, Sequence

from .agreement import LabelMatrix, cohen_kappa, fleiss_kappa, percent_agreement
from .errors import DegenerateMarginals, NoRecords

# Column order of the annotation export CSV. The export writer and this
# module's reader must agree bit-for-bit.
EXPORT_COLUMNS = (
    "study_id",
    "participant_id",
    "image_filename",
    "sequence_index",
    "presentation_index",
    "swipe_direction",
    "class_label",
    "presented_at",
    "decided_at",
    "duration_ms",
    "postpone_count",
    "undo_generation",
    "undone",
    "device_type",
    "training_correct",
)


def round_half_up(value: float, places: int) -> float:
    """Decimal half-up rounding (Python's round() is half-even)."""
    q = Decimal(10) ** -places
    return float(Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP))


def fmt_percent(value: float) -> str:
    return f"{round_half_up(value, 2):.2f} %"


def fmt_kappa(value: float | None, places: int = 2) -> str:
    if value is None:
        return "undef"
    return f"{round_half_up(value, places):.{places}f}"


@dataclass(frozen=True)
class PairwiseAgreement:
    rater_a: str
    rater_b: str
    percent_agreement: float
    cohen_kappa: float | None  # None when the pair's marginals are degenerate


@dataclass(frozen=True)
class AgreementReport:
    raters: tuple[str, ...]
    n_items: int
    pairwise: tuple[PairwiseAgreement, ...]
    fleiss: float | None
    timing_mean_s: tuple[tuple[str, float | None], ...]   # rater -> mean seconds
    class_counts: tuple[tuple[str, tuple[tuple[str, int], ...]], ...]


def timing_summary(records: Iterable, raters: Sequence[str] | None = None
                   ) -> dict[str, float | None]:
    """Mean seconds per image for each rater.

    ``records`` must already be filtered to terminal, non-undone label
    decisions; each needs ``participant_id`` and ``duration_ms`` attributes
    (``duration_ms`` may be None when the client clock was unusable; such
    records are skipped). With an explicit ``raters`` list, a rater without
    any terminal decision raises :class:`~swipelabel.errors.NoRecords`;
    otherwise raters are inferred from the records.

    math.fsum keeps the mean independent of record order, so an export
    round-trip reproduces it exactly.
    """
    by_rater: dict[str, list[int]] = {}
    seen: set[str] = set()
    for rec in records:
        seen.add(rec.participant_id)
        if rec.duration_ms is not None:
            by_rater.setdefault(rec.participant_id, []).append(rec.duration_ms)
    if raters is None:
        raters = sorted(seen)
    out: dict[str, float | None] = {}
    for rater in raters:
        if rater not in seen:
            raise NoRecords(f"rater {rater!r} has no terminal decisions")
        durations = by_rater.get(rater, [])
        if durations:
            out[rater] = math.fsum(d / 1000.0 for d in durations) / len(durations)
        else:
            out[rater] = None
    return out


def build_report(matrix: LabelMatrix, records: Iterable = (),
                 categories: Sequence[str] | None = None) -> AgreementReport:
    """Compute every pairwise cell, Fleiss' kappa, timing means, and class
    counts for one study.

    Pairs whose marginals are degenerate get ``cohen_kappa=None`` and render
    as "undef"; the same holds for Fleiss' kappa.
    """
    pairwise = []
    for ra, rb in combinations(matrix.raters, 2):
        a, b = matrix.column(ra), matrix.column(rb)
        try:
            kappa = cohen_kappa(a, b, categories)
        except DegenerateMarginals:
            kappa = None
        pairwise.append(PairwiseAgreement(ra, rb, percent_agreement(a, b), kappa))

    try:
        fleiss = fleiss_kappa(matrix, categories)
    except DegenerateMarginals:
        fleiss = None

    records = list(records)
    timing = timing_summary(records) if records else {}
    timing_rows = tuple((r, timing.get(r)) for r in matrix.raters)

    counts_rows = []
    cats = sorted({label for row in matrix.labels for label in row}
                  | set(categories or ()))
    for rater in matrix.raters:
        column = matrix.column(rater)
        counts_rows.append((rater, tuple((c, column.count(c)) for c in cats)))

    return AgreementReport(
        raters=matrix.raters,
        n_items=len(matrix.items),
        pairwise=tuple(pairwise),
        fleiss=fleiss,
        timing_mean_s=timing_rows,
        class_counts=tuple(counts_rows),
    )


def report_to_json(report: AgreementReport) -> dict:
    """Machine-readable report document; exact values plus display strings."""
    return {
        "raters": list(report.raters),
        "n_items": report.n_items,
        "pairwise": [
            {
                "rater_a": p.rater_a,
                "rater_b": p.rater_b,
                "percent_agreement": p.percent_agreement,
                "percent_agreement_display": fmt_percent(p.percent_agreement),
                "cohen_kappa": p.cohen_kappa,
                "cohen_kappa_display": fmt_kappa(p.cohen_kappa, 2),
            }
            for p in report.pairwise
        ],
        "fleiss_kappa": report.fleiss,
        "fleiss_kappa_display": fmt_kappa(report.fleiss, 3),
        "timing_mean_seconds": {
            rater: mean for rater, mean in report.timing_mean_s
        },
        "timing_mean_seconds_display": {
            rater: (None if mean is None else f"{round_half_up(mean, 2):.2f}")
            for rater, mean in report.timing_mean_s
        },
        "class_counts": {
            rater: dict(counts) for rater, counts in report.class_counts
        },
    }


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out += [line(r) for r in rows]
    return "\n".join(out)


def render_text_report(report: AgreementReport) -> str:
    """Plain-text tables: per-rater timing, then pairwise agreement."""
    parts = []

    timing_rows = [
        [rater, "-" if mean is None else f"{round_half_up(mean, 2):.2f}"]
        for rater, mean in report.timing_mean_s
    ]
    parts.append("Mean annotation time per image (seconds)")
    parts.append(_table(["Participant", "Mean time (s)"], timing_rows))

    pair_rows = [
        [f"{p.rater_a} vs {p.rater_b}", fmt_percent(p.percent_agreement),
         fmt_kappa(p.cohen_kappa, 2)]
        for p in report.pairwise
    ]
    parts.append("")
    parts.append(f"Pairwise inter-rater agreement over {report.n_items} items")
    parts.append(_table(["Participant Pair", "Agreement", "Cohen's kappa"], pair_rows))
    parts.append("")
    parts.append(
        f"Fleiss' kappa across all {len(report.raters)} raters: "
        f"{fmt_kappa(report.fleiss, 3)}")
    return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class ExportedAnnotation:
    """One terminal row read back from an export CSV."""

    participant_id: str
    image_filename: str
    class_label: str
    duration_ms: int | None


def load_export_csv(data: bytes | str) -> tuple[LabelMatrix, list[ExportedAnnotation]]:
    """Parse an annotation export back into a scoreable matrix plus timing
    records.

    Only terminal rows count (undone=false and a non-empty class label);
    postpone and undone history rows are ignored, so a full-history export
    scores identically to a default export.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != EXPORT_COLUMNS:
        raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
    cells: dict[tuple[str, str], str] = {}
    terminal: list[ExportedAnnotation] = []
    for row in reader:
        if row["undone"] == "true" or not row["class_label"]:
            continue
        key = (row["image_filename"], row["participant_id"])
        cells[key] = row["class_label"]
        terminal.append(ExportedAnnotation(
            participant_id=row["participant_id"],
            image_filename=row["image_filename"],
            class_label=row["class_label"],
            duration_ms=int(row["duration_ms"]) if row["duration_ms"] else None,
        ))
    matrix = LabelMatrix.from_cells(cells)
    return matrix, terminal
