"""Swipe-based image patch annotation: domain model, dataset ingestion,
session engine, inter-rater agreement analytics, and an HTTP service.
"""

from .agreement import LabelMatrix, cohen_kappa, fleiss_kappa, percent_agreement
from .ingestion import ArchiveFormat, Dataset, ImageFormat, ImagePatch, ingest_archive, validate_image
from .model import (
    ActionKind,
    DeviceType,
    DirectionAction,
    DirectionMapping,
    DisplayOptions,
    Participant,
    StudyConfig,
    StudyMode,
    SwipeDirection,
    resolve_direction,
    validate_config,
)
from .ordering import build_order
from .report import AgreementReport, build_report, load_export_csv, render_text_report, report_to_json, timing_summary
from .session import AnnotationRecord, AnnotationSession, SessionEvent, SubmitResult

__version__ = "0.1.0"

__all__ = [
    "ActionKind",
    "AgreementReport",
    "AnnotationRecord",
    "AnnotationSession",
    "ArchiveFormat",
    "Dataset",
    "DeviceType",
    "DirectionAction",
    "DirectionMapping",
    "DisplayOptions",
    "ImageFormat",
    "ImagePatch",
    "LabelMatrix",
    "Participant",
    "SessionEvent",
    "StudyConfig",
    "StudyMode",
    "SubmitResult",
    "SwipeDirection",
    "build_order",
    "build_report",
    "cohen_kappa",
    "fleiss_kappa",
    "ingest_archive",
    "load_export_csv",
    "percent_agreement",
    "render_text_report",
    "report_to_json",
    "resolve_direction",
    "timing_summary",
    "validate_config",
    "validate_image",
]
