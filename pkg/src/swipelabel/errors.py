"""Exception types shared across the package.

Every failure a caller can act on gets its own class; handlers in the
HTTP layer map these onto status codes and error payloads.
"""


class SwipeLabelError(Exception):
    """Base class for all package-specific errors."""

    code = "error"


# --- direction mapping ------------------------------------------------------

class UnassignedDirection(SwipeLabelError):
    """The swiped direction is not mapped to any action in this study."""

    code = "unassigned_direction"


# --- archive ingestion ------------------------------------------------------

class CorruptArchive(SwipeLabelError):
    """The uploaded container could not be decoded as the declared format."""

    code = "corrupt_archive"


class EmptyDataset(SwipeLabelError):
    """The archive contained no valid images."""

    code = "empty_dataset"


class DuplicateFilename(SwipeLabelError):
    """Two archive entries normalize to the same filename."""

    code = "duplicate_filename"


class ManifestMismatch(SwipeLabelError):
    """The ground-truth manifest does not line up with the archive contents."""

    code = "manifest_mismatch"


class UnsupportedFormat(SwipeLabelError):
    """Image bytes are not in one of the supported formats."""

    code = "unsupported_format"


class TruncatedImage(SwipeLabelError):
    """Image bytes end before a complete header could be read."""

    code = "truncated_image"


# --- deck ordering and sessions ---------------------------------------------

class InvalidCount(SwipeLabelError):
    """Requested a deck order for an empty dataset."""

    code = "invalid_count"


class SessionClosed(SwipeLabelError):
    """The study was closed by an admin; no further session activity."""

    code = "session_closed"


class NoOutstandingPresentation(SwipeLabelError):
    """A decision arrived without a currently presented item.

    Also the error the loser of two racing submissions receives: the first
    decision consumes the presentation, so the second finds none.
    """

    code = "no_outstanding_presentation"


class PostponeNotConfigured(SwipeLabelError):
    """An explicit postpone was requested but no direction maps to it."""

    code = "postpone_not_configured"


class NothingToUndo(SwipeLabelError):
    """Undo requested on a session with no undoable decision."""

    code = "nothing_to_undo"


class UndoDisabled(SwipeLabelError):
    """Undo is not available (training mode after a reveal)."""

    code = "undo_disabled"


class NotAssigned(SwipeLabelError):
    """The participant is not assigned to the study."""

    code = "not_assigned"


class StudyClosed(SwipeLabelError):
    """The study is not open for annotation."""

    code = "study_closed"


# --- agreement statistics ---------------------------------------------------

class LengthMismatch(SwipeLabelError):
    """Paired label lists differ in length."""

    code = "length_mismatch"


class EmptyInput(SwipeLabelError):
    """A statistic was requested over zero items."""

    code = "empty_input"


class DegenerateMarginals(SwipeLabelError):
    """Chance agreement equals 1, so kappa is undefined."""

    code = "degenerate_marginals"


class SingleRater(SwipeLabelError):
    """Multi-rater agreement needs at least two raters."""

    code = "single_rater"


class NoRecords(SwipeLabelError):
    """A rater has no terminal decisions to summarize."""

    code = "no_records"


class IncompleteMatrix(SwipeLabelError):
    """The label matrix has missing cells (some rater skipped some item)."""

    code = "incomplete_matrix"


# --- service ----------------------------------------------------------------

class InvalidCredentials(SwipeLabelError):
    """Unknown user, wrong password, or expired token."""

    code = "invalid_credentials"


class Forbidden(SwipeLabelError):
    """The authenticated user may not perform this action."""

    code = "forbidden"


class StudyNotFound(SwipeLabelError):
    """No study with the given id."""

    code = "study_not_found"


class DatasetNotFound(SwipeLabelError):
    """No dataset with the given id."""

    code = "dataset_not_found"


class InvalidStudyConfig(SwipeLabelError):
    """Study configuration violates one or more invariants."""

    code = "invalid_study_config"

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)
