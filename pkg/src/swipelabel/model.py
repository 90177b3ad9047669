"""Core domain types: swipe directions, direction-to-class mappings, and
study configuration.

Everything in this module is an immutable value; instances can be shared
freely between threads and serialized without surprises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import UnassignedDirection


class SwipeDirection(Enum):
    """The four swipe gestures a card can receive."""

    LEFT = "left"
    RIGHT = "right"
    UP = "up"
    DOWN = "down"


class ActionKind(Enum):
    LABEL = "label"
    POSTPONE = "postpone"
    UNASSIGNED = "unassigned"


class StudyMode(Enum):
    ANNOTATION = "annotation"
    TRAINING = "training"


class DeviceType(Enum):
    MOBILE = "mobile"
    TABLET = "tablet"
    DESKTOP = "desktop"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class DirectionAction:
    """What a swipe in some direction does: assign a class label, postpone
    the item, or nothing (gesture rejected)."""

    kind: ActionKind
    class_name: str | None = None

    def __post_init__(self):
        if self.kind is ActionKind.LABEL:
            if self.class_name is None or not self.class_name.strip():
                raise ValueError("label action requires a non-empty class name")
            # class names compared case-sensitively after trimming
            object.__setattr__(self, "class_name", self.class_name.strip())
        elif self.class_name is not None:
            raise ValueError(f"{self.kind.value} action carries no class name")

    @classmethod
    def label(cls, class_name: str) -> "DirectionAction":
        return cls(ActionKind.LABEL, class_name)

    @classmethod
    def postpone(cls) -> "DirectionAction":
        return cls(ActionKind.POSTPONE)

    @classmethod
    def unassigned(cls) -> "DirectionAction":
        return cls(ActionKind.UNASSIGNED)


@dataclass(frozen=True)
class DirectionMapping:
    """Mapping from swipe direction to action.

    Directions absent from ``entries`` behave as unassigned. Validity rules
    (at least one label, at most one postpone, distinct class names, at most
    four labels) are reported by :meth:`violations` rather than enforced at
    construction, so an admin UI can show every problem at once.
    """

    entries: dict[SwipeDirection, DirectionAction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))

    @classmethod
    def default(cls) -> "DirectionMapping":
        """Two-class mapping with an upward postpone: left swipe labels
        "normal", right swipe labels "atypical", up postpones."""
        return cls({
            SwipeDirection.LEFT: DirectionAction.label("normal"),
            SwipeDirection.RIGHT: DirectionAction.label("atypical"),
            SwipeDirection.UP: DirectionAction.postpone(),
        })

    def action_for(self, direction: SwipeDirection) -> DirectionAction:
        return self.entries.get(direction, DirectionAction.unassigned())

    @property
    def class_names(self) -> list[str]:
        """Class names in a stable order (left, right, up, down)."""
        return [
            a.class_name
            for d in SwipeDirection
            for a in [self.action_for(d)]
            if a.kind is ActionKind.LABEL
        ]

    @property
    def postpone_direction(self) -> SwipeDirection | None:
        for d, a in self.entries.items():
            if a.kind is ActionKind.POSTPONE:
                return d
        return None

    def violations(self) -> list[str]:
        problems = []
        labels = self.class_names
        if not labels:
            problems.append("no label direction: at least one direction must assign a class")
        if len(labels) > 4:
            # unreachable with four directions, kept as a guard for future shapes
            problems.append("more than four label directions")
        if len(set(labels)) != len(labels):
            problems.append("duplicate class names across directions")
        postpones = [a for a in self.entries.values() if a.kind is ActionKind.POSTPONE]
        if len(postpones) > 1:
            problems.append("multiple postpone directions: at most one allowed")
        return problems


@dataclass(frozen=True)
class DisplayOptions:
    """Client rendering knobs; these never influence annotation results."""

    scale_percent: int = 100   # card size as % of the smaller screen dimension
    interpolation_enabled: bool = False

    def violations(self) -> list[str]:
        if not 10 <= self.scale_percent <= 100:
            return [f"scale_percent {self.scale_percent} outside [10, 100]"]
        return []


@dataclass(frozen=True)
class Participant:
    participant_id: str
    display_name: str = ""
    credentials_ref: str = ""
    group_ids: frozenset[str] = frozenset()


@dataclass(frozen=True)
class StudyConfig:
    """Everything a study needs: the dataset, the gesture mapping, the mode,
    and who is assigned. Frozen once the study is opened."""

    study_id: str
    dataset_id: str
    mapping: DirectionMapping = field(default_factory=DirectionMapping.default)
    mode: StudyMode = StudyMode.ANNOTATION
    display: DisplayOptions = field(default_factory=DisplayOptions)
    assigned_participants: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "assigned_participants",
                           frozenset(self.assigned_participants))


def resolve_direction(config: StudyConfig, direction: SwipeDirection) -> DirectionAction:
    """Resolve a swipe against the study's mapping.

    Pure function of (config, direction). Raises
    :class:`~swipelabel.errors.UnassignedDirection` for directions the study
    does not map, which tells the UI to reject the gesture.
    """
    action = config.mapping.action_for(direction)
    if action.kind is ActionKind.UNASSIGNED:
        raise UnassignedDirection(
            f"direction {direction.value!r} is not assigned in study {config.study_id!r}")
    return action


def validate_config(config: StudyConfig, dataset=None, for_open: bool = False) -> list[str]:
    """Check every invariant and return all violations (empty list = ok).

    ``dataset`` enables the training-mode ground-truth checks; pass the
    :class:`~swipelabel.ingestion.Dataset` the config references. ``for_open``
    additionally requires a non-empty participant assignment, which is a
    precondition for opening, not for saving a draft.
    """
    problems = list(config.mapping.violations())
    problems += config.display.violations()
    if for_open and not config.assigned_participants:
        problems.append("no participants assigned")
    if config.mode is StudyMode.TRAINING and dataset is not None:
        label_set = set(config.mapping.class_names)
        missing = [p.filename for p in dataset.patches if p.ground_truth is None]
        if missing:
            problems.append(
                f"training mode requires ground truth for every patch; "
                f"{len(missing)} patch(es) lack it (e.g. {missing[0]!r})")
        stray = sorted({p.ground_truth for p in dataset.patches
                        if p.ground_truth is not None and p.ground_truth not in label_set})
        if stray:
            problems.append(
                f"ground-truth labels {stray} do not appear in the study's class set")
    return problems
