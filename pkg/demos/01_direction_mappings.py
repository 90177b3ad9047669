"""
Direction mappings: from swipe gestures to class labels
========================================================

Every study maps the four swipe directions onto actions: assign a class
label, postpone the item, or nothing. This script walks through building
and validating such mappings.
"""

from swipelabel import (
    DirectionAction,
    DirectionMapping,
    StudyConfig,
    SwipeDirection,
    resolve_direction,
    validate_config,
)

# The default mapping reproduces a two-class setup with a postpone gesture:
# left = "normal", right = "atypical", up = postpone, down unassigned.
config = StudyConfig(study_id="demo", dataset_id="demo-data")
for direction in SwipeDirection:
    try:
        action = resolve_direction(config, direction)
        print(f"swipe {direction.value:>5}: {action.kind.value}"
              + (f" -> {action.class_name!r}" if action.class_name else ""))
    except Exception as exc:
        print(f"swipe {direction.value:>5}: rejected ({exc})")

# Custom mappings can use all four directions for labels (up to four
# classes), at most one postpone, and distinct class names.
four_class = DirectionMapping({
    SwipeDirection.LEFT: DirectionAction.label("granulocyte"),
    SwipeDirection.RIGHT: DirectionAction.label("lymphocyte"),
    SwipeDirection.UP: DirectionAction.label("monocyte"),
    SwipeDirection.DOWN: DirectionAction.label("debris"),
})
print("\nfour-class mapping violations:", four_class.violations() or "none")

# validate_config reports every violated rule at once, not just the first.
broken = StudyConfig(
    study_id="broken", dataset_id="demo-data",
    mapping=DirectionMapping({SwipeDirection.UP: DirectionAction.postpone(),
                              SwipeDirection.DOWN: DirectionAction.postpone()}))
print("\nbroken config violations:")
for violation in validate_config(broken):
    print(" -", violation)
