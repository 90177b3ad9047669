"""
Annotation sessions: deterministic decks, postpone, undo, resume
================================================================

Each participant gets a reproducible shuffle of the dataset. Postponed
items return at the end of the deck, mistakes are corrected by going back,
and the whole session is an event log that replays to the same state.
"""

from swipelabel import AnnotationSession, SwipeDirection, build_order

# The deck order is a pure function of (study, participant): same inputs,
# same permutation, on any machine, after any restart.
print("order for (s1, p1, 10):", build_order("s1", "p1", 10))
print("order for (s1, p2, 10):", build_order("s1", "p2", 10))

session = AnnotationSession(study_id="s1", participant_id="p1", n_items=5)

print("\nannotating:")
item = session.next_item()
print(f"  present #{item.patch_index}, swipe left  -> ",
      session.submit(SwipeDirection.LEFT).record.action.class_name)

item = session.next_item()
session.submit(SwipeDirection.UP)
print(f"  present #{item.patch_index}, swipe up    ->  postponed "
      f"(queue={session.postpone_queue})")

item = session.next_item()
print(f"  present #{item.patch_index}, swipe right -> ",
      session.submit(SwipeDirection.RIGHT).record.action.class_name)

# Going back: the last decision is marked undone (never deleted) and the
# patch is re-presented immediately.
restored = session.undo()
print(f"  undo -> patch #{restored} comes back; history keeps "
      f"{len(session.records)} records")
item = session.next_item()
print(f"  re-present #{item.patch_index}, swipe left -> ",
      session.submit(SwipeDirection.LEFT).record.action.class_name)

# Finish the primary deck; the postponed item returns at the end.
while (item := session.next_item()) is not None:
    print(f"  present #{item.patch_index} "
          f"({'from queue' if item.source == 'queue' else 'primary'}), left")
    session.submit(SwipeDirection.LEFT)
print("completed:", session.completed)

# Resume = replay the event log; the reconstruction is exact.
resumed = AnnotationSession.replay(
    session.events, study_id="s1", participant_id="p1", n_items=5)
print("\nreplayed session equals live session:",
      resumed.records == session.records and resumed.completed)
print("progress:", resumed.progress())
