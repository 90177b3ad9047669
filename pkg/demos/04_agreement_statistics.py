"""
Agreement statistics: percent agreement, Cohen's and Fleiss' kappa
==================================================================

How consistently do raters label the same items? Percent agreement is the
raw match rate; the kappa statistics correct it for chance agreement.
"""

import random

from swipelabel import (
    LabelMatrix,
    build_report,
    cohen_kappa,
    fleiss_kappa,
    percent_agreement,
    render_text_report,
)

a = ["normal", "normal", "atypical", "atypical"]
b = ["normal", "atypical", "normal", "atypical"]
print("percent agreement:", percent_agreement(a, b))
# 50 % raw agreement, but exactly what chance predicts here: kappa = 0
print("cohen's kappa    :", cohen_kappa(a, b))

# Fleiss' kappa generalizes to any fixed rater count. Three raters on two
# items: unanimous on the first, split on the second.
matrix = LabelMatrix(
    items=("item1", "item2"),
    raters=("r1", "r2", "r3"),
    labels=(("A", "A", "A"), ("A", "B", "B")),
)
print("fleiss' kappa    :", fleiss_kappa(matrix))

# A full synthetic study: four raters, 600 items, correlated labels.
rng = random.Random(7)
true_labels = [rng.choice(["normal", "atypical"]) for _ in range(600)]
rows = []
for truth in true_labels:
    row = [truth if rng.random() < 0.9 else
           ("atypical" if truth == "normal" else "normal")
           for _ in range(4)]
    rows.append(tuple(row))
study_matrix = LabelMatrix(
    items=tuple(f"patch_{i:03d}" for i in range(600)),
    raters=("expert1", "expert2", "expert3", "expert4"),
    labels=tuple(rows),
)


class Timed:
    def __init__(self, participant_id, duration_ms):
        self.participant_id = participant_id
        self.duration_ms = duration_ms


records = [Timed(f"expert{j + 1}", rng.randint(900, 3500))
           for j in range(4) for _ in range(600)]

report = build_report(study_matrix, records)
print()
print(render_text_report(report))
