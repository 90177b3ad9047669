"""Inter-rater agreement statistics: percent agreement, Cohen's kappa for
two raters, and Fleiss' kappa for any fixed number of raters.

All statistics operate on nominal class labels (strings). The category
universe defaults to the labels actually observed, optionally widened by a
configured class set; categories with zero counts contribute nothing to the
chance terms, so widening never changes a result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateMarginals,
    EmptyInput,
    IncompleteMatrix,
    LengthMismatch,
    SingleRater,
)


def _category_index(observed: Iterable[str], categories: Sequence[str] | None) -> list[str]:
    """Stable category universe: observed labels plus any configured extras."""
    cats = sorted(set(observed))
    if categories:
        cats = sorted(set(cats) | set(categories))
    return cats


def _check_pair(a: Sequence[str], b: Sequence[str]) -> None:
    if len(a) != len(b):
        raise LengthMismatch(f"label lists differ in length: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise EmptyInput("agreement over zero items is undefined")


def contingency_table(a: Sequence[str], b: Sequence[str],
                      categories: Sequence[str] | None = None) -> tuple[np.ndarray, list[str]]:
    """K x K contingency counts for two aligned label lists.

    Returns (table, category list); table[i, j] counts items rater A called
    category i and rater B called category j.
    """
    _check_pair(a, b)
    cats = _category_index(list(a) + list(b), categories)
    index = {c: i for i, c in enumerate(cats)}
    table = np.zeros((len(cats), len(cats)), dtype=np.int64)
    for x, y in zip(a, b):
        table[index[x], index[y]] += 1
    return table, cats


def percent_agreement(a: Sequence[str], b: Sequence[str]) -> float:
    """100 x fraction of items on which the two raters chose the same label."""
    _check_pair(a, b)
    matches = sum(1 for x, y in zip(a, b) if x == y)
    return 100.0 * matches / len(a)


def cohen_kappa(a: Sequence[str], b: Sequence[str],
                categories: Sequence[str] | None = None) -> float:
    """Cohen's kappa for two raters.

                p_o - p_e
        kappa = ---------
                 1 - p_e

    with p_o the observed agreement proportion and p_e the product-of-marginals
    chance agreement, p_e = sum_c marginal_a(c) * marginal_b(c).

    Raises :class:`~swipelabel.errors.DegenerateMarginals` when p_e = 1 (both
    raters constant on the same single class); kappa is undefined there and is
    never reported as a number.
    """
    table, _ = contingency_table(a, b, categories)
    n = table.sum()
    p_o = table.diagonal().sum() / n
    p_e = float(np.dot(table.sum(axis=1) / n, table.sum(axis=0) / n))
    if p_e >= 1.0 - 1e-15:
        raise DegenerateMarginals("chance agreement is 1; kappa undefined")
    return float((p_o - p_e) / (1.0 - p_e))


@dataclass(frozen=True)
class LabelMatrix:
    """Complete items x raters table of terminal class labels.

    ``labels[i][r]`` is the class rater ``raters[r]`` gave item ``items[i]``.
    Every cell must be filled; incomplete studies cannot be scored.
    """

    items: tuple[str, ...]
    raters: tuple[str, ...]
    labels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        for i, row in enumerate(self.labels):
            if len(row) != len(self.raters):
                raise IncompleteMatrix(
                    f"item {self.items[i]!r} has {len(row)} labels for "
                    f"{len(self.raters)} raters")

    @classmethod
    def from_cells(cls, cells: Mapping[tuple[str, str], str],
                   items: Sequence[str] | None = None,
                   raters: Sequence[str] | None = None) -> "LabelMatrix":
        """Build from a {(item_id, rater_id): label} mapping; raises
        :class:`~swipelabel.errors.IncompleteMatrix` on missing cells.

        Axes default to the ids observed in the cells; pass them explicitly
        to also catch raters or items with no annotations at all.
        """
        items = tuple(items) if items is not None \
            else tuple(sorted({i for i, _ in cells}))
        raters = tuple(raters) if raters is not None \
            else tuple(sorted({r for _, r in cells}))
        rows = []
        for item in items:
            row = []
            for rater in raters:
                try:
                    row.append(cells[(item, rater)])
                except KeyError:
                    raise IncompleteMatrix(
                        f"no terminal label for item {item!r} by rater {rater!r}") from None
            rows.append(tuple(row))
        return cls(items, raters, tuple(rows))

    def column(self, rater: str) -> list[str]:
        r = self.raters.index(rater)
        return [row[r] for row in self.labels]

    def category_counts(self, categories: Sequence[str] | None = None
                        ) -> tuple[np.ndarray, list[str]]:
        """Items x categories count table (each row sums to the rater count)."""
        cats = _category_index((l for row in self.labels for l in row), categories)
        index = {c: i for i, c in enumerate(cats)}
        counts = np.zeros((len(self.items), len(cats)), dtype=np.int64)
        for i, row in enumerate(self.labels):
            for label in row:
                counts[i, index[label]] += 1
        return counts, cats


def fleiss_observed(counts: np.ndarray) -> float:
    """Mean per-item agreement P-bar over an items x categories count table.

    Per item with n ratings: P_i = (sum_c n_ic^2 - n) / (n (n - 1)).
    """
    n = int(counts[0].sum())
    per_item = ((counts.astype(np.float64) ** 2).sum(axis=1) - n) / (n * (n - 1))
    return float(per_item.mean())


def fleiss_expected(counts: np.ndarray) -> float:
    """Chance agreement P-bar_e = sum_c p_c^2 with p_c the overall category
    proportion across all ratings."""
    p = counts.sum(axis=0) / counts.sum()
    return float(np.dot(p, p))


def fleiss_kappa(matrix: LabelMatrix, categories: Sequence[str] | None = None) -> float:
    """Fleiss' kappa over a complete label matrix.

                P-bar - P-bar_e
        kappa = ---------------
                 1 - P-bar_e

    Raises :class:`~swipelabel.errors.SingleRater` for fewer than two raters
    and :class:`~swipelabel.errors.DegenerateMarginals` when P-bar_e = 1.
    """
    if len(matrix.raters) < 2:
        raise SingleRater("Fleiss' kappa needs at least two raters")
    if len(matrix.items) == 0:
        raise EmptyInput("agreement over zero items is undefined")
    counts, _ = matrix.category_counts(categories)
    p_bar = fleiss_observed(counts)
    p_e = fleiss_expected(counts)
    if p_e >= 1.0 - 1e-15:
        raise DegenerateMarginals("chance agreement is 1; kappa undefined")
    return (p_bar - p_e) / (1.0 - p_e)
