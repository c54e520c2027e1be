"""Dataset construction, CSV ingestion, and stratified resampling plans.

The synthetic generator draws features i.i.d. uniform on [0,1]^d from a
seeded PCG64 generator and labels each row 1 exactly when x1 + x2 > 1.
CSV ingestion is strict: every non-label column must parse as a finite
number and the label column must hold only 0/1.

Stratified splitting shuffles each class with its own seeded permutation
and deals samples so per-class counts match the requested ratio to within
one sample; fold plans deal each class round-robin across folds, so every
fold's class mix is within one sample of the global mix by construction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .calibrators import ScoreSet
from .errors import (
    DegenerateClassError,
    EmptyFileError,
    IndexOutOfRangeError,
    MissingColumnError,
    NonBinaryLabelError,
    NonNumericFeatureError,
    TooFewSamplesPerClassError,
)
from ._util import as_binary_labels, readonly

__all__ = [
    "Provenance",
    "Dataset",
    "SyntheticConfig",
    "FoldAssignment",
    "FoldPlan",
    "generate_synthetic",
    "load_csv",
    "save_csv",
    "load_score_csv",
    "save_score_csv",
    "select_features",
    "subset",
    "stratified_split",
    "make_fold_plan",
]


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from: a generator seed or a source file path."""

    seed: int | None = None
    source_path: str | None = None

    @classmethod
    def from_seed(cls, seed: int) -> "Provenance":
        return cls(seed=int(seed))

    @classmethod
    def from_file(cls, path: str) -> "Provenance":
        return cls(source_path=str(path))


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix with binary labels and provenance."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    provenance: Provenance

    def __post_init__(self):
        x = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        if x.ndim != 2:
            raise ValueError(f"features must be a 2-D matrix, got ndim={x.ndim}")
        if not np.isfinite(x).all():
            raise ValueError("features must be finite (no NaN or inf)")
        y = as_binary_labels(self.labels)
        if y.size != x.shape[0]:
            raise ValueError(
                f"labels length {y.size} does not match feature rows {x.shape[0]}"
            )
        names = tuple(str(c) for c in self.feature_names)
        if len(names) != x.shape[1]:
            raise ValueError(
                f"{len(names)} feature names for {x.shape[1]} feature columns"
            )
        object.__setattr__(self, "features", readonly(x))
        object.__setattr__(self, "labels", readonly(y))
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters of the synthetic two-informative-feature dataset."""

    n: int
    d: int
    seed: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        if not (isinstance(self.d, int) and self.d >= 2):
            raise ValueError(f"d must be an integer >= 2, got {self.d!r}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")


def generate_synthetic(config: SyntheticConfig) -> Dataset:
    """Draw the synthetic dataset: x ~ U[0,1]^d, label = 1 iff x1 + x2 > 1.

    Deterministic for a fixed seed (PCG64).  The decision boundary is
    strict, so x1 + x2 exactly 1 labels 0.
    """
    rng = np.random.default_rng(config.seed)
    x = rng.random((config.n, config.d))
    y = (x[:, 0] + x[:, 1] > 1.0).astype(np.int64)
    names = tuple(f"x{i + 1}" for i in range(config.d))
    return Dataset(x, y, names, Provenance.from_seed(config.seed))


# ---------------------------------------------------------------------------
# CSV input/output
# ---------------------------------------------------------------------------

def _parse_label(cell: str, row: int):
    try:
        value = float(cell)
    except ValueError:
        raise NonBinaryLabelError(
            f"row {row}: label {cell!r} is not 0 or 1"
        ) from None
    if value == 0.0:
        return 0
    if value == 1.0:
        return 1
    raise NonBinaryLabelError(f"row {row}: label {cell!r} is not 0 or 1")


def _parse_number(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise NonNumericFeatureError(
            f"row {row}, column {column!r}: {cell!r} is not a number"
        ) from None
    if not math.isfinite(value):
        raise NonNumericFeatureError(
            f"row {row}, column {column!r}: {cell!r} is not finite"
        )
    return value


def load_csv(path: str, label_column: str = "y") -> Dataset:
    """Read a headed CSV into a Dataset.

    All non-label columns become features in header order.  Rows are
    reported 1-based (the header is row 0) in error messages.
    """
    with open(path, "r", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFileError(f"{path}: file is empty") from None
        header = [name.strip() for name in header]
        if label_column not in header:
            raise MissingColumnError(
                f"{path}: label column {label_column!r} not in header {header}"
            )
        label_pos = header.index(label_column)
        feature_names = tuple(name for i, name in enumerate(header) if i != label_pos)
        if not feature_names:
            raise MissingColumnError(f"{path}: no feature columns besides {label_column!r}")
        rows = []
        labels = []
        for row_number, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise NonNumericFeatureError(
                    f"{path}: row {row_number} has {len(row)} cells, expected {len(header)}"
                )
            labels.append(_parse_label(row[label_pos].strip(), row_number))
            rows.append(
                [
                    _parse_number(cell.strip(), row_number, header[i])
                    for i, cell in enumerate(row)
                    if i != label_pos
                ]
            )
    if not rows:
        raise EmptyFileError(f"{path}: no data rows")
    return Dataset(
        np.asarray(rows, dtype=np.float64),
        np.asarray(labels, dtype=np.int64),
        feature_names,
        Provenance.from_file(path),
    )


def save_csv(data: Dataset, path: str, label_column: str = "y") -> None:
    """Write a Dataset to CSV (header row; floats via repr, so a reload
    reproduces the values bit-for-bit)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(data.feature_names) + [label_column])
        for row, label in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def load_score_csv(path: str) -> ScoreSet:
    """Read a score file (columns ``score`` and ``y``) into a ScoreSet."""
    with open(path, "r", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration:
            raise EmptyFileError(f"{path}: file is empty") from None
        for required in ("score", "y"):
            if required not in header:
                raise MissingColumnError(
                    f"{path}: column {required!r} not in header {header}"
                )
        score_pos = header.index("score")
        label_pos = header.index("y")
        scores = []
        labels = []
        for row_number, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise NonNumericFeatureError(
                    f"{path}: row {row_number} has {len(row)} cells, expected {len(header)}"
                )
            scores.append(_parse_number(row[score_pos].strip(), row_number, "score"))
            labels.append(_parse_label(row[label_pos].strip(), row_number))
    if not scores:
        raise EmptyFileError(f"{path}: no data rows")
    return ScoreSet(np.asarray(scores, dtype=np.float64), np.asarray(labels, dtype=np.int64))


def save_score_csv(data: ScoreSet, path: str) -> None:
    """Write a ScoreSet as a score file (columns ``score`` and ``y``)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["score", "y"])
        for score, label in zip(data.scores, data.labels):
            writer.writerow([repr(float(score)), int(label)])


# ---------------------------------------------------------------------------
# row/column selection and stratified resampling
# ---------------------------------------------------------------------------

def select_features(data: Dataset, indices) -> Dataset:
    """New Dataset keeping only the chosen feature columns (same labels)."""
    idx = [int(i) for i in indices]
    if not idx:
        raise IndexOutOfRangeError("feature selection needs at least one index")
    for i in idx:
        if i < 0 or i >= data.d:
            raise IndexOutOfRangeError(
                f"feature index {i} out of range for d={data.d}"
            )
    return Dataset(
        data.features[:, idx],
        data.labels,
        tuple(data.feature_names[i] for i in idx),
        data.provenance,
    )


def subset(data: Dataset, indices) -> Dataset:
    """New Dataset keeping only the chosen rows (features and labels)."""
    idx = np.asarray(indices, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= data.n):
        raise IndexOutOfRangeError(f"row index out of range for n={data.n}")
    return Dataset(
        data.features[idx],
        data.labels[idx],
        data.feature_names,
        data.provenance,
    )


def _class_indices(labels: np.ndarray):
    return np.flatnonzero(labels == 0), np.flatnonzero(labels == 1)


def stratified_split(data: Dataset, train_ratio: float, seed: int):
    """Split into (train, test) preserving class proportions.

    Each class is shuffled with the seeded generator and the first
    ``round(class_count * train_ratio)`` samples (half-up, clamped so both
    sides keep at least one sample of each class) go to train.  Row order
    within each side follows the original dataset order.
    """
    if not (0.0 < train_ratio < 1.0):
        raise ValueError(f"train_ratio must be in (0, 1), got {train_ratio}")
    neg, pos = _class_indices(data.labels)
    if neg.size < 2 or pos.size < 2:
        raise DegenerateClassError(
            f"both classes need >= 2 samples to split, got {neg.size} neg / {pos.size} pos"
        )
    rng = np.random.default_rng(seed)
    train_parts = []
    test_parts = []
    for class_idx in (neg, pos):
        perm = rng.permutation(class_idx)
        k = int(math.floor(class_idx.size * train_ratio + 0.5))
        k = min(max(k, 1), class_idx.size - 1)
        train_parts.append(perm[:k])
        test_parts.append(perm[k:])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    return subset(data, train_idx), subset(data, test_idx)


@dataclass(frozen=True)
class FoldAssignment:
    """One (repeat, fold) cell of a fold plan, with its row index sets."""

    repeat_index: int
    fold_index: int
    train_indices: np.ndarray
    test_indices: np.ndarray


@dataclass(frozen=True)
class FoldPlan:
    """Stratified repeated-CV assignments: ``folds`` x ``repeats`` cells.

    Within each repeat the test sets partition the row indices exactly, and
    each fold's per-class test count is within one sample of the ideal
    proportional count.  Assignments depend only on (labels, folds,
    repeats, base_seed); repeat r uses derived seed ``base_seed + r``.
    """

    folds: int
    repeats: int
    base_seed: int
    assignments: tuple

    def assignment(self, repeat_index: int, fold_index: int) -> FoldAssignment:
        return self.assignments[repeat_index * self.folds + fold_index]


def make_fold_plan(data: Dataset, folds: int, repeats: int, base_seed: int) -> FoldPlan:
    """Build a stratified repeated-CV plan by per-class round-robin dealing."""
    if not (isinstance(folds, int) and folds >= 2):
        raise ValueError(f"folds must be an integer >= 2, got {folds!r}")
    if not (isinstance(repeats, int) and repeats >= 1):
        raise ValueError(f"repeats must be an integer >= 1, got {repeats!r}")
    neg, pos = _class_indices(data.labels)
    if neg.size < folds or pos.size < folds:
        raise TooFewSamplesPerClassError(
            f"each class needs >= folds={folds} samples, got {neg.size} neg / {pos.size} pos"
        )
    assignments = []
    for repeat in range(repeats):
        rng = np.random.default_rng(base_seed + repeat)
        fold_of = np.empty(data.n, dtype=np.intp)
        for class_idx in (neg, pos):
            perm = rng.permutation(class_idx)
            fold_of[perm] = np.arange(perm.size, dtype=np.intp) % folds
        for fold in range(folds):
            test_idx = np.flatnonzero(fold_of == fold)
            train_idx = np.flatnonzero(fold_of != fold)
            assignments.append(
                FoldAssignment(repeat, fold, readonly(train_idx), readonly(test_idx))
            )
    return FoldPlan(folds, repeats, base_seed, tuple(assignments))
