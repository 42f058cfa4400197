"""Data containers, file loaders, synthetic data generation and fold splitting.

All containers are immutable after construction: loaders and the generator
return freshly allocated arrays and never alias caller memory.  Labels are
always contiguous integers ``1..C``; loaders remap raw label values in order
of first appearance and keep the original spellings in ``label_names``.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DataFormatError

# Sub-cluster sample counts of the three-class multi-modal benchmark
# generator; each class totals 1200 samples.
_MULTIMODAL_COUNTS = {
    1: [50] * 9 + [150] * 3 + [100] * 3,
    2: [100] * 3 + [50] * 6 + [200] * 3,
    3: [400] * 3,
}
_MULTIMODAL_SIGMA = 0.025


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """N samples x D features with integer class labels in ``1..C``."""

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    label_names: tuple[str, ...] = ()

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        labs = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        if feats.ndim != 2 or feats.shape[0] < 1:
            raise ContractError("features must be a non-empty N x D matrix")
        if labs.shape != (feats.shape[0],):
            raise ContractError("labels must be a length-N vector")
        if not np.all(np.isfinite(feats)):
            raise ContractError("features contain non-finite values")
        c = int(self.class_count)
        object.__setattr__(self, "class_count", c)
        if c < 1 or labs.min() < 1 or labs.max() > c:
            raise ContractError("labels must lie in 1..class_count")
        present = np.unique(labs)
        if present.size != c:
            raise ContractError("every class must have at least one sample")
        if not self.label_names:
            object.__setattr__(self, "label_names", tuple(str(i) for i in range(1, c + 1)))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class DissimilarityData:
    """Symmetric N x N dissimilarity matrix with zero diagonal plus labels."""

    matrix: np.ndarray
    labels: np.ndarray
    class_count: int = 0

    def __post_init__(self):
        mat = np.ascontiguousarray(np.asarray(self.matrix, dtype=np.float64))
        labs = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "labels", labs)
        n = mat.shape[0]
        if mat.ndim != 2 or mat.shape != (n, n) or n < 1:
            raise ContractError("dissimilarity matrix must be square")
        if labs.shape != (n,):
            raise ContractError("labels must match matrix size")
        if not np.all(np.isfinite(mat)):
            raise ContractError("dissimilarities contain non-finite values")
        if mat.min() < 0:
            raise ContractError("dissimilarities must be non-negative")
        if np.abs(mat - mat.T).max() > 1e-9:
            raise ContractError("dissimilarity matrix must be symmetric within 1e-9")
        if np.any(np.diagonal(mat) != 0.0):
            raise ContractError("dissimilarity diagonal must be exactly zero")
        if self.class_count == 0:
            object.__setattr__(self, "class_count", int(labs.max()))
        if labs.min() < 1 or labs.max() > self.class_count:
            raise ContractError("labels must lie in 1..class_count")

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FoldSplit:
    """One train/test split of a k-fold partition."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    fold_id: int


def _remap_labels(raw: list[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Map raw label strings to contiguous 1..C in order of first appearance."""
    mapping: dict[str, int] = {}
    out = np.empty(len(raw), dtype=np.int64)
    for i, value in enumerate(raw):
        if value not in mapping:
            mapping[value] = len(mapping) + 1
        out[i] = mapping[value]
    if len(mapping) > 256:
        raise DataFormatError(f"label column has {len(mapping)} distinct values (limit 256)")
    return out, tuple(mapping)


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"row {row}, column {col}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise DataFormatError(f"row {row}, column {col}: non-finite value {text!r}")
    return value


def load_csv(path: str | os.PathLike, label_column: int | str = -1) -> LabeledDataset:
    """Load a comma-separated dataset with one label column.

    Parameters
    ----------
    path : file path
        Comma-separated file, optional header row.
    label_column : int or str
        Column holding class labels; an 0-based index (negative allowed,
        default: last column) or a header name.

    The header row is detected automatically for integer selectors: if any
    non-label cell of the first row fails to parse as a number the row is
    treated as a header.  Labels are remapped to contiguous ``1..C``.
    """
    with open(path, "r", newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and any(c.strip() for c in row)]
    if not rows:
        raise DataFormatError(f"{path}: empty file")

    header: list[str] | None = None
    if isinstance(label_column, str):
        header = [c.strip() for c in rows[0]]
        if label_column not in header:
            raise DataFormatError(f"{path}: no column named {label_column!r} in header")
        label_idx = header.index(label_column)
        rows = rows[1:]
    else:
        label_idx = label_column if label_column >= 0 else len(rows[0]) + label_column
        if not 0 <= label_idx < len(rows[0]):
            raise DataFormatError(f"{path}: label column {label_column} out of range")
        first_is_header = False
        for j, cell in enumerate(rows[0]):
            if j == label_idx:
                continue
            try:
                float(cell)
            except ValueError:
                first_is_header = True
                break
        if first_is_header:
            rows = rows[1:]
    if not rows:
        raise DataFormatError(f"{path}: no data rows")

    width = len(rows[0])
    feats = np.empty((len(rows), width - 1), dtype=np.float64)
    raw_labels: list[str] = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataFormatError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        col = 0
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            feats[i, col] = _parse_cell(cell.strip(), i + 1, j + 1)
            col += 1
    labels, names = _remap_labels(raw_labels)
    return LabeledDataset(feats, labels, len(names), names)


def save_csv(dataset: LabeledDataset, path: str | os.PathLike) -> None:
    """Write a dataset back to CSV (no header, label last, 17 significant digits)."""
    with open(path, "w", newline="") as handle:
        for i in range(dataset.n_samples):
            cells = [f"{v:.17g}" for v in dataset.features[i]]
            cells.append(dataset.label_names[dataset.labels[i] - 1])
            handle.write(",".join(cells) + "\n")


def load_dissimilarity(matrix_path: str | os.PathLike, labels_path: str | os.PathLike) -> DissimilarityData:
    """Load relational data: an N x N dissimilarity CSV plus a label CSV (one per row)."""
    with open(matrix_path, "r", newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and any(c.strip() for c in row)]
    if not rows:
        raise DataFormatError(f"{matrix_path}: empty file")
    n = len(rows)
    mat = np.empty((n, n), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise DataFormatError(f"{matrix_path}: row {i + 1} has {len(row)} cells, expected {n}")
        for j, cell in enumerate(row):
            mat[i, j] = _parse_cell(cell.strip(), i + 1, j + 1)
    with open(labels_path, "r", newline="") as handle:
        raw = [line.strip() for line in handle if line.strip()]
    if len(raw) != n:
        raise DataFormatError(f"{labels_path}: {len(raw)} labels for {n} samples")
    labels, _ = _remap_labels(raw)
    try:
        return DissimilarityData(mat, labels)
    except ContractError as exc:
        raise DataFormatError(f"{matrix_path}: {exc}") from exc


def load_image_segmentation(path: str | os.PathLike) -> LabeledDataset:
    """Load the 2100-sample outdoor-image segmentation benchmark file.

    Expects the public distribution layout: any number of header lines,
    then one row per sample of ``CLASSNAME,a1,...,a19``.  The three
    constant attributes (original 1-based indices 3-5) are removed,
    leaving 16 features.
    """
    raw_labels: list[str] = []
    feats: list[list[float]] = []
    with open(path, "r", newline="") as handle:
        for line in handle:
            cells = [c.strip() for c in line.strip().split(",")]
            if len(cells) != 20:
                continue
            try:
                values = [float(c) for c in cells[1:]]
            except ValueError:
                continue
            if not all(math.isfinite(v) for v in values):
                raise DataFormatError(f"{path}: non-finite attribute in row {len(feats) + 1}")
            raw_labels.append(cells[0])
            feats.append(values)
    labels, names = _remap_labels(raw_labels)
    if len(feats) != 2100 or len(names) != 7:
        raise DataFormatError(
            f"{path}: expected 2100 samples in 7 classes, found {len(feats)} in {len(names)}"
        )
    matrix = np.asarray(feats, dtype=np.float64)
    keep = [j for j in range(19) if j not in (2, 3, 4)]
    return LabeledDataset(matrix[:, keep], labels, 7, names)


def load_usps(path: str | os.PathLike) -> LabeledDataset:
    """Load handwritten-digit data in the pre-extracted 256-feature text format.

    Each line holds a digit label followed by 256 grey values, whitespace
    separated.  If ``path`` is a directory the standard ``zip.train`` and
    ``zip.test`` files inside it are concatenated in that order.
    """
    if os.path.isdir(path):
        parts = [os.path.join(path, name) for name in ("zip.train", "zip.test")]
        parts = [p for p in parts if os.path.exists(p)]
        if not parts:
            raise DataFormatError(f"{path}: no zip.train/zip.test files found")
    else:
        parts = [os.fspath(path)]
    digits: list[int] = []
    feats: list[np.ndarray] = []
    for part in parts:
        with open(part, "r") as handle:
            for i, line in enumerate(handle):
                cells = line.split()
                if not cells:
                    continue
                if len(cells) != 257:
                    raise DataFormatError(f"{part}: row {i + 1} has {len(cells)} fields, expected 257")
                digits.append(int(float(cells[0])))
                feats.append(np.array([float(c) for c in cells[1:]], dtype=np.float64))
    if not feats:
        raise DataFormatError(f"{path}: empty file")
    labels = np.asarray(digits, dtype=np.int64) + 1
    return LabeledDataset(np.vstack(feats), labels, 10, tuple(str(d) for d in range(10)))


def stratified_subset(dataset: LabeledDataset, per_class: int, seed: int) -> LabeledDataset:
    """Deterministic stratified subsample with ``per_class`` samples per class."""
    rng = np.random.default_rng(seed)
    chosen: list[np.ndarray] = []
    for c in range(1, dataset.class_count + 1):
        idx = np.flatnonzero(dataset.labels == c)
        if idx.size < per_class:
            raise ContractError(f"class {c} has {idx.size} samples, need {per_class}")
        chosen.append(np.sort(rng.choice(idx, size=per_class, replace=False)))
    keep = np.sort(np.concatenate(chosen))
    return subset(dataset, keep)


def subset(dataset: LabeledDataset, indices: np.ndarray) -> LabeledDataset:
    """Row subset preserving class numbering."""
    idx = np.asarray(indices, dtype=np.int64)
    return LabeledDataset(
        dataset.features[idx].copy(),
        dataset.labels[idx].copy(),
        dataset.class_count,
        dataset.label_names,
    )


def gen_multimodal(seed: int) -> LabeledDataset:
    """Generate the three-class multi-modal 2-D benchmark set (1200 samples/class).

    Class 1 has 15 sub-clusters (9x50 + 3x150 + 3x100 samples), class 2 has
    12 (3x100 + 6x50 + 3x200) and class 3 has 3 clusters of 400.  Cluster
    centres are drawn uniformly in the unit square and samples are isotropic
    Gaussian around them; the result is deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    blocks: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    for cls in (1, 2, 3):
        counts = _MULTIMODAL_COUNTS[cls]
        centers = rng.uniform(0.0, 1.0, size=(len(counts), 2))
        for center, count in zip(centers, counts):
            blocks.append(center + rng.normal(0.0, _MULTIMODAL_SIGMA, size=(count, 2)))
            labels.append(np.full(count, cls, dtype=np.int64))
    return LabeledDataset(np.vstack(blocks), np.concatenate(labels), 3, ("1", "2", "3"))


def kfold_indices(labels: np.ndarray, class_count: int, k: int, seed: int) -> list[FoldSplit]:
    """Stratified k-fold split over an index range, deterministic per seed."""
    if k < 2:
        raise ContractError("k must be at least 2")
    labels = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(seed)
    n = labels.shape[0]
    test_sets: list[list[np.ndarray]] = [[] for _ in range(k)]
    for c in range(1, class_count + 1):
        idx = np.flatnonzero(labels == c)
        if idx.size < k:
            raise ContractError(f"class {c} has {idx.size} samples, fewer than k={k}")
        perm = rng.permutation(idx)
        base, extra = divmod(idx.size, k)
        start = 0
        for f in range(k):
            size = base + (1 if f < extra else 0)
            test_sets[f].append(perm[start:start + size])
            start += size
    folds = []
    everything = np.arange(n)
    for f in range(k):
        test = np.sort(np.concatenate(test_sets[f]))
        mask = np.ones(n, dtype=bool)
        mask[test] = False
        folds.append(FoldSplit(everything[mask].copy(), test, f))
    return folds


def kfold(dataset: LabeledDataset | DissimilarityData, k: int, seed: int) -> list[FoldSplit]:
    """Stratified k-fold split, deterministic per seed.

    Each sample appears in exactly one test set and per-class test
    proportions stay within one sample of ``1/k``.
    """
    return kfold_indices(dataset.labels, dataset.class_count, k, seed)


def zscore_fit_apply(
    train: LabeledDataset, test: LabeledDataset
) -> tuple[LabeledDataset, LabeledDataset, tuple[np.ndarray, np.ndarray]]:
    """Standardize features to train-set mean 0 / variance 1.

    Constant train features map to all-zero columns; the test set is
    transformed with the train statistics.  Returns the transformed pair
    plus the ``(mean, std)`` parameters.
    """
    if train.n_samples < 1:
        raise ContractError("train set must be non-empty")
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    safe = np.where(std > 0.0, std, 1.0)
    train_out = LabeledDataset(
        (train.features - mean) / safe, train.labels.copy(), train.class_count, train.label_names
    )
    test_out = LabeledDataset(
        (test.features - mean) / safe, test.labels.copy(), test.class_count, test.label_names
    )
    return train_out, test_out, (mean, std)


def squared_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All-pairs squared Euclidean distances between rows of ``a`` and ``b``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    aa = np.sum(a * a, axis=1)[:, None]
    bb = np.sum(b * b, axis=1)[None, :]
    out = aa + bb - 2.0 * (a @ b.T)
    np.maximum(out, 0.0, out=out)
    return out


def vectorial_to_dissimilarity(dataset: LabeledDataset) -> DissimilarityData:
    """Pairwise squared Euclidean distances as relational data."""
    mat = squared_distance_matrix(dataset.features, dataset.features)
    mat = 0.5 * (mat + mat.T)
    np.fill_diagonal(mat, 0.0)
    return DissimilarityData(mat, dataset.labels.copy(), dataset.class_count)
