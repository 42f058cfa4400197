"""Classification error, cross-validated benchmarking, the Bonferroni
multi-comparison test, report emission and 2-D decision-boundary plots."""

from __future__ import annotations

import colorsys
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dataset import (
    DissimilarityData,
    LabeledDataset,
    kfold_indices,
    subset,
    zscore_fit_apply,
)
from .errors import ContractError, InvariantError
from .metric import gram_cross
from .models.common import state_distance_matrix
from .trainer import (
    InitStrategy,
    RELATIONAL_VARIANTS,
    Schedule,
    VariantConfig,
    train,
)


@dataclass(frozen=True)
class SuiteEntry:
    """One classifier of a benchmark: display name plus its full training setup."""

    name: str
    config: VariantConfig
    schedule: Schedule
    init: InitStrategy


@dataclass(frozen=True)
class RelationalTestView:
    """Test-time slice of a dissimilarity matrix for implicit prototypes."""

    cross: np.ndarray  # (n_test, n_train) dissimilarities to the training samples
    labels: np.ndarray  # (n_test,) true labels


@dataclass
class CvReport:
    """Per-fold errors per classifier plus the pairwise significance matrix."""

    names: list[str]
    fold_errors: np.ndarray  # (n_classifiers, k)
    alpha: float
    p_matrix: np.ndarray
    significant: np.ndarray

    @property
    def means(self) -> np.ndarray:
        return self.fold_errors.mean(axis=1)

    @property
    def stds(self) -> np.ndarray:
        return self.fold_errors.std(axis=1, ddof=1)


def state_test_distances(state, test) -> np.ndarray:
    """(n_test, M) squared distances of a test set to a trained state's prototypes."""
    if getattr(state, "coeffs", None) is not None:
        q_ready = state.coeffs is not None
        if isinstance(test, RelationalTestView):
            q = np.einsum("jn,jn->j", state.coeffs, state.coeffs @ _train_dissim(state))
            return test.cross @ state.coeffs.T - 0.5 * q[None, :]
        if state.train_features is None or state.sigma_k is None:
            raise ContractError("kernel state lacks its training features / kernel width")
        cross = gram_cross(state.train_features, test.features, state.sigma_k)
        kg = state.coeffs @ _train_gram(state)
        q = np.einsum("jn,jn->j", state.coeffs, kg)
        return 1.0 - 2.0 * cross @ state.coeffs.T + q[None, :]
    if isinstance(test, RelationalTestView):
        raise ContractError("vectorial state cannot score relational test data")
    return state_distance_matrix(state, test.features)


def _train_gram(state) -> np.ndarray:
    from .metric import build_gram

    return build_gram(state.train_features, state.sigma_k).gram


def _train_dissim(state) -> np.ndarray:
    mat = getattr(state, "train_dissim", None)
    if mat is None:
        raise ContractError("relational state lacks its training dissimilarities")
    return mat


def predict_labels(state, test) -> np.ndarray:
    """Winner-take-all labels; ties resolve to the lowest prototype index.

    Diverged (non-finite) prototypes never win: their distances count as +inf.
    """
    dists = state_test_distances(state, test)
    dists = np.where(np.isfinite(dists), dists, np.inf)
    return state.proto_labels[np.argmin(dists, axis=1)]


def classification_error(state, test) -> float:
    """Misclassified fraction of a test set under winner-take-all."""
    predicted = predict_labels(state, test)
    return float(np.mean(predicted != test.labels))


_worker_data = None
_worker_entries = None


def _init_worker(data, entries):
    global _worker_data, _worker_entries
    _worker_data = data
    _worker_entries = entries


def cell_seed(master_seed: int, entry: SuiteEntry, fold_id: int) -> int:
    """Stable per-cell seed from the config content (display name excluded),
    so identical configurations reproduce identical fold-error vectors."""
    blob = json.dumps(
        [master_seed, fold_id, repr(entry.config), repr(entry.schedule), repr(entry.init)],
        sort_keys=True,
    ).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


def run_cell(data, entry: SuiteEntry, fold, seed: int) -> float:
    """Train one classifier on one fold and return its test error."""
    variant = entry.config.variant
    if variant in RELATIONAL_VARIANTS:
        if not isinstance(data, DissimilarityData):
            raise ContractError(f"{variant} requires dissimilarity input")
        tr = fold.train_indices
        te = fold.test_indices
        sub = DissimilarityData(
            np.ascontiguousarray(data.matrix[np.ix_(tr, tr)]),
            data.labels[tr],
            data.class_count,
        )
        result = train(sub, entry.config, entry.schedule, entry.init, seed)
        result.state.train_indices = tr.copy()
        result.state.train_dissim = sub.matrix
        view = RelationalTestView(np.ascontiguousarray(data.matrix[np.ix_(te, tr)]), data.labels[te])
        return classification_error(result.state, view)
    if not isinstance(data, LabeledDataset):
        raise ContractError(f"{variant} requires vectorial input")
    train_ds = subset(data, fold.train_indices)
    test_ds = subset(data, fold.test_indices)
    ztrain, ztest, _ = zscore_fit_apply(train_ds, test_ds)
    result = train(ztrain, entry.config, entry.schedule, entry.init, seed)
    return classification_error(result.state, ztest)


def _run_cell_by_index(args):
    entry_idx, fold, seed = args
    return run_cell(_worker_data, _worker_entries[entry_idx], fold, seed)


def cross_validate(
    data: LabeledDataset | DissimilarityData,
    entries: list[SuiteEntry],
    k: int = 10,
    seed: int = 0,
    jobs: int = 1,
    alpha: float = 0.05,
) -> CvReport:
    """k-fold benchmark of several classifiers on shared folds.

    Every classifier sees the identical stratified folds; per-cell seeds
    derive from the master seed and the entry's content, so results do not
    depend on list order or worker count.
    """
    folds = kfold_indices(data.labels, data.class_count, k, seed)
    tasks = []
    for ei, entry in enumerate(entries):
        for fold in folds:
            tasks.append((ei, fold, cell_seed(seed, entry, fold.fold_id)))
    errors = np.empty((len(entries), k))
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(data, entries)
        ) as pool:
            results = list(pool.map(_run_cell_by_index, tasks))
    else:
        results = [run_cell(data, entries[ei], fold, s) for ei, fold, s in tasks]
    for (ei, fold, _), err in zip(tasks, results):
        errors[ei, fold.fold_id] = err
    if not np.all(np.isfinite(errors)) or errors.min() < 0.0 or errors.max() > 1.0:
        raise InvariantError("fold errors left the [0, 1] range")
    if len(entries) >= 2:
        p_matrix, significant = multi_compare(errors, alpha)
    else:
        p_matrix = np.zeros((len(entries), len(entries)))
        significant = np.zeros((len(entries), len(entries)), dtype=bool)
    return CvReport([e.name for e in entries], errors, alpha, p_matrix, significant)


def multi_compare(fold_errors: np.ndarray, alpha: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Paired two-sided t-tests on all classifier pairs with Bonferroni gate.

    A pair is significant iff p < alpha / n_pairs.  Zero-variance differences
    use the t-statistic limits: p = 1 for a zero mean difference, p = 0
    otherwise.
    """
    errs = np.asarray(fold_errors, dtype=np.float64)
    if errs.ndim != 2 or errs.shape[0] < 2:
        raise ContractError("need fold errors for at least two classifiers")
    n, k = errs.shape
    n_pairs = n * (n - 1) // 2
    threshold = alpha / n_pairs
    p_matrix = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            diff = errs[a] - errs[b]
            sd = diff.std(ddof=1)
            md = diff.mean()
            if sd == 0.0:
                p = 1.0 if md == 0.0 else 0.0
            else:
                t_stat = md / (sd / np.sqrt(k))
                p = 2.0 * stats.t.sf(abs(t_stat), k - 1)
            p_matrix[a, b] = p_matrix[b, a] = p
    significant = (p_matrix < threshold) & ~np.eye(n, dtype=bool)
    return p_matrix, significant


def emit_report(report: CvReport, fmt: str = "markdown") -> str:
    """Render the benchmark as a table: markdown mean (std) or full-precision CSV."""
    if fmt == "csv":
        k = report.fold_errors.shape[1]
        lines = ["classifier,mean,std," + ",".join(f"fold_{i}" for i in range(k))]
        for name, mean, std, row in zip(report.names, report.means, report.stds, report.fold_errors):
            cells = [name, f"{mean:.17g}", f"{std:.17g}"] + [f"{v:.17g}" for v in row]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
    if fmt != "markdown":
        raise ContractError("format must be 'markdown' or 'csv'")
    n = len(report.names)
    k = report.fold_errors.shape[1] if n else 0
    n_pairs = n * (n - 1) // 2
    lines = ["# Cross-validation report", ""]
    if n:
        lines.append(f"{k}-fold errors; family-wise alpha {report.alpha:g}"
                     + (f", pairwise threshold {report.alpha / n_pairs:.6g}" if n_pairs else ""))
        lines.append("")
    lines += ["| classifier | mean error (std) |", "| --- | --- |"]
    for name, mean, std in zip(report.names, report.means, report.stds):
        lines.append(f"| {name} | {mean:.4f} ({std:.4f}) |")
    if n >= 2:
        lines += ["", "## Significant pairwise differences", ""]
        header = "| | " + " | ".join(report.names) + " |"
        lines.append(header)
        lines.append("| --- |" + " --- |" * n)
        for a in range(n):
            cells = []
            for b in range(n):
                cells.append("" if a == b else ("*" if report.significant[a, b] else "."))
            lines.append(f"| {report.names[a]} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def parse_report_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Inverse of the CSV emitter: names plus the fold-error matrix."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    rows = [ln.split(",") for ln in lines[1:]]
    names = [r[0] for r in rows]
    errors = np.array([[float(v) for v in r[3:]] for r in rows])
    return names, errors


def boundary_grid(
    state, bounds: tuple[float, float, float, float], resolution: int
) -> tuple[np.ndarray, str]:
    """Predicted labels over a 2-D box plus an SVG rendering.

    Returns a (resolution, resolution) grid (rows follow y from the bottom
    bound up, columns follow x) and an SVG document with one colored cell
    per grid point and circular prototype markers.
    """
    if getattr(state, "codebook", None) is None:
        raise ContractError("boundary plots need a vectorial state")
    protos = state.codebook.prototypes
    if protos.shape[1] != 2:
        raise ContractError("boundary plots need 2-D data")
    if resolution < 1:
        raise ContractError("resolution must be positive")
    xmin, xmax, ymin, ymax = map(float, bounds)
    dx = (xmax - xmin) / resolution
    dy = (ymax - ymin) / resolution
    xs = xmin + (np.arange(resolution) + 0.5) * dx
    ys = ymin + (np.arange(resolution) + 0.5) * dy
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel()])
    dists = state_distance_matrix(state, points)
    grid = state.proto_labels[np.argmin(dists, axis=1)].reshape(resolution, resolution)

    n_classes = int(state.proto_labels.max())
    colors = _class_palette(n_classes)
    size = 480
    cell_w = size / resolution
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    for row in range(resolution):
        for col in range(resolution):
            color = colors[grid[row, col] - 1]
            px = col * cell_w
            py = (resolution - 1 - row) * cell_w  # SVG y axis points down
            parts.append(
                f'<rect x="{px:.2f}" y="{py:.2f}" width="{cell_w:.2f}" height="{cell_w:.2f}" '
                f'fill="{color}"/>'
            )
    for j in range(protos.shape[0]):
        px = (protos[j, 0] - xmin) / (xmax - xmin) * size
        py = size - (protos[j, 1] - ymin) / (ymax - ymin) * size
        color = colors[int(state.proto_labels[j]) - 1]
        parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="5" fill="{color}" '
            f'stroke="black" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    return grid, "\n".join(parts) + "\n"


def _class_palette(n: int) -> list[str]:
    colors = []
    for i in range(n):
        r, g, b = colorsys.hsv_to_rgb(i / max(n, 1), 0.55, 0.95)
        colors.append(f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}")
    return colors
