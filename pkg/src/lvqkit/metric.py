"""Distance computations and metric-parameter normalization.

Every distance in the toolkit is a *squared* distance: the update rules all
carry gradients of squared forms, so the squared convention keeps steps and
cost functions consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DissimilarityData, LabeledDataset, squared_distance_matrix
from .errors import ContractError


@dataclass(frozen=True, eq=False)
class RelevanceVector:
    """Non-negative per-feature weights summing to one (diagonal metric)."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.ascontiguousarray(np.asarray(self.lam, dtype=np.float64))
        object.__setattr__(self, "lam", lam)
        if lam.ndim != 1 or lam.min() < 0.0 or abs(lam.sum() - 1.0) > 1e-12:
            raise ContractError("relevance vector must be non-negative and sum to 1")


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    """Square-root factor of a trace-normalized positive semi-definite metric."""

    omega: np.ndarray

    def __post_init__(self):
        omega = np.ascontiguousarray(np.asarray(self.omega, dtype=np.float64))
        object.__setattr__(self, "omega", omega)
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
            raise ContractError("omega must be a square matrix")
        if abs(np.sum(omega * omega) - 1.0) > 1e-12:
            raise ContractError("trace of omega^T omega must be 1")

    @property
    def lam_matrix(self) -> np.ndarray:
        return self.omega.T @ self.omega


@dataclass(frozen=True, eq=False)
class KernelGram:
    """Gaussian kernel Gram matrix over a training set."""

    gram: np.ndarray
    sigma_k: float

    def __post_init__(self):
        gram = np.ascontiguousarray(np.asarray(self.gram, dtype=np.float64))
        object.__setattr__(self, "gram", gram)

    @property
    def n_samples(self) -> int:
        return self.gram.shape[0]


def d_euclid2(x: np.ndarray, w: np.ndarray) -> float:
    """Squared Euclidean distance."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.shape != w.shape:
        raise ContractError(f"dimension mismatch: {x.shape} vs {w.shape}")
    diff = x - w
    return float(np.dot(diff, diff))


def d_relevance(x: np.ndarray, w: np.ndarray, r: RelevanceVector | np.ndarray) -> float:
    """Relevance-weighted squared distance sum_m lambda_m (x_m - w_m)^2."""
    lam = r.lam if isinstance(r, RelevanceVector) else np.asarray(r, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.shape != w.shape or lam.shape != x.shape:
        raise ContractError("dimension mismatch between inputs and relevance vector")
    diff = x - w
    return float(np.dot(lam, diff * diff))


def d_matrix(x: np.ndarray, w: np.ndarray, m: MetricMatrix | np.ndarray) -> float:
    """Full-matrix squared distance ||Omega (x - w)||^2."""
    omega = m.omega if isinstance(m, MetricMatrix) else np.asarray(m, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.shape != w.shape or omega.shape[1] != x.shape[0]:
        raise ContractError("dimension mismatch between inputs and omega")
    proj = omega @ (x - w)
    return float(np.dot(proj, proj))


def build_gram(dataset: LabeledDataset | np.ndarray, sigma_k: float) -> KernelGram:
    """Gaussian Gram matrix k(x_i, x_j) = exp(-||x_i - x_j||^2 / (2 sigma_k^2))."""
    if sigma_k <= 0.0:
        raise ContractError("kernel width must be positive")
    feats = dataset.features if isinstance(dataset, LabeledDataset) else np.asarray(dataset, dtype=np.float64)
    d2 = squared_distance_matrix(feats, feats)
    gram = np.exp(-d2 / (2.0 * sigma_k * sigma_k))
    gram = 0.5 * (gram + gram.T)
    np.fill_diagonal(gram, 1.0)
    return KernelGram(gram, float(sigma_k))


def gram_cross(train_features: np.ndarray, other_features: np.ndarray, sigma_k: float) -> np.ndarray:
    """Kernel values k(x_other, x_train) for out-of-sample points, shape (n_other, n_train)."""
    if sigma_k <= 0.0:
        raise ContractError("kernel width must be positive")
    d2 = squared_distance_matrix(other_features, train_features)
    return np.exp(-d2 / (2.0 * sigma_k * sigma_k))


def d_feature2(sample_index: int, coeffs: np.ndarray, gram: KernelGram | np.ndarray) -> float:
    """Squared feature-space distance between a kernel image and an implicit prototype.

    Computed entirely from Gram entries:
    ``K_ii - 2 sum_m g_m K_im + sum_{s,t} g_s g_t K_st``.
    """
    k = gram.gram if isinstance(gram, KernelGram) else np.asarray(gram, dtype=np.float64)
    g = np.asarray(coeffs, dtype=np.float64)
    n = k.shape[0]
    if g.shape != (n,):
        raise ContractError("coefficient row length must match the Gram matrix")
    if not 0 <= sample_index < n:
        raise ContractError(f"sample index {sample_index} out of range")
    kg = k @ g
    return float(k[sample_index, sample_index] - 2.0 * kg[sample_index] + np.dot(g, kg))


def d_relational(sample_index: int, coeffs: np.ndarray, data: DissimilarityData | np.ndarray) -> float:
    """Squared distance to an implicit prototype from pairwise dissimilarities.

    ``[D a]_i - 1/2 a^T D a`` for a coefficient row summing to one.
    """
    mat = data.matrix if isinstance(data, DissimilarityData) else np.asarray(data, dtype=np.float64)
    a = np.asarray(coeffs, dtype=np.float64)
    n = mat.shape[0]
    if a.shape != (n,):
        raise ContractError("coefficient row length must match the matrix")
    if abs(a.sum() - 1.0) > 1e-9:
        raise ContractError("coefficient row must sum to 1 within 1e-9")
    if not 0 <= sample_index < n:
        raise ContractError(f"sample index {sample_index} out of range")
    da = mat @ a
    return float(da[sample_index] - 0.5 * np.dot(a, da))


def harmonic_distance(distances) -> float:
    """Harmonic mean M / sum_j (1/d_j) of strictly positive distances."""
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 1 or d.size < 1:
        raise ContractError("need at least one distance")
    if d.min() <= 0.0:
        raise ContractError("harmonic aggregation requires strictly positive distances")
    return float(d.size / np.sum(1.0 / d))


def normalize_relevance(raw: np.ndarray) -> RelevanceVector:
    """Clip negatives to zero and rescale to sum 1."""
    lam = np.asarray(raw, dtype=np.float64).copy()
    np.maximum(lam, 0.0, out=lam)
    total = lam.sum()
    if total <= 0.0:
        raise ContractError("relevance vector is all zero after clipping")
    return RelevanceVector(lam / total)


def normalize_matrix(raw: np.ndarray) -> MetricMatrix:
    """Rescale omega so that trace(omega^T omega) = 1."""
    omega = np.asarray(raw, dtype=np.float64)
    total = np.sum(omega * omega)
    if total <= 0.0:
        raise ContractError("omega is all zero")
    return MetricMatrix(omega / np.sqrt(total))
