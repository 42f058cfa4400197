"""Implicit prototype representations: coefficient rows over training samples.

Kernel variants store rows ``g_j`` combining kernel images, relational
variants rows ``a_j`` combining data points (``sum_m a_jm = 1``).  Distances
come straight from the Gram / dissimilarity matrix, never from explicit
feature vectors.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractError


def init_coeff_rows(
    data_labels: np.ndarray,
    proto_labels: np.ndarray,
    rng: np.random.Generator,
    jitter: float = 1e-4,
) -> np.ndarray:
    """Rows uniform over each prototype's class samples, summing to one.

    With more than one prototype per class a tiny seeded perturbation breaks
    the symmetry between identical rows (renormalized back to sum 1).
    """
    n = data_labels.shape[0]
    m = proto_labels.shape[0]
    rows = np.zeros((m, n))
    counts = {c: int(np.sum(proto_labels == c)) for c in np.unique(proto_labels)}
    for j, c in enumerate(proto_labels):
        members = data_labels == c
        k = int(members.sum())
        if k == 0:
            raise ContractError(f"no training samples for prototype class {c}")
        row = np.where(members, 1.0 / k, 0.0)
        if counts[int(c)] > 1:
            row = row + np.where(members, rng.uniform(0.0, jitter / k, size=n), 0.0)
            row /= row.sum()
        rows[j] = row
    return rows


def kernel_distance_row(coeffs: np.ndarray, gram: np.ndarray, i: int) -> np.ndarray:
    """Squared feature-space distances of sample i to every implicit prototype."""
    kg_col = coeffs @ gram[:, i]
    q = np.einsum("jn,jn->j", coeffs, coeffs @ gram)
    return gram[i, i] - 2.0 * kg_col + q


def kernel_distance_matrix(coeffs: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """(M, N) squared feature-space distances of all samples to all prototypes."""
    kg = coeffs @ gram
    q = np.einsum("jn,jn->j", coeffs, kg)
    return np.diagonal(gram)[None, :] - 2.0 * kg + q[:, None]


def scale_inject(coeffs: np.ndarray, c: np.ndarray, i: int) -> None:
    """In-place row updates g_j <- g_j + c_j (e_i - g_j); preserves row sums of 1."""
    coeffs *= (1.0 - c)[:, None]
    coeffs[:, i] += c


def relational_distance_row(coeffs: np.ndarray, dissim: np.ndarray, i: int) -> np.ndarray:
    """Squared relational distances of sample i to every implicit prototype."""
    u = coeffs @ dissim
    q = np.einsum("jn,jn->j", coeffs, u)
    return u[:, i] - 0.5 * q


def relational_distance_matrix(coeffs: np.ndarray, dissim: np.ndarray) -> np.ndarray:
    """(M, N) squared relational distances of all samples to all prototypes."""
    u = coeffs @ dissim
    q = np.einsum("jn,jn->j", coeffs, u)
    return u - 0.5 * q[:, None]


def renormalize_rows(coeffs: np.ndarray, rows) -> None:
    """Rescale the given coefficient rows back to sum 1 (in place)."""
    for j in np.atleast_1d(rows):
        total = coeffs[j].sum()
        if abs(total) < 1e-300:
            raise ContractError("coefficient row sum collapsed to zero")
        coeffs[j] /= total
