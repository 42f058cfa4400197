"""Shared pieces of the cost-function based variants: the logistic link,
relative distance difference, and bulk distance computations under every
supported metric."""

from __future__ import annotations

import numpy as np

from ..dataset import squared_distance_matrix
from ..errors import ContractError


def sigmoid(z):
    """Logistic function, monotone from 0 to 1 with slope 1/4 at the origin."""
    return 1.0 / (1.0 + np.exp(-z))


def sigmoid_prime(z):
    s = sigmoid(z)
    return s * (1.0 - s)


def mu(d_plus: float, d_minus: float) -> float:
    """Relative distance difference (d+ - d-) / (d+ + d-), in [-1, 1].

    Negative iff the sample would be classified correctly by the two
    winning prototypes.
    """
    denom = d_plus + d_minus
    if denom <= 0.0:
        raise ContractError("both winner distances are zero")
    return (d_plus - d_minus) / denom


def mu_terms(dp: float, dm: float) -> tuple[float, float, float, float]:
    """(mu, phi'(mu), dmu/dd+, -dmu/dd-) for one sample's winner pair."""
    denom = dp + dm
    if denom <= 0.0:
        raise ContractError("both winner distances are zero")
    m = (dp - dm) / denom
    phi_p = sigmoid_prime(m)
    mup = 2.0 * dm / (denom * denom)
    mum = 2.0 * dp / (denom * denom)
    return m, phi_p, mup, mum


def nearest_pair(dists: np.ndarray, plabels: np.ndarray, y: int) -> tuple[int, float, int, float]:
    """Nearest same-class / other-class prototype given one distance row."""
    same = plabels == y
    if not same.any() or same.all():
        raise ContractError("need at least one same-class and one other-class prototype")
    dp_all = np.where(same, dists, np.inf)
    dm_all = np.where(same, np.inf, dists)
    jp = int(np.argmin(dp_all))
    jm = int(np.argmin(dm_all))
    return jp, float(dists[jp]), jm, float(dists[jm])


def distance_matrix_euclid(X: np.ndarray, protos: np.ndarray) -> np.ndarray:
    return squared_distance_matrix(X, protos)


def distance_matrix_relevance(X: np.ndarray, protos: np.ndarray, lam: np.ndarray) -> np.ndarray:
    root = np.sqrt(np.maximum(lam, 0.0))
    return squared_distance_matrix(X * root, protos * root)


def distance_matrix_omega(X: np.ndarray, protos: np.ndarray, omega: np.ndarray) -> np.ndarray:
    return squared_distance_matrix(X @ omega.T, protos @ omega.T)


def distance_matrix_local_relevance(X: np.ndarray, protos: np.ndarray, lams: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    out = np.empty((n, protos.shape[0]))
    for j in range(protos.shape[0]):
        diff = X - protos[j]
        out[:, j] = (diff * diff) @ lams[j]
    return out


def distance_matrix_local_omega(X: np.ndarray, protos: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    out = np.empty((n, omegas.shape[0]))
    for j in range(omegas.shape[0]):
        proj = (X - protos[j]) @ omegas[j].T
        out[:, j] = np.einsum("nk,nk->n", proj, proj)
    return out


def state_distance_matrix(state, X: np.ndarray) -> np.ndarray:
    """(N, M) squared distances from rows of X to a vectorial state's prototypes."""
    protos = state.codebook.prototypes
    if getattr(state, "relevance", None) is not None:
        return distance_matrix_relevance(X, protos, state.relevance)
    if getattr(state, "omega", None) is not None:
        return distance_matrix_omega(X, protos, state.omega)
    if getattr(state, "relevances", None) is not None:
        return distance_matrix_local_relevance(X, protos, state.relevances)
    if getattr(state, "omegas", None) is not None:
        return distance_matrix_local_omega(X, protos, state.omegas)
    return distance_matrix_euclid(X, protos)


def margin_cost_from_distances(dists: np.ndarray, labels: np.ndarray, plabels: np.ndarray) -> float:
    """Sum of phi(mu) over samples given a full distance matrix."""
    n = dists.shape[0]
    same = labels[:, None] == plabels[None, :]
    if not same.any(axis=1).all() or same.all(axis=1).any():
        raise ContractError("some sample lacks a same-class or other-class prototype")
    dp = np.where(same, dists, np.inf).min(axis=1)
    dm = np.where(same, np.inf, dists).min(axis=1)
    denom = dp + dm
    if np.any(denom <= 0.0):
        raise ContractError("both winner distances are zero for some sample")
    return float(np.sum(sigmoid((dp - dm) / denom)))
