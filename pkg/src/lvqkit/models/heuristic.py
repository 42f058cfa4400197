"""Rule-based prototype classifiers: LVQ1 and LVQ2.1 with the mid-plane window."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ContractError
from ..metric import d_euclid2


@dataclass(eq=False)
class Codebook:
    """Labeled prototype vectors; the model of every vectorial variant."""

    prototypes: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        protos = np.ascontiguousarray(np.asarray(self.prototypes, dtype=np.float64))
        labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        self.prototypes = protos
        self.labels = labels
        if protos.ndim != 2 or protos.shape[0] < 1:
            raise ContractError("prototypes must be a non-empty M x D matrix")
        if labels.shape != (protos.shape[0],) or labels.min() < 1:
            raise ContractError("prototype labels must be positive integers, one per prototype")
        if not np.all(np.isfinite(protos)):
            raise ContractError("prototypes contain non-finite values")

    @property
    def n_prototypes(self) -> int:
        return self.prototypes.shape[0]

    def copy(self) -> "Codebook":
        return Codebook(self.prototypes.copy(), self.labels.copy())


@dataclass(frozen=True)
class Lvq21Config:
    """Mid-plane window of relative width omega; updates fire near the boundary."""

    omega_window: float

    def __post_init__(self):
        if not 0.0 < self.omega_window < 1.0:
            raise ContractError("window width must lie in (0, 1)")

    @property
    def s(self) -> float:
        return (1.0 - self.omega_window) / (1.0 + self.omega_window)


def classify(x: np.ndarray, codebook: Codebook, metric: Callable | None = None) -> int:
    """Label of the nearest prototype; ties broken by lowest prototype index."""
    if metric is None:
        metric = d_euclid2
    best = np.inf
    winner = 0
    for j in range(codebook.n_prototypes):
        d = metric(x, codebook.prototypes[j])
        if d < best:
            best = d
            winner = j
    return int(codebook.labels[winner])


def _nearest_pair(codebook: Codebook, x: np.ndarray, y: int) -> tuple[int, float, int, float]:
    """Indices and squared distances of nearest same-class / other-class prototypes."""
    diffs = codebook.prototypes - x
    dists = np.einsum("jk,jk->j", diffs, diffs)
    same = codebook.labels == y
    if not same.any() or same.all():
        raise ContractError("need at least one same-class and one other-class prototype")
    dp_all = np.where(same, dists, np.inf)
    dm_all = np.where(same, np.inf, dists)
    jp = int(np.argmin(dp_all))
    jm = int(np.argmin(dm_all))
    return jp, float(dists[jp]), jm, float(dists[jm])


def lvq1_step(x: np.ndarray, y: int, codebook: Codebook, eps: float) -> Codebook:
    """Move the overall winner toward x if labels agree, away otherwise."""
    if not 0.0 < eps < 1.0:
        raise ContractError("learning rate must lie in (0, 1)")
    out = codebook.copy()
    diffs = out.prototypes - x
    dists = np.einsum("jk,jk->j", diffs, diffs)
    j = int(np.argmin(dists))
    sign = 1.0 if out.labels[j] == y else -1.0
    out.prototypes[j] += sign * eps * (x - out.prototypes[j])
    return out


def lvq21_step(x: np.ndarray, y: int, codebook: Codebook, eps: float, cfg: Lvq21Config) -> Codebook:
    """Window-gated pair update of the nearest same- and other-class prototypes."""
    if not 0.0 < eps < 1.0:
        raise ContractError("learning rate must lie in (0, 1)")
    out = codebook.copy()
    jp, dp, jm, dm = _nearest_pair(out, np.asarray(x, dtype=np.float64), y)
    if dp == 0.0 or dm == 0.0:
        ratio = 1.0 if dp == dm else 0.0
    else:
        ratio = min(dm / dp, dp / dm)
    if ratio > cfg.s:
        out.prototypes[jp] += eps * (x - out.prototypes[jp])
        out.prototypes[jm] -= eps * (x - out.prototypes[jm])
    return out


@dataclass(eq=False)
class HeuristicState:
    """Trained rule-based model: a codebook plus the LVQ2.1 window, if any."""

    variant: str
    codebook: Codebook
    lvq21: Lvq21Config | None = None
    # duck-typed metric slots shared with the cost-based state classes
    relevance = None
    omega = None
    relevances = None
    omegas = None
    coeffs = None
    coeff_labels = None
    sigma_k = None
    train_features = None
    train_indices = None

    @property
    def proto_labels(self) -> np.ndarray:
        return self.codebook.labels

    def copy(self) -> "HeuristicState":
        return HeuristicState(self.variant, self.codebook.copy(), self.lvq21)
