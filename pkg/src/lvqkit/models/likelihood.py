"""Likelihood-ratio-maximization branch: RSLVQ and its matrix, kernel and
relational extensions.

Class-conditional densities are Gaussian mixtures with one component per
prototype, a single global softness sigma and priors that cancel when
uniform.  All posteriors use max-subtraction before exponentiation so that
sigma values as small as 1e-3 stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import LabeledDataset, DissimilarityData
from ..errors import ContractError
from ..metric import KernelGram, normalize_matrix
from . import implicit
from .common import state_distance_matrix
from .heuristic import Codebook

LIKELIHOOD_VARIANTS = ("rslvq", "mrslvq", "krslvq", "rrslvq")


@dataclass(frozen=True, eq=False)
class SoftConfig:
    """Mixture softness and component priors (uniform when priors is None)."""

    sigma: float
    priors: np.ndarray | None = None

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ContractError("softness sigma must be positive")
        if self.priors is not None:
            p = np.asarray(self.priors, dtype=np.float64)
            object.__setattr__(self, "priors", p)
            if p.min() < 0.0 or abs(p.sum() - 1.0) > 1e-9:
                raise ContractError("priors must be non-negative and sum to 1")

    def prior_vector(self, m: int) -> np.ndarray:
        if self.priors is None:
            return np.full(m, 1.0 / m)
        if self.priors.shape != (m,):
            raise ContractError("priors length must match the prototype count")
        return self.priors


@dataclass(eq=False)
class LikelihoodState:
    """Model state of one likelihood-branch variant."""

    variant: str
    soft: SoftConfig
    codebook: Codebook | None = None
    omega: np.ndarray | None = None
    coeffs: np.ndarray | None = None
    coeff_labels: np.ndarray | None = None
    sigma_k: float | None = None
    train_features: np.ndarray | None = None
    train_indices: np.ndarray | None = None
    relevance = None
    relevances = None
    omegas = None

    def __post_init__(self):
        if self.variant not in LIKELIHOOD_VARIANTS:
            raise ContractError(f"unknown likelihood variant {self.variant!r}")

    @property
    def proto_labels(self) -> np.ndarray:
        return self.codebook.labels if self.codebook is not None else self.coeff_labels

    def copy(self) -> "LikelihoodState":
        def cp(a):
            return None if a is None else a.copy()

        return LikelihoodState(
            self.variant,
            self.soft,
            codebook=self.codebook.copy() if self.codebook is not None else None,
            omega=cp(self.omega),
            coeffs=cp(self.coeffs),
            coeff_labels=cp(self.coeff_labels),
            sigma_k=self.sigma_k,
            train_features=cp(self.train_features),
            train_indices=cp(self.train_indices),
        )


def posteriors_from_distances(
    dists: np.ndarray, plabels: np.ndarray, priors: np.ndarray, y: int, sigma: float
) -> tuple[np.ndarray, np.ndarray]:
    """Stabilized softmax assignments (class-restricted, global) from one distance row.

    Non-finite distances (diverged prototypes) count as infinitely far.
    """
    same = plabels == y
    if not same.any():
        raise ContractError(f"no prototype for class {y}")
    dists = np.where(np.isfinite(dists), np.asarray(dists, dtype=np.float64), np.inf)
    if not np.isfinite(dists[same]).any():
        raise ContractError(f"all class-{y} prototypes have diverged")
    f = -dists / (2.0 * sigma * sigma)
    e_all = priors * np.exp(f - f.max())
    p_all = e_all / e_all.sum()
    fy = f[same]
    e_y = priors[same] * np.exp(fy - fy.max())
    p_y = np.zeros_like(p_all)
    p_y[same] = e_y / e_y.sum()
    return p_y, p_all


def _state_distance_row(state: LikelihoodState, x: np.ndarray) -> np.ndarray:
    if state.omega is not None:
        proj = (x - state.codebook.prototypes) @ state.omega.T
        return np.einsum("jk,jk->j", proj, proj)
    diff = state.codebook.prototypes - x
    return np.einsum("jk,jk->j", diff, diff)


def assignment_probs(x: np.ndarray, y: int, state: LikelihoodState) -> tuple[np.ndarray, np.ndarray]:
    """(P_y(j|x), P(j|x)) aligned to prototype indices; P_y is zero off-class."""
    dists = _state_distance_row(state, np.asarray(x, dtype=np.float64))
    priors = state.soft.prior_vector(dists.shape[0])
    return posteriors_from_distances(dists, state.proto_labels, priors, y, state.soft.sigma)


def likelihood_distance_matrix(state, X=None, gram=None, dissim=None) -> np.ndarray:
    """(N, M) squared distances under the state's representation."""
    if state.coeffs is not None:
        if gram is not None:
            g = gram.gram if isinstance(gram, KernelGram) else gram
            return implicit.kernel_distance_matrix(state.coeffs, g).T
        if dissim is not None:
            d = dissim.matrix if isinstance(dissim, DissimilarityData) else dissim
            return implicit.relational_distance_matrix(state.coeffs, d).T
        raise ContractError("implicit state needs a Gram or dissimilarity matrix")
    return state_distance_matrix(state, X)


def rslvq_cost_from_distances(
    dists: np.ndarray, labels: np.ndarray, plabels: np.ndarray, soft: SoftConfig
) -> float:
    """Log likelihood ratio from a full (N, M) distance matrix.

    Both log-sums use their own max shift so that strongly negative ratios
    stay finite instead of underflowing to -inf.
    """
    priors = soft.prior_vector(plabels.shape[0])
    dists = np.where(np.isfinite(dists), dists, np.inf)
    f = -dists / (2.0 * soft.sigma ** 2) + np.log(priors)[None, :]
    same = labels[:, None] == plabels[None, :]
    if not same.any(axis=1).all():
        raise ContractError("some sample class has no prototype")
    shift_all = f.max(axis=1)
    log_all = shift_all + np.log(np.exp(f - shift_all[:, None]).sum(axis=1))
    f_same = np.where(same, f, -np.inf)
    shift_y = f_same.max(axis=1)
    safe_shift = np.where(np.isfinite(shift_y), shift_y, 0.0)
    log_y = safe_shift + np.log(np.exp(f_same - safe_shift[:, None]).sum(axis=1))
    # a class whose components all diverged contributes -inf, not NaN
    log_y = np.where(np.isfinite(shift_y), log_y, -np.inf)
    return float(np.sum(log_y - log_all))


def rslvq_cost(dataset: LabeledDataset | None, state: LikelihoodState, gram=None, dissim=None) -> float:
    """Log likelihood ratio sum_i log(p(x_i, y_i | W) / p(x_i | W)); always <= 0."""
    if state.coeffs is not None and dissim is not None:
        labels = dissim.labels if isinstance(dissim, DissimilarityData) else dataset.labels
        dists = likelihood_distance_matrix(state, dissim=dissim)
    elif state.coeffs is not None:
        labels = dataset.labels
        dists = likelihood_distance_matrix(state, gram=gram)
    else:
        labels = dataset.labels
        dists = likelihood_distance_matrix(state, X=dataset.features)
    return rslvq_cost_from_distances(dists, labels, state.proto_labels, state.soft)


def rslvq_step(x: np.ndarray, y: int, state: LikelihoodState, eps: float) -> LikelihoodState:
    """Gradient-ascent step: attract by P_y - P, repel wrong classes by P."""
    if not 0.0 < eps < 1.0:
        raise ContractError("learning rate must lie in (0, 1)")
    out = state.copy()
    x = np.asarray(x, dtype=np.float64)
    p_y, p_all = assignment_probs(x, y, out)
    protos = out.codebook.prototypes
    same = out.codebook.labels == y
    gates = np.where(same, p_y - p_all, -p_all)
    protos += (eps / out.soft.sigma ** 2) * gates[:, None] * (x - protos)
    np.clip(protos, -1e100, 1e100, out=protos)  # pin runaway prototypes
    return out


def mrslvq_omega_gradient(
    x: np.ndarray,
    y: int,
    protos: np.ndarray,
    plabels: np.ndarray,
    omega: np.ndarray,
    soft: SoftConfig,
) -> np.ndarray:
    """Per-sample ascent gradient of the log ratio w.r.t. the metric factor omega."""
    u = x - protos
    proj = u @ omega.T
    dists = np.einsum("jk,jk->j", proj, proj)
    priors = soft.prior_vector(protos.shape[0])
    p_y, p_all = posteriors_from_distances(dists, plabels, priors, y, soft.sigma)
    gates = np.where(plabels == y, p_y - p_all, -p_all)
    return -(1.0 / soft.sigma ** 2) * np.einsum("j,jl,jm->lm", gates, proj, u)


def mrslvq_step(
    x: np.ndarray, y: int, state: LikelihoodState, eps_w: float, eps_omega: float
) -> LikelihoodState:
    """Matrix-metric ascent step for prototypes and omega."""
    if not 0.0 < eps_w < 1.0:
        raise ContractError("learning rate must lie in (0, 1)")
    if state.omega is None:
        raise ContractError("state carries no metric matrix")
    out = state.copy()
    x = np.asarray(x, dtype=np.float64)
    protos = out.codebook.prototypes
    omega = out.omega
    u = x - protos
    proj = u @ omega.T
    dists = np.einsum("jk,jk->j", proj, proj)
    priors = out.soft.prior_vector(protos.shape[0])
    p_y, p_all = posteriors_from_distances(dists, out.codebook.labels, priors, y, out.soft.sigma)
    gates = np.where(out.codebook.labels == y, p_y - p_all, -p_all)
    lam_u = proj @ omega
    protos += (eps_w / out.soft.sigma ** 2) * gates[:, None] * lam_u
    np.clip(protos, -1e100, 1e100, out=protos)  # pin runaway prototypes
    if eps_omega != 0.0:
        grad = -(1.0 / out.soft.sigma ** 2) * np.einsum("j,jl,jm->lm", gates, proj, u)
        out.omega = normalize_matrix(omega + eps_omega * grad).omega
    return out


def krslvq_step(
    sample_index: int, y: int, state: LikelihoodState, eps: float, gram: KernelGram | np.ndarray
) -> LikelihoodState:
    """Kernelized ascent step: every coefficient row moves by its posterior gate."""
    if not 0.0 < eps < 1.0:
        raise ContractError("learning rate must lie in (0, 1)")
    if state.coeffs is None:
        raise ContractError("state carries no coefficient rows")
    g = gram.gram if isinstance(gram, KernelGram) else np.asarray(gram)
    out = state.copy()
    dists = implicit.kernel_distance_row(out.coeffs, g, sample_index)
    priors = out.soft.prior_vector(dists.shape[0])
    p_y, p_all = posteriors_from_distances(dists, out.coeff_labels, priors, y, out.soft.sigma)
    gates = np.where(out.coeff_labels == y, p_y - p_all, -p_all)
    c = (eps / out.soft.sigma ** 2) * gates
    implicit.scale_inject(out.coeffs, c, sample_index)
    return out


def rrslvq_step(
    sample_index: int, y: int, state: LikelihoodState, eps: float, data: DissimilarityData | np.ndarray
) -> LikelihoodState:
    """Relational ascent step on all coefficient rows, renormalized to sum 1."""
    if not 0.0 < eps < 1.0:
        raise ContractError("learning rate must lie in (0, 1)")
    if state.coeffs is None:
        raise ContractError("state carries no coefficient rows")
    d = data.matrix if isinstance(data, DissimilarityData) else np.asarray(data)
    out = state.copy()
    u = out.coeffs @ d
    q = np.einsum("jn,jn->j", out.coeffs, u)
    dists = u[:, sample_index] - 0.5 * q
    priors = out.soft.prior_vector(dists.shape[0])
    p_y, p_all = posteriors_from_distances(dists, out.coeff_labels, priors, y, out.soft.sigma)
    gates = np.where(out.coeff_labels == y, p_y - p_all, -p_all)
    coef = eps / (2.0 * out.soft.sigma ** 2)
    out.coeffs -= coef * gates[:, None] * (d[sample_index][None, :] - u)
    implicit.renormalize_rows(out.coeffs, np.arange(out.coeffs.shape[0]))
    return out
