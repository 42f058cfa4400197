"""Margin-maximization branch: GLVQ and its neighborhood, harmonic,
adaptive-metric, kernel and relational variants.

All steps are stochastic-gradient updates of the cost ``sum_i phi(mu(x_i))``
with phi the logistic sigmoid; mu always uses the ``(d+ + d-)^2`` form of the
quotient-rule denominators.  Step functions are pure: they return an updated
copy of the state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import LabeledDataset, DissimilarityData
from ..errors import ContractError
from ..metric import KernelGram, normalize_matrix, normalize_relevance
from . import implicit
from .common import (  # noqa: F401  (mu and sigmoid re-exported as public API)
    margin_cost_from_distances,
    mu,
    mu_terms,
    nearest_pair,
    sigmoid,
    state_distance_matrix,
)
from .heuristic import Codebook

MARGIN_VARIANTS = (
    "glvq", "sng", "sgng", "h2mlvq",
    "grlvq", "gmlvq", "lgrlvq", "lgmlvq",
    "kglvq", "rglvq",
)

_DIST_FLOOR = 1e-12


@dataclass(eq=False)
class MarginState:
    """Model state of one margin-branch variant.

    Vectorial variants carry a codebook plus optional metric parameters;
    kernel/relational variants carry coefficient rows instead, together with
    whatever the classifier needs at test time (kernel width, training
    features or training indices).
    """

    variant: str
    codebook: Codebook | None = None
    relevance: np.ndarray | None = None
    omega: np.ndarray | None = None
    relevances: np.ndarray | None = None
    omegas: np.ndarray | None = None
    coeffs: np.ndarray | None = None
    coeff_labels: np.ndarray | None = None
    sigma_k: float | None = None
    train_features: np.ndarray | None = None
    train_indices: np.ndarray | None = None

    def __post_init__(self):
        if self.variant not in MARGIN_VARIANTS:
            raise ContractError(f"unknown margin variant {self.variant!r}")

    @property
    def proto_labels(self) -> np.ndarray:
        return self.codebook.labels if self.codebook is not None else self.coeff_labels

    def copy(self) -> "MarginState":
        def cp(a):
            return None if a is None else a.copy()

        return MarginState(
            self.variant,
            codebook=self.codebook.copy() if self.codebook is not None else None,
            relevance=cp(self.relevance),
            omega=cp(self.omega),
            relevances=cp(self.relevances),
            omegas=cp(self.omegas),
            coeffs=cp(self.coeffs),
            coeff_labels=cp(self.coeff_labels),
            sigma_k=self.sigma_k,
            train_features=cp(self.train_features),
            train_indices=cp(self.train_indices),
        )


def margin_distance_matrix(state, X=None, gram=None, dissim=None) -> np.ndarray:
    """(N, M) squared distances under the state's own metric/representation."""
    if state.coeffs is not None:
        if gram is not None:
            g = gram.gram if isinstance(gram, KernelGram) else gram
            return implicit.kernel_distance_matrix(state.coeffs, g).T
        if dissim is not None:
            d = dissim.matrix if isinstance(dissim, DissimilarityData) else dissim
            return implicit.relational_distance_matrix(state.coeffs, d).T
        raise ContractError("implicit state needs a Gram or dissimilarity matrix")
    return state_distance_matrix(state, X)


def glvq_cost(dataset: LabeledDataset | None, state, gram=None, dissim=None) -> float:
    """Margin cost: sum over samples of phi(mu); lies in (0, N).

    Vectorial states take the dataset; kernel/relational states take their
    training Gram / dissimilarity matrix instead (labels from the dataset or
    relational container).
    """
    if state.coeffs is not None and dissim is not None:
        labels = dissim.labels if isinstance(dissim, DissimilarityData) else dataset.labels
        dists = margin_distance_matrix(state, dissim=dissim)
    elif state.coeffs is not None:
        labels = dataset.labels
        dists = margin_distance_matrix(state, gram=gram)
    else:
        labels = dataset.labels
        dists = margin_distance_matrix(state, X=dataset.features)
    return margin_cost_from_distances(dists, labels, state.proto_labels)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ContractError("learning rate must lie in (0, 1)")


def _euclid_row(protos: np.ndarray, x: np.ndarray) -> np.ndarray:
    diff = protos - x
    return np.einsum("jk,jk->j", diff, diff)


def glvq_step(x: np.ndarray, y: int, state: MarginState, eps: float) -> MarginState:
    """Attract the nearest same-class prototype, repel the nearest other-class one."""
    _check_eps(eps)
    out = state.copy()
    protos = out.codebook.prototypes
    jp, dp, jm, dm = nearest_pair(_euclid_row(protos, x), out.codebook.labels, y)
    _, phi_p, mup, mum = mu_terms(dp, dm)
    protos[jp] += 2.0 * eps * phi_p * mup * (x - protos[jp])
    protos[jm] -= 2.0 * eps * phi_p * mum * (x - protos[jm])
    return out


def sng_step(x: np.ndarray, y: int, state: MarginState, eps: float, neigh_range: float) -> MarginState:
    """Rank-weighted update of every same-class prototype plus one repulsion.

    Each same-class prototype moves toward x with its own distance replacing
    d+ in mu, scaled by exp(-rank / neigh_range); the nearest other-class
    prototype is pushed away exactly as in the plain margin step.
    """
    _check_eps(eps)
    if neigh_range <= 0.0:
        raise ContractError("neighborhood range must be positive")
    out = state.copy()
    protos = out.codebook.prototypes
    plabels = out.codebook.labels
    dists = _euclid_row(protos, x)
    jp, dp, jm, dm = nearest_pair(dists, plabels, y)
    same_idx = np.flatnonzero(plabels == y)
    for j in same_idx:
        rank = 0
        for l in same_idx:
            if l != j and (dists[l] < dists[j] or (dists[l] == dists[j] and l < j)):
                rank += 1
        _, phi_p, mup, _ = mu_terms(float(dists[j]), dm)
        coef = 2.0 * eps * phi_p * mup * np.exp(-rank / neigh_range)
        protos[j] += coef * (x - protos[j])
    _, phi_p, _, mum = mu_terms(dp, dm)
    protos[jm] -= 2.0 * eps * phi_p * mum * (x - protos[jm])
    return out


def h2mlvq_step(x: np.ndarray, y: int, state: MarginState, eps: float) -> MarginState:
    """Every prototype moves through the harmonic-mean chain rule.

    d+ and d- in mu are harmonic means over all same-/other-class prototype
    distances; the per-prototype factor is dH/dd_j = (H/d_j)^2 / M_class.
    Distances are floored at 1e-12 to survive exact prototype hits.
    """
    _check_eps(eps)
    out = state.copy()
    protos = out.codebook.prototypes
    plabels = out.codebook.labels
    dists = np.maximum(_euclid_row(protos, x), _DIST_FLOOR)
    same = plabels == y
    if not same.any() or same.all():
        raise ContractError("need at least one same-class and one other-class prototype")
    hp = same.sum() / np.sum(1.0 / dists[same])
    hm = (~same).sum() / np.sum(1.0 / dists[~same])
    _, phi_p, mup, mum = mu_terms(float(hp), float(hm))
    for j in range(protos.shape[0]):
        if same[j]:
            coef = 2.0 * eps * phi_p * mup * (hp / dists[j]) ** 2 / same.sum()
            protos[j] += coef * (x - protos[j])
        else:
            coef = 2.0 * eps * phi_p * mum * (hm / dists[j]) ** 2 / (~same).sum()
            protos[j] -= coef * (x - protos[j])
    return out


def relevance_gradient(
    x: np.ndarray, y: int, protos: np.ndarray, plabels: np.ndarray, lam: np.ndarray
) -> np.ndarray:
    """Unnormalized per-sample gradient of phi(mu) w.r.t. the relevance vector."""
    diff = protos - x
    dists = (diff * diff) @ lam
    jp, dp, jm, dm = nearest_pair(dists, plabels, y)
    _, phi_p, mup, mum = mu_terms(dp, dm)
    up = x - protos[jp]
    um = x - protos[jm]
    return phi_p * (mup * up * up - mum * um * um)


def omega_gradient(
    x: np.ndarray, y: int, protos: np.ndarray, plabels: np.ndarray, omega: np.ndarray
) -> np.ndarray:
    """Unnormalized per-sample gradient of phi(mu) w.r.t. the metric factor omega."""
    proj = (x - protos) @ omega.T
    dists = np.einsum("jk,jk->j", proj, proj)
    jp, dp, jm, dm = nearest_pair(dists, plabels, y)
    _, phi_p, mup, mum = mu_terms(dp, dm)
    up = x - protos[jp]
    um = x - protos[jm]
    return 2.0 * phi_p * (mup * np.outer(omega @ up, up) - mum * np.outer(omega @ um, um))


def grlvq_step(
    x: np.ndarray, y: int, state: MarginState, eps_w: float, eps_lambda: float
) -> MarginState:
    """Margin step under the relevance metric plus a relevance update."""
    _check_eps(eps_w)
    if state.relevance is None:
        raise ContractError("state carries no relevance vector")
    out = state.copy()
    protos = out.codebook.prototypes
    lam = out.relevance
    diff = protos - x
    dists = (diff * diff) @ lam
    jp, dp, jm, dm = nearest_pair(dists, out.codebook.labels, y)
    _, phi_p, mup, mum = mu_terms(dp, dm)
    up = x - protos[jp]
    um = x - protos[jm]
    protos[jp] += 2.0 * eps_w * phi_p * mup * lam * up
    protos[jm] -= 2.0 * eps_w * phi_p * mum * lam * um
    if eps_lambda != 0.0:
        raw = lam - eps_lambda * phi_p * (mup * up * up - mum * um * um)
        out.relevance = normalize_relevance(raw).lam
    return out


def gmlvq_step(
    x: np.ndarray, y: int, state: MarginState, eps_w: float, eps_omega: float
) -> MarginState:
    """Margin step under the full-matrix metric plus a metric update."""
    _check_eps(eps_w)
    if state.omega is None:
        raise ContractError("state carries no metric matrix")
    out = state.copy()
    protos = out.codebook.prototypes
    omega = out.omega
    proj = (x - protos) @ omega.T
    dists = np.einsum("jk,jk->j", proj, proj)
    jp, dp, jm, dm = nearest_pair(dists, out.codebook.labels, y)
    _, phi_p, mup, mum = mu_terms(dp, dm)
    up = x - protos[jp]
    um = x - protos[jm]
    lam_mat = omega.T @ omega
    protos[jp] += 2.0 * eps_w * phi_p * mup * (lam_mat @ up)
    protos[jm] -= 2.0 * eps_w * phi_p * mum * (lam_mat @ um)
    if eps_omega != 0.0:
        raw = omega - eps_omega * 2.0 * phi_p * (
            mup * np.outer(omega @ up, up) - mum * np.outer(omega @ um, um)
        )
        out.omega = normalize_matrix(raw).omega
    return out


def local_metric_step(
    x: np.ndarray, y: int, state: MarginState, eps_w: float, eps_metric: float, kind: str
) -> MarginState:
    """Adaptive-metric step with per-prototype parameters.

    d+ uses the winner's own parameter set, d- the loser's; only the two
    winners' sets are updated and renormalized.
    """
    _check_eps(eps_w)
    out = state.copy()
    protos = out.codebook.prototypes
    plabels = out.codebook.labels
    m = protos.shape[0]
    if kind == "relevance":
        if out.relevances is None or out.relevances.shape[0] != m:
            raise ContractError("need one relevance vector per prototype")
        diff = x - protos
        dists = np.einsum("jk,jk,jk->j", diff, diff, out.relevances)
        jp, dp, jm, dm = nearest_pair(dists, plabels, y)
        _, phi_p, mup, mum = mu_terms(dp, dm)
        up = x - protos[jp]
        um = x - protos[jm]
        protos[jp] += 2.0 * eps_w * phi_p * mup * out.relevances[jp] * up
        protos[jm] -= 2.0 * eps_w * phi_p * mum * out.relevances[jm] * um
        if eps_metric != 0.0:
            out.relevances[jp] = normalize_relevance(
                out.relevances[jp] - eps_metric * phi_p * mup * up * up
            ).lam
            out.relevances[jm] = normalize_relevance(
                out.relevances[jm] + eps_metric * phi_p * mum * um * um
            ).lam
    elif kind == "matrix":
        if out.omegas is None or out.omegas.shape[0] != m:
            raise ContractError("need one metric matrix per prototype")
        dists = np.empty(m)
        for j in range(m):
            p = out.omegas[j] @ (x - protos[j])
            dists[j] = p @ p
        jp, dp, jm, dm = nearest_pair(dists, plabels, y)
        _, phi_p, mup, mum = mu_terms(dp, dm)
        up = x - protos[jp]
        um = x - protos[jm]
        protos[jp] += 2.0 * eps_w * phi_p * mup * (out.omegas[jp].T @ (out.omegas[jp] @ up))
        protos[jm] -= 2.0 * eps_w * phi_p * mum * (out.omegas[jm].T @ (out.omegas[jm] @ um))
        if eps_metric != 0.0:
            out.omegas[jp] = normalize_matrix(
                out.omegas[jp] - eps_metric * 2.0 * phi_p * mup * np.outer(out.omegas[jp] @ up, up)
            ).omega
            out.omegas[jm] = normalize_matrix(
                out.omegas[jm] + eps_metric * 2.0 * phi_p * mum * np.outer(out.omegas[jm] @ um, um)
            ).omega
    else:
        raise ContractError("kind must be 'relevance' or 'matrix'")
    return out


def kglvq_step(
    sample_index: int, y: int, state: MarginState, eps: float, gram: KernelGram | np.ndarray
) -> MarginState:
    """Kernelized margin step: rescale the two winner coefficient rows.

    The winner rows are scaled by (1 -+ eps phi' mu+-) with the complementary
    mass injected at the sample position, which preserves row sums exactly.
    """
    _check_eps(eps)
    if state.coeffs is None:
        raise ContractError("state carries no coefficient rows")
    g = gram.gram if isinstance(gram, KernelGram) else np.asarray(gram)
    out = state.copy()
    dists = implicit.kernel_distance_row(out.coeffs, g, sample_index)
    jp, dp, jm, dm = nearest_pair(dists, out.coeff_labels, y)
    _, phi_p, mup, mum = mu_terms(dp, dm)
    c = np.zeros(out.coeffs.shape[0])
    c[jp] = eps * phi_p * mup
    c[jm] = -eps * phi_p * mum
    implicit.scale_inject(out.coeffs, c, sample_index)
    return out


def rglvq_step(
    sample_index: int, y: int, state: MarginState, eps: float, data: DissimilarityData | np.ndarray
) -> MarginState:
    """Relational margin step on the two winner coefficient rows.

    Gradient of the relational distance w.r.t. row entries is
    ``d_im - [D a]_m``; rows are renormalized to sum 1 afterwards.
    """
    _check_eps(eps)
    if state.coeffs is None:
        raise ContractError("state carries no coefficient rows")
    d = data.matrix if isinstance(data, DissimilarityData) else np.asarray(data)
    out = state.copy()
    sums = out.coeffs.sum(axis=1)
    if np.abs(sums - 1.0).max() > 1e-6:
        raise ContractError("coefficient rows must sum to 1")
    u = out.coeffs @ d
    q = np.einsum("jn,jn->j", out.coeffs, u)
    dists = u[:, sample_index] - 0.5 * q
    jp, dp, jm, dm = nearest_pair(dists, out.coeff_labels, y)
    _, phi_p, mup, mum = mu_terms(dp, dm)
    out.coeffs[jp] -= eps * phi_p * mup * (d[sample_index] - u[jp])
    out.coeffs[jm] += eps * phi_p * mum * (d[sample_index] - u[jm])
    implicit.renormalize_rows(out.coeffs, [jp, jm])
    return out


@dataclass(frozen=True)
class SgngConfig:
    """Growing-codebook settings: target size and insertion cadence (epochs)."""

    n_p_max: int
    insert_interval: int | None = None


def sgng_train(dataset: LabeledDataset, config: SgngConfig, schedule, seed: int, trace=None) -> MarginState:
    """Grow a codebook during rank-weighted margin training.

    Starts with one prototype per class at the class mean; every
    ``insert_interval`` epochs the class with the highest misclassification
    count since the last insertion receives a new prototype, placed at the
    midpoint between its worst-failing prototype and the farthest sample
    attributed to it, until ``n_p_max`` prototypes exist.
    """
    from ..trainer import eps_at
    from . import _accel

    c = dataset.class_count
    if config.n_p_max < c:
        raise ContractError("n_p_max must be at least the number of classes")
    interval = config.insert_interval
    if interval is None:
        growth = config.n_p_max - c
        interval = max(1, schedule.t_max // (2 * growth)) if growth > 0 else schedule.t_max + 1
    rng = np.random.default_rng(seed)
    X = dataset.features
    labels = dataset.labels
    protos = np.vstack([X[labels == cl].mean(axis=0) for cl in range(1, c + 1)])
    plabels = np.arange(1, c + 1, dtype=np.int64)
    err_acc = np.zeros(c)

    lam0 = max(0.5, (config.n_p_max / c) / 2.0)
    for t in range(schedule.t_max):
        frac = t / max(1, schedule.t_max - 1)
        neigh = lam0 * (0.01 / lam0) ** frac
        order = rng.permutation(X.shape[0]).astype(np.int64)
        _accel.epoch_sng(protos, plabels, X, labels, order, eps_at(schedule, t), neigh)

        diff2 = _pairwise_sq(X, protos)
        predicted = plabels[np.argmin(diff2, axis=1)]
        wrong = predicted != labels
        for cl in range(1, c + 1):
            err_acc[cl - 1] += np.sum(wrong & (labels == cl))
        if trace is not None:
            trace.append(float(np.mean(wrong)))

        if (t + 1) % interval == 0 and protos.shape[0] < config.n_p_max:
            cl = int(np.argmax(err_acc)) + 1
            members = labels == cl
            cls_protos = np.flatnonzero(plabels == cl)
            cls_dists = diff2[:, cls_protos]
            owner = cls_protos[np.argmin(cls_dists, axis=1)]
            bad = wrong & members
            if bad.any():
                counts = np.bincount(owner[bad], minlength=protos.shape[0])
                worst = int(np.argmax(counts))
                cand = np.flatnonzero(bad & (owner == worst))
                if cand.size == 0:
                    cand = np.flatnonzero(bad)
            else:
                # class currently clean: split at its most stressed sample
                worst_pos = int(np.argmax(np.min(cls_dists, axis=1) * members))
                worst = int(owner[worst_pos])
                cand = np.flatnonzero(members)
            far = cand[np.argmax(np.einsum("nk,nk->n", X[cand] - protos[worst], X[cand] - protos[worst]))]
            new_proto = 0.5 * (protos[worst] + X[far])
            protos = np.vstack([protos, new_proto])
            plabels = np.append(plabels, cl)
            err_acc[:] = 0.0

    return MarginState("sgng", codebook=Codebook(protos, plabels))


def _pairwise_sq(X: np.ndarray, protos: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - protos[None, :, :]
    return np.einsum("nmk,nmk->nm", diff, diff)
