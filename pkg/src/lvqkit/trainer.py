"""Epoch-driven stochastic training shared by all variants.

One seeded generator drives initialization and the per-epoch sample
shuffles, so identical (data, config, schedule, seed) inputs reproduce the
trained state bit for bit.  Vectorial variants run on compiled epoch
kernels; kernel/relational variants run interpreted with incremental
distance caches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DissimilarityData, LabeledDataset
from .errors import ContractError
from .metric import build_gram
from .models import _accel, implicit
from .models.common import margin_cost_from_distances, mu_terms, nearest_pair
from .models.heuristic import Codebook, HeuristicState, Lvq21Config
from .models.likelihood import (
    LIKELIHOOD_VARIANTS,
    LikelihoodState,
    SoftConfig,
    posteriors_from_distances,
    rslvq_cost_from_distances,
)
from .models.margin import MARGIN_VARIANTS, MarginState, SgngConfig, sgng_train

HEURISTIC_VARIANTS = ("lvq1", "lvq21")
ALL_VARIANTS = HEURISTIC_VARIANTS + MARGIN_VARIANTS + LIKELIHOOD_VARIANTS
KERNEL_VARIANTS = ("kglvq", "krslvq")
RELATIONAL_VARIANTS = ("rglvq", "rrslvq")


@dataclass(frozen=True)
class Schedule:
    """Hyperbolic learning-rate decay: eps0 / (1 + tau (t - t0)) from epoch t0 on."""

    eps0: float
    tau: float = 0.0
    t0: int = 0
    t_max: int = 0

    def __post_init__(self):
        if not 0.0 < self.eps0 < 1.0:
            raise ContractError("eps0 must lie in (0, 1)")
        if self.tau < 0.0 or self.t0 < 0 or self.t_max < 0:
            raise ContractError("tau, t0 and t_max must be non-negative")


def eps_at(schedule: Schedule, t: int) -> float:
    """Learning rate at epoch t; constant eps0 before the start epoch."""
    if t < schedule.t0:
        return schedule.eps0
    return schedule.eps0 / (1.0 + schedule.tau * (t - schedule.t0))


@dataclass(frozen=True)
class InitStrategy:
    """Prototype placement: per-class means or the global data mean.

    ``jitter`` is the absolute std of the Gaussian symmetry-breaking noise;
    None selects 1e-4 of each feature's std.
    """

    kind: str = "class_means"
    jitter: float | None = None
    prototypes_per_class: int = 1

    def __post_init__(self):
        if self.kind not in ("class_means", "data_mean_random"):
            raise ContractError("init kind must be 'class_means' or 'data_mean_random'")
        if self.prototypes_per_class < 1:
            raise ContractError("need at least one prototype per class")
        if self.jitter is not None and self.jitter < 0.0:
            raise ContractError("jitter must be non-negative")


@dataclass(frozen=True)
class VariantConfig:
    """Everything variant-specific a training run needs besides the schedule."""

    variant: str
    omega_window: float = 0.2
    sigma: float = 1.0
    sigma_k: float = 1.0
    priors: np.ndarray | None = None
    metric_schedule: Schedule | None = None
    metric_schedule_off: Schedule | None = None
    n_p_max: int | None = None
    insert_interval: int | None = None

    def __post_init__(self):
        if self.variant not in ALL_VARIANTS:
            raise ContractError(f"unknown variant {self.variant!r}")


@dataclass
class TrainResult:
    state: object
    trace: np.ndarray


def init_codebook(dataset: LabeledDataset, strategy: InitStrategy, seed: int) -> Codebook:
    """Seeded prototype initialization; labels cycle 1..C round-robin."""
    rng = np.random.default_rng(seed)
    return _init_codebook_rng(dataset, strategy, rng)


def _init_codebook_rng(dataset: LabeledDataset, strategy: InitStrategy, rng) -> Codebook:
    c = dataset.class_count
    n_p = strategy.prototypes_per_class
    labels = np.tile(np.arange(1, c + 1, dtype=np.int64), n_p)
    if strategy.jitter is None:
        scale = 1e-4 * dataset.features.std(axis=0)
    else:
        scale = np.full(dataset.n_features, float(strategy.jitter))
    protos = np.empty((n_p * c, dataset.n_features))
    if strategy.kind == "class_means":
        means = {cl: dataset.features[dataset.labels == cl].mean(axis=0) for cl in range(1, c + 1)}
        for j, cl in enumerate(labels):
            protos[j] = means[int(cl)]
    else:
        protos[:] = dataset.features.mean(axis=0)
    protos += rng.normal(0.0, 1.0, size=protos.shape) * scale
    return Codebook(protos, labels)


def _training_error(protos, plabels, X, labels) -> float:
    from .dataset import squared_distance_matrix

    dists = squared_distance_matrix(X, protos)
    return float(np.mean(plabels[np.argmin(dists, axis=1)] != labels))


def train(
    data: LabeledDataset | DissimilarityData,
    config: VariantConfig,
    schedule: Schedule,
    init: InitStrategy,
    seed: int,
) -> TrainResult:
    """Run t_max epochs of the variant's stochastic updates.

    Each epoch visits every sample once in a seed-derived shuffled order and
    records one cost value (margin cost, log likelihood ratio, or training
    error for the rule-based variants).
    """
    variant = config.variant
    if variant in RELATIONAL_VARIANTS:
        if not isinstance(data, DissimilarityData):
            raise ContractError(f"{variant} requires dissimilarity input")
        return _train_relational(data, config, schedule, init, seed)
    if not isinstance(data, LabeledDataset):
        raise ContractError(f"{variant} requires vectorial input")
    if variant in KERNEL_VARIANTS:
        return _train_kernel(data, config, schedule, init, seed)
    if variant == "sgng":
        n_p_max = config.n_p_max if config.n_p_max is not None else data.class_count
        trace: list[float] = []
        state = sgng_train(data, SgngConfig(n_p_max, config.insert_interval), schedule, seed, trace)
        return TrainResult(state, np.asarray(trace))
    return _train_vectorial(data, config, schedule, init, seed)


def _metric_rates(config: VariantConfig, t: int) -> tuple[float, float]:
    diag = eps_at(config.metric_schedule, t) if config.metric_schedule is not None else 0.0
    if config.metric_schedule_off is not None:
        off = eps_at(config.metric_schedule_off, t)
    else:
        off = diag
    return diag, off


def _train_vectorial(dataset, config, schedule, init, seed) -> TrainResult:
    rng = np.random.default_rng(seed)
    codebook = _init_codebook_rng(dataset, init, rng)
    protos = codebook.prototypes
    plabels = codebook.labels
    X = dataset.features
    labels = dataset.labels
    n = X.shape[0]
    d = X.shape[1]
    variant = config.variant

    lam = omega = lams = omegas = None
    if variant in ("grlvq",):
        lam = np.full(d, 1.0 / d)
    elif variant == "gmlvq":
        omega = np.eye(d) / np.sqrt(d)
    elif variant == "lgrlvq":
        lams = np.full((protos.shape[0], d), 1.0 / d)
    elif variant == "lgmlvq":
        omegas = np.broadcast_to(np.eye(d) / np.sqrt(d), (protos.shape[0], d, d)).copy()
    elif variant in ("rslvq", "mrslvq"):
        if variant == "mrslvq":
            omega = np.eye(d) / np.sqrt(d)
    priors = None
    if variant in ("rslvq", "mrslvq"):
        soft = SoftConfig(config.sigma, config.priors)
        priors = soft.prior_vector(protos.shape[0])

    n_p = init.prototypes_per_class
    lam0 = max(0.5, n_p / 2.0)
    s_window = Lvq21Config(config.omega_window).s if variant == "lvq21" else 0.0

    trace = np.empty(schedule.t_max)
    for t in range(schedule.t_max):
        eps = eps_at(schedule, t)
        order = rng.permutation(n).astype(np.int64)
        try:
            if variant == "lvq1":
                _accel.epoch_lvq1(protos, plabels, X, labels, order, eps)
            elif variant == "lvq21":
                _accel.epoch_lvq21(protos, plabels, X, labels, order, eps, s_window)
            elif variant == "glvq":
                _accel.epoch_glvq(protos, plabels, X, labels, order, eps)
            elif variant == "sng":
                frac = t / max(1, schedule.t_max - 1)
                neigh = lam0 * (0.01 / lam0) ** frac
                _accel.epoch_sng(protos, plabels, X, labels, order, eps, neigh)
            elif variant == "h2mlvq":
                # harmonic-to-minimum: collective harmonic-weighted updates
                # anneal into the plain margin step over the first half
                beta = max(0.0, 1.0 - t / max(1, schedule.t_max // 2))
                _accel.epoch_h2mlvq(protos, plabels, X, labels, order, eps, beta)
            elif variant == "grlvq":
                eps_l, _ = _metric_rates(config, t)
                _accel.epoch_grlvq(protos, plabels, lam, X, labels, order, eps, eps_l)
            elif variant == "gmlvq":
                eps_od, eps_oo = _metric_rates(config, t)
                _accel.epoch_gmlvq(protos, plabels, omega, X, labels, order, eps, eps_od, eps_oo)
            elif variant == "lgrlvq":
                eps_l, _ = _metric_rates(config, t)
                _accel.epoch_lgrlvq(protos, plabels, lams, X, labels, order, eps, eps_l)
            elif variant == "lgmlvq":
                eps_od, eps_oo = _metric_rates(config, t)
                _accel.epoch_lgmlvq(protos, plabels, omegas, X, labels, order, eps, eps_od, eps_oo)
            elif variant == "rslvq":
                _accel.epoch_rslvq(protos, plabels, priors, X, labels, order, eps, config.sigma)
            elif variant == "mrslvq":
                eps_o, _ = _metric_rates(config, t)
                _accel.epoch_mrslvq(
                    protos, plabels, priors, omega, X, labels, order, eps, eps_o, config.sigma
                )
            else:
                raise ContractError(f"unhandled vectorial variant {variant!r}")
        except ValueError as exc:
            raise ContractError(f"epoch {t}: {exc}") from exc
        trace[t] = _epoch_cost(variant, config, dataset, protos, plabels, lam, omega, lams, omegas)

    state = _assemble_vectorial_state(variant, config, protos, plabels, lam, omega, lams, omegas)
    return TrainResult(state, trace)


def _epoch_cost(variant, config, dataset, protos, plabels, lam, omega, lams, omegas) -> float:
    from .models import common

    X = dataset.features
    if variant in ("lvq1", "lvq21"):
        return _training_error(protos, plabels, X, dataset.labels)
    if lam is not None:
        dists = common.distance_matrix_relevance(X, protos, lam)
    elif omega is not None:
        dists = common.distance_matrix_omega(X, protos, omega)
    elif lams is not None:
        dists = common.distance_matrix_local_relevance(X, protos, lams)
    elif omegas is not None:
        dists = common.distance_matrix_local_omega(X, protos, omegas)
    else:
        dists = common.distance_matrix_euclid(X, protos)
    if variant in ("rslvq", "mrslvq"):
        return _rslvq_cost_from_dists(dists, dataset.labels, plabels, config)
    return margin_cost_from_distances(dists, dataset.labels, plabels)


def _rslvq_cost_from_dists(dists, labels, plabels, config) -> float:
    soft = SoftConfig(config.sigma, config.priors)
    return rslvq_cost_from_distances(dists, labels, plabels, soft)


def _assemble_vectorial_state(variant, config, protos, plabels, lam, omega, lams, omegas):
    codebook = Codebook(protos, plabels)
    if variant in HEURISTIC_VARIANTS:
        cfg = Lvq21Config(config.omega_window) if variant == "lvq21" else None
        return HeuristicState(variant, codebook, cfg)
    if variant in MARGIN_VARIANTS:
        return MarginState(
            variant, codebook=codebook, relevance=lam, omega=omega, relevances=lams, omegas=omegas
        )
    soft = SoftConfig(config.sigma, config.priors)
    return LikelihoodState(variant, soft, codebook=codebook, omega=omega)


def _train_kernel(dataset, config, schedule, init, seed) -> TrainResult:
    rng = np.random.default_rng(seed)
    gram = build_gram(dataset, config.sigma_k).gram
    labels = dataset.labels
    n = labels.shape[0]
    c = dataset.class_count
    proto_labels = np.tile(np.arange(1, c + 1, dtype=np.int64), init.prototypes_per_class)
    coeffs = implicit.init_coeff_rows(labels, proto_labels, rng)
    diag_k = np.ascontiguousarray(np.diagonal(gram))
    kg = coeffs @ gram
    q = np.einsum("jn,jn->j", coeffs, kg)
    soft = SoftConfig(config.sigma, config.priors) if config.variant == "krslvq" else None
    priors = soft.prior_vector(coeffs.shape[0]) if soft is not None else None

    trace = np.empty(schedule.t_max)
    for t in range(schedule.t_max):
        eps = eps_at(schedule, t)
        order = rng.permutation(n).astype(np.int64)
        try:
            if config.variant == "kglvq":
                _accel.epoch_kglvq(coeffs, proto_labels, kg, q, gram, diag_k, labels, order, eps)
            else:
                _accel.epoch_krslvq(
                    coeffs, proto_labels, kg, q, gram, diag_k, priors, labels, order,
                    eps, soft.sigma,
                )
        except ValueError as exc:
            raise ContractError(f"epoch {t}: {exc}") from exc
        dmat = (diag_k[None, :] - 2.0 * kg + q[:, None]).T
        if config.variant == "kglvq":
            trace[t] = margin_cost_from_distances(dmat, labels, proto_labels)
        else:
            trace[t] = _rslvq_cost_from_dists(dmat, labels, proto_labels, config)

    if config.variant == "kglvq":
        state = MarginState(
            "kglvq",
            coeffs=coeffs,
            coeff_labels=proto_labels,
            sigma_k=config.sigma_k,
            train_features=dataset.features.copy(),
        )
    else:
        state = LikelihoodState(
            "krslvq",
            soft,
            coeffs=coeffs,
            coeff_labels=proto_labels,
            sigma_k=config.sigma_k,
            train_features=dataset.features.copy(),
        )
    return TrainResult(state, trace)


def _train_relational(data: DissimilarityData, config, schedule, init, seed) -> TrainResult:
    rng = np.random.default_rng(seed)
    dmat = data.matrix
    labels = data.labels
    n = labels.shape[0]
    c = data.class_count
    proto_labels = np.tile(np.arange(1, c + 1, dtype=np.int64), init.prototypes_per_class)
    coeffs = implicit.init_coeff_rows(labels, proto_labels, rng)
    u = coeffs @ dmat
    q = np.einsum("jn,jn->j", coeffs, u)
    soft = SoftConfig(config.sigma, config.priors) if config.variant == "rrslvq" else None
    priors = soft.prior_vector(coeffs.shape[0]) if soft is not None else None

    trace = np.empty(schedule.t_max)
    for t in range(schedule.t_max):
        eps = eps_at(schedule, t)
        order = rng.permutation(n)
        for i in order:
            y = labels[i]
            dcol = u[:, i] - 0.5 * q
            try:
                if config.variant == "rglvq":
                    jp, dp, jm, dm = nearest_pair(dcol, proto_labels, y)
                    _, phi_p, mup, mum = mu_terms(dp, dm)
                    coeffs[jp] -= eps * phi_p * mup * (dmat[i] - u[jp])
                    coeffs[jm] += eps * phi_p * mum * (dmat[i] - u[jm])
                    implicit.renormalize_rows(coeffs, [jp, jm])
                    for j in (jp, jm):
                        u[j] = coeffs[j] @ dmat
                        q[j] = coeffs[j] @ u[j]
                else:
                    p_y, p_all = posteriors_from_distances(dcol, proto_labels, priors, y, soft.sigma)
                    gates = np.where(proto_labels == y, p_y - p_all, -p_all)
                    coeffs -= (eps / (2.0 * soft.sigma ** 2)) * gates[:, None] * (dmat[i][None, :] - u)
                    implicit.renormalize_rows(coeffs, np.arange(coeffs.shape[0]))
                    u = coeffs @ dmat
                    q = np.einsum("jn,jn->j", coeffs, u)
            except ContractError as exc:
                raise ContractError(f"epoch {t}, sample {i}: {exc}") from exc
        dall = (u - 0.5 * q[:, None]).T
        if config.variant == "rglvq":
            trace[t] = margin_cost_from_distances(dall, labels, proto_labels)
        else:
            trace[t] = _rslvq_cost_from_dists(dall, labels, proto_labels, config)

    if config.variant == "rglvq":
        state = MarginState("rglvq", coeffs=coeffs, coeff_labels=proto_labels)
    else:
        state = LikelihoodState("rrslvq", soft, coeffs=coeffs, coeff_labels=proto_labels)
    return TrainResult(state, trace)
