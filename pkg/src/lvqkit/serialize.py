"""JSON state serialization; floats survive round trips bit-exactly."""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import DataFormatError
from .models.heuristic import Codebook, HeuristicState, Lvq21Config
from .models.likelihood import LIKELIHOOD_VARIANTS, LikelihoodState, SoftConfig
from .models.margin import MARGIN_VARIANTS, MarginState

_FORMAT = "lvqkit-state"


def _metric_kind(state) -> str:
    if getattr(state, "relevance", None) is not None:
        return "relevance"
    if getattr(state, "omega", None) is not None:
        return "matrix"
    if getattr(state, "relevances", None) is not None:
        return "local_relevance"
    if getattr(state, "omegas", None) is not None:
        return "local_matrix"
    if getattr(state, "coeffs", None) is not None:
        return "kernel" if getattr(state, "sigma_k", None) is not None else "relational"
    return "euclidean"


def state_to_dict(state) -> dict:
    out: dict = {
        "format": _FORMAT,
        "version": 1,
        "variant": state.variant,
        "metric_kind": _metric_kind(state),
        "metric_params": {},
    }
    if getattr(state, "codebook", None) is not None:
        out["prototypes"] = state.codebook.prototypes.tolist()
        out["labels"] = state.codebook.labels.tolist()
    kind = out["metric_kind"]
    if kind == "relevance":
        out["metric_params"]["lambda"] = state.relevance.tolist()
    elif kind == "matrix":
        out["metric_params"]["omega"] = state.omega.tolist()
    elif kind == "local_relevance":
        out["metric_params"]["lambdas"] = state.relevances.tolist()
    elif kind == "local_matrix":
        out["metric_params"]["omegas"] = state.omegas.tolist()
    if getattr(state, "coeffs", None) is not None:
        out["coeffs"] = state.coeffs.tolist()
        out["coeff_labels"] = state.coeff_labels.tolist()
        if state.sigma_k is not None:
            out["sigma_k"] = state.sigma_k
        if state.train_features is not None:
            out["train_features"] = state.train_features.tolist()
        if getattr(state, "train_indices", None) is not None:
            out["train_indices"] = np.asarray(state.train_indices).tolist()
        if getattr(state, "train_dissim", None) is not None:
            out["train_dissim"] = np.asarray(state.train_dissim).tolist()
    if isinstance(state, LikelihoodState):
        out["soft"] = {
            "sigma": state.soft.sigma,
            "priors": None if state.soft.priors is None else state.soft.priors.tolist(),
        }
    if isinstance(state, HeuristicState) and state.lvq21 is not None:
        out["lvq21"] = {"omega_window": state.lvq21.omega_window}
    return out


def state_from_dict(data: dict):
    if data.get("format") != _FORMAT:
        raise DataFormatError("not a serialized state file")
    variant = data["variant"]
    codebook = None
    if "prototypes" in data:
        codebook = Codebook(np.array(data["prototypes"]), np.array(data["labels"]))
    params = data.get("metric_params", {})
    arr = lambda key: None if key not in params else np.array(params[key])
    common = dict(
        coeffs=np.array(data["coeffs"]) if "coeffs" in data else None,
        coeff_labels=np.array(data["coeff_labels"], dtype=np.int64) if "coeff_labels" in data else None,
        sigma_k=data.get("sigma_k"),
        train_features=np.array(data["train_features"]) if "train_features" in data else None,
        train_indices=np.array(data["train_indices"], dtype=np.int64)
        if "train_indices" in data
        else None,
    )
    if variant in MARGIN_VARIANTS:
        state = MarginState(
            variant,
            codebook=codebook,
            relevance=arr("lambda"),
            omega=arr("omega"),
            relevances=arr("lambdas"),
            omegas=arr("omegas"),
            **common,
        )
    elif variant in LIKELIHOOD_VARIANTS:
        soft_blob = data.get("soft", {"sigma": 1.0, "priors": None})
        priors = soft_blob.get("priors")
        soft = SoftConfig(soft_blob["sigma"], None if priors is None else np.array(priors))
        state = LikelihoodState(variant, soft, codebook=codebook, omega=arr("omega"), **common)
    elif variant in ("lvq1", "lvq21"):
        cfg = Lvq21Config(data["lvq21"]["omega_window"]) if "lvq21" in data else None
        state = HeuristicState(variant, codebook, cfg)
    else:
        raise DataFormatError(f"unknown variant {variant!r}")
    if "train_dissim" in data:
        state.train_dissim = np.array(data["train_dissim"])
    return state


def save_state(state, path: str | os.PathLike) -> None:
    with open(path, "w") as handle:
        json.dump(state_to_dict(state), handle)
        handle.write("\n")


def load_state(path: str | os.PathLike):
    try:
        with open(path) as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})") from exc
    return state_from_dict(data)
