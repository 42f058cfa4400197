"""Command-line entry point: dataset generation, training, benchmarking, plots.

Exit codes: 0 success, 2 I/O or parse problems, 3 contract violations
(e.g. a relational model on vectorial input), 4 broken internal invariants.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import dataset as ds
from .errors import ContractError, DataFormatError, InvariantError
from .evaluation import SuiteEntry, boundary_grid, cross_validate, emit_report
from .serialize import load_state, save_state
from .trainer import (
    ALL_VARIANTS,
    InitStrategy,
    RELATIONAL_VARIANTS,
    Schedule,
    VariantConfig,
    train,
)

TABLE3_CLASSIFIERS = (
    "lvq21", "glvq", "rslvq", "sng", "sgng", "h2mlvq",
    "grlvq", "gmlvq", "lgrlvq", "lgmlvq", "krslvq",
)

# benchmark defaults per dataset id: learning-rate decay, prototypes per
# class, initialization, softness values, codebook growth targets and
# metric-rate schedules
_DATASET_DEFAULTS = {
    "multimodal": dict(
        tau=0.0001, n_p=15, init_kind="data_mean_random",
        rslvq_sigma=1.9858, krslvq_sigma=1.0, sgng_max=45,
        grlvq_t0=500, gmlvq_t0=500,
    ),
    "image_segmentation": dict(
        tau=0.001, n_p=1, init_kind="class_means",
        rslvq_sigma=0.01, krslvq_sigma=0.01, sgng_max=10,
        grlvq_t0=100, gmlvq_t0=100,
    ),
    "usps": dict(
        tau=0.001, n_p=3, init_kind="class_means",
        rslvq_sigma=0.01, krslvq_sigma=0.5, sgng_max=30,
        grlvq_t0=100, gmlvq_t0=100,
    ),
}
_DATASET_DEFAULTS["usps_star"] = _DATASET_DEFAULTS["usps"]
_DATASET_DEFAULTS["csv"] = _DATASET_DEFAULTS["image_segmentation"]

_EXPECTED_SHAPE = {
    "multimodal": (3600, 3),
    "image_segmentation": (2100, 7),
    "usps": (9298, 10),
    "usps_star": (2000, 10),
}

# LVQ2.1 benchmarks use a window threshold s = 0.01 on the distance ratios
_LVQ21_WINDOW = (1.0 - 0.01) / (1.0 + 0.01)


@dataclass(frozen=True)
class BenchmarkSuite:
    """A named benchmark: dataset id, classifier list, fold count, master seed."""

    dataset_id: str
    classifiers: tuple[str, ...]
    folds: int
    seed: int


def build_suite_entries(
    suite: BenchmarkSuite,
    class_count: int,
    epochs: int = 2000,
    eps0: float = 0.05,
    tau: float | None = None,
    n_p: int | None = None,
    sigma: float | None = None,
    sigma_k: float | None = None,
    omega_window: float | None = None,
) -> list[SuiteEntry]:
    """Expand a suite into per-classifier configs with the benchmark defaults.

    Explicit keyword values override the per-dataset defaults for every
    classifier they apply to.
    """
    d = _DATASET_DEFAULTS[suite.dataset_id if suite.dataset_id in _DATASET_DEFAULTS else "csv"]
    tau = d["tau"] if tau is None else tau
    n_p = d["n_p"] if n_p is None else n_p
    proto_sched = Schedule(eps0, tau, 0, epochs)
    entries = []
    for tag in suite.classifiers:
        if tag not in ALL_VARIANTS:
            raise ContractError(f"unknown classifier {tag!r}")
        init = InitStrategy(kind=d["init_kind"], prototypes_per_class=n_p)
        cfg_kwargs: dict = {}
        if tag == "lvq21":
            cfg_kwargs["omega_window"] = _LVQ21_WINDOW if omega_window is None else omega_window
        elif tag == "rslvq":
            cfg_kwargs["sigma"] = d["rslvq_sigma"] if sigma is None else sigma
        elif tag == "krslvq":
            cfg_kwargs["sigma"] = d["krslvq_sigma"] if sigma is None else sigma
            cfg_kwargs["sigma_k"] = 1.0 if sigma_k is None else sigma_k
        elif tag == "sgng":
            cfg_kwargs["n_p_max"] = max(d["sgng_max"], class_count)
        elif tag == "grlvq":
            cfg_kwargs["metric_schedule"] = Schedule(5e-6, tau, d["grlvq_t0"], epochs)
        elif tag == "gmlvq":
            cfg_kwargs["metric_schedule"] = Schedule(5e-5, tau, d["gmlvq_t0"], epochs)
            cfg_kwargs["metric_schedule_off"] = Schedule(1e-6, tau, d["gmlvq_t0"], epochs)
        elif tag == "lgrlvq":
            cfg_kwargs["metric_schedule"] = Schedule(5e-5, tau, 100, epochs)
        elif tag == "lgmlvq":
            cfg_kwargs["metric_schedule"] = Schedule(1e-3, tau, 100, epochs)
            cfg_kwargs["metric_schedule_off"] = Schedule(5e-5, tau, 100, epochs)
        elif tag in ("rrslvq",):
            cfg_kwargs["sigma"] = d["rslvq_sigma"] if sigma is None else sigma
        entries.append(SuiteEntry(tag, VariantConfig(tag, **cfg_kwargs), proto_sched, init))
    return entries


def _master_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("LVQKIT_SEED", "0"))


def _load_benchmark_data(args, seed: int):
    did = args.dataset
    if did == "multimodal":
        return ds.gen_multimodal(seed), did
    if did in ("image_segmentation", "usps", "usps_star"):
        if not args.data:
            raise DataFormatError(f"--data PATH is required for dataset {did}")
        if did == "image_segmentation":
            return ds.load_image_segmentation(args.data), did
        pool = ds.load_usps(args.data)
        if did == "usps_star":
            return ds.stratified_subset(pool, 200, seed), did
        return pool, did
    # anything else is a CSV path (vectorial) or matrix.csv,labels.csv (relational)
    path = args.data if args.data else did
    if "," in path:
        matrix_path, labels_path = path.split(",", 1)
        return ds.load_dissimilarity(matrix_path, labels_path), "csv"
    return ds.load_csv(path), "csv"


def cmd_gen(args) -> int:
    if args.dataset != "multimodal":
        raise DataFormatError("only the multimodal dataset can be generated")
    data = ds.gen_multimodal(_master_seed(args))
    ds.save_csv(data, args.out)
    print(f"wrote {data.n_samples} samples to {args.out}")
    return 0


def cmd_train(args) -> int:
    seed = _master_seed(args)
    if args.model in RELATIONAL_VARIANTS:
        if "," not in args.data:
            raise ContractError(
                f"model {args.model} requires dissimilarity input: --data matrix.csv,labels.csv"
            )
        matrix_path, labels_path = args.data.split(",", 1)
        data = ds.load_dissimilarity(matrix_path, labels_path)
    else:
        if "," in args.data:
            raise ContractError(f"model {args.model} requires vectorial CSV input")
        data = ds.load_csv(args.data)
    sched = Schedule(args.eps0, args.tau, 0, args.epochs)
    kwargs: dict = {}
    if args.sigma is not None:
        kwargs["sigma"] = args.sigma
    if args.sigma_k is not None:
        kwargs["sigma_k"] = args.sigma_k
    if args.omega_window is not None:
        kwargs["omega_window"] = args.omega_window
    if args.model == "sgng":
        # --np sets the growth target in prototypes per class
        kwargs["n_p_max"] = (args.np or 1) * data.class_count
    config = VariantConfig(args.model, **kwargs)
    init = InitStrategy(kind=args.init, prototypes_per_class=args.np or 1)
    result = train(data, config, sched, init, seed)
    save_state(result.state, args.out)
    if args.trace:
        with open(args.trace, "w") as handle:
            handle.write("epoch,cost\n")
            for t, value in enumerate(result.trace):
                handle.write(f"{t},{value:.17g}\n")
    print(f"trained {args.model} for {args.epochs} epochs -> {args.out}")
    return 0


def cmd_benchmark(args) -> int:
    seed = _master_seed(args)
    data, did = _load_benchmark_data(args, seed)
    if args.check:
        expected = _EXPECTED_SHAPE.get(args.dataset)
        if expected is None:
            print(f"dataset {args.dataset}: {data.n_samples} samples, {data.class_count} classes")
            return 0
        if (data.n_samples, data.class_count) != expected:
            raise DataFormatError(
                f"dataset {args.dataset}: expected {expected[0]} samples in {expected[1]} classes, "
                f"got {data.n_samples} in {data.class_count}"
            )
        print(f"dataset {args.dataset}: OK ({data.n_samples} samples, {data.class_count} classes)")
        return 0
    if args.suite != "table3":
        raise ContractError(f"unknown suite {args.suite!r}")
    classifiers = tuple(args.classifiers.split(",")) if args.classifiers else TABLE3_CLASSIFIERS
    suite = BenchmarkSuite(did, classifiers, args.folds, seed)
    entries = build_suite_entries(
        suite,
        data.class_count,
        epochs=args.epochs,
        eps0=args.eps0,
        tau=args.tau,
        n_p=args.np,
        sigma=args.sigma,
        sigma_k=args.sigma_k,
        omega_window=args.omega_window,
    )
    report = cross_validate(data, entries, k=args.folds, seed=seed, jobs=args.jobs)
    md = emit_report(report, "markdown")
    csv_text = emit_report(report, "csv")
    with open(args.out + ".md", "w") as handle:
        handle.write(md)
    with open(args.out + ".csv", "w") as handle:
        handle.write(csv_text)
    print(md, end="")
    return 0


def cmd_plot(args) -> int:
    state = load_state(args.model)
    if getattr(state, "codebook", None) is None or state.codebook.prototypes.shape[1] != 2:
        raise ContractError("plotting requires a trained 2-D vectorial model")
    if args.data:
        data = ds.load_csv(args.data)
        lo = data.features.min(axis=0)
        hi = data.features.max(axis=0)
        pad = 0.05 * (hi - lo)
    else:
        lo = state.codebook.prototypes.min(axis=0)
        hi = state.codebook.prototypes.max(axis=0)
        pad = 0.2 * np.maximum(hi - lo, 1e-6)
    bounds = (lo[0] - pad[0], hi[0] + pad[0], lo[1] - pad[1], hi[1] + pad[1])
    _, svg = boundary_grid(state, bounds, args.resolution)
    with open(args.out, "w") as handle:
        handle.write(svg)
    print(f"wrote {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lvqkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    gen.add_argument("--dataset", default="multimodal", choices=["multimodal"])
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    tr = sub.add_parser("train", help="train one classifier on a data file")
    tr.add_argument("--model", required=True, choices=sorted(ALL_VARIANTS))
    tr.add_argument("--data", required=True,
                    help="CSV path; relational models take matrix.csv,labels.csv")
    tr.add_argument("--np", type=int, default=1, help="prototypes per class")
    tr.add_argument("--eps0", type=float, default=0.05)
    tr.add_argument("--tau", type=float, default=0.0)
    tr.add_argument("--epochs", type=int, default=100)
    tr.add_argument("--seed", type=int, default=None)
    tr.add_argument("--sigma", type=float, default=None)
    tr.add_argument("--sigma-k", dest="sigma_k", type=float, default=None)
    tr.add_argument("--omega-window", dest="omega_window", type=float, default=None)
    tr.add_argument("--init", default="class_means", choices=["class_means", "data_mean_random"])
    tr.add_argument("--trace", default=None, help="optional cost-trace CSV path")
    tr.add_argument("--out", required=True)
    tr.set_defaults(func=cmd_train)

    bm = sub.add_parser("benchmark", help="cross-validated classifier comparison")
    bm.add_argument("--suite", default="table3")
    bm.add_argument("--dataset", required=True,
                    help="multimodal | image_segmentation | usps | usps_star | CSV path")
    bm.add_argument("--data", default=None, help="path to the dataset file(s)")
    bm.add_argument("--classifiers", default=None, help="comma-separated subset")
    bm.add_argument("--folds", type=int, default=10)
    bm.add_argument("--jobs", type=int, default=1)
    bm.add_argument("--seed", type=int, default=None)
    bm.add_argument("--epochs", type=int, default=2000)
    bm.add_argument("--eps0", type=float, default=0.05)
    bm.add_argument("--tau", type=float, default=None)
    bm.add_argument("--np", type=int, default=None)
    bm.add_argument("--sigma", type=float, default=None)
    bm.add_argument("--sigma-k", dest="sigma_k", type=float, default=None)
    bm.add_argument("--omega-window", dest="omega_window", type=float, default=None)
    bm.add_argument("--check", action="store_true", help="validate dataset shape and exit")
    bm.add_argument("--out", default="report")
    bm.set_defaults(func=cmd_benchmark)

    pl = sub.add_parser("plot", help="decision-boundary SVG for a 2-D model")
    pl.add_argument("--model", required=True)
    pl.add_argument("--data", default=None)
    pl.add_argument("--resolution", type=int, default=200)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
