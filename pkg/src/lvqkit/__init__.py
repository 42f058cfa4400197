"""lvqkit: prototype-based classifiers of the LVQ family.

Heuristic (LVQ1, LVQ2.1), margin-maximizing (GLVQ and the neighborhood,
harmonic, adaptive-metric, kernel and relational extensions) and
likelihood-ratio (RSLVQ family) variants, with a cross-validation benchmark
harness and statistical comparison of classifiers.
"""

__version__ = "0.1.0"

from .dataset import (
    DissimilarityData,
    FoldSplit,
    LabeledDataset,
    gen_multimodal,
    kfold,
    load_csv,
    load_dissimilarity,
    load_image_segmentation,
    load_usps,
    save_csv,
    vectorial_to_dissimilarity,
    zscore_fit_apply,
)
from .trainer import InitStrategy, Schedule, TrainResult, VariantConfig, eps_at, train
from .evaluation import (
    CvReport,
    SuiteEntry,
    boundary_grid,
    classification_error,
    cross_validate,
    emit_report,
    multi_compare,
)
from .serialize import load_state, save_state
