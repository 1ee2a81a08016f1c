"""Feedforward construction of ReLU multilayer perceptrons from Gaussian blob geometry."""

__version__ = "0.1.0"

from .datasets import LabeledDataset, SplitSpec, split
from .gmm import ClassMixture, GaussianBlob, fit_gmm, gaussian_logpdf, sample_mixture
from .lda import Hyperplane, evaluate, fit_lda
from .network import FFNetwork, assemble, deserialize, forward, predict, serialize
from .partition import HyperplaneSet, PruneReport, RegionTable, build_planes, build_region_table, code_of, prune, region_error
from .pipeline import FitResult, StageTimings, fit_ffmlp

__all__ = [
    "LabeledDataset",
    "SplitSpec",
    "split",
    "ClassMixture",
    "GaussianBlob",
    "fit_gmm",
    "gaussian_logpdf",
    "sample_mixture",
    "Hyperplane",
    "evaluate",
    "fit_lda",
    "FFNetwork",
    "assemble",
    "deserialize",
    "forward",
    "predict",
    "serialize",
    "HyperplaneSet",
    "PruneReport",
    "RegionTable",
    "build_planes",
    "build_region_table",
    "code_of",
    "prune",
    "region_error",
    "FitResult",
    "StageTimings",
    "fit_ffmlp",
]
