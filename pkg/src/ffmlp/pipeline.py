"""End-to-end construction pipeline with per-stage wall-clock timings.

Stages mirror the construction order: per-class mixture fitting, boundary
construction (blob sample preparation, pairwise plane fits, pruning), region
tabulation, and class assignment (weight assembly). Verification against the
region table happens after assembly and is not timed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .datasets import LabeledDataset
from .errors import ParameterError
from .gmm import ClassMixture, GaussianBlob, blob_from_samples, fit_gmm, hard_assignments, sample_mixture
from .network import FFNetwork, accuracy, assemble, tabular_mismatches
from .partition import HyperplaneSet, PruneReport, RegionTable, build_planes, build_region_table, prune

SAMPLE_MODES = ("raw", "gmm")


@dataclass(frozen=True)
class StageTimings:
    """Seconds spent per construction stage; total is the exact sum."""

    gmm_s: float
    boundary_s: float
    region_s: float
    assign_s: float

    @property
    def total_s(self) -> float:
        return self.gmm_s + self.boundary_s + self.region_s + self.assign_s


@dataclass
class FitResult:
    network: FFNetwork
    mixtures: list[ClassMixture]
    blobs: list[GaussianBlob]
    initial_plane_count: int
    plane_set: HyperplaneSet
    region_table: RegionTable
    prune_report: Optional[PruneReport]
    timings: StageTimings
    train_accuracy: float
    margin_violations: np.ndarray

    @property
    def layer_sizes(self) -> tuple[int, int, int, int]:
        return self.network.layer_sizes


def _blob_sample_sets(
    train: LabeledDataset,
    mixtures: list[ClassMixture],
    sample_mode: str,
    draw_seed: int,
) -> list[tuple[GaussianBlob, np.ndarray]]:
    """Pair every mixture component with the samples its plane fits will use.

    raw: training samples hard-assigned to their most responsible component;
    gmm: synthetic draws, round(weight * class count) per component with a
    floor of 2*d so downstream covariances stay well-posed.
    """
    out = []
    d = train.dim
    for mix in mixtures:
        class_x = train.samples[train.labels == mix.class_label]
        if sample_mode == "raw":
            assign = hard_assignments(mix, class_x)
        for j, blob in enumerate(mix.components):
            if sample_mode == "raw":
                members = class_x[assign == j]
                if members.shape[0] < max(2, d + 1):
                    n_draw = max(int(round(blob.weight * class_x.shape[0])), 2 * d)
                    members = sample_mixture(
                        ClassMixture(mix.class_label, [with_unit_weight(blob)], 0.0),
                        n_draw,
                        draw_seed + 7919 * len(out),
                    )
            else:
                n_draw = max(int(round(blob.weight * class_x.shape[0])), 2 * d)
                members = sample_mixture(
                    ClassMixture(mix.class_label, [with_unit_weight(blob)], 0.0),
                    n_draw,
                    draw_seed + 7919 * len(out),
                )
            out.append((blob, members))
    return out


def with_unit_weight(blob: GaussianBlob) -> GaussianBlob:
    """The same blob normalized to weight 1, for single-component sampling."""
    return GaussianBlob(blob.mean, blob.covariance, 1.0, blob.class_label, blob.support_count)


def fit_ffmlp(
    train: LabeledDataset,
    components_per_class: int | Sequence[int],
    threshold: float = 0.05,
    P: float = 1000.0,
    reg: float = 1e-6,
    gmm_seed: int = 0,
    draw_seed: int = 0,
    sample_mode: str = "raw",
    do_prune: bool = True,
    max_iters: int = 200,
    tol: float = 1e-6,
) -> FitResult:
    """Construct the network from training data in one feedforward pass."""
    if sample_mode not in SAMPLE_MODES:
        raise ParameterError(f"sample_mode must be one of {SAMPLE_MODES}")

    t0 = time.perf_counter()
    mixtures = fit_gmm(train, components_per_class, max_iters=max_iters, tol=tol, reg=reg, seed=gmm_seed)
    t1 = time.perf_counter()

    sample_sets = _blob_sample_sets(train, mixtures, sample_mode, draw_seed)
    stat_blobs = [
        blob_from_samples(members, blob.class_label, blob.weight, reg) for blob, members in sample_sets
    ]
    hs0 = build_planes(stat_blobs, reg)
    if do_prune:
        hs, prune_report = prune(hs0, train, threshold)
    else:
        hs, prune_report = hs0, None
    t2 = time.perf_counter()

    table = build_region_table(hs, train)
    t3 = time.perf_counter()

    net = assemble(hs, table, P, train.class_count)
    net.fallback_class = int(np.argmax(train.class_sizes()))
    net.prune_report = prune_report
    net.mixtures = mixtures
    t4 = time.perf_counter()

    timings = StageTimings(t1 - t0, t2 - t1, t3 - t2, t4 - t3)
    violators = tabular_mismatches(net, train.samples)
    train_acc = accuracy(net, train.samples, train.labels)
    return FitResult(
        network=net,
        mixtures=mixtures,
        blobs=stat_blobs,
        initial_plane_count=len(hs0),
        plane_set=hs,
        region_table=table,
        prune_report=prune_report,
        timings=timings,
        train_accuracy=train_acc,
        margin_violations=violators,
    )
