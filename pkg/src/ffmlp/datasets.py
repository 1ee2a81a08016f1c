"""Synthetic 2-D dataset generators, CSV ingestion, and train/test splitting.

Every generator is a pure function of its parameters: the same seed yields a
bit-identical dataset. Labels are dense integers in ``[0, class_count)`` so a
class index can double as an output-neuron index downstream.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, FormatError, ParameterError


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with dense integer class labels.

    ``samples`` is an (n, d) float64 matrix with no NaN/inf entries, ``labels``
    an (n,) int64 vector where every class in ``[0, class_count)`` occurs at
    least once. Arrays are frozen read-only after validation, so instances are
    safe to share across threads.
    """

    samples: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self) -> None:
        samples = np.ascontiguousarray(np.asarray(self.samples, dtype=np.float64))
        labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        if samples.ndim != 2:
            raise ParameterError("samples must be a 2-D matrix")
        if labels.ndim != 1 or labels.shape[0] != samples.shape[0]:
            raise ParameterError("labels must be a vector with one entry per sample")
        n, d = samples.shape
        if n < 2 or d < 1:
            raise ParameterError(f"need at least 2 samples and 1 feature, got n={n}, d={d}")
        if not np.all(np.isfinite(samples)):
            raise DataError("samples contain NaN or infinite values")
        if self.class_count < 2:
            raise ParameterError("class_count must be at least 2")
        if labels.min() < 0 or labels.max() >= self.class_count:
            raise DataError("labels out of range [0, class_count)")
        if np.unique(labels).size != self.class_count:
            raise DataError("every class index must occur at least once")
        samples.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def class_indices(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.class_count)


@dataclass(frozen=True)
class SplitSpec:
    """Parameters of a deterministic train/test split."""

    test_fraction: float
    seed: int
    stratified: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.test_fraction < 1.0:
            raise ParameterError("test_fraction must lie strictly between 0 and 1")
        if self.seed < 0:
            raise ParameterError("seed must be a non-negative integer")


def _check_blob_params(n_per_blob: int, sigma: float) -> None:
    if n_per_blob < 1:
        raise ParameterError("n_per_blob must be at least 1")
    if not sigma > 0:
        raise ParameterError("sigma must be strictly positive")


def gen_blobs(
    centers: Sequence[Sequence[float]],
    n_per_blob: int,
    sigma: float,
    class_map: Sequence[int],
    seed: int,
) -> LabeledDataset:
    """Isotropic Gaussian blobs at explicit centers, one class tag per blob."""
    _check_blob_params(n_per_blob, sigma)
    centers_arr = np.asarray(centers, dtype=np.float64)
    if centers_arr.ndim != 2:
        raise ParameterError("centers must be a list of coordinate vectors")
    if len(class_map) != centers_arr.shape[0]:
        raise ParameterError(
            f"class_map length {len(class_map)} does not match {centers_arr.shape[0]} blob centers"
        )
    rng = np.random.default_rng(seed)
    n_blobs, d = centers_arr.shape
    noise = sigma * rng.standard_normal((n_blobs * n_per_blob, d))
    samples = np.repeat(centers_arr, n_per_blob, axis=0) + noise
    labels = np.repeat(np.asarray(class_map, dtype=np.int64), n_per_blob)
    return LabeledDataset(samples, labels, int(max(class_map)) + 1)


def gen_xor(n_per_blob: int, center_offset: float = 2.0, sigma: float = 0.7, seed: int = 0) -> LabeledDataset:
    """Four Gaussian blobs at (+-offset, +-offset); class 0 where the signs match."""
    if not center_offset > 0:
        raise ParameterError("center_offset must be strictly positive")
    o = float(center_offset)
    centers = [(o, o), (-o, -o), (o, -o), (-o, o)]
    return gen_blobs(centers, n_per_blob, sigma, [0, 0, 1, 1], seed)


def gen_gauss_grid(
    rows: int,
    cols: int,
    n_per_blob: int,
    spacing: float,
    sigma: float,
    class_map: Sequence[int],
    seed: int,
) -> LabeledDataset:
    """Gaussian blobs on a rows x cols grid with identical isotropic covariance.

    Blob (r, c) sits at (c * spacing, r * spacing); class_map is row-major.
    """
    if rows < 1 or cols < 1:
        raise ParameterError("rows and cols must be at least 1")
    if len(class_map) != rows * cols:
        raise ParameterError(f"class_map length {len(class_map)} != rows*cols = {rows * cols}")
    centers = [(c * spacing, r * spacing) for r in range(rows) for c in range(cols)]
    return gen_blobs(centers, n_per_blob, sigma, class_map, seed)


def gen_circle_ring(n: int, factor: float = 0.5, noise: float = 0.08, seed: int = 0) -> LabeledDataset:
    """Class 0 on a circle of radius ``factor``, class 1 on the unit circle.

    ``n`` points total, split as evenly as possible; isotropic Gaussian noise
    of standard deviation ``noise`` is added to both circles.
    """
    if n < 4:
        raise ParameterError("n must be at least 4")
    if not 0.0 < factor < 1.0:
        raise ParameterError("factor must lie strictly between 0 and 1")
    if noise < 0:
        raise ParameterError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    n_inner = n // 2
    n_outer = n - n_inner
    theta_in = rng.uniform(0.0, 2.0 * math.pi, n_inner)
    theta_out = rng.uniform(0.0, 2.0 * math.pi, n_outer)
    inner = factor * np.column_stack([np.cos(theta_in), np.sin(theta_in)])
    outer = np.column_stack([np.cos(theta_out), np.sin(theta_out)])
    samples = np.vstack([inner, outer])
    if noise > 0:
        samples = samples + noise * rng.standard_normal(samples.shape)
    labels = np.concatenate([np.zeros(n_inner, dtype=np.int64), np.ones(n_outer, dtype=np.int64)])
    return LabeledDataset(samples, labels, 2)


def _moon_pair(t0: np.ndarray, t1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    upper = np.column_stack([np.cos(t0), np.sin(t0)])
    lower = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    return upper, lower


def gen_new_moons(
    pairs: int,
    n_per_moon: int,
    noise: float = 0.1,
    pair_offset: Sequence[float] = (0.5, -1.5),
    seed: int = 0,
) -> LabeledDataset:
    """One or two pairs of interleaving half-circle moons; each moon is a class.

    ``pairs=1`` gives the classic two interleaved half-circles. ``pairs=2``
    adds a second pair translated by ``pair_offset``, for four classes total.
    """
    if pairs not in (1, 2):
        raise ParameterError("pairs must be 1 or 2")
    if n_per_moon < 1:
        raise ParameterError("n_per_moon must be at least 1")
    if noise < 0:
        raise ParameterError("noise must be non-negative")
    shift = np.asarray(pair_offset, dtype=np.float64)
    if shift.shape != (2,):
        raise ParameterError("pair_offset must be a 2-vector")
    rng = np.random.default_rng(seed)
    chunks = []
    labels = []
    for p in range(pairs):
        t0 = rng.uniform(0.0, math.pi, n_per_moon)
        t1 = rng.uniform(0.0, math.pi, n_per_moon)
        upper, lower = _moon_pair(t0, t1)
        offset = p * shift
        chunks.extend([upper + offset, lower + offset])
        labels.extend([2 * p, 2 * p + 1])
    samples = np.vstack(chunks)
    if noise > 0:
        samples = samples + noise * rng.standard_normal(samples.shape)
    label_vec = np.repeat(np.asarray(labels, dtype=np.int64), n_per_moon)
    return LabeledDataset(samples, label_vec, 2 * pairs)


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def _resolve_column(col: str | int, header: list[str] | None, width: int, what: str) -> int:
    if isinstance(col, int) or (isinstance(col, str) and col.lstrip("-").isdigit()):
        idx = int(col)
        if not 0 <= idx < width:
            raise ParameterError(f"{what} index {idx} out of range for {width} columns")
        return idx
    if header is None:
        raise ParameterError(f"{what} given by name {col!r} but the file has no header row")
    try:
        return header.index(col)
    except ValueError:
        raise ParameterError(f"{what} {col!r} not found in header {header}") from None


def load_csv(
    path: str,
    label_column: str | int,
    drop_zero_columns: Sequence[str | int] | None = None,
) -> LabeledDataset:
    """Read a comma-separated file into a LabeledDataset.

    The label column may be named (requires a header row) or given as a
    0-based index. With an index, the first row is treated as a header when
    any non-label cell fails to parse as a number. Rows holding a zero in any
    ``drop_zero_columns`` entry are removed before assembly, and labels are
    re-indexed densely from 0 in sorted order.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")

    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FormatError(f"{path}: rows have inconsistent column counts")

    by_name = isinstance(label_column, str) and not label_column.lstrip("-").isdigit()
    if by_name:
        header = rows[0]
        if label_column not in header:
            raise ParameterError(f"label column {label_column!r} not found in header {header}")
        data_rows = rows[1:]
        first_line = 2
    else:
        label_idx_probe = int(label_column)
        probe = [c for i, c in enumerate(rows[0]) if i != label_idx_probe]
        has_header = any(_parse_float(c) is None for c in probe)
        header = rows[0] if has_header else None
        data_rows = rows[1:] if has_header else rows
        first_line = 2 if has_header else 1
    if not data_rows:
        raise DataError(f"{path} has no data rows")

    label_idx = _resolve_column(label_column, header, width, "label column")
    drop_idx = [
        _resolve_column(c, header, width, "drop-zero column") for c in (drop_zero_columns or [])
    ]
    if label_idx in drop_idx:
        raise ParameterError("label column cannot be a drop-zero column")

    feature_idx = [i for i in range(width) if i != label_idx]
    features = []
    raw_labels = []
    for offset, row in enumerate(data_rows):
        line = first_line + offset
        vals = {}
        for i in feature_idx:
            v = _parse_float(row[i])
            if v is None:
                name = header[i] if header else str(i)
                raise FormatError(f"{path}: row {line}, column {name!r}: cannot parse {row[i]!r} as a number")
            vals[i] = v
        if any(vals[i] == 0.0 for i in drop_idx):
            continue
        features.append([vals[i] for i in feature_idx])
        raw_labels.append(row[label_idx].strip())
    if not features:
        raise DataError(f"{path}: no rows remain after drop-zero filtering")

    uniq = sorted(set(raw_labels), key=lambda s: (float(s), s) if _parse_float(s) is not None else (math.inf, s))
    mapping = {v: i for i, v in enumerate(uniq)}
    labels = np.asarray([mapping[v] for v in raw_labels], dtype=np.int64)
    return LabeledDataset(np.asarray(features, dtype=np.float64), labels, len(uniq))


def split(ds: LabeledDataset, spec: SplitSpec) -> tuple[LabeledDataset, LabeledDataset]:
    """Disjoint, exhaustive train/test partition, stratified per class on request."""
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        test_parts = []
        for c in range(ds.class_count):
            idx = ds.class_indices(c)
            n_test = int(round(spec.test_fraction * idx.size))
            if n_test < 1 or n_test >= idx.size:
                raise DataError(
                    f"class {c} with {idx.size} samples cannot be stratified at test_fraction {spec.test_fraction}"
                )
            perm = rng.permutation(idx)
            test_parts.append(perm[:n_test])
        test_idx = np.sort(np.concatenate(test_parts))
    else:
        n_test = int(round(spec.test_fraction * ds.n))
        if n_test < 1 or n_test >= ds.n:
            raise DataError(f"test_fraction {spec.test_fraction} leaves an empty side for n={ds.n}")
        perm = rng.permutation(ds.n)
        test_idx = np.sort(perm[:n_test])
    mask = np.zeros(ds.n, dtype=bool)
    mask[test_idx] = True
    train = LabeledDataset(ds.samples[~mask], ds.labels[~mask], ds.class_count)
    test = LabeledDataset(ds.samples[mask], ds.labels[mask], ds.class_count)
    return train, test
