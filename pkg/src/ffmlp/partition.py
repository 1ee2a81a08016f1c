"""Hyperplane set construction, sign-code regions, and greedy plane pruning.

One hyperplane is fitted per unordered cross-class blob pair (same-class
pairs are skipped). A point's sign code is the length-L bit string whose
l-th bit is 1 iff plane l evaluates strictly positive there; points exactly
on a plane take bit 0. Nonempty codes observed on training data index the
regions that the second network layer later isolates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .datasets import LabeledDataset
from .errors import DegeneratePairError, NumericError, ParameterError
from .gmm import GaussianBlob
from .lda import Hyperplane, fit_lda
from .util import ordered_map


@dataclass(frozen=True)
class HyperplaneSet:
    """Ordered hyperplanes over one input space.

    Plane ids are assigned 0..L-1 at construction and survive pruning, so a
    pruned set carries a subset of the original ids in the original order.
    """

    planes: tuple[Hyperplane, ...]
    dim: int
    skipped_pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        planes = tuple(self.planes)
        if not planes:
            raise ParameterError("a hyperplane set needs at least one plane")
        if any(p.dim != self.dim for p in planes):
            raise ParameterError("all planes must share the set's dimension")
        w = np.ascontiguousarray([p.normal for p in planes])
        b = np.ascontiguousarray([p.bias for p in planes])
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "planes", planes)
        object.__setattr__(self, "_w", w)
        object.__setattr__(self, "_b", b)

    def __len__(self) -> int:
        return len(self.planes)

    def signed(self, x: np.ndarray) -> np.ndarray:
        """Signed responses (n, L) of rows of x against every plane."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.dim:
            raise ParameterError(f"point dimension {x.shape[1]} != plane dimension {self.dim}")
        return x @ self._w.T + self._b

    def bits(self, x: np.ndarray) -> np.ndarray:
        """Boolean sign-code matrix (n, L); exactly-zero responses give False."""
        return self.signed(x) > 0.0

    def restricted_to(self, positions: list[int]) -> "HyperplaneSet":
        return HyperplaneSet(tuple(self.planes[i] for i in positions), self.dim, self.skipped_pairs)


@dataclass(frozen=True)
class RegionTable:
    """Observed sign codes with per-class sample counts and majority classes.

    ``codes`` is lexicographically sorted; ``counts[r, c]`` is the number of
    training samples of class c landing in region r, and ``majority[r]`` the
    argmax with lowest-class-index tie-break.
    """

    codes: tuple[str, ...]
    counts: np.ndarray
    majority: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        majority = np.asarray(self.majority, dtype=np.int64)
        if counts.shape[0] != len(self.codes) or majority.shape[0] != len(self.codes):
            raise ParameterError("counts and majority must have one row per code")
        if list(self.codes) != sorted(self.codes):
            raise ParameterError("codes must be lexicographically sorted")
        if (counts.sum(axis=1) == 0).any():
            raise ParameterError("every tabulated region must be nonempty")
        if not np.array_equal(majority, np.argmax(counts, axis=1)):
            raise ParameterError("majority must attain the per-region count maximum")
        counts.setflags(write=False)
        majority.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "majority", majority)

    @property
    def entries(self) -> dict[str, tuple[int, np.ndarray]]:
        return {c: (int(self.majority[i]), self.counts[i]) for i, c in enumerate(self.codes)}

    def __len__(self) -> int:
        return len(self.codes)


@dataclass(frozen=True)
class PruneReport:
    """Greedy deletion trace: (plane id, resulting training error) per round."""

    deletions: tuple[tuple[int, float], ...]
    threshold: float
    final_error: float


def build_planes(blobs: list[GaussianBlob], reg: float = 1e-6) -> HyperplaneSet:
    """One hyperplane per unordered cross-class blob pair, in pair order.

    Blob ids are list positions. Degenerate pairs (indistinguishable means)
    are skipped and recorded rather than failing the construction.
    """
    if len(blobs) < 2:
        raise ParameterError("need at least two blobs")
    if len({b.class_label for b in blobs}) < 2:
        raise ParameterError("blobs must span at least two classes")
    dim = blobs[0].dim
    planes: list[Hyperplane] = []
    skipped: list[tuple[int, int]] = []
    for i in range(len(blobs)):
        for j in range(i + 1, len(blobs)):
            if blobs[i].class_label == blobs[j].class_label:
                continue
            try:
                planes.append(fit_lda(blobs[i], blobs[j], reg, source=(i, j), plane_id=len(planes)))
            except DegeneratePairError:
                skipped.append((i, j))
    if not planes:
        raise NumericError("all cross-class blob pairs are degenerate")
    return HyperplaneSet(tuple(planes), dim, tuple(skipped))


def code_of(hs: HyperplaneSet, x: np.ndarray) -> str:
    """Length-L bit string for one point; bit l is '1' iff plane l is positive."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError("code_of takes a single point")
    row = hs.bits(x)[0]
    return "".join("1" if v else "0" for v in row)


def _code_keys(bits: np.ndarray) -> np.ndarray:
    """Pack code bits into sortable keys whose order matches string order."""
    n, width = bits.shape
    if width <= 62:
        powers = (1 << np.arange(width - 1, -1, -1)).astype(np.int64)
        return bits.astype(np.int64) @ powers
    packed = np.packbits(bits, axis=1)
    return np.asarray([row.tobytes() for row in packed], dtype=object)


def _region_counts(bits: np.ndarray, labels: np.ndarray, class_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Unique code keys (sorted) and the per-region per-class count matrix."""
    keys = _code_keys(bits)
    uniq, inverse = np.unique(keys, return_inverse=True)
    counts = np.zeros((uniq.size, class_count), dtype=np.int64)
    np.add.at(counts, (inverse, labels), 1)
    return uniq, counts


def _error_from_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    return float(total - counts.max(axis=1).sum()) / float(total)


def build_region_table(hs: HyperplaneSet, train: LabeledDataset) -> RegionTable:
    """Tabulate the nonempty sign-code regions of the training samples."""
    bits = hs.bits(train.samples)
    keys = _code_keys(bits)
    uniq, first_idx, inverse = np.unique(keys, return_index=True, return_inverse=True)
    counts = np.zeros((uniq.size, train.class_count), dtype=np.int64)
    np.add.at(counts, (inverse, train.labels), 1)
    codes = tuple("".join("1" if v else "0" for v in bits[i]) for i in first_idx)
    majority = np.argmax(counts, axis=1)
    table = RegionTable(codes, counts, majority)
    bound = steiner_region_bound(len(hs), hs.dim)
    if len(table) > bound:
        raise NumericError(f"{len(table)} regions exceed the arrangement bound {bound}")
    return table


def steiner_region_bound(num_planes: int, dim: int) -> int:
    """Maximum number of regions num_planes hyperplanes can carve in dim dimensions."""
    return sum(comb(num_planes, i) for i in range(min(dim, num_planes) + 1))


def region_error(hs: HyperplaneSet, train: LabeledDataset) -> float:
    """Training error of the region-majority classifier under this plane set."""
    if train.n == 0:
        raise ParameterError("train must be nonempty")
    bits = hs.bits(train.samples)
    _, counts = _region_counts(bits, train.labels, train.class_count)
    return _error_from_counts(counts)


def prune(
    hs: HyperplaneSet,
    train: LabeledDataset,
    threshold: float,
) -> tuple[HyperplaneSet, PruneReport]:
    """Greedily delete planes while the best single deletion keeps error < threshold.

    Each round tentatively deletes every remaining plane, recomputes the
    region-majority training error, and commits the deletion of minimum error
    (lowest plane id on ties) if that error is strictly below the threshold.
    Stops otherwise, or when a single plane remains.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ParameterError("threshold must lie in [0, 1]")
    bits = hs.bits(train.samples)
    labels = train.labels
    class_count = train.class_count
    active = list(range(len(hs)))
    deletions: list[tuple[int, float]] = []

    def error_without(pos: int) -> float:
        cols = [p for p in active if p != pos]
        _, counts = _region_counts(bits[:, cols], labels, class_count)
        return _error_from_counts(counts)

    while len(active) > 1:
        errors = ordered_map(error_without, active)
        best = int(np.argmin(errors))
        if errors[best] < threshold:
            deletions.append((hs.planes[active[best]].id, float(errors[best])))
            del active[best]
        else:
            break

    _, counts = _region_counts(bits[:, active], labels, class_count)
    report = PruneReport(tuple(deletions), threshold, _error_from_counts(counts))
    return hs.restricted_to(active), report
