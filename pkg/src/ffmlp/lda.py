"""Closed-form two-class linear discriminant between a pair of Gaussian blobs.

The separating hyperplane w.x + b = 0 uses the pooled covariance solve

    w = S^-1 (mu_a - mu_b),
    b = 0.5 mu_b^T S^-1 mu_b - 0.5 mu_a^T S^-1 mu_a + log(n_a) - log(n_b),

where S is the sample-count-weighted average of the two blob covariances plus
a relative ridge, and the log term is the prior log-odds of the pair. The
construction is exactly antisymmetric: swapping the blobs negates w and b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DegeneratePairError, NumericError, ParameterError
from .gmm import GaussianBlob, add_ridge

# Mahalanobis gap below which a blob pair is treated as indistinguishable.
DEGENERATE_GAP = 1e-12


@dataclass(frozen=True)
class Hyperplane:
    """Oriented hyperplane w.x + b = 0 from one blob pair.

    Evaluation is positive on the first (source[0]) blob's mean side.
    """

    normal: np.ndarray
    bias: float
    source: tuple[int, int]
    id: int

    def __post_init__(self) -> None:
        normal = np.asarray(self.normal, dtype=np.float64)
        if normal.ndim != 1:
            raise ParameterError("normal must be a vector")
        if not np.all(np.isfinite(normal)) or not np.any(normal):
            raise ParameterError("normal must be finite and nonzero")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)

    @property
    def dim(self) -> int:
        return self.normal.size


def fit_lda(
    blob_a: GaussianBlob,
    blob_b: GaussianBlob,
    reg: float = 1e-6,
    source: tuple[int, int] = (0, 1),
    plane_id: int = 0,
) -> Hyperplane:
    """Separating hyperplane between two blobs, positive on blob_a's side."""
    if blob_a.dim != blob_b.dim:
        raise ParameterError("blobs live in different dimensions")
    if reg < 0:
        raise ParameterError("reg must be non-negative")
    n_a, n_b = blob_a.support_count, blob_b.support_count
    if n_a <= 0 or n_b <= 0:
        raise ParameterError("both blobs need positive support counts")
    pooled = (n_a * blob_a.covariance + n_b * blob_b.covariance) / (n_a + n_b)
    pooled = add_ridge(pooled, reg)
    try:
        chol = cho_factor(pooled, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError("pooled covariance is singular after regularization") from exc

    diff = blob_a.mean - blob_b.mean
    w = cho_solve(chol, diff)
    gap = float(diff @ w)
    if not np.isfinite(gap) or gap < DEGENERATE_GAP:
        raise DegeneratePairError(
            f"blobs {source} have indistinguishable means (Mahalanobis gap {gap:.3e})"
        )
    quad_b = float(blob_b.mean @ cho_solve(chol, blob_b.mean))
    quad_a = float(blob_a.mean @ cho_solve(chol, blob_a.mean))
    # grouped so that swapping the blobs negates b exactly in floating point
    b = 0.5 * (quad_b - quad_a) + (np.log(n_a) - np.log(n_b))
    return Hyperplane(w, float(b), source, plane_id)


def evaluate(h: Hyperplane, x: np.ndarray) -> float | np.ndarray:
    """Signed response w.x + b for a d-vector or for rows of a matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != h.dim:
        raise ParameterError(f"point dimension {x.shape[-1]} != hyperplane dimension {h.dim}")
    out = x @ h.normal + h.bias
    return float(out) if x.ndim == 1 else out
