"""Per-class Gaussian mixture fitting by EM with full covariances.

Each class of a labeled dataset is fitted independently: a mixture for class
``c`` never sees samples of other classes, and its random stream is derived
from ``(seed, c)``, so permuting other classes leaves the result bit-identical.
Covariances are kept strictly positive definite by a relative ridge
``reg * (trace/d) * I`` (absolute ``reg * I`` when the trace underflows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .datasets import LabeledDataset
from .errors import DataError, NumericError, ParameterError
from .util import ordered_map

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianBlob:
    """One Gaussian modality tagged with a class label.

    ``weight`` is the blob's share within its class mixture and
    ``support_count`` the effective number of samples behind its moments.
    """

    mean: np.ndarray
    covariance: np.ndarray
    weight: float
    class_label: int
    support_count: float

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.covariance, dtype=np.float64)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise ParameterError("mean must be a d-vector and covariance a d x d matrix")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        if not 0.0 < self.weight <= 1.0 + 1e-9:
            raise ParameterError(f"weight must lie in (0, 1], got {self.weight}")

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class ClassMixture:
    """A fitted per-class mixture with its training log-likelihood.

    ``ll_history`` records the log-likelihood at each EM iteration (reset on a
    component reseed), ``reseeds`` how many collapsed components were reseeded.
    """

    class_label: int
    components: list[GaussianBlob]
    log_likelihood: float
    reseeds: int = 0
    ll_history: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.components:
            raise ParameterError("a mixture needs at least one component")
        if any(b.class_label != self.class_label for b in self.components):
            raise ParameterError("all components must carry the mixture's class label")
        total = sum(b.weight for b in self.components)
        if abs(total - 1.0) > 1e-9:
            raise ParameterError(f"component weights must sum to 1, got {total}")

    @property
    def weights(self) -> np.ndarray:
        return np.asarray([b.weight for b in self.components])


def add_ridge(cov: np.ndarray, reg: float) -> np.ndarray:
    """Return cov + reg*(trace/d)*I, falling back to reg*I if the trace underflows."""
    d = cov.shape[0]
    scale = float(np.trace(cov)) / d
    if not scale > 0.0:
        scale = 1.0
    return cov + (reg * scale) * np.eye(d)


def _cholesky(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError("covariance is not positive definite") from exc


def gaussian_logpdf(blob: GaussianBlob, x: np.ndarray) -> float | np.ndarray:
    """Multivariate normal log-density at ``x`` (a d-vector or rows of them)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != blob.dim:
        raise ParameterError(f"point dimension {pts.shape[1]} != blob dimension {blob.dim}")
    chol = _cholesky(blob.covariance)
    sol = solve_triangular(chol, (pts - blob.mean).T, lower=True)
    quad = np.sum(sol * sol, axis=0)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    out = -0.5 * (blob.dim * LOG_2PI + logdet + quad)
    return float(out[0]) if single else out


def blob_from_samples(
    samples: np.ndarray,
    class_label: int,
    weight: float = 1.0,
    reg: float = 1e-6,
) -> GaussianBlob:
    """Gaussian moments of a sample set (MLE mean and covariance, ridged)."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise DataError("need a matrix of at least 2 samples to estimate a blob")
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / samples.shape[0]
    return GaussianBlob(mean, add_ridge(cov, reg), weight, class_label, float(samples.shape[0]))


def _kmeanspp_centers(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centers[j] = x[rng.integers(n)]
        else:
            centers[j] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((x - centers[j]) ** 2, axis=1))
    return centers


@dataclass
class _EMState:
    means: np.ndarray      # (k, d)
    covs: np.ndarray       # (k, d, d)
    weights: np.ndarray    # (k,)
    reseeds: int = 0


def _state_from_centers(
    x: np.ndarray, centers: np.ndarray, reg: float, rng: np.random.Generator
) -> _EMState:
    """Hard-assign points to the nearest center and take per-cluster moments."""
    n, d = x.shape
    k = centers.shape[0]
    dist = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    assign = dist.argmin(axis=1)
    fallback_cov = add_ridge(np.cov(x, rowvar=False, ddof=0).reshape(d, d), reg)
    means = np.empty((k, d))
    covs = np.empty((k, d, d))
    weights = np.empty(k)
    for j in range(k):
        members = x[assign == j]
        if members.shape[0] < 2:
            means[j] = x[rng.integers(n)]
            covs[j] = fallback_cov
            weights[j] = 1.0
        else:
            means[j] = members.mean(axis=0)
            centered = members - means[j]
            covs[j] = add_ridge(centered.T @ centered / members.shape[0], reg)
            weights[j] = members.shape[0]
    weights /= weights.sum()
    return _EMState(means, covs, weights)


def _init_state(x: np.ndarray, k: int, reg: float, rng: np.random.Generator) -> _EMState:
    return _state_from_centers(x, _kmeanspp_centers(x, k, rng), reg, rng)


def _component_logpdfs(x: np.ndarray, state: _EMState) -> np.ndarray:
    n, d = x.shape
    k = state.means.shape[0]
    out = np.empty((n, k))
    for j in range(k):
        chol = _cholesky(state.covs[j])
        sol = solve_triangular(chol, (x - state.means[j]).T, lower=True)
        quad = np.sum(sol * sol, axis=0)
        logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
        out[:, j] = -0.5 * (d * LOG_2PI + logdet + quad)
    return out


def _fit_class(
    x: np.ndarray,
    class_label: int,
    k: int,
    max_iters: int,
    tol: float,
    reg: float,
    seed: int,
) -> ClassMixture:
    n, d = x.shape
    if n < k:
        raise DataError(f"class {class_label} has {n} samples, fewer than {k} components")
    rng = np.random.default_rng([seed, class_label])

    # EM runs on per-feature standardized coordinates so the covariance ridge
    # is scale-equivariant and numerically negligible; moments are mapped back
    # to the original coordinates at the end
    shift = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale <= 0.0] = 1.0
    xw = (x - shift) / scale
    log_jacobian = float(np.sum(np.log(scale)))

    state = _init_state(xw, k, reg, rng)

    history: list[float] = []
    nk = state.weights * n
    # a collapsed component (fewer than d+1 responsible points) is reseeded by
    # re-partitioning around a random datum; one reseed per component plus a
    # hard cap keeps EM terminating on degenerate data
    soft_budget = np.ones(k, dtype=bool)
    max_total_reseeds = 5 * k
    for _ in range(max_iters):
        log_comp = _component_logpdfs(xw, state) + np.log(state.weights)
        row_max = log_comp.max(axis=1, keepdims=True)
        log_norm = row_max[:, 0] + np.log(np.exp(log_comp - row_max).sum(axis=1))
        new_ll = float(log_norm.sum())
        resp = np.exp(log_comp - log_norm[:, None])

        nk = resp.sum(axis=0)
        if k > 1 and state.reseeds < max_total_reseeds:
            hard = nk < 2.0
            soft = (nk < d + 1) & soft_budget
            reseed = np.flatnonzero(hard | soft)
            if reseed.size:
                centers = state.means.copy()
                for j in reseed:
                    centers[j] = xw[rng.integers(n)]
                    soft_budget[j] = False
                reseeds_so_far = state.reseeds + int(reseed.size)
                state = _state_from_centers(xw, centers, reg, rng)
                state.reseeds = reseeds_so_far
                history = []  # likelihood restarts after a reseed
                continue

        if history and abs(new_ll - history[-1]) <= tol * max(abs(history[-1]), 1.0):
            history.append(new_ll)
            break
        history.append(new_ll)

        state.weights = nk / n
        nk_safe = np.maximum(nk, 1e-12)
        state.means = (resp.T @ xw) / nk_safe[:, None]
        for j in range(k):
            centered = xw - state.means[j]
            cov = (centered * resp[:, j : j + 1]).T @ centered / nk_safe[j]
            state.covs[j] = add_ridge(cov, reg)

    components = [
        GaussianBlob(
            shift + scale * state.means[j],
            state.covs[j] * np.outer(scale, scale),
            float(state.weights[j]),
            class_label,
            float(nk[j]),
        )
        for j in range(k)
    ]
    # densities in original coordinates differ by the constant whitening Jacobian
    history_orig = tuple(v - n * log_jacobian for v in history)
    log_lik = history_orig[-1] if history_orig else -np.inf
    return ClassMixture(class_label, components, log_lik, state.reseeds, history_orig)


def fit_gmm(
    ds: LabeledDataset,
    components_per_class: int | list[int],
    max_iters: int = 200,
    tol: float = 1e-6,
    reg: float = 1e-6,
    seed: int = 0,
) -> list[ClassMixture]:
    """Fit one Gaussian mixture per class by EM with full covariances."""
    if isinstance(components_per_class, int):
        counts = [components_per_class] * ds.class_count
    else:
        counts = list(components_per_class)
    if len(counts) != ds.class_count:
        raise ParameterError(
            f"components_per_class has {len(counts)} entries for {ds.class_count} classes"
        )
    if any(k < 1 for k in counts):
        raise ParameterError("every class needs at least one component")
    if max_iters < 1:
        raise ParameterError("max_iters must be at least 1")
    if reg < 0:
        raise ParameterError("reg must be non-negative")

    def one(c: int) -> ClassMixture:
        x = ds.samples[ds.labels == c]
        if x.shape[0] == 0:
            raise DataError(f"class {c} is empty")
        return _fit_class(x, c, counts[c], max_iters, tol, reg, seed)

    return ordered_map(one, list(range(ds.class_count)))


def mixture_log_likelihood(mix: ClassMixture, x: np.ndarray) -> float:
    """Total log-likelihood of rows of ``x`` under a fitted mixture."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    log_comp = np.column_stack([gaussian_logpdf(b, x) for b in mix.components])
    log_comp = log_comp + np.log(mix.weights)
    row_max = log_comp.max(axis=1, keepdims=True)
    return float((row_max[:, 0] + np.log(np.exp(log_comp - row_max).sum(axis=1))).sum())


def sample_mixture(mix: ClassMixture, n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. points: component by weight, then a Cholesky-transformed normal."""
    if n < 1:
        raise ParameterError("n must be at least 1")
    rng = np.random.default_rng(seed)
    k = len(mix.components)
    picks = rng.choice(k, size=n, p=mix.weights) if k > 1 else np.zeros(n, dtype=np.int64)
    d = mix.components[0].dim
    z = rng.standard_normal((n, d))
    out = np.empty((n, d))
    for j, blob in enumerate(mix.components):
        rows = picks == j
        if not rows.any():
            continue
        out[rows] = blob.mean + z[rows] @ _cholesky(blob.covariance).T
    return out


def hard_assignments(mix: ClassMixture, x: np.ndarray) -> np.ndarray:
    """Index of the most responsible component for each row of ``x``."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    log_comp = np.column_stack([gaussian_logpdf(b, x) for b in mix.components])
    return np.argmax(log_comp + np.log(mix.weights), axis=1)
