"""Assembly and inference of the constructed three-stage ReLU network.

Layer 1 holds one antisymmetric neuron pair per hyperplane, so both sides of
every plane keep their signed-distance information after ReLU. Layer 2 holds
one neuron per observed region code, wired with weight 1 from the matching
side of each pair and -P from the complementary side; a large P drives every
non-matching region's response negative, so after ReLU exactly the region
containing the input stays active. Layer 3 connects each region neuron to its
majority class with weight 1. All stage-2 and stage-3 biases are zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FormatError, ParameterError
from .gmm import ClassMixture, GaussianBlob
from .lda import Hyperplane
from .partition import HyperplaneSet, PruneReport, RegionTable

MODEL_FORMAT_VERSION = 1


@dataclass
class LayerTrace:
    """Pre-activations and post-ReLU activations of one forward pass."""

    z1: np.ndarray
    a1: np.ndarray
    z2: np.ndarray
    a2: np.ndarray
    logits: np.ndarray


@dataclass
class FFNetwork:
    """The constructed network plus the provenance needed to reuse it."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    W3: np.ndarray
    b3: np.ndarray
    P: float
    code_order: tuple[str, ...]
    class_count: int
    planes: tuple[Hyperplane, ...] = ()
    fallback_class: int = 0
    prune_report: Optional[PruneReport] = None
    mixtures: Optional[list[ClassMixture]] = None

    @property
    def dim(self) -> int:
        return self.W1.shape[1]

    @property
    def layer_sizes(self) -> tuple[int, int, int, int]:
        return (self.W1.shape[1], self.W1.shape[0], self.W2.shape[0], self.W3.shape[0])


def assemble(hs: HyperplaneSet, rt: RegionTable, P: float, class_count: int) -> FFNetwork:
    """Build the network weights from a plane set and its region table."""
    if not P > 0:
        raise ParameterError("P must be strictly positive")
    L = len(hs)
    if any(len(code) != L for code in rt.codes):
        raise ParameterError("region code length does not match the plane count")
    if int(rt.majority.max()) >= class_count:
        raise ParameterError("region majority class exceeds class_count")
    d = hs.dim
    W1 = np.empty((2 * L, d))
    b1 = np.empty(2 * L)
    for l, plane in enumerate(hs.planes):
        W1[2 * l] = plane.normal
        W1[2 * l + 1] = -plane.normal
        b1[2 * l] = plane.bias
        b1[2 * l + 1] = -plane.bias

    D2 = len(rt)
    W2 = np.full((D2, 2 * L), -float(P))
    for r, code in enumerate(rt.codes):
        for l, c in enumerate(code):
            W2[r, 2 * l + (0 if c == "1" else 1)] = 1.0

    W3 = np.zeros((class_count, D2))
    W3[rt.majority, np.arange(D2)] = 1.0

    return FFNetwork(
        W1=W1,
        b1=b1,
        W2=W2,
        b2=np.zeros(D2),
        W3=W3,
        b3=np.zeros(class_count),
        P=float(P),
        code_order=tuple(rt.codes),
        class_count=class_count,
        planes=hs.planes,
    )


def forward(net: FFNetwork, x: np.ndarray) -> tuple[np.ndarray, LayerTrace]:
    """Logits and full layer trace for a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.dim,):
        raise ParameterError(f"input shape {x.shape} != ({net.dim},)")
    z1 = net.W1 @ x + net.b1
    a1 = np.maximum(z1, 0.0)
    z2 = net.W2 @ a1 + net.b2
    a2 = np.maximum(z2, 0.0)
    logits = net.W3 @ a2 + net.b3
    return logits, LayerTrace(z1, a1, z2, a2, logits)


def forward_batch(net: FFNetwork, x: np.ndarray) -> np.ndarray:
    """Logits (n, C) for rows of x; no trace."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != net.dim:
        raise ParameterError(f"input dimension {x.shape[1]} != {net.dim}")
    a1 = np.maximum(x @ net.W1.T + net.b1, 0.0)
    a2 = np.maximum(a1 @ net.W2.T, 0.0)
    return a2 @ net.W3.T


def decide(logits: np.ndarray, fallback_class: int) -> int:
    """Argmax class (lowest index on ties); fallback when no logit is positive."""
    if not np.any(logits > 0.0):
        return int(fallback_class)
    return int(np.argmax(logits))


def predict(net: FFNetwork, x: np.ndarray, fallback_class: Optional[int] = None) -> int:
    """Predicted class of one input under the decide() rule."""
    logits, _ = forward(net, x)
    if fallback_class is None:
        fallback_class = net.fallback_class
    return decide(logits, fallback_class)


def predict_batch(net: FFNetwork, x: np.ndarray, fallback_class: Optional[int] = None) -> np.ndarray:
    logits = forward_batch(net, x)
    if fallback_class is None:
        fallback_class = net.fallback_class
    out = np.argmax(logits, axis=1)
    out[~np.any(logits > 0.0, axis=1)] = int(fallback_class)
    return out


def accuracy(net: FFNetwork, samples: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(predict_batch(net, samples) == labels))


def tabular_mismatches(net: FFNetwork, samples: np.ndarray) -> np.ndarray:
    """Indices where the network disagrees with its own region-majority table.

    Only samples whose sign code appears in ``code_order`` participate; for
    those, a sufficiently large P guarantees agreement, so any index returned
    here is a margin-condition violator that callers must surface.
    """
    if not net.planes:
        raise ParameterError("network carries no hyperplane provenance")
    hs = HyperplaneSet(net.planes, net.dim)
    bits = hs.bits(samples)
    code_to_region = {c: r for r, c in enumerate(net.code_order)}
    expected = np.full(bits.shape[0], -1, dtype=np.int64)
    region_class = np.argmax(net.W3, axis=0)
    for i, row in enumerate(bits):
        code = "".join("1" if v else "0" for v in row)
        r = code_to_region.get(code)
        if r is not None:
            expected[i] = region_class[r]
    actual = predict_batch(net, samples)
    known = expected >= 0
    return np.flatnonzero(known & (actual != expected))


def structural_check(net: FFNetwork) -> None:
    """Raise ParameterError if any structural invariant is violated."""
    D1, d = net.W1.shape
    if D1 % 2 != 0:
        raise ParameterError("W1 must hold neuron pairs")
    L = D1 // 2
    if not (np.array_equal(net.W1[1::2], -net.W1[0::2]) and np.array_equal(net.b1[1::2], -net.b1[0::2])):
        raise ParameterError("layer-1 rows must come in antisymmetric pairs")
    ones = net.W2 == 1.0
    neg = net.W2 == -net.P
    if not np.all(ones | neg):
        raise ParameterError("W2 entries must be 1 or -P")
    if not np.all(ones.sum(axis=1) == L):
        raise ParameterError("each W2 row must carry exactly one 1 per plane pair")
    pair_ones = ones.reshape(len(net.code_order), L, 2).sum(axis=2)
    if not np.all(pair_ones == 1):
        raise ParameterError("each plane pair must contribute exactly one matching side")
    col_sums = net.W3.sum(axis=0)
    if not (np.all(col_sums == 1.0) and np.all((net.W3 == 0.0) | (net.W3 == 1.0))):
        raise ParameterError("W3 columns must be one-hot")
    if len(net.code_order) != net.W2.shape[0]:
        raise ParameterError("code_order length must equal the region count")
    if net.planes and len(net.planes) != L:
        raise ParameterError("plane provenance does not match W1")
    if np.any(net.b2 != 0.0) or np.any(net.b3 != 0.0):
        raise ParameterError("stage-2 and stage-3 biases must be zero")


def _plane_to_json(p: Hyperplane) -> dict:
    return {"id": p.id, "w": p.normal.tolist(), "b": p.bias, "source": list(p.source)}


def _mixture_to_json(mix: ClassMixture) -> dict:
    return {
        "class_label": mix.class_label,
        "log_likelihood": mix.log_likelihood,
        "reseeds": mix.reseeds,
        "components": [
            {
                "mean": b.mean.tolist(),
                "covariance": b.covariance.tolist(),
                "weight": b.weight,
                "class_label": b.class_label,
                "support_count": b.support_count,
            }
            for b in mix.components
        ],
    }


def serialize(net: FFNetwork, path: str, config: Optional[dict] = None) -> None:
    """Write the model as JSON; floats round-trip bit-exactly."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "d": net.dim,
        "C": net.class_count,
        "P": net.P,
        "planes": [_plane_to_json(p) for p in net.planes],
        "code_order": list(net.code_order),
        "W1": net.W1.tolist(),
        "b1": net.b1.tolist(),
        "W2": net.W2.tolist(),
        "W3": net.W3.tolist(),
        "fallback_class": int(net.fallback_class),
        "prune_report": (
            {
                "deletions": [[int(pid), err] for pid, err in net.prune_report.deletions],
                "threshold": net.prune_report.threshold,
                "final_error": net.prune_report.final_error,
            }
            if net.prune_report is not None
            else None
        ),
        "mixtures": [_mixture_to_json(m) for m in net.mixtures] if net.mixtures is not None else None,
        "config": config,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def deserialize(path: str) -> FFNetwork:
    """Read a model file back, validating version and structural invariants."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}") from exc

    version = doc.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported model version {version!r} (expected {MODEL_FORMAT_VERSION})")
    try:
        planes = tuple(
            Hyperplane(np.asarray(p["w"], dtype=np.float64), float(p["b"]), tuple(p["source"]), int(p["id"]))
            for p in doc["planes"]
        )
        mixtures = None
        if doc.get("mixtures") is not None:
            mixtures = [
                ClassMixture(
                    m["class_label"],
                    [
                        GaussianBlob(
                            np.asarray(c["mean"], dtype=np.float64),
                            np.asarray(c["covariance"], dtype=np.float64),
                            c["weight"],
                            c["class_label"],
                            c["support_count"],
                        )
                        for c in m["components"]
                    ],
                    m["log_likelihood"],
                    m.get("reseeds", 0),
                )
                for m in doc["mixtures"]
            ]
        prune_report = None
        if doc.get("prune_report") is not None:
            pr = doc["prune_report"]
            prune_report = PruneReport(
                tuple((int(pid), float(err)) for pid, err in pr["deletions"]),
                float(pr["threshold"]),
                float(pr["final_error"]),
            )
        D2 = len(doc["code_order"])
        net = FFNetwork(
            W1=np.asarray(doc["W1"], dtype=np.float64),
            b1=np.asarray(doc["b1"], dtype=np.float64),
            W2=np.asarray(doc["W2"], dtype=np.float64),
            b2=np.zeros(D2),
            W3=np.asarray(doc["W3"], dtype=np.float64),
            b3=np.zeros(len(doc["W3"])),
            P=float(doc["P"]),
            code_order=tuple(doc["code_order"]),
            class_count=int(doc["C"]),
            planes=planes,
            fallback_class=int(doc["fallback_class"]),
            prune_report=prune_report,
            mixtures=mixtures,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: invalid model document ({exc})") from exc
    if net.dim != int(doc["d"]):
        raise FormatError(f"{path}: W1 width {net.dim} disagrees with declared d={doc['d']}")
    try:
        structural_check(net)
    except ParameterError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return net
