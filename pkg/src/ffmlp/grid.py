"""Rectangular grid dumps of decisions or single-neuron responses.

Cells are evaluated at their centers and ordered row-major from the top of
the bounding box (largest y) down, matching image conventions. The CSV dump
(x, y, value) is the canonical artifact; the PPM raster is a convenience view
with a fixed palette: decision grids use CLASS_COLORS indexed by class,
neuron grids a min-max normalized gray scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .network import FFNetwork, predict_batch

CLASS_COLORS = (
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
    (188, 189, 34),
    (23, 190, 207),
)


@dataclass(frozen=True)
class GridDump:
    """Per-cell values over a bounding box at nx x ny resolution."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    values: np.ndarray  # (ny, nx), row 0 at the top (y = y1 side)
    kind: str  # "decision" | "l1" | "l2"

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        xs = self.x0 + (np.arange(self.nx) + 0.5) * (self.x1 - self.x0) / self.nx
        ys = self.y1 - (np.arange(self.ny) + 0.5) * (self.y1 - self.y0) / self.ny
        return xs, ys


def _grid_points(x0: float, x1: float, y0: float, y1: float, nx: int, ny: int) -> np.ndarray:
    if nx < 1 or ny < 1:
        raise ParameterError("resolution must be at least 1x1")
    if not (x1 > x0 and y1 > y0):
        raise ParameterError("bounding box must have positive extent")
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y1 - (np.arange(ny) + 0.5) * (y1 - y0) / ny
    xx, yy = np.meshgrid(xs, ys)
    return np.column_stack([xx.ravel(), yy.ravel()])


def _require_2d(net: FFNetwork) -> None:
    if net.dim != 2:
        raise ParameterError(f"grid dumps need a 2-D model, got d={net.dim}")


def decision_grid(net: FFNetwork, box: tuple[float, float, float, float], nx: int, ny: int) -> GridDump:
    _require_2d(net)
    pts = _grid_points(*box, nx, ny)
    values = predict_batch(net, pts).reshape(ny, nx).astype(np.float64)
    return GridDump(*box, nx, ny, values, "decision")


def activation_grid(
    net: FFNetwork,
    box: tuple[float, float, float, float],
    nx: int,
    ny: int,
    layer: int,
    neuron: int,
) -> GridDump:
    _require_2d(net)
    pts = _grid_points(*box, nx, ny)
    a1 = np.maximum(pts @ net.W1.T + net.b1, 0.0)
    if layer == 1:
        if not 0 <= neuron < net.W1.shape[0]:
            raise ParameterError(f"layer-1 neuron {neuron} out of range")
        values = a1[:, neuron]
    elif layer == 2:
        if not 0 <= neuron < net.W2.shape[0]:
            raise ParameterError(f"layer-2 neuron {neuron} out of range")
        values = np.maximum(a1 @ net.W2.T, 0.0)[:, neuron]
    else:
        raise ParameterError("layer must be 1 or 2")
    return GridDump(*box, nx, ny, values.reshape(ny, nx), f"l{layer}")


def write_csv(dump: GridDump, path: str) -> None:
    xs, ys = dump.cell_centers()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y,value\n")
        for iy in range(dump.ny):
            for ix in range(dump.nx):
                fh.write(f"{float(xs[ix])!r},{float(ys[iy])!r},{float(dump.values[iy, ix])!r}\n")


def write_ppm(dump: GridDump, path: str) -> None:
    """Binary PPM (P6) raster of the dump with the documented palette."""
    img = np.empty((dump.ny, dump.nx, 3), dtype=np.uint8)
    if dump.kind == "decision":
        classes = dump.values.astype(np.int64)
        palette = np.asarray(CLASS_COLORS, dtype=np.uint8)
        img = palette[classes % len(CLASS_COLORS)]
    else:
        lo, hi = float(dump.values.min()), float(dump.values.max())
        norm = np.zeros_like(dump.values) if hi <= lo else (dump.values - lo) / (hi - lo)
        gray = np.round(255.0 * norm).astype(np.uint8)
        img = np.repeat(gray[:, :, None], 3, axis=2)
    with open(path, "wb") as fh:
        fh.write(f"P6 {dump.nx} {dump.ny} 255\n".encode("ascii"))
        fh.write(img.tobytes())
