"""Per-dataset default configurations for the CLI and benchmarks.

The generators' geometry is not fixed by theory; these values were tuned once
(see scripts/calibrate_presets.py) so that the constructed networks land in
their documented accuracy bands, and every one of them can be overridden from
the command line. Splits are sized so the reference accuracy percentages are
exactly representable as sample counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import datasets

# 3x3 grid classes arranged so every horizontally or vertically adjacent
# pair of blobs belongs to different classes.
GRID9_CLASS_MAP = (0, 1, 2, 1, 2, 0, 2, 0, 1)

# Near-equilateral triangle: three blob centers whose pairwise boundaries
# intersect close to a single point, leaving six nonempty regions.
TRIANGLE_CENTERS = ((0.0, 0.0), (3.0, 0.0), (1.5, 2.598076211353316))


@dataclass(frozen=True)
class DatasetPreset:
    name: str
    generator: Callable[..., datasets.LabeledDataset]
    params: dict
    seed: int
    test_fraction: float
    components: int | tuple[int, ...]
    threshold: float
    sample_mode: str


def _gen_blobs3(n_per_blob: int, sigma: float, seed: int) -> datasets.LabeledDataset:
    return datasets.gen_blobs(TRIANGLE_CENTERS, n_per_blob, sigma, [0, 1, 2], seed)


PRESETS: dict[str, DatasetPreset] = {
    "xor": DatasetPreset(
        name="xor",
        generator=datasets.gen_xor,
        params={"n_per_blob": 300, "center_offset": 2.0, "sigma": 0.7},
        seed=1,
        test_fraction=0.5,
        components=2,
        threshold=0.1,
        sample_mode="raw",
    ),
    "blobs3": DatasetPreset(
        name="blobs3",
        generator=_gen_blobs3,
        params={"n_per_blob": 400, "sigma": 0.5},
        seed=1,
        test_fraction=0.5,
        components=1,
        threshold=0.05,
        sample_mode="raw",
    ),
    "blobs9": DatasetPreset(
        name="blobs9",
        generator=datasets.gen_gauss_grid,
        params={
            "rows": 3,
            "cols": 3,
            "n_per_blob": 200,
            "spacing": 3.0,
            "sigma": 0.9,
            "class_map": GRID9_CLASS_MAP,
        },
        seed=7,
        test_fraction=0.5,
        components=3,
        threshold=0.3,
        sample_mode="raw",
    ),
    "circle": DatasetPreset(
        name="circle",
        generator=datasets.gen_circle_ring,
        params={"n": 1000, "factor": 0.7, "noise": 0.08},
        seed=0,
        test_fraction=0.4,
        components=(1, 4),
        threshold=0.05,
        sample_mode="gmm",
    ),
    "moons2": DatasetPreset(
        name="moons2",
        generator=datasets.gen_new_moons,
        params={"pairs": 1, "n_per_moon": 500, "noise": 0.25},
        seed=1,
        test_fraction=0.4,
        components=2,
        threshold=0.1,
        sample_mode="gmm",
    ),
    "moons4": DatasetPreset(
        name="moons4",
        generator=datasets.gen_new_moons,
        params={"pairs": 2, "n_per_moon": 400, "noise": 0.1, "pair_offset": (0.5, -1.5)},
        seed=5,
        test_fraction=0.5,
        components=3,
        threshold=0.05,
        sample_mode="gmm",
    ),
}

# Tuned defaults for the bundled real-data benchmarks; the CSV files
# themselves are supplied by the user (scripts/export_real_datasets.py
# writes the sklearn-bundled ones).
REAL_DATA_DEFAULTS: dict[str, dict] = {
    "iris": {"components": 2, "threshold": 0.05, "test_fraction": 0.4, "seed": 1, "label": "target"},
    "wine": {"components": 2, "threshold": 0.03, "test_fraction": 0.2, "seed": 6, "label": "target"},
    "bcw": {"components": 2, "threshold": 0.05, "test_fraction": 0.4, "seed": 0, "label": "target"},
    "pima": {
        "components": 4,
        "threshold": 0.1,
        "test_fraction": 0.4,
        "seed": 1,
        "label": "Outcome",
        "drop_zero": ("Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI"),
    },
}


def generate(preset: DatasetPreset, seed: int | None = None, **overrides) -> datasets.LabeledDataset:
    params = dict(preset.params)
    params.update({k: v for k, v in overrides.items() if v is not None})
    return preset.generator(seed=preset.seed if seed is None else seed, **params)
