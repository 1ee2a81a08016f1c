"""Shared fixtures: deterministic small datasets and CSV files on disk."""

import pytest

from ffmlp import datasets


@pytest.fixture(scope="session")
def iris_csv(tmp_path_factory):
    from sklearn.datasets import load_iris

    data = load_iris()
    path = tmp_path_factory.mktemp("data") / "iris.csv"
    _write_csv(path, data.data, data.target, [n.replace(" (cm)", "").replace(" ", "_") for n in data.feature_names])
    return str(path)


@pytest.fixture(scope="session")
def wine_csv(tmp_path_factory):
    from sklearn.datasets import load_wine

    data = load_wine()
    path = tmp_path_factory.mktemp("data") / "wine.csv"
    _write_csv(path, data.data, data.target, [n.replace("/", "_") for n in data.feature_names])
    return str(path)


@pytest.fixture(scope="session")
def bcw_csv(tmp_path_factory):
    from sklearn.datasets import load_breast_cancer

    data = load_breast_cancer()
    path = tmp_path_factory.mktemp("data") / "bcw.csv"
    _write_csv(path, data.data, data.target, [n.replace(" ", "_") for n in data.feature_names])
    return str(path)


def _write_csv(path, x, y, feature_names):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(feature_names) + ",target\n")
        for row, label in zip(x, y):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")


@pytest.fixture
def xor_small():
    return datasets.gen_xor(50, 2.0, 0.5, seed=7)
