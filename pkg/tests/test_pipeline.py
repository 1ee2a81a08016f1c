"""End-to-end construction pipeline checks."""

import numpy as np
import pytest

from ffmlp import datasets, network
from ffmlp.errors import ParameterError
from ffmlp.pipeline import fit_ffmlp


@pytest.fixture
def xor_train():
    ds = datasets.gen_xor(150, 2.0, 0.6, seed=11)
    train, _ = datasets.split(ds, datasets.SplitSpec(0.5, seed=12))
    return train


def test_timings_sum_exactly(xor_train):
    r = fit_ffmlp(xor_train, 2, threshold=0.1, gmm_seed=1, sample_mode="raw")
    t = r.timings
    assert t.total_s == t.gmm_s + t.boundary_s + t.region_s + t.assign_s
    assert min(t.gmm_s, t.boundary_s, t.region_s, t.assign_s) >= 0.0


def test_fallback_is_train_majority():
    ds = datasets.gen_blobs([[0.0, 0.0], [6.0, 0.0]], 50, 0.4, [0, 1], seed=2)
    extra = datasets.LabeledDataset(
        np.vstack([ds.samples, ds.samples[ds.labels == 1] + [0.1, 0.0]]),
        np.concatenate([ds.labels, np.ones(50, dtype=np.int64)]),
        2,
    )
    r = fit_ffmlp(extra, 1, threshold=0.05, gmm_seed=0, sample_mode="raw")
    assert r.network.fallback_class == 1


def test_no_prune_keeps_all_planes(xor_train):
    r = fit_ffmlp(xor_train, 2, threshold=0.1, gmm_seed=1, sample_mode="raw", do_prune=False)
    assert len(r.plane_set) == r.initial_plane_count == 4
    assert r.prune_report is None


def test_bad_sample_mode(xor_train):
    with pytest.raises(ParameterError):
        fit_ffmlp(xor_train, 2, sample_mode="bootstrap")


def test_gmm_mode_draw_floor():
    # every blob's plane statistics rest on at least 2*d synthetic draws
    ds = datasets.gen_new_moons(1, 200, noise=0.15, seed=4)
    r = fit_ffmlp(ds, [1, 8], threshold=0.05, gmm_seed=3, draw_seed=5, sample_mode="gmm")
    d = ds.dim
    assert all(b.support_count >= 2 * d for b in r.blobs)


def test_margin_violations_reported_not_hidden(xor_train):
    r = fit_ffmlp(xor_train, 2, threshold=0.1, gmm_seed=1, sample_mode="raw")
    assert isinstance(r.margin_violations, np.ndarray)
    assert r.margin_violations.size == 0
    assert r.train_accuracy == network.accuracy(r.network, xor_train.samples, xor_train.labels)
