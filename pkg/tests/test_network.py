"""Assembly, forward semantics, serialization, and the tabular oracle."""

import json

import numpy as np
import pytest

from ffmlp import datasets, network, partition
from ffmlp.errors import FormatError, ParameterError
from ffmlp.lda import Hyperplane
from ffmlp.pipeline import fit_ffmlp


def axis_planes():
    return partition.HyperplaneSet(
        (
            Hyperplane(np.array([1.0, 0.0]), 0.0, (0, 2), 0),
            Hyperplane(np.array([0.0, 1.0]), 0.0, (0, 3), 1),
        ),
        dim=2,
    )


@pytest.fixture
def xor_net(xor_small):
    hs = axis_planes()
    table = partition.build_region_table(hs, xor_small)
    return network.assemble(hs, table, 1000.0, 2)


class TestAssemble:
    def test_xor_shapes(self, xor_net):
        assert xor_net.W1.shape == (4, 2)
        assert xor_net.W2.shape == (4, 4)
        assert xor_net.W3.shape == (2, 4)
        assert xor_net.layer_sizes == (2, 4, 4, 2)

    def test_structural_invariants(self, xor_net):
        network.structural_check(xor_net)

    def test_pair_antisymmetry(self, xor_net):
        assert np.array_equal(xor_net.W1[1::2], -xor_net.W1[0::2])
        assert np.array_equal(xor_net.b1[1::2], -xor_net.b1[0::2])

    def test_w2_pattern_for_code(self, xor_net):
        r = xor_net.code_order.index("10")
        row = xor_net.W2[r]
        # plane 0 bit is 1: matching side is neuron 0; plane 1 bit is 0: neuron 3
        assert row[0] == 1.0 and row[1] == -1000.0
        assert row[2] == -1000.0 and row[3] == 1.0

    def test_code_length_mismatch(self, xor_small):
        hs = axis_planes()
        table = partition.build_region_table(hs, xor_small)
        single = partition.HyperplaneSet(hs.planes[:1], dim=2)
        with pytest.raises(ParameterError):
            network.assemble(single, table, 1000.0, 2)

    def test_bad_p(self, xor_small):
        hs = axis_planes()
        table = partition.build_region_table(hs, xor_small)
        with pytest.raises(ParameterError):
            network.assemble(hs, table, 0.0, 2)


class TestForward:
    def test_one_pair_side_active(self, xor_net):
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = rng.normal(size=2, scale=3)
            _, trace = network.forward(xor_net, x)
            for l in range(2):
                pair = trace.a1[2 * l : 2 * l + 2]
                assert (pair > 0).sum() <= 1

    def test_first_quadrant_isolation(self, xor_net):
        logits, trace = network.forward(xor_net, np.array([2.0, 2.0]))
        active = np.flatnonzero(trace.a2 > 0)
        assert list(active) == [xor_net.code_order.index("11")]
        assert np.argmax(logits) == 0

    def test_relu_nonnegative_and_logits_nonnegative(self, xor_net):
        rng = np.random.default_rng(0)
        for _ in range(50):
            logits, trace = network.forward(xor_net, rng.normal(size=2, scale=4))
            assert np.all(trace.a1 >= 0) and np.all(trace.a2 >= 0)
            assert np.all(logits >= 0)

    def test_unseen_code_falls_back(self, xor_small):
        # build a table from first-quadrant samples only, then query elsewhere
        quadrant = xor_small.samples[(xor_small.samples > 0).all(axis=1)]
        ds = datasets.LabeledDataset(
            np.vstack([quadrant, quadrant + [0.1, 0.1]]),
            np.concatenate([np.zeros(len(quadrant), int), np.ones(len(quadrant), int)]),
            2,
        )
        hs = axis_planes()
        table = partition.build_region_table(hs, ds)
        net = network.assemble(hs, table, 1000.0, 2)
        net.fallback_class = 1
        logits, _ = network.forward(net, np.array([-3.0, -3.0]))
        assert np.all(logits == 0.0)
        assert network.predict(net, np.array([-3.0, -3.0])) == 1

    def test_decision_rule_examples(self):
        assert network.decide(np.array([0.0, 5.2]), fallback_class=0) == 1
        assert network.decide(np.array([0.0, 0.0]), fallback_class=0) == 0
        assert network.decide(np.array([3.0, 3.0]), fallback_class=1) == 0  # tie -> lowest index

    def test_dim_mismatch(self, xor_net):
        with pytest.raises(ParameterError):
            network.forward(xor_net, np.zeros(3))


class TestTabularOracle:
    def test_predicts_region_majority_on_training_data(self):
        ds = datasets.gen_xor(200, 2.0, 0.6, seed=3)
        result = fit_ffmlp(ds, 2, threshold=0.1, gmm_seed=1, sample_mode="raw")
        assert result.margin_violations.size == 0
        # cross-check via the table itself
        table = result.region_table
        hs = result.plane_set
        for x, _ in zip(ds.samples[:100], range(100)):
            code = partition.code_of(hs, x)
            expected = table.entries[code][0]
            assert network.predict(result.network, x) == expected

    def test_raising_p_preserves_predictions(self):
        ds = datasets.gen_xor(150, 2.0, 0.6, seed=4)
        result = fit_ffmlp(ds, 2, threshold=0.1, gmm_seed=2, sample_mode="raw")
        hs, table = result.plane_set, result.region_table
        lo = network.assemble(hs, table, 1000.0, 2)
        hi = network.assemble(hs, table, 100000.0, 2)
        pred_lo = network.predict_batch(lo, ds.samples)
        pred_hi = network.predict_batch(hi, ds.samples)
        ok = np.isin(np.arange(ds.n), network.tabular_mismatches(lo, ds.samples), invert=True)
        assert np.array_equal(pred_lo[ok], pred_hi[ok])


class TestSerialization:
    def test_round_trip_bit_exact(self, xor_net, tmp_path, xor_small):
        xor_net.fallback_class = 1
        path = tmp_path / "model.json"
        network.serialize(xor_net, str(path))
        back = network.deserialize(str(path))
        for field in ("W1", "b1", "W2", "W3"):
            assert np.array_equal(getattr(back, field), getattr(xor_net, field))
        assert back.code_order == xor_net.code_order
        assert back.fallback_class == 1
        a = network.forward_batch(xor_net, xor_small.samples)
        b = network.forward_batch(back, xor_small.samples)
        assert np.array_equal(a, b)

    def test_rejects_bad_w2_entries(self, xor_net, tmp_path):
        path = tmp_path / "model.json"
        network.serialize(xor_net, str(path))
        doc = json.loads(path.read_text())
        doc["W2"][0][0] = 0.5
        path.write_text(json.dumps(doc))
        with pytest.raises(FormatError, match="W2"):
            network.deserialize(str(path))

    def test_rejects_version_mismatch(self, xor_net, tmp_path):
        path = tmp_path / "model.json"
        network.serialize(xor_net, str(path))
        doc = json.loads(path.read_text())
        doc["version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(FormatError, match="version"):
            network.deserialize(str(path))

    def test_rejects_malformed_json(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{not json")
        with pytest.raises(FormatError, match="line"):
            network.deserialize(str(path))

    def test_round_trip_with_provenance(self, tmp_path):
        ds = datasets.gen_xor(100, 2.0, 0.6, seed=5)
        result = fit_ffmlp(ds, 2, threshold=0.1, gmm_seed=3, sample_mode="raw")
        path = tmp_path / "model.json"
        network.serialize(result.network, str(path), config={"dataset": "xor"})
        back = network.deserialize(str(path))
        assert len(back.planes) == len(result.plane_set)
        assert back.prune_report is not None
        assert back.prune_report.deletions == result.prune_report.deletions
        assert back.mixtures is not None
        for ma, mb in zip(result.mixtures, back.mixtures):
            for ca, cb in zip(ma.components, mb.components):
                assert np.array_equal(ca.mean, cb.mean)
                assert np.array_equal(ca.covariance, cb.covariance)
