import json

import numpy as np
import pytest
from scipy import stats

from densequery.divergences import DistributionPair, Gaussian
from densequery.errors import ParameterError, SelfLoopError
from densequery.model import (
    H0,
    H1,
    ModelParams,
    edge_value,
    edge_values,
    sample_instance,
)


def bern(n, k, p, q):
    return ModelParams.bernoulli(n, k, p, q)


class TestSampleInstance:
    def test_full_planted_set_when_k_equals_n(self):
        inst = sample_instance(bern(10, 10, 1.0, 0.5), H1, 123)
        assert inst.planted_set.tolist() == list(range(10))

    def test_deterministic_planted_set(self):
        a = sample_instance(bern(100, 10, 1.0, 0.5), H1, 77)
        b = sample_instance(bern(100, 10, 1.0, 0.5), H1, 77)
        assert np.array_equal(a.planted_set, b.planted_set)

    def test_h0_has_no_planted_set(self):
        inst = sample_instance(bern(100, 10, 1.0, 0.5), H0, 77)
        assert inst.planted_set is None

    def test_uniform_marginal(self):
        # each vertex planted with frequency k/n
        n, k, seeds = 200, 20, 4000
        counts = np.zeros(n)
        for s in range(seeds):
            inst = sample_instance(bern(n, k, 1.0, 0.5), H1, s)
            counts[inst.planted_set] += 1
        freq = counts / seeds
        se = np.sqrt((k / n) * (1 - k / n) / seeds)
        assert np.all(np.abs(freq - k / n) < 5 * se)

    def test_invalid_params(self):
        with pytest.raises(ParameterError):
            bern(10, 11, 1.0, 0.5)
        with pytest.raises(ParameterError):
            sample_instance(bern(10, 5, 1.0, 0.5), "H2", 0)


class TestEdgeValue:
    def test_symmetry(self):
        inst = sample_instance(bern(100, 10, 0.9, 0.4), H1, 5)
        assert edge_value(inst, 3, 7) == edge_value(inst, 7, 3)

    def test_repeat_calls_identical(self):
        inst = sample_instance(bern(50, 10, 0.7, 0.3), H1, 9)
        pairs = [(i, j) for i in range(10) for j in range(i + 1, 10)]
        first = [edge_value(inst, i, j) for i, j in pairs]
        second = [edge_value(inst, i, j) for i, j in pairs]
        assert first == second

    def test_planted_clique_edges_are_ones(self):
        inst = sample_instance(bern(60, 12, 1.0, 0.5), H1, 3)
        k = inst.planted_set
        for a in range(len(k)):
            for b in range(a + 1, len(k)):
                assert edge_value(inst, int(k[a]), int(k[b])) == 1.0

    def test_h0_empirical_mean(self):
        inst = sample_instance(bern(2000, 100, 1.0, 0.5), H0, 11)
        i = np.repeat(np.arange(1000), 1000)
        j = np.tile(np.arange(1000, 2000), 1000)
        mean = edge_values(inst, i, j).mean()
        assert abs(mean - 0.5) < 0.002

    def test_h0_goodness_of_fit(self):
        q = 0.3
        inst = sample_instance(bern(1000, 100, 1.0, q), H0, 21)
        i = np.repeat(np.arange(500), 200)
        j = np.tile(np.arange(500, 700), 500)
        vals = edge_values(inst, i, j)
        ones = int(vals.sum())
        res = stats.binomtest(ones, vals.size, q)
        assert res.pvalue > 0.001

    def test_self_loop_rejected(self):
        inst = sample_instance(bern(10, 5, 1.0, 0.5), H0, 0)
        with pytest.raises(SelfLoopError):
            edge_value(inst, 4, 4)

    def test_out_of_range_rejected(self):
        inst = sample_instance(bern(10, 5, 1.0, 0.5), H0, 0)
        with pytest.raises(ParameterError):
            edge_value(inst, 0, 10)

    def test_gaussian_observations(self):
        dist = DistributionPair(Gaussian(2.0, 1.0), Gaussian(0.0, 1.0))
        params = ModelParams(n=500, k=100, dist=dist)
        inst = sample_instance(params, H1, 8)
        k = inst.planted_set
        planted_vals = edge_values(inst, k[:50], k[50:100])
        outside = np.setdiff1d(np.arange(500), k)[:300]
        i = np.repeat(outside[:200], 100)
        j = np.tile(outside[200:300], 200)
        noise_vals = edge_values(inst, i, j)
        assert abs(planted_vals.mean() - 2.0) < 0.5
        assert abs(noise_vals.mean()) < 0.05
        assert abs(noise_vals.std() - 1.0) < 0.05


def test_descriptor_never_leaks_planted_set():
    inst = sample_instance(bern(100, 10, 1.0, 0.5), H1, 42)
    record = json.loads(inst.descriptor_json())
    assert set(record) == {"params", "hypothesis", "seed"}
    assert record["hypothesis"] == H1
    assert record["seed"] == 42
    # distribution parameters are fine; vertex identities are not
    assert "planted_set" not in json.dumps(record)
    assert record["params"]["planted"] == {"kind": "bernoulli", "theta": 1.0}
