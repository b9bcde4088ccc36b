"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import dppsampling as dpp


def test_random_kernel_and_sampling():
    k = dpp.random_kernel(8, 1)
    assert k.n == 8
    assert 0.0 < k.expected_cardinality < 8.0
    for algo in ("spectral", "sequential", "thinning"):
        s = dpp.sample(k, algo, 7)
        assert s == sorted(s)
        assert all(0 <= i < 8 for i in s)
        assert s == dpp.sample(k, algo, 7)  # deterministic


def test_projection_cardinality():
    k = dpp.projection_kernel(20, 4, 3)
    for seed in range(5):
        assert len(dpp.sample(k, "spectral", seed)) == 4
        assert len(dpp.sample(k, "thinning", seed)) == 4


def test_kernel_from_matrix_and_probability():
    m = np.array([[0.5, 0.25], [0.25, 0.5]], dtype=complex)
    k = dpp.kernel_from_matrix(m)
    assert dpp.probability(k, []) == pytest.approx(0.1875)
    assert dpp.probability(k, [0]) == pytest.approx(0.3125)
    assert dpp.marginal(k, [0], [1]) == pytest.approx(0.3125)
    pmf = dpp.enumerate_distribution(k)
    assert pmf == pytest.approx([0.1875, 0.3125, 0.3125, 0.1875])
    q = dpp.bernoulli_envelope(k)
    assert q == pytest.approx([0.5, 0.625])


def test_invalid_kernel_rejected():
    with pytest.raises(ValueError):
        dpp.kernel_from_matrix(np.array([[1.5]], dtype=complex))


def test_calibration():
    k = dpp.ginibre_kernel(25, 4.0, seed=2)
    assert k.expected_cardinality == pytest.approx(4.0, abs=1e-5)
    lmat = np.eye(2, dtype=complex)
    k2 = dpp.calibrated_kernel(lmat, 4.0 / 3.0)
    assert np.allclose(np.diag(k2.matrix), 2.0 / 3.0)
