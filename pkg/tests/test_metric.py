"""Distance operations, Gram construction and parameter normalization."""

import numpy as np
import pytest

from lvqkit.dataset import LabeledDataset, vectorial_to_dissimilarity
from lvqkit.errors import ContractError
from lvqkit.metric import (
    build_gram,
    d_euclid2,
    d_feature2,
    d_matrix,
    d_relational,
    d_relevance,
    gram_cross,
    harmonic_distance,
    normalize_matrix,
    normalize_relevance,
)


class TestEuclid:
    def test_zero_when_equal(self):
        assert d_euclid2(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0

    def test_unit(self):
        assert d_euclid2(np.array([1.0, 0.0]), np.array([0.0, 0.0])) == 1.0

    def test_three_four_five(self):
        assert d_euclid2(np.array([3.0, 4.0]), np.zeros(2)) == 25.0

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            d_euclid2(np.zeros(2), np.zeros(3))


class TestRelevance:
    def test_uniform_is_scaled_euclid(self):
        rng = np.random.default_rng(0)
        x, w = rng.normal(size=(2, 5))
        lam = np.full(5, 0.2)
        assert d_relevance(x, w, lam) == pytest.approx(d_euclid2(x, w) / 5)

    def test_one_hot(self):
        x = np.array([2.0, 9.0])
        w = np.array([5.0, 1.0])
        assert d_relevance(x, w, np.array([1.0, 0.0])) == pytest.approx(9.0)

    def test_half_half(self):
        assert d_relevance(np.array([1.0, 2.0]), np.zeros(2), np.array([0.5, 0.5])) == pytest.approx(2.5)


class TestMatrix:
    def test_scaled_identity(self):
        rng = np.random.default_rng(1)
        x, w = rng.normal(size=(2, 4))
        omega = np.eye(4) / 2.0
        assert d_matrix(x, w, omega) == pytest.approx(d_euclid2(x, w) / 4)

    def test_diag_sqrt_lambda_equals_relevance(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            lam = normalize_relevance(rng.uniform(0, 1, 6)).lam
            x, w = rng.normal(size=(2, 6))
            assert d_matrix(x, w, np.diag(np.sqrt(lam))) == pytest.approx(
                d_relevance(x, w, lam), rel=1e-12, abs=1e-15
            )

    def test_random_omega_matches_quadratic_form_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            d = int(rng.integers(2, 7))
            omega = rng.normal(size=(d, d))
            u = rng.normal(size=d)
            # independent oracle: build Lambda explicitly, evaluate u^T Lambda u by loops
            lam_full = omega.T @ omega
            expected = sum(u[a] * lam_full[a, b] * u[b] for a in range(d) for b in range(d))
            assert d_matrix(u, np.zeros(d), omega) == pytest.approx(expected, rel=1e-9)

    def test_nonnegative_property(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            d = int(rng.integers(1, 8))
            omega = rng.normal(size=(d, d)) * 10
            x, w = rng.normal(size=(2, d)) * 5
            assert d_matrix(x, w, omega) >= 0.0


class TestGram:
    def test_unit_diagonal_and_symmetry(self):
        rng = np.random.default_rng(5)
        ds = LabeledDataset(rng.normal(size=(12, 3)), np.r_[1, rng.integers(1, 3, 11)], 2)
        g = build_gram(ds, 1.3)
        np.testing.assert_array_equal(np.diagonal(g.gram), 1.0)
        np.testing.assert_array_equal(g.gram, g.gram.T)
        assert g.gram.min() > 0.0 and g.gram.max() <= 1.0

    def test_known_value(self):
        ds = LabeledDataset([[0.0], [np.sqrt(2.0)]], [1, 2], 2)
        g = build_gram(ds, 1.0)
        assert g.gram[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_nonpositive_width_rejected(self):
        ds = LabeledDataset([[0.0]], [1], 1)
        with pytest.raises(ContractError):
            build_gram(ds, 0.0)


class TestFeatureDistance:
    def _gram(self, n=8, seed=6):
        rng = np.random.default_rng(seed)
        ds = LabeledDataset(rng.normal(size=(n, 3)), np.r_[1, rng.integers(1, 3, n - 1)], 2)
        return build_gram(ds, 1.0)

    def test_one_hot_prototype(self):
        g = self._gram()
        gamma = np.zeros(8)
        gamma[3] = 1.0
        assert d_feature2(0, gamma, g) == pytest.approx(2.0 - 2.0 * g.gram[0, 3], rel=1e-12)

    def test_one_hot_on_self_is_zero(self):
        g = self._gram()
        gamma = np.zeros(8)
        gamma[2] = 1.0
        assert d_feature2(2, gamma, g) == pytest.approx(0.0, abs=1e-12)

    def test_quadratic_form_oracle(self):
        g = self._gram(n=10)
        rng = np.random.default_rng(7)
        for i in range(10):
            gamma = rng.uniform(0, 1, 10)
            gamma /= gamma.sum()
            e = -gamma
            e[i] += 1.0
            expected = float(e @ g.gram @ e)
            assert d_feature2(i, gamma, g) == pytest.approx(expected, abs=1e-9)

    def test_polynomial_kernel_explicit_feature_map(self):
        # degree-2 homogeneous kernel has the explicit map x -> vec(x x^T)
        rng = np.random.default_rng(8)
        X = rng.normal(size=(6, 3))
        gram = (X @ X.T) ** 2
        phi = np.stack([np.outer(x, x).ravel() for x in X])
        gamma = rng.uniform(0, 1, 6)
        gamma /= gamma.sum()
        proto = gamma @ phi
        for i in range(6):
            expected = float(np.sum((phi[i] - proto) ** 2))
            assert d_feature2(i, gamma, gram) == pytest.approx(expected, rel=1e-9)

    def test_nonnegative_for_affine_rows(self):
        g = self._gram(n=9)
        rng = np.random.default_rng(9)
        for i in range(30):
            gamma = rng.normal(size=9)
            gamma /= gamma.sum()
            assert d_feature2(i % 9, gamma, g) >= -1e-9


class TestRelationalDistance:
    def _data(self, n=9, seed=10):
        rng = np.random.default_rng(seed)
        ds = LabeledDataset(rng.normal(size=(n, 4)), np.r_[1, rng.integers(1, 3, n - 1)], 2)
        return ds, vectorial_to_dissimilarity(ds)

    def test_one_hot(self):
        _, dis = self._data()
        alpha = np.zeros(9)
        alpha[4] = 1.0
        assert d_relational(2, alpha, dis) == pytest.approx(dis.matrix[2, 4], rel=1e-12)
        assert d_relational(4, alpha, dis) == pytest.approx(0.0, abs=1e-12)

    def test_vectorial_oracle_affine_and_convex(self):
        ds, dis = self._data()
        rng = np.random.default_rng(11)
        for trial in range(40):
            alpha = rng.uniform(0, 1, 9) if trial % 2 else rng.normal(size=9)
            alpha /= alpha.sum()
            proto = alpha @ ds.features
            for i in (0, 3, 8):
                expected = float(np.sum((ds.features[i] - proto) ** 2))
                assert d_relational(i, alpha, dis) == pytest.approx(expected, abs=1e-9)

    def test_sum_violation_rejected(self):
        _, dis = self._data()
        with pytest.raises(ContractError, match="sum to 1"):
            d_relational(0, np.full(9, 0.2), dis)


class TestHarmonic:
    def test_singleton(self):
        assert harmonic_distance([3.7]) == pytest.approx(3.7)

    def test_constant_list(self):
        assert harmonic_distance([2.5, 2.5]) == pytest.approx(2.5)

    def test_one_three(self):
        assert harmonic_distance([1.0, 3.0]) == pytest.approx(1.5)

    def test_bounded_by_m_times_min(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            d = rng.uniform(0.1, 10, size=int(rng.integers(1, 9)))
            h = harmonic_distance(d)
            assert h <= d.min() * len(d) + 1e-12
            assert h >= d.min() - 1e-12

    def test_zero_distance_rejected(self):
        with pytest.raises(ContractError):
            harmonic_distance([1.0, 0.0])


class TestNormalization:
    def test_relevance_simple(self):
        np.testing.assert_allclose(normalize_relevance(np.array([2.0, 2.0])).lam, [0.5, 0.5])

    def test_relevance_clips_negatives(self):
        np.testing.assert_allclose(normalize_relevance(np.array([-1.0, 3.0])).lam, [0.0, 1.0])

    def test_relevance_degenerate(self):
        with pytest.raises(ContractError):
            normalize_relevance(np.array([-1.0, 0.0]))

    def test_matrix_double_identity(self):
        m = normalize_matrix(2.0 * np.eye(2))
        np.testing.assert_allclose(m.omega, np.eye(2) / np.sqrt(2.0))
        assert np.trace(m.lam_matrix) == pytest.approx(1.0, abs=1e-12)

    def test_matrix_trace_one_random(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            d = int(rng.integers(1, 9))
            m = normalize_matrix(rng.normal(size=(d, d)) * rng.uniform(0.1, 50))
            assert np.sum(m.omega * m.omega) == pytest.approx(1.0, abs=1e-12)


def test_gram_cross_matches_build_gram():
    rng = np.random.default_rng(14)
    X = rng.normal(size=(7, 3))
    ds = LabeledDataset(X, np.r_[1, rng.integers(1, 3, 6)], 2)
    g = build_gram(ds, 0.8)
    cross = gram_cross(X, X, 0.8)
    np.testing.assert_allclose(cross, g.gram, atol=1e-12)
