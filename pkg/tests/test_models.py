import numpy as np
import pytest

from sparselab import (
    gaussian_design,
    linear_observe,
    orthogonal_design,
    planted_clique_instance,
    signed_permutation_design,
    sparse_signal,
)


class TestGaussianDesign:
    def test_determinism(self):
        a = gaussian_design(4, 4, seed=7)
        b = gaussian_design(4, 4, seed=7)
        assert np.array_equal(a.entries, b.entries)
        assert a.kind == "gaussian_iid"

    def test_moments_match_standard_normal(self):
        X = gaussian_design(2000, 4000, seed=1).entries
        assert abs(X.mean()) < 4.0 / np.sqrt(X.size)
        assert abs(X.var() - 1.0) < 0.05

    def test_top_singular_value_near_mp_edge(self):
        X = gaussian_design(200, 100, seed=3)
        s = np.linalg.svd(X.entries / np.sqrt(200), compute_uv=False)[0]
        half = 1.2 / np.sqrt(2)
        assert 1 - half <= s <= 1 + half

    def test_column_independence(self):
        X = gaussian_design(10_000, 2, seed=11).entries
        corr = np.corrcoef(X[:, 0], X[:, 1])[0, 1]
        assert abs(corr) < 5.0 / np.sqrt(10_000)

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            gaussian_design(0, 4, seed=0)
        with pytest.raises(ValueError):
            gaussian_design(4, 0, seed=0)


class TestOrthogonalDesign:
    def test_n_equals_one(self):
        X = orthogonal_design(1, seed=0)
        assert X.entries.shape == (1, 1)
        assert abs(abs(X.entries[0, 0]) - 1.0) < 1e-12

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_gram_is_n_identity(self, seed):
        X = orthogonal_design(16, seed)
        dev = np.abs(X.entries.T @ X.entries - 16 * np.eye(16)).max()
        assert dev <= 1e-9

    def test_column_norms(self):
        X = orthogonal_design(64, seed=5)
        norms = np.linalg.norm(X.entries, axis=0)
        assert np.allclose(norms, 8.0, atol=1e-9)

    def test_determinism(self):
        assert np.array_equal(
            orthogonal_design(8, 3).entries, orthogonal_design(8, 3).entries
        )


class TestSignedPermutationDesign:
    def test_exactly_orthogonal(self):
        X = signed_permutation_design(50, seed=2)
        assert X.kind == "orthogonal"
        assert np.abs(X.entries.T @ X.entries - 50.0 * np.eye(50)).max() <= 1e-9
        assert np.count_nonzero(X.entries) == 50  # one entry per row/column

    def test_determinism(self):
        assert np.array_equal(
            signed_permutation_design(20, 9).entries,
            signed_permutation_design(20, 9).entries,
        )


class TestSparseSignal:
    def test_empty_support(self):
        t = sparse_signal(10, 0, 1.0, placement_seed=0)
        assert np.all(t.values == 0) and t.eps == 0.0 and t.support.size == 0

    def test_full_support(self):
        t = sparse_signal(10, 10, 1.0, placement_seed=0)
        assert np.all(np.abs(t.values) == 1.0) and t.eps == 1.0

    def test_construction_counts(self):
        t = sparse_signal(1000, 100, 10.0, placement_seed=2)
        assert np.count_nonzero(t.values) == 100
        assert np.all(np.abs(t.values[t.support]) == 10.0)
        assert np.array_equal(np.sort(t.support), t.support)
        assert t.eps == 0.1

    def test_support_matches_nonzeros(self):
        t = sparse_signal(200, 17, 3.0, placement_seed=4)
        assert np.array_equal(np.flatnonzero(t.values), t.support)

    def test_oversized_support_rejected(self):
        with pytest.raises(ValueError):
            sparse_signal(5, 6, 1.0, placement_seed=0)


class TestLinearObserve:
    def test_noiseless_zero_signal(self):
        X = gaussian_design(6, 4, seed=0)
        theta = sparse_signal(4, 0, 1.0, placement_seed=0)
        assert np.all(linear_observe(X, theta, 0.0, seed=1).y == 0.0)

    def test_noiseless_unit_vector_selects_column(self):
        X = orthogonal_design(4, seed=2)
        e1 = np.zeros(4)
        e1[0] = 1.0
        y = linear_observe(X, e1, 0.0, seed=0).y
        assert np.allclose(y, X.entries[:, 0])

    def test_noise_power_concentrates(self):
        X = gaussian_design(10_000, 3, seed=0)
        theta = sparse_signal(3, 0, 1.0, placement_seed=0)
        y = linear_observe(X, theta, 1.0, seed=5).y
        assert abs(y @ y / 10_000 - 1.0) < 0.05

    def test_sigma_zero_ignores_seed(self):
        X = gaussian_design(8, 3, seed=0)
        theta = sparse_signal(3, 2, 1.5, placement_seed=1)
        ya = linear_observe(X, theta, 0.0, seed=1).y
        yb = linear_observe(X, theta, 0.0, seed=99).y
        assert np.array_equal(ya, yb)
        assert np.allclose(ya, X.entries @ theta.values)

    def test_dimension_mismatch_rejected(self):
        X = gaussian_design(6, 4, seed=0)
        with pytest.raises(ValueError):
            linear_observe(X, np.zeros(5), 0.0, seed=0)


class TestPlantedClique:
    def test_full_clique_is_all_ones(self):
        inst = planted_clique_instance(5, 5, seed=0)
        assert np.all(inst.W == 1)

    def test_clique_block_is_ones(self):
        inst = planted_clique_instance(100, 10, seed=4)
        assert np.all(inst.W[np.ix_(inst.S, inst.S)] == 1)
        assert inst.S.size == 10 and inst.kappa == 10 / np.sqrt(100)

    def test_symmetry_exact_and_pm_one(self):
        inst = planted_clique_instance(60, 6, seed=3)
        assert np.array_equal(inst.W, inst.W.T)
        assert set(np.unique(inst.W)) <= {-1, 1}
        assert np.all(np.diag(inst.W) == 1)

    def test_offdiagonal_mean_is_fair(self):
        n = 2000
        inst = planted_clique_instance(n, 1, seed=7)
        offdiag = inst.W[np.triu_indices(n, 1)]
        assert abs(offdiag.mean()) < 4.0 / np.sqrt(n * n / 2)

    def test_bad_k_rejected(self):
        with pytest.raises(ValueError):
            planted_clique_instance(5, 6, seed=0)
        with pytest.raises(ValueError):
            planted_clique_instance(5, 0, seed=0)

    def test_determinism(self):
        a = planted_clique_instance(30, 4, seed=12)
        b = planted_clique_instance(30, 4, seed=12)
        assert np.array_equal(a.W, b.W) and np.array_equal(a.S, b.S)
