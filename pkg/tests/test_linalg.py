import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projspan.linalg import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    as_matrix,
    kernel_basis,
    orthonormal_basis,
    random_subspace,
    rank,
    restrict_rows,
    subspace_distance,
)


class TestTolerances:
    def test_defaults_are_in_unit_interval(self):
        for value in (
            DEFAULT_TOLERANCES.rank_rel,
            DEFAULT_TOLERANCES.orth,
            DEFAULT_TOLERANCES.fit_rel,
        ):
            assert 0.0 < value < 1.0

    @pytest.mark.parametrize("bad", [0.0, 1.0, -1e-9, 2.0, float("nan")])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            Tolerances(rank_rel=bad, orth=1e-10, fit_rel=1e-8)


class TestAsMatrix:
    def test_vector_becomes_column(self):
        m = as_matrix([1.0, 2.0, 3.0])
        assert m.shape == (3, 1)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            as_matrix(np.array([[1.0, np.nan]]))

    def test_rejects_higher_rank_arrays(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros((2, 2, 2)))


class TestRankAndKernel:
    def test_rank_of_identity(self):
        assert rank(np.eye(4)) == 4

    def test_rank_of_outer_product(self):
        u = np.arange(1.0, 6.0)
        assert rank(np.outer(u, u)) == 1

    def test_rank_of_zero_matrix(self):
        assert rank(np.zeros((3, 2))) == 0

    def test_rank_ignores_noise_below_threshold(self):
        m = np.diag([1.0, 1e-15])
        assert rank(m) == 1

    def test_kernel_of_wide_matrix(self):
        m = np.array([[1.0, 2.0]])
        k = kernel_basis(m)
        assert k.shape == (2, 1)
        assert abs(m @ k[:, 0]) < 1e-12

    @given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(1, 8))
    @settings(max_examples=40, deadline=None)
    def test_rank_plus_kernel_dimension_is_column_count(self, seed, rows, cols):
        m = np.random.default_rng(seed).standard_normal((rows, cols))
        k = kernel_basis(m)
        assert rank(m) + k.shape[1] == cols
        if k.shape[1]:
            # kernel vectors are orthonormal and annihilated by m
            assert np.allclose(k.T @ k, np.eye(k.shape[1]), atol=1e-12)
            bound = 10 * DEFAULT_TOLERANCES.rank_rel * np.linalg.norm(m, 2)
            assert np.linalg.norm(m @ k, 2) <= max(bound, 1e-12)

    def test_orthonormal_basis_spans_input(self):
        rng = np.random.default_rng(7)
        m = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 4))
        q = orthonormal_basis(m)
        assert q.shape == (6, 2)
        # every column of m lies in span(q)
        assert np.allclose(q @ (q.T @ m), m, atol=1e-10)

    def test_orthonormal_basis_rejects_zero_input(self):
        with pytest.raises(ValueError):
            orthonormal_basis(np.zeros((3, 2)))


def test_restrict_rows_picks_flagged_rows():
    m = np.arange(12.0).reshape(4, 3)
    out = restrict_rows(m, [True, False, False, True])
    assert np.array_equal(out, m[[0, 3], :])


class TestSubspace:
    def test_requires_orthonormal_basis(self):
        with pytest.raises(ValueError):
            Subspace(np.array([[1.0], [1.0]]))

    def test_requires_proper_dimension(self):
        with pytest.raises(ValueError):
            Subspace(np.eye(3))  # r = d not allowed

    def test_from_spanning_detects_rank(self):
        rng = np.random.default_rng(3)
        thin = rng.standard_normal((7, 2))
        fat = np.hstack([thin, thin @ rng.standard_normal((2, 3))])
        s = Subspace.from_spanning(fat)
        assert s.dim == 2 and s.ambient_dim == 7

    def test_properties(self):
        s = Subspace.from_spanning(np.eye(5)[:, :2])
        assert (s.ambient_dim, s.dim) == (5, 2)


class TestSubspaceDistance:
    def test_zero_on_same_object(self):
        s = random_subspace(9, 3, 0)
        assert subspace_distance(s, s) == 0.0

    def test_one_for_orthogonal_lines(self):
        e1 = Subspace.from_spanning(np.eye(2)[:, :1])
        e2 = Subspace.from_spanning(np.eye(2)[:, 1:])
        assert subspace_distance(e1, e2) == 1.0

    def test_matches_inner_product_formula_for_lines(self):
        u = np.array([1.0, 2.0, 3.0, 4.0, 4.0])
        v = np.array([1.0, 2.0, 3.0, 5.0, 5.0])
        cos = abs(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
        expected = np.sqrt(1.0 - cos * cos)
        got = subspace_distance(
            Subspace.from_spanning(u.reshape(-1, 1)),
            Subspace.from_spanning(v.reshape(-1, 1)),
        )
        assert got == pytest.approx(expected, abs=1e-12)

    def test_resolves_tiny_perturbations(self):
        # a naive sqrt(1 - cos^2) computation floors out near 1e-8; the
        # distance must stay meaningful well below that
        base = random_subspace(12, 3, 5)
        bump = np.random.default_rng(1).standard_normal((12, 3)) * 1e-12
        nearby = Subspace.from_spanning(base.basis + bump)
        assert 0.0 < subspace_distance(base, nearby) < 1e-10

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            subspace_distance(random_subspace(5, 1, 0), random_subspace(5, 2, 0))
        with pytest.raises(ValueError):
            subspace_distance(random_subspace(5, 2, 0), random_subspace(6, 2, 0))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_pseudometric_on_random_triples(self, seed):
        rng = np.random.default_rng(seed)
        x, y, z = (random_subspace(8, 2, rng) for _ in range(3))
        assert subspace_distance(x, y) == subspace_distance(y, x)
        assert 0.0 <= subspace_distance(x, y) <= 1.0
        assert subspace_distance(x, z) <= (
            subspace_distance(x, y) + subspace_distance(y, z) + 1e-12
        )


class TestRandomSubspace:
    def test_deterministic_per_seed(self):
        a = random_subspace(10, 4, 123)
        b = random_subspace(10, 4, 123)
        assert np.array_equal(a.basis, b.basis)

    def test_distinct_seeds_differ(self):
        a = random_subspace(10, 4, 1)
        b = random_subspace(10, 4, 2)
        assert subspace_distance(a, b) > 1e-3

    def test_basis_is_orthonormal(self):
        s = random_subspace(20, 6, 99)
        assert np.allclose(s.basis.T @ s.basis, np.eye(6), atol=1e-12)

    def test_dimension_bounds(self):
        with pytest.raises(ValueError):
            random_subspace(4, 4, 0)
        with pytest.raises(ValueError):
            random_subspace(4, 0, 0)
