"""Exact oracle layer: decompositions, least squares, leverage, truncation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchnla.linalg import (
    Tolerances,
    best_rank_k,
    condition_number,
    exact_least_squares,
    exact_leverage_scores,
    pivoted_qr_rank,
    thin_qr,
    thin_svd,
)


class TestThinSvd:
    def test_diagonal(self):
        f = thin_svd(np.diag([3.0, 2.0, 1.0]))
        assert np.allclose(f.sigma, [3, 2, 1])
        assert f.rank == 3

    def test_zero_matrix(self):
        f = thin_svd(np.zeros((4, 3)))
        assert f.rank == 0
        assert np.all(f.sigma == 0)

    def test_reconstruction_identity(self, rng):
        a = rng.standard_normal((6, 3))
        f = thin_svd(a)
        recon = (f.u * f.sigma) @ f.v.T
        assert np.linalg.norm(a - recon, "fro") <= 1e-10 * np.linalg.norm(a, "fro")

    def test_factor_orthonormality(self, rng):
        f = thin_svd(rng.standard_normal((9, 4)))
        assert np.abs(f.u.T @ f.u - np.eye(4)).max() <= 1e-10
        assert np.abs(f.v.T @ f.v - np.eye(4)).max() <= 1e-10
        assert np.all(np.diff(f.sigma) <= 0)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            thin_svd(np.array([[np.nan, 1.0], [0.0, 1.0]]))


class TestThinQr:
    def test_orthonormal_input(self, rng):
        q0, _ = np.linalg.qr(rng.standard_normal((5, 3)))
        q, r = thin_qr(q0)
        # q equals the input up to column signs, r is +-identity.
        assert np.allclose(np.abs(np.diag(r)), 1.0, atol=1e-12)
        assert np.allclose(q * np.sign(np.diag(r)), q0, atol=1e-12)

    def test_two_vector(self):
        q, r = thin_qr(np.array([[3.0], [4.0]]))
        assert np.allclose(np.abs(q.ravel()), [0.6, 0.8])
        assert np.allclose(np.abs(r), [[5.0]])

    def test_orthogonality(self, rng):
        a = rng.standard_normal((8, 3))
        q, r = thin_qr(a)
        assert np.abs(q.T @ q - np.eye(3)).max() <= 1e-10
        assert np.allclose(q @ r, a)
        assert np.allclose(r, np.triu(r))

    def test_wide_rejected(self, rng):
        with pytest.raises(ValueError):
            thin_qr(rng.standard_normal((2, 4)))


class TestExactLeastSquares:
    def test_identity(self, rng):
        b = rng.standard_normal((3, 2))
        assert np.allclose(exact_least_squares(np.eye(3), b), b)

    def test_orthogonal_rhs(self):
        a = np.array([[1.0], [0.0]])
        b = np.array([[0.0], [1.0]])
        x = exact_least_squares(a, b)
        assert np.allclose(x, 0.0)
        assert np.isclose(np.linalg.norm(a @ x - b), 1.0)

    def test_matches_normal_equations(self):
        # Independent oracle: solve A^T A x = A^T b directly.
        g = np.random.default_rng(11)
        a = g.standard_normal((50, 5))
        b = g.standard_normal((50, 1))
        x = exact_least_squares(a, b)
        x_ne = np.linalg.solve(a.T @ a, a.T @ b)
        r1 = np.linalg.norm(a @ x - b)
        r2 = np.linalg.norm(a @ x_ne - b)
        assert abs(r1 - r2) <= 1e-8
        assert np.allclose(x, x_ne, atol=1e-8)

    def test_normal_equation_residual_invariant(self):
        for seed in range(5):
            g = np.random.default_rng(seed)
            a = g.standard_normal((30, 4))
            b = g.standard_normal((30, 2))
            x = exact_least_squares(a, b)
            bound = 1e-8 * np.linalg.norm(a) * np.linalg.norm(b)
            assert np.abs(a.T @ (a @ x - b)).max() <= bound

    def test_pythagorean(self):
        g = np.random.default_rng(7)
        a = g.standard_normal((25, 4))
        b = g.standard_normal((25, 3))
        x_star = exact_least_squares(a, b)
        base = np.linalg.norm(a @ x_star - b, "fro") ** 2
        for _ in range(5):
            x = g.standard_normal((4, 3))
            lhs = np.linalg.norm(a @ x - b, "fro") ** 2
            rhs = np.linalg.norm(a @ (x - x_star), "fro") ** 2 + base
            assert abs(lhs - rhs) <= 1e-8 * max(lhs, 1.0)

    def test_min_norm_tie_break(self):
        # Rank-deficient: duplicate column; minimum-norm splits the weight.
        a = np.array([[1.0, 1.0], [2.0, 2.0]])
        b = np.array([[3.0], [6.0]])
        x = exact_least_squares(a, b)
        assert np.allclose(x, [[1.5], [1.5]], atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            exact_least_squares(np.eye(3), np.ones((4, 1)))


class TestExactLeverageScores:
    def test_identity(self):
        assert np.allclose(exact_leverage_scores(np.eye(4)), 1.0)

    def test_single_column(self, rng):
        a = rng.standard_normal((6, 1))
        expect = (a.ravel() ** 2) / np.sum(a**2)
        assert np.allclose(exact_leverage_scores(a), expect)

    def test_sum_is_rank_and_matches_svd(self):
        g = np.random.default_rng(3)
        a = g.standard_normal((8, 3))
        scores = exact_leverage_scores(a)
        assert abs(scores.sum() - 3.0) <= 1e-10
        u, _, _ = np.linalg.svd(a, full_matrices=False)
        assert np.allclose(scores, np.sum(u**2, axis=1), atol=1e-10)
        assert np.all(scores >= 0) and np.all(scores <= 1 + 1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_basis_independent(self, seed):
        g = np.random.default_rng(seed)
        a = g.standard_normal((10, 3))
        m = g.standard_normal((3, 3)) + 3 * np.eye(3)  # invertible
        assert np.allclose(
            exact_leverage_scores(a), exact_leverage_scores(a @ m), atol=1e-8
        )


class TestBestRankK:
    def test_exact_rank_k(self, rng):
        u = rng.standard_normal((9, 2))
        v = rng.standard_normal((2, 6))
        a = u @ v
        _, _, _, delta = best_rank_k(a, 2)
        assert delta <= 1e-9 * np.linalg.norm(a, "fro")

    def test_k_zero(self, rng):
        a = rng.standard_normal((5, 4))
        _, _, _, delta = best_rank_k(a, 0)
        assert np.isclose(delta, np.linalg.norm(a, "fro"))

    def test_tail_singular_value(self):
        _, _, _, delta = best_rank_k(np.diag([3.0, 2.0, 1.0]), 2)
        assert np.isclose(delta, 1.0)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            best_rank_k(np.eye(3), 4)


class TestConditionNumber:
    def test_orthonormal(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((7, 3)))
        assert abs(condition_number(q) - 1.0) <= 1e-10

    def test_diagonal(self):
        assert np.isclose(condition_number(np.diag([4.0, 2.0])), 2.0)

    def test_rank_deficient_sentinel(self):
        a = np.ones((4, 2))
        assert condition_number(a) == float("inf")


class TestPivotedQr:
    def test_rank_detection(self, rng):
        a = rng.standard_normal((10, 3))
        a = np.hstack([a, a[:, :1]])  # dependent column
        _, _, _, rank = pivoted_qr_rank(a)
        assert rank == 3


def test_tolerances_validate():
    with pytest.raises(ValueError):
        Tolerances(rank_rel_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(ortho_tol=2.0)
