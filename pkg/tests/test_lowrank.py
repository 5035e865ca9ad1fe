"""Rank-k pipeline against the truncated-SVD oracle."""

import numpy as np
import pytest

from sketchnla.lowrank import (
    best_rank_k_error,
    low_rank_approx,
    sketch_dims_lowrank,
    truncate_rank_k,
)
from sketchnla.sketch import full_srht


def planted(n, d, seed, decay=1.0):
    g = np.random.default_rng(seed)
    u, _ = np.linalg.qr(g.standard_normal((n, d)))
    v, _ = np.linalg.qr(g.standard_normal((d, d)))
    sig = np.arange(1, d + 1, dtype=float) ** -decay
    return (u * sig) @ v.T


class TestSketchDims:
    def test_floor(self):
        for k in (1, 2, 5, 9):
            t_r, v, vp = sketch_dims_lowrank(k, 0.9)
            assert t_r >= k + 1
            assert vp <= v

    @pytest.mark.parametrize("k", [1, 2, 5, 8])
    @pytest.mark.parametrize("eps", [0.8, 0.5, 0.3])
    def test_halving_eps_grows_v(self, k, eps):
        _, v1, _ = sketch_dims_lowrank(k, eps)
        _, v2, _ = sketch_dims_lowrank(k, eps / 2)
        assert v2 >= 4 * v1

    def test_monotone_in_k(self):
        prev = sketch_dims_lowrank(1, 0.5)
        for k in (2, 4, 8):
            cur = sketch_dims_lowrank(k, 0.5)
            assert all(c >= p for c, p in zip(cur, prev))
            prev = cur


class TestTruncateRankK:
    def test_identity_when_k_exceeds_rank(self, rng):
        u = rng.standard_normal((8, 2))
        m = u @ rng.standard_normal((2, 6))
        assert np.abs(truncate_rank_k(m, 5) - m).max() <= 1e-10

    def test_diagonal(self):
        out = truncate_rank_k(np.diag([3.0, 2.0, 1.0]), 1)
        assert np.allclose(out, np.diag([3.0, 0.0, 0.0]), atol=1e-12)

    def test_error_matches_tail(self, rng):
        m = rng.standard_normal((10, 7))
        out = truncate_rank_k(m, 3)
        sig = np.linalg.svd(m, compute_uv=False)
        expect = np.sqrt(np.sum(sig[3:] ** 2))
        assert abs(np.linalg.norm(m - out, "fro") - expect) <= 1e-10

    def test_k_out_of_range(self, rng):
        with pytest.raises(ValueError):
            truncate_rank_k(rng.standard_normal((4, 3)), 5)


class TestLowRankApprox:
    def test_exact_rank_k_input(self, rng):
        u = rng.standard_normal((60, 3))
        a = u @ rng.standard_normal((3, 40))
        res = low_rank_approx(a, 3, 0.5, seed=1)
        assert res.err <= 1e-8 * np.linalg.norm(a, "fro")

    def test_k_at_least_rank(self, rng):
        u = rng.standard_normal((50, 2))
        a = u @ rng.standard_normal((2, 30))
        res = low_rank_approx(a, 5, 0.5, seed=2)  # k > rank(A)
        assert res.err <= 1e-8 * np.linalg.norm(a, "fro")
        assert np.all(np.diff(res.factors.d) <= 1e-12)

    @pytest.mark.parametrize("strategy", ["srht_compose", "leverage_sample"])
    def test_planted_spectrum_sweep(self, strategy):
        a = planted(200, 150, seed=3)
        delta_k = best_rank_k_error(a, 5)
        ok = 0
        for s in range(20):
            res = low_rank_approx(a, 5, 0.5, seed=s, strategy=strategy)
            assert res.err >= delta_k - 1e-10
            ok += res.err <= 1.5 * delta_k
        assert ok >= 18

    def test_factor_contracts(self, rng):
        a = planted(80, 60, seed=4)
        res = low_rank_approx(a, 4, 0.5, seed=5)
        f = res.factors
        assert np.abs(f.l.T @ f.l - np.eye(4)).max() <= 1e-8
        assert np.abs(f.w.T @ f.w - np.eye(4)).max() <= 1e-8
        assert np.all(f.d >= 0) and np.all(np.diff(f.d) <= 1e-12)
        recon = (f.l * f.d) @ f.w.T
        assert np.linalg.matrix_rank(recon) <= 4

    def test_full_isometry_hooks_reproduce_oracle(self):
        a = planted(64, 48, seed=6)
        delta_k = best_rank_k_error(a, 3)
        res = low_rank_approx(
            a, 3, 0.5, seed=7, r_op=full_srht(48), s_op=full_srht(64)
        )
        assert abs(res.err - delta_k) <= 1e-8

    def test_err_ratio_nonincreasing_in_t_r(self):
        # median error over seeds sweeps down the 1.6^z grid
        a = planted(150, 100, seed=8)
        delta_k = best_rank_k_error(a, 5)
        grid = [1, 2, 3, 6, 9, 16]
        medians = []
        for t_r in grid:
            errs = [
                low_rank_approx(
                    a, 5, 0.5, seed=s, strategy="leverage_sample", t_r=t_r
                ).err
                / delta_k
                for s in range(10)
            ]
            medians.append(np.median(errs))
        assert all(
            medians[i + 1] <= medians[i] + 0.02 for i in range(len(medians) - 1)
        )

    def test_adaptive_sampler_hits_cond_cap(self):
        a = planted(300, 80, seed=9)
        res = low_rank_approx(a, 4, 0.5, seed=10, strategy="leverage_sample")
        assert res.cond_su <= 1.2
        assert not res.capped

    def test_cap_flag_when_forced(self):
        a = planted(300, 80, seed=11)
        res = low_rank_approx(
            a,
            4,
            0.5,
            seed=12,
            strategy="leverage_sample",
            cond_cap=1.0000001,
            t_s_cap_ratio=1.0,
        )
        assert res.capped
        assert res.cond_su > 1.0000001

    def test_k_out_of_range(self, rng):
        with pytest.raises(ValueError):
            low_rank_approx(rng.standard_normal((5, 4)), 5, 0.5)

    def test_bad_strategy(self, rng):
        with pytest.raises(ValueError):
            low_rank_approx(rng.standard_normal((5, 4)), 2, 0.5, strategy="nope")

    def test_zero_matrix(self):
        res = low_rank_approx(np.zeros((10, 6)), 2, 0.5, seed=0)
        assert res.err == 0.0
        assert np.all(res.factors.d == 0)
        assert np.abs(res.factors.l.T @ res.factors.l - np.eye(2)).max() <= 1e-8
