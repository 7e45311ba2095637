"""Dense and Lanczos eigenvalue oracles."""

import numpy as np
import pytest

from bigmrf import (LanczosConfig, LanczosNonConvergence, SparseSymMatrix,
                    Theta, build_bundle, build_circulant_block,
                    build_inner_precision, build_toeplitz_block, dense_spectrum,
                    gershgorin_upper, lanczos_extreme, matvec,
                    min_eig_perturbed)

from _oracles import rand_theta


def _identity(dim):
    idx = np.arange(dim)
    return SparseSymMatrix(dim, idx, idx, np.ones(dim))


class TestMatvec:
    def test_identity(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=7)
        np.testing.assert_array_equal(matvec(_identity(7), v), v)

    def test_zero_theta_precision(self):
        rng = np.random.default_rng(1)
        q = build_inner_precision(Theta.zero(), (3, 4))
        v = rng.normal(size=q.dim)
        np.testing.assert_array_equal(matvec(q, v), v)

    def test_matches_dense_multiply(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            theta = rand_theta(rng)
            q = build_inner_precision(theta, (4, 5))
            v = rng.normal(size=q.dim)
            np.testing.assert_allclose(matvec(q, v), q.to_dense() @ v,
                                       atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            matvec(_identity(4), np.ones(5))


class TestGershgorin:
    def test_identity(self):
        assert gershgorin_upper(_identity(6)) == 1.0

    def test_interior_dominated_grid(self):
        rho = 0.3
        q = build_inner_precision(Theta(0, rho, 0, 0, rho), (10, 10))
        assert gershgorin_upper(q) == pytest.approx(1 + 4 * rho, abs=1e-15)

    def test_upper_bounds_dense_lambda_max(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            theta = rand_theta(rng)
            q = build_inner_precision(theta, (4, 4))
            assert gershgorin_upper(q) >= np.linalg.eigvalsh(q.to_dense())[-1] - 1e-12


class TestLanczos:
    def test_identity_converges_immediately(self):
        res = lanczos_extreme(_identity(50), which="smallest")
        assert res.value == pytest.approx(1.0, abs=1e-14)
        assert res.iterations <= 2
        assert res.residual <= 1e-9

    def test_matches_dense_min(self):
        rng = np.random.default_rng(4)
        cfg = LanczosConfig(conv_tol=1e-10)
        for _ in range(50):
            theta = rand_theta(rng)
            q = build_inner_precision(theta, (6, 6))
            res = lanczos_extreme(q, cfg, which="smallest")
            dense = np.linalg.eigvalsh(q.to_dense())[0]
            assert res.value == pytest.approx(dense, abs=1e-8)
            assert res.residual <= cfg.conv_tol

    def test_matches_dense_max(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            theta = rand_theta(rng)
            q = build_inner_precision(theta, (5, 5))
            res = lanczos_extreme(q, which="largest")
            dense = np.linalg.eigvalsh(q.to_dense())[-1]
            assert res.value == pytest.approx(dense, abs=1e-8)

    def test_matches_closed_form_on_periodic_matrix(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            theta = rand_theta(rng)
            qt = build_bundle(theta, (12, 12)).q_tilde
            res = lanczos_extreme(qt, which="smallest")
            assert res.value == pytest.approx(
                min_eig_perturbed(theta, (12, 12)), abs=1e-8)

    def test_deterministic_given_seed(self):
        theta = Theta(0.3, 0.2, -0.1, 0.15, 0.25)
        q = build_inner_precision(theta, (8, 8))
        cfg = LanczosConfig(seed=12345)
        a = lanczos_extreme(q, cfg, which="smallest")
        b = lanczos_extreme(q, cfg, which="smallest")
        assert a.value == b.value
        assert a.iterations == b.iterations
        assert a.residual == b.residual

    def test_nonconvergence_carries_best_ritz(self):
        theta = Theta(0.24, 0.21, -0.13, 0.18, 0.2)
        q = build_inner_precision(theta, (10, 10))
        cfg = LanczosConfig(max_iter=3, conv_tol=1e-14)
        with pytest.raises(LanczosNonConvergence) as err:
            lanczos_extreme(q, cfg, which="smallest")
        assert err.value.iterations == 3
        assert np.isfinite(err.value.best_value)
        assert err.value.residual > 0

    def test_rayleigh_quotient_optimality(self):
        rng = np.random.default_rng(7)
        theta = Theta(0.2, 0.18, 0.05, -0.1, 0.22)
        q = build_inner_precision(theta, (7, 7))
        res = lanczos_extreme(q, which="smallest")
        base = res.vector @ matvec(q, res.vector)
        for _ in range(50):
            w = rng.normal(size=q.dim)
            w /= np.linalg.norm(w)
            assert w @ matvec(q, w) >= base - 1e-8

    def test_quadratic_perturbation_bound(self):
        # |<dQ u, u>| <= 8 K (n1+n2)/(n1 n2) for the converged minimiser of
        # the periodic matrix, K the largest perturbation entry
        rng = np.random.default_rng(8)
        for dims in [(6, 6), (8, 10), (12, 12)]:
            for _ in range(10):
                theta = rand_theta(rng)
                bundle = build_bundle(theta, dims)
                if bundle.delta_q.nnz_stored == 0:
                    continue
                u = lanczos_extreme(bundle.q_tilde, which="smallest").vector
                quad = abs(u @ matvec(bundle.delta_q, u))
                k_const = float(np.abs(bundle.delta_q.vals).max())
                n1, n2 = bundle.dims.n1, bundle.dims.n2
                assert quad <= 8 * k_const * (n1 + n2) / (n1 * n2)

    def test_dim_one_rejected(self):
        with pytest.raises(ValueError):
            lanczos_extreme(_identity(1))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LanczosConfig(max_iter=0)
        with pytest.raises(ValueError):
            LanczosConfig(conv_tol=0.0)


class TestDenseSpectrum:
    def test_two_point_diagonal(self):
        m = SparseSymMatrix(2, [0, 1], [0, 1], [1.0, 0.5])
        np.testing.assert_allclose(dense_spectrum(m), [0.5, 1.0], atol=0)

    def test_tridiagonal_classical_modes(self):
        rho, n = 0.37, 9
        chain = SparseSymMatrix.from_scipy(
            build_toeplitz_block(rho, 1.0, rho, (n, 3))[:n, :n])
        expected = np.sort(1 + 2 * rho * np.cos(np.pi * np.arange(1, n + 1) / (n + 1)))
        np.testing.assert_allclose(dense_spectrum(chain), expected, atol=1e-12)

    def test_circulant_symbol(self):
        x, y, z = 0.3, 1.0, -0.2
        n = 11
        ring = build_circulant_block(x, y, z, (n, 3))[:n, :n]
        w = np.exp(-2j * np.pi * np.arange(n) / n)
        symbol = y + z * w + x * np.conj(w)
        got = dense_spectrum(ring)
        expected = symbol[np.lexsort((symbol.imag, symbol.real))]
        np.testing.assert_allclose(got, expected, atol=1e-10)

    def test_symmetric_ndarray_input(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(6, 6))
        a = a + a.T
        np.testing.assert_allclose(dense_spectrum(a), np.linalg.eigvalsh(a),
                                   atol=1e-12)

    def test_dim_cap(self):
        with pytest.raises(ValueError):
            dense_spectrum(np.eye(3), dim_cap=2)
        with pytest.raises(ValueError):
            dense_spectrum(_identity(3), dim_cap=2)
