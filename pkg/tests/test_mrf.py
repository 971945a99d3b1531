"""Filter-bank prior: convolutions, adjoints, gradient, Lipschitz bound."""

import numpy as np
import pytest

from ipiano import (LazyBacktrackingStep, StopCriterion, grad_check,
                    lyapunov_certificate, solve)
from ipiano.problems import (ConvBank, GaussianNoise, MRFModel, add_noise,
                             dct_filter_bank, default_mrf_model, mrf_f_grad,
                             mrf_lipschitz_bound, mrf_objective,
                             synthetic_image)


def small_model(size=16, num_filters=8, data_term="l2", lam=0.05, seed=0):
    rng = np.random.default_rng(seed)
    u0 = rng.uniform(0, 255, size=size * size)
    return default_mrf_model(u0, (size, size), data_term=data_term, lam=lam,
                             num_filters=num_filters)


class TestFilterBank:
    def test_count_and_zero_mean(self):
        bank = dct_filter_bank(7)
        assert bank.shape == (48, 7, 7)
        np.testing.assert_allclose(bank.sum(axis=(1, 2)), 0.0, atol=1e-12)

    def test_orthonormal(self):
        bank = dct_filter_bank(5)
        flat = bank.reshape(len(bank), -1)
        gram = flat @ flat.T
        np.testing.assert_allclose(gram, np.eye(len(bank)), atol=1e-12)


class TestConvBank:
    def test_adjoint_identity(self):
        rng = np.random.default_rng(1)
        bank = ConvBank(dct_filter_bank(7)[:8], (16, 16))
        for _ in range(5):
            u = rng.normal(size=256)
            v = rng.normal(size=(8, 256))
            lhs = float(np.sum(bank.forward(u) * v))
            rhs = float(u @ bank.adjoint(v))
            assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))

    def test_impulse_kernel_is_identity(self):
        k = np.zeros((1, 3, 3))
        k[0, 1, 1] = 1.0
        bank = ConvBank(k, (8, 8))
        u = np.arange(64, dtype=float)
        np.testing.assert_allclose(bank.forward(u)[0], u)

    def test_kernel_larger_than_image_rejected(self):
        with pytest.raises(ValueError):
            ConvBank(dct_filter_bank(7), (4, 4))

    def test_single_matches_forward(self):
        bank = ConvBank(dct_filter_bank(5)[:4], (10, 10))
        u = np.random.default_rng(2).normal(size=100)
        full = bank.forward(u)
        for i in range(4):
            np.testing.assert_allclose(bank.single(i, u), full[i])


class TestGradient:
    def test_impulse_filter_pointwise_gradient(self):
        k = np.zeros((1, 3, 3))
        k[0, 1, 1] = 1.0
        u0 = np.zeros(64)
        model = MRFModel(filters=k, weights=np.ones(1), lam=0.1, u0=u0,
                         data_term="l2", image_shape=(8, 8))
        u = np.random.default_rng(3).normal(size=64)
        _, grad = mrf_f_grad(u, model)
        np.testing.assert_allclose(grad, 2.0 * u / (1.0 + u * u), atol=1e-12)

    def test_zero_image(self):
        model = small_model()
        v, g = mrf_f_grad(np.zeros(256), model)
        assert v == 0.0
        np.testing.assert_allclose(g, 0.0, atol=1e-14)

    def test_nonnegative_value(self):
        model = small_model(seed=4)
        u = np.random.default_rng(5).normal(scale=50, size=256)
        v, _ = mrf_f_grad(u, model)
        assert v >= 0.0

    def test_against_finite_differences(self):
        model = small_model(seed=6)
        obj = mrf_objective(model)
        u = np.random.default_rng(7).uniform(0, 255, size=256)
        err = grad_check(lambda x: mrf_f_grad(x, model)[0],
                         lambda x: mrf_f_grad(x, model)[1], u, h=1e-4)
        assert err <= 1e-6
        assert obj.value(u) >= 0.0


class TestLipschitzBound:
    def test_identity_kernel_bound(self):
        k = np.zeros((1, 3, 3))
        k[0, 1, 1] = 1.0
        model = MRFModel(filters=k, weights=np.ones(1), lam=0.1,
                         u0=np.zeros(64), data_term="l2", image_shape=(8, 8))
        assert mrf_lipschitz_bound(model) == pytest.approx(2.0, rel=1e-6)

    def test_scaling_linearity(self):
        kernels = dct_filter_bank(5)[:4]
        base = MRFModel(filters=kernels, weights=np.ones(4), lam=0.1,
                        u0=np.zeros(100), data_term="l2", image_shape=(10, 10))
        scaled = MRFModel(filters=kernels, weights=np.full(4, 3.0), lam=0.1,
                          u0=np.zeros(100), data_term="l2",
                          image_shape=(10, 10), bank=base.bank)
        assert mrf_lipschitz_bound(scaled) == pytest.approx(
            3.0 * mrf_lipschitz_bound(base), rel=1e-9)

    def test_default_model_calibration(self):
        model = small_model()
        assert mrf_lipschitz_bound(model) == pytest.approx(100.0, rel=1e-6)

    def test_bound_dominates_backtracked_constants(self):
        # the a priori bound must exceed every accepted local constant
        for seed in range(5):
            clean = synthetic_image(16)
            noisy = add_noise(clean, GaussianNoise(25.0), seed)
            model = default_mrf_model(noisy.ravel(), (16, 16), data_term="l2",
                                      lam=0.05, num_filters=8)
            bound = mrf_lipschitz_bound(model)
            obj = mrf_objective(model)
            _, trace = solve(obj, LazyBacktrackingStep(beta=0.8, L_init=1.0),
                             noisy.ravel(), StopCriterion(max_iters=40))
            assert max(rec.lipschitz for rec in trace) <= bound


class TestDenoisingRuns:
    def test_lyapunov_holds_both_data_terms(self):
        clean = synthetic_image(16)
        noisy = add_noise(clean, GaussianNoise(25.0), 0)
        for data_term, lam, x0 in (("l2", 0.05, noisy.ravel()),
                                   ("l1", 1.0, np.zeros(256))):
            model = default_mrf_model(noisy.ravel(), (16, 16),
                                      data_term=data_term, lam=lam,
                                      num_filters=8)
            obj = mrf_objective(model)
            _, trace = solve(obj, LazyBacktrackingStep(beta=0.8, L_init=1.0),
                             x0, StopCriterion(max_iters=100))
            assert lyapunov_certificate(trace).satisfied

    def test_invalid_data_term_rejected(self):
        with pytest.raises(ValueError):
            MRFModel(filters=dct_filter_bank(3)[:2], weights=np.ones(2),
                     lam=0.1, u0=np.zeros(64), data_term="huber",
                     image_shape=(8, 8))
