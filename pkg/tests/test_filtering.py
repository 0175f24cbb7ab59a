"""Weight functions, pre-smoothing, the evolution step, and the full pipeline."""

import math

import numpy as np
import pytest

from nfpr.filtering import NfprParams, denoise, evolve_step, g_weight, h_weight, presmooth
from nfpr.image import gaussian_smooth
from nfpr.reorder import build_sets, disc_stencil
from oracles import naive_build_sets, naive_evolve, naive_g, naive_h, naive_presmooth
from synthetic import rand_image, structured_scene


class TestNfprParams:
    def test_defaults_match_the_fixed_protocol(self):
        p = NfprParams(sigma=170.0, lam=2.5, k_max=35)
        assert (p.rho_search, p.rho_sim) == (10, 10)
        assert p.sigma_g == 2.5
        assert p.tau == 0.95
        assert p.n_set == 35
        assert p.reorder_iters == 2

    @pytest.mark.parametrize("kwargs", [
        dict(sigma=0.0, lam=1.0, k_max=1),
        dict(sigma=-1.0, lam=1.0, k_max=1),
        dict(sigma=1.0, lam=0.0, k_max=1),
        dict(sigma=1.0, lam=1.0, k_max=0),
        dict(sigma=1.0, lam=1.0, k_max=1, tau=0.0),
        dict(sigma=1.0, lam=1.0, k_max=1, tau=1.5),
        dict(sigma=1.0, lam=1.0, k_max=1, n_set=0),
        dict(sigma=1.0, lam=1.0, k_max=1, rho_search=-1),
        dict(sigma=1.0, lam=1.0, k_max=1, reorder_iters=0),
    ])
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            NfprParams(**kwargs)

    def test_tau_of_exactly_one_is_allowed(self):
        assert NfprParams(sigma=1.0, lam=1.0, k_max=1, tau=1.0).tau == 1.0


class TestGWeight:
    def test_zero_returns_exactly_one(self):
        assert g_weight(0.0, 7.0) == 1.0

    def test_value_at_lambda(self):
        expected = 1.0 - math.exp(-3.31488)
        assert g_weight(12.5, 12.5) == pytest.approx(expected, abs=1e-12)

    def test_value_at_three_lambda(self):
        assert g_weight(30.0, 10.0) == pytest.approx(1.0 - math.exp(-3.31488 / 6561.0),
                                                     abs=1e-12)
        assert g_weight(30.0, 10.0) == pytest.approx(5.052e-4, abs=1e-6)

    def test_even_in_s(self):
        s = np.linspace(-900, 900, 1201)
        np.testing.assert_array_equal(g_weight(s, 17.5), g_weight(-s, 17.5))

    @pytest.mark.parametrize("lam", [10.5, 17.5, 23.5, 36.5])
    def test_monotone_decreasing_and_bounded(self, lam):
        s = np.linspace(0.0, 1000.0, 20001)
        g = g_weight(s, lam)
        assert np.all(np.diff(g) <= 0)
        assert np.all((g >= 0.0) & (g <= 1.0))

    def test_matches_reference_formula_on_grid(self):
        s = np.linspace(-50, 50, 501)
        expected = [naive_g(float(v), 12.0) for v in s]
        np.testing.assert_allclose(g_weight(s, 12.0), expected, atol=1e-12)


class TestHWeight:
    def test_zero_distance_weight_one(self):
        assert h_weight(0.0, 170.0) == 1.0

    def test_value_at_sigma(self):
        assert h_weight(170.0, 170.0) == pytest.approx(math.exp(-0.5), abs=1e-12)

    def test_fig2_scale_value(self):
        assert h_weight(255.0, 170.0) == pytest.approx(0.32465, abs=1e-5)

    def test_monotone_decreasing_positive(self):
        s = np.linspace(0.0, 255.0, 4096)
        h = h_weight(s, 140.0)
        assert np.all(np.diff(h) < 0)
        assert np.all((h > 0.0) & (h <= 1.0))


def _oracle_chain(u, search_r, sim_r, n, sigma, lam, tau):
    fwd, rev = naive_build_sets(u.tolist(), search_r, sim_r, n)
    flat = [float(v) for v in u.ravel()]
    us = naive_presmooth(flat, fwd, rev, sigma)
    nxt = naive_evolve(flat, us, fwd, rev, sigma, lam, tau)
    return (np.array(us).reshape(u.shape), np.array(nxt).reshape(u.shape))


class TestPresmooth:
    def test_constant_image_unchanged(self):
        u = np.full((6, 6), 33.0)
        params = NfprParams(sigma=100.0, lam=5.0, k_max=1, rho_search=2, rho_sim=1, n_set=4)
        sets = build_sets(u, disc_stencil(2), disc_stencil(1), 4)
        np.testing.assert_allclose(presmooth(u, sets, params), u, atol=1e-12)

    def test_single_pixel_image(self):
        u = np.array([[123.0]])
        params = NfprParams(sigma=50.0, lam=5.0, k_max=1, rho_search=1, rho_sim=1, n_set=1)
        sets = build_sets(u, disc_stencil(1), disc_stencil(1), 1)
        np.testing.assert_array_equal(presmooth(u, sets, params), u)

    def test_output_inside_input_range(self):
        rng = np.random.default_rng(52)
        u = rand_image(rng, 9, 9)
        params = NfprParams(sigma=80.0, lam=8.0, k_max=1, rho_search=3, rho_sim=1, n_set=5)
        sets = build_sets(u, disc_stencil(3), disc_stencil(1), 5)
        out = presmooth(u, sets, params)
        assert out.min() >= u.min() and out.max() <= u.max()

    def test_matches_straight_line_oracle(self):
        rng = np.random.default_rng(60)
        for trial in range(8):
            u = rand_image(rng, 5, 5, integral=trial % 2 == 0)
            sigma = float(rng.uniform(40, 220))
            params = NfprParams(sigma=sigma, lam=9.0, k_max=1,
                                rho_search=2, rho_sim=1, n_set=3)
            sets = build_sets(u, disc_stencil(2), disc_stencil(1), 3)
            expected, _ = _oracle_chain(u, 2, 1, 3, sigma, 9.0, 0.95)
            np.testing.assert_allclose(presmooth(u, sets, params), expected, atol=1e-9)


class TestEvolveStep:
    def test_constant_image_is_steady_state(self):
        u = np.full((7, 7), 88.0)
        params = NfprParams(sigma=120.0, lam=4.0, k_max=1, rho_search=2, rho_sim=1, n_set=4)
        sets = build_sets(u, disc_stencil(2), disc_stencil(1), 4)
        out = evolve_step(u, presmooth(u, sets, params), sets, params)
        np.testing.assert_array_equal(out, u)

    def test_max_min_on_random_images(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            u = rand_image(rng, 8, 8)
            params = NfprParams(sigma=float(rng.uniform(30, 250)),
                                lam=float(rng.uniform(2, 40)),
                                k_max=1, rho_search=2, rho_sim=1,
                                n_set=int(rng.integers(1, 8)),
                                tau=float(rng.uniform(0.1, 1.0)))
            sets = build_sets(u, disc_stencil(2), disc_stencil(1), params.n_set)
            out = evolve_step(u, presmooth(u, sets, params), sets, params)
            assert out.min() >= u.min()
            assert out.max() <= u.max()

    def test_matches_straight_line_oracle(self):
        rng = np.random.default_rng(83)
        for trial in range(8):
            u = rand_image(rng, 5, 5, integral=trial % 2 == 1)
            sigma = float(rng.uniform(40, 220))
            lam = float(rng.uniform(2, 30))
            tau = float(rng.uniform(0.2, 1.0))
            params = NfprParams(sigma=sigma, lam=lam, k_max=1, tau=tau,
                                rho_search=2, rho_sim=1, n_set=3)
            sets = build_sets(u, disc_stencil(2), disc_stencil(1), 3)
            us = presmooth(u, sets, params)
            _, expected = _oracle_chain(u, 2, 1, 3, sigma, lam, tau)
            np.testing.assert_allclose(evolve_step(u, us, sets, params), expected,
                                       atol=1e-9)


class TestDenoise:
    def test_constant_image_fixed_point(self):
        u = np.full((10, 10), 64.0)
        params = NfprParams(sigma=170.0, lam=2.5, k_max=5, rho_search=2, rho_sim=1, n_set=5)
        np.testing.assert_array_equal(denoise(u, params), u)

    def test_pure_function_of_inputs(self):
        noisy = rand_image(np.random.default_rng(14), 12, 12)
        params = NfprParams(sigma=150.0, lam=12.0, k_max=3, rho_search=2, rho_sim=1, n_set=5)
        np.testing.assert_array_equal(denoise(noisy, params), denoise(noisy, params))

    def test_callback_sees_every_iteration(self):
        noisy = rand_image(np.random.default_rng(15), 8, 8)
        params = NfprParams(sigma=150.0, lam=12.0, k_max=4, rho_search=2, rho_sim=1, n_set=4)
        seen = []
        denoise(noisy, params, callback=lambda k, u: seen.append((k, u.copy())))
        assert [k for k, _ in seen] == [0, 1, 2, 3]

    def test_driver_composition_matches_manual_pipeline(self):
        """k_max=2 with two reorderings == the hand-rolled call sequence."""
        noisy = rand_image(np.random.default_rng(16), 9, 9)
        params = NfprParams(sigma=140.0, lam=10.0, k_max=2, rho_search=2, rho_sim=1,
                            n_set=5, reorder_iters=2)
        search, sim = disc_stencil(2), disc_stencil(1)

        sets0 = build_sets(gaussian_smooth(noisy, params.sigma_g), search, sim, 5)
        u1 = evolve_step(noisy, presmooth(noisy, sets0, params), sets0, params)
        sets1 = build_sets(u1, search, sim, 5)
        u2 = evolve_step(u1, presmooth(u1, sets1, params), sets1, params)

        np.testing.assert_array_equal(denoise(noisy, params), u2)

    def test_reordering_schedule_matters(self):
        rng = np.random.default_rng(17)
        noisy = structured_scene(16) + rng.normal(0, 25, size=(16, 16))
        base = dict(sigma=150.0, lam=12.0, k_max=4, rho_search=2, rho_sim=1, n_set=5)
        once = denoise(noisy, NfprParams(reorder_iters=1, **base))
        twice = denoise(noisy, NfprParams(reorder_iters=2, **base))
        assert np.any(once != twice)

    def test_max_min_holds_across_the_whole_run(self):
        rng = np.random.default_rng(18)
        noisy = rand_image(rng, 10, 10)
        params = NfprParams(sigma=170.0, lam=8.0, k_max=6, rho_search=2, rho_sim=1, n_set=6)
        prev = [noisy]

        def check(_k, u):
            assert u.min() >= prev[0].min()
            assert u.max() <= prev[0].max()
            prev[0] = u.copy()

        denoise(noisy, params, callback=check)
