import json

import numpy as np
import numpy.testing as npt
import pytest

import fredreg as fr


class TestSignalSpec:
    def test_named_signals(self, grid513):
        for name in ("f1", "f2", "f3", "f4"):
            vals = fr.evaluate_signal(fr.SignalSpec.named(name), grid513)
            assert np.all(np.isfinite(vals))

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            fr.SignalSpec.named("f9")

    def test_sine_combination_matches_f2(self, grid513):
        spec = fr.SignalSpec.sines([(5, 3), (10, 7), (15, 13)])
        npt.assert_allclose(
            fr.evaluate_signal(spec, grid513),
            fr.evaluate_signal(fr.SignalSpec.named("f2"), grid513),
            atol=1e-14,
        )

    def test_duplicate_indices_rejected(self):
        with pytest.raises(ValueError):
            fr.SignalSpec.sines([(1.0, 3), (2.0, 3)])

    def test_support(self):
        assert fr.SignalSpec.named("f2").support() == (3, 7, 13)
        assert fr.SignalSpec.named("f1").support() is None
        assert fr.SignalSpec.sines([(2.0, 9), (1.0, 4)]).support() == (4, 9)

    def test_json_roundtrip(self):
        spec = fr.SignalSpec.sines([(5, 3), (10, 7)])
        back = fr.SignalSpec.from_json_dict(json.loads(json.dumps(spec.to_json_dict())))
        assert back == spec


class TestForwardApply:
    def test_eigenfunction_maps_to_scaled_self(self, es64, grid513):
        psi1 = es64.eigenfunction(1, grid513.points)
        g = fr.forward_apply(psi1, es64, grid513)
        npt.assert_allclose(g, es64.eigenvalue(1) * psi1, atol=1e-12)
        mid = g[grid513.size // 2]
        assert mid == pytest.approx(np.sqrt(2) / np.pi**2, abs=1e-12)

    def test_zero_maps_to_zero(self, es64, grid513):
        g = fr.forward_apply(np.zeros(grid513.size), es64, grid513)
        assert not g.any()

    def test_f2_coefficient_13_closed_form(self, es64, grid513):
        f = fr.evaluate_signal(fr.SignalSpec.named("f2"), grid513)
        g_k = fr.forward_coeffs(f, es64, grid513)
        expected = (15 / np.sqrt(2)) / (169 * np.pi**2)
        assert g_k[12] == pytest.approx(expected, abs=1e-10)

    def test_f2_against_direct_kernel_quadrature(self, es64):
        # independent route: apply the tabulated kernel row-by-row; the kernel
        # slope jump across the diagonal costs ~h^2 * amplitude, so the 1e-6
        # comparison needs a fine grid for a signal of amplitude ~30
        grid = fr.simpson_grid(4097)
        f = fr.evaluate_signal(fr.SignalSpec.named("f2"), grid)
        direct = fr.apply_kernel(fr.sample_kernel_matrix(grid), f)
        spectral = fr.forward_apply(f, es64, grid)
        assert grid.norm(direct - spectral) < 1e-6
        g13 = fr.project(direct, es64, 13, grid)
        assert g13 == pytest.approx((15 / np.sqrt(2)) / (169 * np.pi**2), abs=1e-6)


class TestAddNoise:
    def test_noiseless_limit(self, es64, grid513):
        f = fr.evaluate_signal(fr.SignalSpec.named("f1"), grid513)
        g = fr.forward_apply(f, es64, grid513)
        ds = fr.add_noise(g, 0.0, seed=3, es=es64, grid=grid513, n_coeff=40)
        npt.assert_allclose(ds.g_bar, g, atol=0)
        npt.assert_allclose(ds.coeffs, fr.forward_coeffs(f, es64, grid513, 40), atol=1e-15)

    def test_same_seed_identical(self, es64, grid513):
        g = fr.forward_apply(fr.evaluate_signal(fr.SignalSpec.named("f1"), grid513), es64, grid513)
        a = fr.add_noise(g, 1e-4, seed=11, es=es64, grid=grid513, n_coeff=40)
        b = fr.add_noise(g, 1e-4, seed=11, es=es64, grid=grid513, n_coeff=40)
        npt.assert_array_equal(a.coeffs, b.coeffs)
        npt.assert_array_equal(a.g_bar, b.g_bar)
        c = fr.add_noise(g, 1e-4, seed=12, es=es64, grid=grid513, n_coeff=40)
        assert np.any(c.coeffs != a.coeffs)

    def test_pointwise_sup_bound_and_variance(self, es64, grid513):
        eps = 1e-4
        g = fr.forward_apply(fr.evaluate_signal(fr.SignalSpec.named("f1"), grid513), es64, grid513)
        ds = fr.add_noise(g, eps, seed=5, es=es64, grid=grid513, n_coeff=40, noise_mode="pointwise")
        noise = ds.g_bar - g
        assert np.max(np.abs(noise)) <= eps
        # uniform moments: variance within 20% of eps^2/3 at 513 samples
        assert np.var(noise) == pytest.approx(eps**2 / 3, rel=0.2)

    def test_coefficient_mode_bound(self, es512, grid513):
        eps = 3e-3
        ds, _, g_coeffs = fr.synthesize_dataset(
            fr.SignalSpec.named("f2"), es512, grid513, eps, 7, 512
        )
        assert np.max(np.abs(ds.coeffs - g_coeffs)) <= eps

    def test_coefficient_noise_bound_sqrt2(self, es512, grid513):
        # both injection modes satisfy |gbar_k - g_k| <= sqrt(2) eps
        eps = 1e-3
        f = fr.evaluate_signal(fr.SignalSpec.named("f4"), grid513)
        g = fr.forward_apply(f, es512, grid513)
        g_k = fr.forward_coeffs(f, es512, grid513, 256)
        for mode in ("coefficient", "pointwise"):
            ds = fr.add_noise(g, eps, seed=2, es=es512, grid=grid513, n_coeff=256, noise_mode=mode)
            assert np.max(np.abs(ds.coeffs - g_k)) <= np.sqrt(2) * eps

    def test_grid_consistency_coefficient_mode(self, es512, grid513):
        # re-projecting the noisy grid function reproduces the stored coefficients
        ds, _, _ = fr.synthesize_dataset(fr.SignalSpec.named("f1"), es512, grid513, 1e-4, 9, 40)
        reproj = fr.project_all(ds.g_bar, es512, grid513, 40)
        npt.assert_allclose(reproj, ds.coeffs, atol=1e-12)

    def test_unknown_mode(self, es64, grid513):
        with pytest.raises(ValueError):
            fr.add_noise(np.zeros(513), 1e-4, 0, es=es64, grid=grid513, noise_mode="spectral")


class TestSnr:
    def test_unit_ratio_is_zero_db(self):
        eps = 0.3
        g = np.full(100, eps / np.sqrt(3.0))
        assert fr.snr_db(g, eps) == pytest.approx(0.0, abs=1e-12)

    def test_example1_legend(self, es512, grid513):
        f = fr.evaluate_signal(fr.SignalSpec.named("f1"), grid513)
        g_k = fr.forward_coeffs(f, es512, grid513, 512)
        assert fr.snr_db(g_k, 1e-4) == pytest.approx(25.7, abs=1.0)

    def test_example2_legend(self, es512, grid513):
        f = fr.evaluate_signal(fr.SignalSpec.named("f2"), grid513)
        g_k = fr.forward_coeffs(f, es512, grid513, 512)
        assert fr.snr_db(g_k, 3e-3) == pytest.approx(0.54, abs=1.0)

    def test_monotone_in_power_and_eps(self):
        g = np.ones(32)
        assert fr.snr_db(2 * g, 0.1) > fr.snr_db(g, 0.1)
        assert fr.snr_db(g, 0.05) > fr.snr_db(g, 0.1)

    def test_zero_eps_rejected(self):
        with pytest.raises(ValueError):
            fr.snr_db(np.ones(4), 0.0)


class TestNoiseDispersion:
    def test_values(self):
        assert fr.noise_dispersion(0.0) == 0.0
        assert fr.noise_dispersion(1e-4) == pytest.approx(5.7735e-5, rel=1e-4)
        assert fr.noise_dispersion(3e-3) == pytest.approx(1.7321e-3, rel=1e-4)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            fr.noise_dispersion(-1.0)


class TestSerialization:
    def test_dataset_json_roundtrip(self, es64, grid513):
        ds, _, _ = fr.synthesize_dataset(fr.SignalSpec.named("f1"), es64, grid513, 1e-4, 21, 40)
        back = fr.dataset_from_json(fr.dataset_to_json(ds))
        npt.assert_array_equal(back.coeffs, ds.coeffs)
        npt.assert_array_equal(back.g_bar, ds.g_bar)
        assert back.seed == ds.seed and back.epsilon == ds.epsilon

    def test_coeffs_csv_roundtrip(self, tmp_path):
        coeffs = np.array([1.5, -2.25, 3.125e-7])
        path = tmp_path / "c.csv"
        fr.write_coeffs_csv(str(path), coeffs)
        assert path.read_text().splitlines()[0] == "k,g_bar_k"
        npt.assert_array_equal(fr.read_coeffs_csv(str(path)), coeffs)
