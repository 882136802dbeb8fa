import numpy as np
import numpy.testing as npt
import pytest

import fredreg as fr
from fredreg import EigenDecompositionError


class TestSampleKernel:
    def test_diagonal(self):
        assert fr.sample_kernel_eval(0.5, 0.5) == pytest.approx(0.25)

    def test_upper_branch(self):
        assert fr.sample_kernel_eval(0.25, 0.75) == pytest.approx(0.0625)

    def test_boundary_zero(self):
        for x in (0.0, 0.3, 1.0):
            assert fr.sample_kernel_eval(x, 0.0) == 0.0

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        for x, y in rng.uniform(0, 1, size=(50, 2)):
            assert fr.sample_kernel_eval(x, y) == pytest.approx(fr.sample_kernel_eval(y, x))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            fr.sample_kernel_eval(1.5, 0.5)
        with pytest.raises(ValueError):
            fr.sample_kernel_eval(0.5, -0.1)


class TestQuadratureGrid:
    def test_weights_sum(self, grid513):
        assert abs(grid513.weights.sum() - 1.0) <= 1e-12

    def test_needs_odd_size(self):
        with pytest.raises(ValueError):
            fr.simpson_grid(512)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            fr.simpson_grid(1)

    def test_polynomial_exactness(self):
        # Simpson integrates cubics exactly
        g = fr.simpson_grid(65)
        x = g.points
        assert np.sum(g.weights * x**3) == pytest.approx(0.25, abs=1e-14)

    def test_rejects_decreasing_points(self):
        with pytest.raises(ValueError):
            fr.QuadratureGrid(points=np.array([0.0, 0.5, 0.4]), weights=np.full(3, 1 / 3), a=0, b=1)


class TestAnalyticEigensystem:
    def test_first_eigenvalue(self, es64):
        assert es64.eigenvalue(1) == pytest.approx(1.0 / np.pi**2, rel=1e-14)

    def test_eigenvalue_13(self, es64):
        assert es64.eigenvalue(13) == pytest.approx(1.0 / (169 * np.pi**2), rel=1e-14)

    def test_eigenfunction_midpoint(self, es64):
        assert es64.eigenfunction(1, np.array([0.5]))[0] == pytest.approx(np.sqrt(2.0))

    def test_orthonormality_upto_40(self, es512, grid513):
        basis = es512.basis_matrix(grid513.points, 40)
        gram = (basis * grid513.weights) @ basis.T
        npt.assert_allclose(gram, np.eye(40), atol=1e-8)

    def test_index_errors(self, es64):
        with pytest.raises(IndexError):
            es64.eigenvalue(65)
        with pytest.raises(IndexError):
            es64.eigenfunction(0, np.array([0.5]))

    def test_rejects_nonpositive_count(self):
        with pytest.raises(ValueError):
            fr.analytic_eigensystem(0)


class TestProjectReconstruct:
    def test_orthonormality_projection(self, es64, grid513):
        psi2 = es64.eigenfunction(2, grid513.points)
        assert fr.project(psi2, es64, 2, grid513) == pytest.approx(1.0, abs=1e-8)
        assert fr.project(psi2, es64, 5, grid513) == pytest.approx(0.0, abs=1e-8)

    def test_parabola_against_closed_form(self, es64, grid513):
        # int_0^1 x(1-x) sqrt(2) sin(pi x) dx = 4 sqrt(2) / pi^3
        f = grid513.points * (1 - grid513.points)
        expected = 4.0 * np.sqrt(2.0) / np.pi**3
        assert fr.project(f, es64, 1, grid513) == pytest.approx(expected, abs=1e-8)

    def test_single_basis_function(self, es64, grid513):
        out = fr.reconstruct([(1, 1.0)], es64, grid513)
        npt.assert_allclose(out, np.sqrt(2) * np.sin(np.pi * grid513.points), atol=1e-14)

    def test_empty_expansion_is_zero(self, es64, grid513):
        assert not fr.reconstruct([], es64, grid513).any()

    def test_project_reconstruct_roundtrip(self, es64, grid513):
        f = es64.eigenfunction(1, grid513.points) + 0.5 * es64.eigenfunction(4, grid513.points)
        coeffs = [(k, fr.project(f, es64, k, grid513)) for k in range(1, 9)]
        back = fr.reconstruct(coeffs, es64, grid513)
        assert grid513.norm(back - f) < 1e-8

    def test_parseval(self, es64, grid513):
        rng = np.random.default_rng(7)
        amps = rng.normal(size=8)
        f = amps @ es64.basis_matrix(grid513.points, 8)
        coeffs = fr.project_all(f, es64, grid513, 8)
        assert np.sum(coeffs**2) == pytest.approx(grid513.norm(f) ** 2, abs=1e-8)

    def test_out_of_range_reconstruct(self, es64, grid513):
        with pytest.raises(IndexError):
            fr.reconstruct([(65, 1.0)], es64, grid513)


class TestTabulatedKernel:
    def test_operator_consistency(self, es64, grid513):
        kern = fr.sample_kernel_matrix(grid513)
        for k in (1, 5, 11, 20):
            psi = es64.eigenfunction(k, grid513.points)
            applied = fr.apply_kernel(kern, psi)
            assert grid513.norm(applied - es64.eigenvalue(k) * psi) < 1e-6

    def test_asymmetry_rejected(self, grid513):
        vals = fr.sample_kernel_matrix(grid513).values.copy()
        vals[3, 5] += 1e-6
        with pytest.raises(ValueError):
            fr.TabulatedKernel(values=vals, grid=grid513)


class TestNumericEigensystem:
    def test_first_eigenvalue_401(self):
        grid = fr.simpson_grid(401)
        nes = fr.numeric_eigensystem(fr.sample_kernel_matrix(grid), 8)
        assert abs(nes.eigenvalue(1) - 1.0 / np.pi**2) < 1e-6

    def test_eigenfunction_3_sign_fixed(self):
        grid = fr.simpson_grid(1025)
        nes = fr.numeric_eigensystem(fr.sample_kernel_matrix(grid), 5)
        truth = np.sqrt(2) * np.sin(3 * np.pi * grid.points)
        assert grid.norm(nes.eigenfunction(3, grid.points) - truth) < 1e-5

    def test_eigenvalues_relative_error_k10(self):
        # the kernel slope jump across the diagonal biases Nystrom eigenvalues
        # by ~h^2/9, so the 1e-5 relative target needs a fine grid
        grid = fr.simpson_grid(4097)
        nes = fr.numeric_eigensystem(fr.sample_kernel_matrix(grid), 10)
        ks = np.arange(1, 11)
        rel = np.abs(nes.eigenvalues - 1.0 / (ks * np.pi) ** 2) * (ks * np.pi) ** 2
        assert rel.max() < 1e-5

    def test_rank_deficiency_flagged(self, grid513):
        psi1 = np.sqrt(2) * np.sin(np.pi * grid513.points)
        vals = np.outer(psi1, psi1)  # rank one
        kern = fr.TabulatedKernel(values=vals, grid=grid513)
        with pytest.raises(EigenDecompositionError):
            fr.numeric_eigensystem(kern, 2)

    def test_repeated_eigenvalue_flagged(self, grid513):
        psi1 = np.sqrt(2) * np.sin(np.pi * grid513.points)
        psi2 = np.sqrt(2) * np.sin(2 * np.pi * grid513.points)
        vals = np.outer(psi1, psi1) + np.outer(psi2, psi2)  # eigenvalues 1, 1
        kern = fr.TabulatedKernel(values=vals, grid=grid513)
        with pytest.raises(EigenDecompositionError):
            fr.numeric_eigensystem(kern, 2)

    def test_matches_analytic_at_513(self, grid513):
        nes = fr.numeric_eigensystem(fr.sample_kernel_matrix(grid513), 3)
        assert nes.eigenvalue(1) == pytest.approx(1 / np.pi**2, rel=1e-4)
        assert nes.kind == "numeric-tabulated"


class TestKernelCsv:
    def test_triplet_roundtrip(self, tmp_path):
        grid = fr.simpson_grid(65)
        kern = fr.sample_kernel_matrix(grid)
        path = tmp_path / "kernel.csv"
        with open(path, "w") as fh:
            fh.write("x,y,value\n")
            for i, x in enumerate(grid.points.tolist()):
                for j, y in enumerate(grid.points.tolist()):
                    fh.write(f"{x!r},{y!r},{kern.values[i, j].item()!r}\n")
        loaded = fr.load_kernel_csv(str(path))
        npt.assert_allclose(loaded.values, kern.values, atol=1e-15)

    def test_dense_needs_grid(self, tmp_path):
        path = tmp_path / "dense.csv"
        grid = fr.simpson_grid(65)
        kern = fr.sample_kernel_matrix(grid)
        with open(path, "w") as fh:
            for row in kern.values:
                fh.write(",".join(repr(v) for v in row.tolist()) + "\n")
        with pytest.raises(ValueError):
            fr.load_kernel_csv(str(path))
        loaded = fr.load_kernel_csv(str(path), grid=grid)
        npt.assert_allclose(loaded.values, kern.values, atol=1e-15)
