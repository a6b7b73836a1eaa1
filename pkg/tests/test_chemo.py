"""Contracts of the screened-Poisson chemical solve."""

import math

import numpy as np
import pytest

from antfvm import EllipticOptions, SpatialField, build_grid, solve_chemical
from antfvm.chemo import residual
from antfvm.grid import lp_norm

from dense_oracles import dense_solve_chemical

ALL_METHODS = ("spectral", "direct", "iterative")


def _grid(nx, ny):
    return build_grid(nx, ny, 4, dt=0.1, t_final=1.0)


class TestSolveChemical:
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_constant_source(self, method):
        g = _grid(8, 8)
        m, alpha = 3.0, 2.0
        c = solve_chemical(
            SpatialField(g, np.full((8, 8), m)), alpha, EllipticOptions(method=method)
        )
        assert np.abs(c.values - m / alpha).max() < 1e-12

    def test_single_fourier_mode(self):
        g = _grid(8, 8)
        eps, alpha = 0.5, 1.0
        rho_vals = np.broadcast_to(
            (1 + eps * np.cos(2 * np.pi * g.x_centers))[:, None], (8, 8)
        ).copy()
        c = solve_chemical(SpatialField(g, rho_vals), alpha)
        mu = 2 * (1 - math.cos(2 * math.pi * g.dx)) / g.dx**2
        expected = 1 / alpha + eps * np.cos(2 * np.pi * g.x_centers) / (mu + alpha)
        assert np.abs(c.values - expected[:, None]).max() < 1e-13

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_matches_dense_oracle(self, method):
        g = _grid(6, 6)
        rng = np.random.default_rng(31)
        rho_vals = rng.random((6, 6))
        c = solve_chemical(SpatialField(g, rho_vals), 1.0, EllipticOptions(method=method))
        ref = dense_solve_chemical(rho_vals, g, 1.0)
        assert np.abs(c.values - ref).max() < 1e-10

    def test_invalid_alpha(self):
        g = _grid(4, 4)
        rho = SpatialField(g, np.ones((4, 4)))
        with pytest.raises(ValueError):
            solve_chemical(rho, 0.0)
        with pytest.raises(ValueError):
            solve_chemical(rho, -1.0)

    def test_degenerate_y_direction(self):
        g = _grid(8, 1)
        rho_vals = (1 + 0.5 * np.cos(2 * np.pi * g.x_centers))[:, None]
        c = solve_chemical(SpatialField(g, rho_vals.copy()), 1.0)
        res = residual(c, SpatialField(g, rho_vals.copy()), 1.0)
        assert np.abs(res.values).max() < 1e-10


class TestEllipticProperties:
    def test_linearity(self):
        g = _grid(8, 8)
        rng = np.random.default_rng(32)
        r1, r2 = rng.random((8, 8)), rng.random((8, 8))
        a, b = 2.0, -0.7
        tol = EllipticOptions().rel_residual_tol
        c1 = solve_chemical(SpatialField(g, r1), 1.5)
        c2 = solve_chemical(SpatialField(g, r2), 1.5)
        c12 = solve_chemical(SpatialField(g, a * r1 + b * r2), 1.5)
        assert np.abs(c12.values - (a * c1.values + b * c2.values)).max() <= 10 * tol

    def test_translation_equivariance(self):
        g = _grid(8, 8)
        rng = np.random.default_rng(33)
        rho_vals = rng.random((8, 8))
        c = solve_chemical(SpatialField(g, rho_vals), 1.0)
        shift = (3, 5)
        c_shifted = solve_chemical(SpatialField(g, np.roll(rho_vals, shift, (0, 1))), 1.0)
        assert np.abs(c_shifted.values - np.roll(c.values, shift, (0, 1))).max() < 1e-12

    def test_nonnegativity_and_mean_identity(self):
        g = _grid(16, 16)
        rng = np.random.default_rng(34)
        alpha = 1.0
        for _ in range(100):
            rho_vals = rng.random((16, 16))
            rho = SpatialField(g, rho_vals)
            c = solve_chemical(rho, alpha)
            assert c.values.min() >= -1e-12
            mean_c = c.values.sum() * g.cell_area
            mean_rho = rho_vals.sum() * g.cell_area
            assert abs(mean_c - mean_rho / alpha) <= 1e-10 * max(1.0, mean_rho)
            res = lp_norm(residual(c, rho, alpha), 2)
            assert res <= 1e-10 * lp_norm(rho, 2)


class TestEllipticFailure:
    def test_iteration_starved_solver_reports_residual(self):
        from antfvm import EllipticSolveError

        g = build_grid(32, 32, 4, dt=0.1, t_final=1.0)
        rng = np.random.default_rng(35)
        rho = SpatialField(g, rng.random((32, 32)))
        with pytest.raises(EllipticSolveError) as info:
            solve_chemical(rho, 1.0, EllipticOptions(method="iterative", max_iterations=2))
        assert info.value.residual > 0
