"""Observables, cross-mesh comparison, and the convergence-study harness."""

import math

import numpy as np
import pytest

from antfvm import (
    ConfigurationError,
    DensityField,
    KernelKind,
    ModelParams,
    ObservableSeries,
    RunConfig,
    build_grid,
    convergence_study,
    fit_slope,
    inject_to_fine,
    kernel_difference,
    lp_norm,
    polarization,
    relative_error,
    second_polarization,
    spatial_density,
    steady_state_metric,
    sup_norm,
)
from antfvm.cli import InitialSpec

TWO_PI = 2 * math.pi


def _grid(nx=4, ny=1, nt=4, dt=0.1, t_final=1.0):
    return build_grid(nx, ny, nt, dt=dt, t_final=t_final)


class TestSpatialDensity:
    def test_uniform(self):
        g = _grid(4, 2, 8)
        rho = spatial_density(DensityField(g, np.full(g.shape, 1 / TWO_PI)))
        assert np.abs(rho.values - 1.0).max() < 1e-14

    def test_single_angle_cell(self):
        g = _grid(3, 1, 8)
        a, k0 = 2.5, 3
        vals = np.zeros(g.shape)
        vals[:, :, k0] = a
        rho = spatial_density(DensityField(g, vals))
        assert np.allclose(rho.values, a * g.dtheta, atol=0)

    def test_matches_exact_summation(self):
        g = _grid(4, 3, 8)
        rng = np.random.default_rng(61)
        vals = rng.random(g.shape)
        rho = spatial_density(DensityField(g, vals))
        for i in range(g.n_x):
            for j in range(g.n_y):
                exact = math.fsum(vals[i, j, :]) * g.dtheta
                assert rho.values[i, j] == pytest.approx(exact, rel=1e-14)

    def test_total_mass_consistency(self):
        g = _grid(5, 4, 8)
        rng = np.random.default_rng(62)
        f = DensityField(g, rng.random(g.shape))
        rho = spatial_density(f)
        assert rho.values.sum() * g.cell_area == pytest.approx(f.mass, rel=1e-14)


class TestPolarization:
    def test_isotropic_has_no_moments(self):
        g = _grid(3, 3, 8)
        f = DensityField(g, np.full(g.shape, 1 / TWO_PI))
        px, py = polarization(f)
        p2 = second_polarization(f)
        assert np.abs(px.values).max() < 1e-14
        assert np.abs(py.values).max() < 1e-14
        assert np.abs(p2.values).max() < 1e-14

    def test_single_angle_cell(self):
        g = _grid(2, 1, 8)
        a, k0 = 1.7, 5
        vals = np.zeros(g.shape)
        vals[:, :, k0] = a
        px, py = polarization(DensityField(g, vals))
        th = g.theta_centers[k0]
        assert np.allclose(px.values, a * g.dtheta * math.cos(th), atol=1e-15)
        assert np.allclose(py.values, a * g.dtheta * math.sin(th), atol=1e-15)

    def test_second_moment_against_direct_sum(self):
        g = _grid(2, 1, 8)
        th = g.theta_centers
        vals = np.broadcast_to((1 + np.cos(2 * th))[None, None, :], g.shape).copy()
        p2 = second_polarization(DensityField(g, vals))
        direct = math.fsum((1 + math.cos(2 * t)) * math.cos(2 * t) * g.dtheta for t in th)
        assert np.allclose(p2.values, direct, rtol=1e-14)


class TestSteadyStateMetric:
    def test_identical_fields(self):
        g = _grid()
        f = DensityField(g, np.ones(g.shape))
        assert steady_state_metric(f, f, 0.1, "L2") == 0.0

    def test_linear_perturbation(self):
        g = _grid()
        rng = np.random.default_rng(63)
        base = rng.random(g.shape)
        delta = rng.standard_normal(g.shape)
        dt = 0.01
        f_prev = DensityField(g, base)
        f_next = DensityField(g, base + dt * delta)
        assert steady_state_metric(f_next, f_prev, dt, "L2") == pytest.approx(
            lp_norm(DensityField(g, delta), 2), rel=1e-12
        )
        assert steady_state_metric(f_next, f_prev, dt, "Linf") == pytest.approx(
            sup_norm(DensityField(g, delta)), rel=1e-12
        )


class TestInjectToFine:
    def test_identity_on_same_grid(self):
        g = _grid(4, 1, 4)
        rng = np.random.default_rng(64)
        f = DensityField(g, rng.random(g.shape))
        out = inject_to_fine(f, g)
        assert np.array_equal(out.values, f.values)

    def test_constant_any_refinement(self):
        g = _grid(4, 2, 4)
        fine = _grid(12, 4, 8)
        f = DensityField(g, np.full(g.shape, 0.3))
        out = inject_to_fine(f, fine)
        assert np.all(out.values == 0.3)

    def test_doubling_pattern_and_mass(self):
        g = _grid(4, 1, 4)
        fine = _grid(8, 1, 4)
        rng = np.random.default_rng(65)
        f = DensityField(g, rng.random(g.shape))
        out = inject_to_fine(f, fine)
        for i in range(4):
            assert np.array_equal(out.values[2 * i], f.values[i])
            assert np.array_equal(out.values[2 * i + 1], f.values[i])
        assert abs(out.mass - f.mass) < 1e-15

    def test_non_divisible_rejected(self):
        with pytest.raises(ConfigurationError):
            inject_to_fine(DensityField(_grid(4, 1, 4), np.zeros((4, 1, 4))), _grid(6, 1, 4))

    def test_norms_preserved(self):
        g = _grid(4, 2, 4)
        fine = _grid(16, 4, 12)
        rng = np.random.default_rng(66)
        f = DensityField(g, rng.random(g.shape))
        out = inject_to_fine(f, fine)
        for p in (1, 2, 4):
            assert lp_norm(out, p) == pytest.approx(lp_norm(f, p), rel=1e-13)
        assert sup_norm(out) == sup_norm(f)


class TestRelativeError:
    def test_compatible_constant_copy_is_zero(self):
        coarse = _grid(4, 1, 4)
        fine = _grid(8, 1, 8)
        f_ref = DensityField(fine, np.full(fine.shape, 2.0))
        f_h = DensityField(coarse, np.full(coarse.shape, 2.0))
        assert relative_error(f_h, f_ref, "L2") == 0.0

    def test_homogeneous_scaling(self):
        g = _grid(4, 1, 4)
        rng = np.random.default_rng(67)
        base = rng.random(g.shape) + 0.5
        delta = 0.125
        f_ref = DensityField(g, base)
        f_h = DensityField(g, (1 + delta) * base)
        for norm in ("L1", "L2", "Linf"):
            assert relative_error(f_h, f_ref, norm) == pytest.approx(delta, rel=1e-12)

    def test_scale_invariance(self):
        g = _grid(4, 1, 4)
        rng = np.random.default_rng(68)
        a = rng.random(g.shape) + 0.1
        b = rng.random(g.shape) + 0.1
        e1 = relative_error(DensityField(g, a), DensityField(g, b), "L2")
        e2 = relative_error(DensityField(g, 7.0 * a), DensityField(g, 7.0 * b), "L2")
        assert e1 == pytest.approx(e2, rel=1e-13)


class TestKernelDifference:
    def test_identical_runs(self):
        g = _grid()
        rng = np.random.default_rng(69)
        f = DensityField(g, rng.random(g.shape))
        assert kernel_difference(f, f, "L2") == 0.0

    def test_grid_mismatch_rejected(self):
        a = DensityField(_grid(4, 1, 4), np.ones((4, 1, 4)))
        b = DensityField(_grid(8, 1, 4), np.ones((8, 1, 4)))
        with pytest.raises(ConfigurationError):
            kernel_difference(a, b)


class TestJensenConsistency:
    def test_spatial_density_l2_bounded(self):
        rng = np.random.default_rng(70)
        for _ in range(50):
            g = _grid(4, 3, 8)
            f = DensityField(g, rng.random(g.shape))
            rho = spatial_density(f)
            lhs = lp_norm(rho, 2) ** 2
            rhs = TWO_PI * lp_norm(f, 2) ** 2
            assert lhs <= rhs * (1 + 1e-12)


class TestConvergenceStudy:
    def test_degenerate_zero_errors_reported(self):
        config = RunConfig(
            n_x=4,
            n_y=1,
            n_theta=4,
            dt=0.01,
            t_final=0.02,
            params=ModelParams(D_T=0.1, Pe=0.0, gamma=0.0, alpha=1.0, kernel=KernelKind("B0")),
            initial=InitialSpec(preset="uniform"),
        )
        table = convergence_study(config, [4, 8], 16)
        # the runs agree up to linear-solver round-off, so there is no error
        # signal to fit
        assert all(row.error <= 1e-13 for row in table.rows)
        assert table.slope is None
        assert "degenerate" in str(table)

    def test_non_divisible_mesh_rejected(self):
        config = RunConfig(
            n_x=4,
            n_y=1,
            n_theta=4,
            dt=0.01,
            t_final=0.01,
            params=ModelParams(D_T=0.1, Pe=0.0, gamma=0.0, alpha=1.0, kernel=KernelKind("B0")),
        )
        with pytest.raises(ConfigurationError):
            convergence_study(config, [5], 16)

    def test_fit_slope_recovers_power_law(self):
        hs = [1 / 16, 1 / 32, 1 / 64]
        errors = [2.0 * h**1.3 for h in hs]
        assert fit_slope(hs, errors) == pytest.approx(1.3, rel=1e-12)
        assert fit_slope(hs, [0.0, 1.0, 2.0]) is None


class TestObservableSeries:
    def test_validation(self):
        with pytest.raises(ValueError):
            ObservableSeries(times=[0.0, 1.0], values=[1.0], label="x")
        with pytest.raises(ValueError):
            ObservableSeries(times=[0.0, 0.0], values=[1.0, 2.0], label="x")
        s = ObservableSeries(times=[0.0, 1.0], values=[1.0, 2.0], label="mass")
        assert s.label == "mass"


class TestStudyAbort:
    def test_failed_mesh_carries_completed_runs(self):
        from antfvm.errors import StudyError
        from antfvm import StepOptions

        # starve the fixed-point iteration so the strongly coupled run fails
        config = RunConfig(
            n_x=8,
            n_y=1,
            n_theta=8,
            dt=0.01,
            t_final=0.05,
            params=ModelParams(D_T=0.1, Pe=2.0, gamma=500.0, alpha=1.0, kernel=KernelKind("B0")),
            initial=InitialSpec(preset="two_bump"),
            solver=StepOptions(picard_max_iters=2),
        )
        from antfvm import run_mesh_family

        with pytest.raises(StudyError) as info:
            run_mesh_family(config, [8, 16])
        assert isinstance(info.value.completed, dict)
