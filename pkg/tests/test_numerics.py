import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vortexscatter.errors import ConvergenceError
from vortexscatter.numerics import (
    QuadratureSpec,
    RootFindSpec,
    bessel_j,
    heron_area,
    integrate_q_substituted,
    solve_system,
)

from _oracles import adaptive_open_quadrature, bessel_integral, bessel_series, sign_change_cells


class TestBessel:
    def test_zero_argument(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(3, 0.0) == 0.0

    def test_j1_of_one_series_oracle(self):
        expected = bessel_series(1, 1.0)
        assert expected == pytest.approx(0.4400505857449335, abs=1e-15)
        assert bessel_j(1, 1.0) == pytest.approx(expected, abs=1e-13)

    def test_series_oracle_where_float64_valid(self):
        for m in (0, 1, 2, 5, 10, 25, 50):
            for x in (0.1, 0.5, 1.0, 3.0, 7.0, 10.0):
                assert bessel_j(m, x) == pytest.approx(bessel_series(m, x), abs=1e-12)
        # order-dominated region: terms decrease from the start
        for m in (30, 50):
            for x in (0.5 * m, 0.3 * m):
                assert bessel_j(m, x) == pytest.approx(bessel_series(m, x), rel=1e-10, abs=1e-300)

    def test_integral_representation_full_range(self):
        for m in (0, 1, 2, 5, 10, 20, 35, 50):
            for x in (0.5, 1.0, 5.0, 12.0, 20.0, 40.0, 70.0, 100.0):
                assert bessel_j(m, x) == pytest.approx(bessel_integral(m, x), abs=1e-12)

    def test_recurrence_identity(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            m = int(rng.integers(1, 50))
            x = float(rng.uniform(0.5, 100.0))
            lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x)
            rhs = 2.0 * m / x * bessel_j(m, x)
            scale = max(abs(bessel_j(m - 1, x)), abs(bessel_j(m + 1, x)), abs(rhs))
            assert abs(lhs - rhs) <= 1e-10 * max(scale, 1e-300)

    def test_range_errors(self):
        with pytest.raises(ValueError):
            bessel_j(-1, 1.0)
        with pytest.raises(ValueError):
            bessel_j(201, 1.0)
        with pytest.raises(ValueError):
            bessel_j(0, -0.5)
        with pytest.raises(ValueError):
            bessel_j(0, math.inf)

    def test_high_order(self):
        assert bessel_j(200, 50.0) == pytest.approx(bessel_integral(200, 50.0), abs=1e-12)


class TestHeron:
    def test_right_triangle_exact(self):
        assert heron_area(3.0, 4.0, 5.0) == 6.0

    def test_equilateral(self):
        assert heron_area(1.0, 1.0, 1.0) == pytest.approx(math.sqrt(3.0) / 4.0, rel=1e-15)

    def test_degenerate_exact_zero(self):
        assert heron_area(1.0, 2.0, 3.0) == 0.0

    def test_violation_is_nan(self):
        assert math.isnan(heron_area(1.0, 1.0, 3.0))

    @given(
        st.permutations([3.0, 4.0, 5.0]),
    )
    def test_permutation_symmetry_345(self, sides):
        assert heron_area(*sides) == 6.0

    @given(
        st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 100),
        st.permutations([0, 1, 2]),
    )
    def test_permutation_symmetry_bitwise(self, a, b, c, perm):
        sides = [a, b, c]
        shuffled = [sides[i] for i in perm]
        base = heron_area(a, b, c)
        other = heron_area(*shuffled)
        assert (math.isnan(base) and math.isnan(other)) or base == other

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            heron_area(-1.0, 2.0, 2.0)
        with pytest.raises(ValueError):
            heron_area(math.nan, 2.0, 2.0)


class TestQuadrature:
    def test_singular_integrand_exact(self):
        # (sin^2 theta - sin^2 xi)^{-1/2} integrates to pi * kappa
        theta = 0.2
        spec = QuadratureSpec(node_count=16, rel_tol=1e-12)
        val = integrate_q_substituted(
            lambda xi: 1.0 / math.sqrt(math.sin(theta) ** 2 - math.sin(xi) ** 2),
            theta,
            spec,
            kappa=1.0,
        )
        assert val == pytest.approx(math.pi, rel=1e-12)

    def test_singular_integrand_vs_adaptive_reference(self):
        theta, kappa = 0.2, 1.3
        spec = QuadratureSpec(node_count=16, rel_tol=1e-12)

        def g_of_xi(xi):
            return math.cos(3.0 * xi) / math.sqrt(math.sin(theta) ** 2 - math.sin(xi) ** 2)

        val = integrate_q_substituted(g_of_xi, theta, spec, kappa=kappa)

        qmax = kappa * math.sin(theta)
        ref = adaptive_open_quadrature(
            lambda q: g_of_xi(math.asin(q / kappa)), -qmax, qmax
        )
        assert val == pytest.approx(ref, rel=1e-8)

    def test_zero_integrand(self):
        spec = QuadratureSpec(node_count=8, rel_tol=1e-9, abs_tol=1e-15)
        assert integrate_q_substituted(lambda xi: 0.0, 0.2, spec, kappa=1.0) == 0.0

    def test_unit_integrand_interval_length(self):
        spec = QuadratureSpec(node_count=16, rel_tol=1e-12)
        val = integrate_q_substituted(lambda xi: 1.0, 0.2, spec, kappa=1.0)
        assert val == pytest.approx(2.0 * math.sin(0.2), rel=1e-12)

    def test_even_integrand_equals_twice_half_interval(self):
        theta, kappa = 0.3, 1.0
        spec = QuadratureSpec(node_count=24, rel_tol=1e-11)
        full = integrate_q_substituted(lambda xi: math.cos(2.0 * xi), theta, spec, kappa=kappa)
        # half interval via the same substitution restricted to u in (0, pi/2)
        x, w = np.polynomial.legendre.leggauss(400)
        u = 0.25 * math.pi * (x + 1.0)
        sin_t = math.sin(theta)
        half = float(
            np.sum(0.25 * math.pi * w * np.cos(2.0 * np.arcsin(sin_t * np.sin(u)))
                   * kappa * sin_t * np.cos(u))
        )
        assert full == pytest.approx(2.0 * half, rel=1e-9)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(node_count=1)
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=0.0, rel_tol=0.0)
        with pytest.raises(ValueError):
            RootFindSpec(dedupe_tol=1e-13)

    def test_nonconvergence_raises_with_estimates(self):
        spec = QuadratureSpec(node_count=2, rel_tol=1e-16, max_refinements=1)
        rng = np.random.default_rng(0)
        noise = rng.standard_normal(4096)

        def rough(xi):  # deliberately unresolvable
            return noise[int(abs(xi) * 1e7) % 4096]

        with pytest.raises(ConvergenceError) as err:
            integrate_q_substituted(rough, 0.2, spec, kappa=1.0)
        assert err.value.estimates is not None


def _embedded_two_root_residual(points):
    # 3-4-5 transverse closure (two orientations) with a smooth periodic phi
    # pin. The pin vanishes at phi = pi/4 and at pi/4 + 3pi/2, but at the
    # second zero the required base side (8) exceeds the maximal reach (7),
    # so exactly two roots survive.
    phi = points[..., 0]
    phi1 = points[..., 1]
    phi2 = points[..., 2]
    x = phi - 0.25 * math.pi
    rx = (5.0 + 3.0 * (1.0 - np.cos(x))) - 4.0 * np.cos(phi1) - 3.0 * np.cos(phi2)
    ry = -4.0 * np.sin(phi1) - 3.0 * np.sin(phi2)
    rz = np.sin(x) + 1.0 - np.cos(x)
    return np.stack([rx, ry, rz], axis=-1)


class TestSolveSystem:
    def test_two_root_geometry(self):
        roots, degenerate = solve_system(_embedded_two_root_residual)
        assert not degenerate
        assert len(roots) == 2
        for root in roots:
            assert root.angles[0] == pytest.approx(0.25 * math.pi, abs=1e-9)
            assert root.jacobian_det > 1e-6

    def test_no_roots_when_stripe_violated(self):
        def residual(points):
            phi1, phi2 = points[..., 1], points[..., 2]
            x = points[..., 0] - 1.0
            rx = 9.0 - 1.0 * np.cos(phi1) - 1.0 * np.cos(phi2)  # unreachable
            ry = -np.sin(phi1) - np.sin(phi2)
            rz = np.sin(x) + 1.0 - np.cos(x)
            return np.stack([rx, ry, rz], axis=-1)

        roots, degenerate = solve_system(residual)
        assert roots == [] and degenerate == []

    def test_grid_doubling_never_loses_roots(self):
        base = solve_system(_embedded_two_root_residual, RootFindSpec(start_grid_density=3))
        dense = solve_system(_embedded_two_root_residual, RootFindSpec(start_grid_density=6))
        assert len(dense[0]) >= len(base[0])

    def test_scalar_residual_supported(self):
        def scalar_residual(angles):
            return _embedded_two_root_residual(np.asarray(angles)[None, :])[0]

        roots, _ = solve_system(scalar_residual, RootFindSpec(start_grid_density=4))
        assert len(roots) == 2

    def test_dense_grid_scan_agreement(self):
        roots, _ = solve_system(_embedded_two_root_residual)
        clusters = sign_change_cells(_embedded_two_root_residual, n=28)
        assert len(clusters) == len(roots)
        cell = 2.0 * math.pi / 28
        for root in roots:
            dists = []
            for c in clusters:
                d = np.abs(root.angles - c) % (2.0 * math.pi)
                dists.append(np.max(np.minimum(d, 2.0 * math.pi - d)))
            assert min(dists) < 2.0 * cell
