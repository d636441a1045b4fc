import math

import numpy as np
import pytest

from expinstab import shapes, special
from expinstab.scattering import (
    FarFieldMatrix,
    disk_mode_coefficients,
    ObstacleProblem,
    farfield_disk,
    farfield_l2_norm,
    farfield_numeric,
    farfield_operator,
    hankel_bound_check,
    reciprocity_residual,
    solve_scattering,
)
from expinstab.spectral import BasisSpec, FULL_CIRCLE, enumerate_basis

FIRST_J0_ZERO = 2.404825557695773


def obstacle(values, r=1.0, cap=0.5):
    prof = shapes.RadialProfile(np.asarray(values, dtype=float), base_radius=r, amplitude_cap=cap)
    return shapes.Shape(shapes.RADIAL_SUBGRAPH, prof)


def smooth_obstacle(rng, cap=0.3, modes=5, grid=2048):
    theta = 2 * np.pi * np.arange(grid) / grid
    vals = np.zeros(grid)
    for j in range(1, modes + 1):
        vals += rng.normal() * np.cos(j * theta) + rng.normal() * np.sin(j * theta)
    vals -= vals.min()
    vals *= cap / max(vals.max(), 1e-30)
    return obstacle(vals)


class TestDiskFarField:
    def test_zero_mode_vanishes_at_bessel_zero(self):
        # wave parameter tuned so J_0(k R) = 0: the zeroth coefficient dies
        radius = 1.0
        a = FIRST_J0_ZERO**2
        mat = farfield_disk(radius, a, 6)
        assert abs(mat.entries[0, 0]) <= 1e-10
        assert abs(mat.entries[1, 1]) > 1e-3

    def test_reciprocity_of_reconstructed_pattern(self):
        mat = farfield_disk(1.0, 4.0, 10)
        angles = 2 * np.pi * np.arange(64) / 64
        elements = enumerate_basis(BasisSpec(FULL_CIRCLE, n_max=10))
        traces = np.stack([e.trace(angles) for e in elements])
        grid = traces.T @ mat.entries @ traces
        assert reciprocity_residual(grid) <= 1e-13

    def test_matches_projection_of_series_far_field(self):
        # quadrature of the series-evaluated pattern against the basis traces
        # reproduces the closed-form coefficient matrix
        from expinstab.scattering import _project_far_field

        radius, a, n_max = 1.0, 4.0, 10
        k = math.sqrt(a)
        c = disk_mode_coefficients(radius, a, 30)
        front = math.sqrt(2.0 / (math.pi * k)) * np.exp(-1j * math.pi / 4.0)
        angles = 2 * np.pi * np.arange(128) / 128
        grid = front * sum(
            c[abs(n)] * np.exp(1j * n * (angles[:, None] - angles[None, :]))
            for n in range(-30, 31)
        )
        projected = _project_far_field(grid, angles, n_max)
        ref = farfield_disk(radius, a, n_max)
        assert np.abs(projected - ref.entries).max() <= 1e-12

    def test_mode_decay_follows_hankel_bound(self):
        # |b_nn| <= 2 pi |C_k| |J_n| C7 (e r/2)^n (n-1)^-(n-1), n >= 2
        radius, a = 1.0, 4.0
        k = math.sqrt(a)
        n_max = 20
        mat = farfield_disk(radius, a, n_max)
        c7 = hankel_bound_check(np.arange(0, n_max + 1), np.array([k * radius]))
        front = 2 * math.pi * math.sqrt(2.0 / (math.pi * k))
        j_seq = special.bessel_j_sequence(n_max, np.array([k * radius]))[:, 0]
        for n in range(2, n_max + 1):
            bound = front * abs(j_seq[n]) * c7 * (math.e * k * radius / 2) ** n * (n - 1) ** (-(n - 1))
            assert abs(mat.entries[2 * n - 1, 2 * n - 1]) <= bound * (1 + 1e-9)


class TestHankelBound:
    def test_single_constant_on_grid(self):
        n_values = np.arange(0, 61)
        r_values = np.linspace(2.0, 8.0, 31)
        c7 = hankel_bound_check(n_values, r_values)
        assert np.isfinite(c7) and c7 > 0
        h = special.hankel1_sequence(60, r_values)
        for n in n_values:
            inv = 1.0 / np.abs(h[n])
            if n <= 1:
                assert (inv <= c7 * (1 + 1e-12)).all()
            else:
                env = (math.e * r_values / 2) ** n * float(n - 1) ** (-(n - 1))
                assert (inv <= c7 * env * (1 + 1e-12)).all()

    def test_flat_bound_low_orders(self):
        c7 = hankel_bound_check(np.array([0, 1]), np.linspace(2, 8, 7))
        h = special.hankel1_sequence(1, np.linspace(2, 8, 7))
        assert (1.0 / np.abs(h) <= c7 * (1 + 1e-12)).all()

    def test_monotone_under_range_shrink(self):
        wide = hankel_bound_check(np.arange(0, 41), np.linspace(2, 8, 25))
        narrow = hankel_bound_check(np.arange(0, 41), np.linspace(2, 4, 9))
        assert narrow <= wide


class TestNumericFarField:
    @pytest.mark.parametrize("a", [1.0, 4.0])
    def test_constant_profile_matches_disk(self, a):
        prob = ObstacleProblem(obstacle(np.zeros(2048)), (a,), 12, 192, 48)
        num = farfield_numeric(prob, a=a)[a]
        ref = farfield_disk(1.0, a, 12)
        assert np.abs(num.entries - ref.entries).max() <= 1e-6

    def test_reciprocity_on_random_shapes(self):
        rng = np.random.default_rng(0)
        for _ in range(3):
            prob = ObstacleProblem(smooth_obstacle(rng), (1.0,), 10, 192, 48)
            mat = farfield_numeric(prob, a=1.0)[1.0]
            assert mat.reciprocity_residual <= 1e-8

    def test_coefficient_decay_positive_rate(self):
        rng = np.random.default_rng(1)
        prob = ObstacleProblem(smooth_obstacle(rng), (4.0,), 14, 256, 64)
        mat = farfield_numeric(prob, a=4.0)[4.0]
        op = farfield_operator(mat)
        assert op.alpha2 > 0
        maxdeg = np.maximum.outer(op.degrees, op.degrees)
        violations = np.abs(op.entries) > op.c2 * np.exp(-op.alpha2 * maxdeg) * (1 + 1e-12)
        assert violations.sum() == 0

    def test_scattered_field_uniform_decay(self):
        # rho^(1/2) |u^s| stays uniformly bounded on rho in [2, 8]
        rng = np.random.default_rng(2)
        sol = solve_scattering(smooth_obstacle(rng), 1.0, 192, 8)
        angles = 2 * np.pi * np.arange(24) / 24
        reference = None
        for rho in (2.0, 3.0, 5.0, 8.0):
            pts = rho * np.column_stack([np.cos(angles), np.sin(angles)])
            vals = np.abs(sol.scattered_at(pts, 0)) * math.sqrt(rho)
            level = vals.max()
            reference = level if reference is None else max(reference, 0.0)
            assert level <= 2.0 * max(np.abs(sol.scattered_at(
                2.0 * np.column_stack([np.cos(angles), np.sin(angles)]), 0)).max() * math.sqrt(2.0), 1e-12)


class TestL2Norm:
    def test_zero_matrix(self):
        degrees = np.array([0.0, 1.0, 1.0])
        assert farfield_l2_norm(FarFieldMatrix(np.zeros((3, 3), complex), degrees, 1.0)) == 0.0

    def test_diagonal_root_sum_square(self):
        mat = farfield_disk(1.0, 4.0, 8)
        expected = math.sqrt(np.sum(np.abs(np.diag(mat.entries)) ** 2))
        assert farfield_l2_norm(mat) == pytest.approx(expected)

    def test_matches_direct_double_quadrature(self):
        rng = np.random.default_rng(3)
        prob = ObstacleProblem(smooth_obstacle(rng), (4.0,), 16, 256, 96)
        sol = solve_scattering(prob.shape, 4.0, 256, 96)
        grid = sol.far_field_grid()
        w = 2 * np.pi / 96
        direct = math.sqrt(float(np.sum(np.abs(grid) ** 2)) * w * w)
        mat = farfield_numeric(prob, a=4.0)[4.0]
        assert farfield_l2_norm(mat) == pytest.approx(direct, abs=1e-6)
