"""
Caputo 离散权重测试
"""
import math

import numpy as np
import pytest
from scipy import integrate, special

from components.caputo import (CaputoWeightTable, apply, barrier_check, build_weights,
                               caputo_derivative_quadrature, fitted_weights, l1_weights,
                               nodal_weights)
from components.errors import DomainError, IncompatibleGridError
from components.mesh import SchemeKind, graded_mesh


def fitted_row_oracle(mesh, alpha, n):
    """自适应积分 ∫_{t_k}^{t_{k+1}} s^{α-1}(t_n-s)^{-α} ds 得到的一行权重"""
    t = mesh.t
    row = []
    for k in range(n):
        a, b = t[k], t[k + 1]
        if k == 0 and n == 1:
            value = special.beta(alpha, 1.0 - alpha)
        elif k == 0:
            value, _ = integrate.quad(lambda s: (t[n] - s) ** (-alpha), a, b, weight="alg",
                                      wvar=(alpha - 1.0, 0.0), epsabs=0, epsrel=1e-13)
        elif k == n - 1:
            value, _ = integrate.quad(lambda s: s ** (alpha - 1.0), a, b, weight="alg",
                                      wvar=(0.0, -alpha), epsabs=0, epsrel=1e-13)
        else:
            value, _ = integrate.quad(lambda s: s ** (alpha - 1.0) * (t[n] - s) ** (-alpha),
                                      a, b, epsabs=0, epsrel=1e-13)
        row.append(alpha / special.gamma(1.0 - alpha) * value / (b ** alpha - a ** alpha))
    return np.array(row)


def l1_row_oracle(mesh, alpha, n):
    """区间平均 (1/τ)∫ (t_n-s)^{-α} ds / Γ(1-α)"""
    t = mesh.t
    row = []
    for k in range(n):
        a, b = t[k], t[k + 1]
        if k == n - 1:
            value, _ = integrate.quad(lambda s: 1.0, a, b, weight="alg", wvar=(0.0, -alpha),
                                      epsabs=0, epsrel=1e-13)
        else:
            value, _ = integrate.quad(lambda s: (t[n] - s) ** (-alpha), a, b,
                                      epsabs=0, epsrel=1e-13)
        row.append(value / ((b - a) * special.gamma(1.0 - alpha)))
    return np.array(row)


class TestFittedWeights:
    def test_first_row(self):
        table = fitted_weights(graded_mesh(1.0, 1, 1.0), 0.5)
        assert table.row(1)[0] == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.2, 0.4, 0.6, 0.8])
    def test_telescoping_sum(self, alpha, small_meshes):
        target = math.gamma(1.0 + alpha)
        for mesh in small_meshes:
            table = fitted_weights(mesh, alpha)
            powers = mesh.t ** alpha
            for n in range(1, mesh.N + 1):
                total = float(np.dot(table.row(n), np.diff(powers[:n + 1])))
                assert total == pytest.approx(target, rel=1e-10)

    def test_telescoping_sum_random_meshes(self, rng):
        for _ in range(100):
            T = float(rng.uniform(0.5, 10.0))
            N = int(rng.integers(1, 65))
            r = float(rng.uniform(1.0, 9.0))
            alpha = float(rng.uniform(0.05, 0.95))
            mesh = graded_mesh(T, N, r)
            table = fitted_weights(mesh, alpha)
            powers = mesh.t ** alpha
            target = math.gamma(1.0 + alpha)
            for n in range(1, N + 1):
                total = math.fsum(table.row(n) * np.diff(powers[:n + 1]))
                assert total == pytest.approx(target, rel=1e-10), (T, N, r, alpha, n)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    def test_positive_and_increasing(self, alpha, small_meshes):
        for mesh in small_meshes:
            table = fitted_weights(mesh, alpha)
            for n in range(1, mesh.N + 1):
                row = table.row(n)
                assert np.all(row > 0.0)
                assert np.all(np.diff(row) > 0.0)

    def test_row_against_quadrature(self):
        mesh = graded_mesh(1.0, 4, 1.0)
        table = fitted_weights(mesh, 0.4)
        np.testing.assert_allclose(table.row(4), fitted_row_oracle(mesh, 0.4, 4), rtol=1e-10)

    @pytest.mark.parametrize("alpha,r", [(0.2, 4.5), (0.7, 1.0), (0.5, 9.0)])
    def test_graded_rows_against_quadrature(self, alpha, r):
        mesh = graded_mesh(1.0, 16, r)
        table = fitted_weights(mesh, alpha)
        for n in (2, 9, 16):
            np.testing.assert_allclose(table.row(n), fitted_row_oracle(mesh, alpha, n), rtol=1e-9)

    @pytest.mark.parametrize("N", [8, 64, 256])
    def test_beta_evaluation_budget(self, N):
        table = fitted_weights(graded_mesh(1.0, N, 2.0), 0.3)
        assert table.beta_evaluations == N * (N - 1) // 2
        assert table.beta_evaluations <= N * (N + 1) + N

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 1.2])
    def test_rejects_alpha(self, alpha):
        with pytest.raises(DomainError):
            fitted_weights(graded_mesh(1.0, 4, 1.0), alpha)


class TestL1Weights:
    def test_first_row(self):
        table = l1_weights(graded_mesh(1.0, 1, 1.0), 0.5)
        assert table.row(1)[0] == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.2, 0.6])
    def test_linear_exactness(self, alpha, small_meshes):
        for mesh in small_meshes:
            table = l1_weights(mesh, alpha)
            for n in range(1, mesh.N + 1):
                expected = mesh.t[n] ** (1.0 - alpha) / math.gamma(2.0 - alpha)
                assert apply(table, mesh.t[:n + 1], n) == pytest.approx(expected, rel=1e-10)

    def test_strongly_graded_row(self):
        mesh = graded_mesh(1.0, 8, 9.0)
        table = l1_weights(mesh, 0.2)
        np.testing.assert_allclose(table.row(8), l1_row_oracle(mesh, 0.2, 8), rtol=1e-10)


class TestApply:
    @pytest.mark.parametrize("kind", [SchemeKind.FITTED, SchemeKind.L1])
    def test_constant_history(self, kind):
        mesh = graded_mesh(1.0, 16, 2.0)
        table = build_weights(mesh, 0.4, kind)
        for n in (1, 7, 16):
            assert apply(table, np.full(n + 1, 3.5), n) == 0.0

    def test_fitted_exact_on_power(self, small_meshes):
        alpha = 0.35
        for mesh in small_meshes:
            table = fitted_weights(mesh, alpha)
            for n in range(1, mesh.N + 1):
                value = apply(table, mesh.t[:n + 1] ** alpha, n)
                assert value == pytest.approx(math.gamma(1.0 + alpha), rel=1e-10)

    def test_length_mismatch(self):
        table = fitted_weights(graded_mesh(1.0, 4, 1.0), 0.5)
        with pytest.raises(IncompatibleGridError):
            apply(table, np.zeros(3), 3)

    def test_level_out_of_range(self):
        table = fitted_weights(graded_mesh(1.0, 4, 1.0), 0.5)
        with pytest.raises(DomainError):
            apply(table, np.zeros(6), 5)

    @pytest.mark.parametrize("kind", [SchemeKind.FITTED, SchemeKind.L1])
    def test_smooth_limit(self, kind):
        alpha = 0.5
        target = 2.0 / math.gamma(3.0 - alpha)
        errors = []
        for N in (16, 32, 64):
            mesh = graded_mesh(1.0, N, 1.0)
            table = build_weights(mesh, alpha, kind)
            errors.append(abs(apply(table, mesh.t ** 2, N) - target))
        assert errors[0] > errors[1] > errors[2]


class TestNodalWeights:
    def test_two_term_case(self):
        table = fitted_weights(graded_mesh(1.0, 3, 1.0), 0.5)
        d = table.row(1)[0]
        np.testing.assert_array_equal(nodal_weights(table, 1), [-d, d])

    @pytest.mark.parametrize("kind", [SchemeKind.FITTED, SchemeKind.L1])
    def test_rows_sum_to_zero(self, kind):
        mesh = graded_mesh(1.0, 32, 3.0)
        table = build_weights(mesh, 0.3, kind)
        for n in range(1, 33):
            theta = nodal_weights(table, n)
            assert abs(theta.sum()) <= 1e-12 * theta[n]

    def test_fitted_signs(self):
        mesh = graded_mesh(1.0, 64, 4.5)
        table = fitted_weights(mesh, 0.2)
        for n in range(1, 65):
            theta = table.theta(n)
            assert theta[n] > 0.0
            assert np.all(theta[:n] < 0.0)

    def test_row_against_quadrature(self):
        mesh = graded_mesh(1.0, 4, 1.0)
        d = fitted_row_oracle(mesh, 0.4, 4)
        expected = np.concatenate([[-d[0]], d[:-1] - d[1:], [d[-1]]])
        np.testing.assert_allclose(nodal_weights(fitted_weights(mesh, 0.4), 4), expected,
                                   rtol=1e-9, atol=1e-12)

    def test_history_form_matches_difference_form(self, rng):
        mesh = graded_mesh(1.0, 20, 2.5)
        table = fitted_weights(mesh, 0.6)
        history = rng.normal(size=21)
        for n in (1, 10, 20):
            nodal = float(np.dot(nodal_weights(table, n), history[:n + 1]))
            assert nodal == pytest.approx(apply(table, history[:n + 1], n), rel=1e-11, abs=1e-11)


class TestBarrier:
    def test_random_graded_meshes(self, rng):
        for _ in range(12):
            alpha = float(rng.uniform(0.1, 0.9))
            r = float(rng.uniform(1.0, 6.0))
            N = int(rng.integers(2, 65))
            mesh = graded_mesh(1.0, N, r)
            table = fitted_weights(mesh, alpha)
            t = mesh.t
            for values in (t, t ** alpha, t * t, -np.expm1(-t / t[1])):
                assert barrier_check(table, values).passed

    def test_rejects_non_monotone(self):
        mesh = graded_mesh(1.0, 4, 1.0)
        table = fitted_weights(mesh, 0.5)
        with pytest.raises(DomainError):
            barrier_check(table, [0.0, 1.0, 0.5, 2.0, 3.0])
        with pytest.raises(DomainError):
            barrier_check(table, [1.0, 1.0, 1.0, 2.0, 3.0])


class TestReferenceQuadrature:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    def test_power_function(self, alpha):
        value = caputo_derivative_quadrature(lambda s: alpha * s ** (alpha - 1.0), 0.7, alpha)
        assert value == pytest.approx(math.gamma(1.0 + alpha), rel=1e-9)

    def test_quadratic(self):
        alpha, t = 0.4, 1.3
        value = caputo_derivative_quadrature(lambda s: 2.0 * s, t, alpha)
        assert value == pytest.approx(2.0 * t ** (2.0 - alpha) / math.gamma(3.0 - alpha), rel=1e-10)


def test_build_weights_dispatch():
    mesh = graded_mesh(1.0, 4, 1.0)
    assert build_weights(mesh, 0.5, "fitted").kind is SchemeKind.FITTED
    assert build_weights(mesh, 0.5, "l1").kind is SchemeKind.L1
    assert isinstance(build_weights(mesh, 0.5, SchemeKind.L1), CaputoWeightTable)
