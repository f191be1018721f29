"""
误差统计与收敛率测试
"""
import math

import numpy as np
import pytest

from components.errors import (ConfigError, DomainError, IncompatibleGridError,
                               MissingExactSolutionError)
from components.harness import (METRIC_TWO_MESH, CellSpec, build_problem, convergence_report,
                                evaluate_cell, growth_rate, growth_report, max_nodal_error,
                                observed_rates, resolve_grading, run_cells, solve_cell,
                                theoretical_growth, theoretical_order, two_mesh_difference)
from components.mesh import SchemeKind, graded_mesh, uniform_grid
from components.problems import example2, example3
from components.solver import solve
from create_sample_data import sample_problem_text


class TestErrorMetrics:
    def test_max_nodal_error_includes_all_nodes(self):
        problem = example3(0.5)
        grid = solve(problem, uniform_grid(1.0, 8), graded_mesh(1.0, 8, 1.0), 0.5, "fitted")
        shifted = lambda x, t: problem.exact(x, t) + (10.0 if t == 0.0 else 0.0)
        assert max_nodal_error(grid, shifted) == pytest.approx(10.0, rel=1e-12)

    def test_missing_exact(self):
        grid = solve(example2(), uniform_grid(math.pi, 4), graded_mesh(1.0, 4, 1.0), 0.5, "l1")
        with pytest.raises(MissingExactSolutionError):
            max_nodal_error(grid, None)

    def test_two_mesh_difference(self):
        problem = example2()
        coarse = solve(problem, uniform_grid(math.pi, 8), graded_mesh(1.0, 8, 2.0), 0.4, "fitted")
        fine = solve(problem, uniform_grid(math.pi, 16), graded_mesh(1.0, 16, 2.0), 0.4, "fitted")
        diff = two_mesh_difference(coarse, fine)
        assert diff > 0.0
        assert diff == float(np.max(np.abs(coarse.values - fine.values[::2, ::2])))

    def test_two_mesh_rejects_unnested(self):
        problem = example2()
        coarse = solve(problem, uniform_grid(math.pi, 8), graded_mesh(1.0, 8, 2.0), 0.4, "fitted")
        wrong_r = solve(problem, uniform_grid(math.pi, 16), graded_mesh(1.0, 16, 3.0), 0.4, "fitted")
        wrong_m = solve(problem, uniform_grid(math.pi, 8), graded_mesh(1.0, 16, 2.0), 0.4, "fitted")
        wrong_kind = solve(problem, uniform_grid(math.pi, 16), graded_mesh(1.0, 16, 2.0), 0.4, "l1")
        for fine in (wrong_r, wrong_m, wrong_kind):
            with pytest.raises(IncompatibleGridError):
                two_mesh_difference(coarse, fine)


class TestRates:
    def test_reference_row(self):
        errors = [1.855e-2, 1.729e-2, 1.603e-2, 1.477e-2, 1.353e-2]
        rates = observed_rates(errors, [64, 128, 256, 512, 1024])
        np.testing.assert_allclose(rates, [0.101, 0.109, 0.118, 0.127], atol=2e-3)

    def test_second_order(self):
        assert observed_rates([4e-2, 1e-2]) == [pytest.approx(2.0)]

    def test_exact_below_floor(self):
        rates = observed_rates([1e-15, 3e-16, 1e-3])
        assert rates[0] is None
        assert rates[1] == pytest.approx(math.log2(1e-13 / 1e-3))

    def test_needs_two_errors(self):
        with pytest.raises(ConfigError):
            observed_rates([1e-2])

    def test_needs_doubling(self):
        with pytest.raises(ConfigError):
            observed_rates([1e-2, 5e-3], [64, 100])

    def test_growth_rate(self):
        assert growth_rate(10.0 * math.e, math.e) == pytest.approx(1.0)
        with pytest.raises(DomainError):
            growth_rate(0.0, 1.0)


class TestTheory:
    @pytest.mark.parametrize("alpha,r,kind,expected", [
        (0.4, 1.0, "fitted", 0.8), (0.2, 4.5, "fitted", 1.8),
        (0.6, 1.0, "l1", 0.6), (0.4, 4.0, "l1", 1.6),
    ])
    def test_order(self, alpha, r, kind, expected):
        assert theoretical_order(alpha, r, kind) == pytest.approx(expected)

    @pytest.mark.parametrize("alpha,expected", [(0.2, 1.8), (0.4, 1.6), (0.6, 1.4), (0.8, 1.2)])
    def test_smooth_order_on_uniform_mesh(self, alpha, expected):
        assert theoretical_order(alpha, 1.0, "fitted", smooth=True) == pytest.approx(expected)
        assert theoretical_order(alpha, 1.0, "fitted") == pytest.approx(min(2.0 * alpha, 2.0 - alpha))

    @pytest.mark.parametrize("alpha,r,expected", [
        (0.2, 4.5, 1.8), (0.8, 1.0, 1.6), (0.6, 1.0, 1.2), (0.2, 1.0, 0.4),
    ])
    def test_growth(self, alpha, r, expected):
        assert theoretical_growth(alpha, r, SchemeKind.FITTED) == pytest.approx(expected)

    def test_growth_not_defined_for_l1(self):
        assert theoretical_growth(0.5, 3.0, SchemeKind.L1) is None

    def test_rejects_parameters(self):
        with pytest.raises(DomainError):
            theoretical_order(1.0, 1.0, "fitted")
        with pytest.raises(DomainError):
            theoretical_growth(0.5, 0.5, "fitted")


class TestGrading:
    def test_keywords(self):
        assert resolve_grading("optimal", 0.2, "fitted") == pytest.approx(4.5)
        assert resolve_grading("Uniform", 0.2, "fitted") == 1.0
        assert resolve_grading("2.5", 0.2, "l1") == 2.5
        assert resolve_grading(3, 0.2, "l1") == 3.0

    @pytest.mark.parametrize("text", ["steep", "0.5"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            resolve_grading(text, 0.5, "fitted")


class TestCells:
    def test_build_problem_requires_source(self):
        with pytest.raises(ConfigError):
            build_problem(None, 0.5, 1.0)

    def test_build_problem_from_file(self, tmp_path):
        path = tmp_path / "sample.ini"
        path.write_text(sample_problem_text(0.5), encoding="utf-8")
        problem = build_problem(None, 0.5, 2.0, str(path))
        assert problem.T == 2.0
        assert problem.alpha == 0.5
        assert problem.name == "sample"

    def test_file_problem_matches_builtin(self, tmp_path):
        path = tmp_path / "sample.ini"
        path.write_text(sample_problem_text(0.5), encoding="utf-8")
        builtin = evaluate_cell(CellSpec("3", 0.5, "fitted", 2.0, 1.0, 8, 8))
        from_file = evaluate_cell(CellSpec(None, 0.5, "fitted", 2.0, 1.0, 8, 8,
                                           problem_path=str(path)))
        assert from_file.error == pytest.approx(builtin.error, rel=1e-8)

    def test_solve_cell_refines(self):
        cell = CellSpec("3", 0.5, "l1", 2.0, 1.0, 4, 8)
        grid = solve_cell(example3(0.5), cell, refine=2)
        assert grid.temporal.N == 8 and grid.spatial.M == 16

    def test_unknown_metric(self):
        with pytest.raises(ConfigError):
            evaluate_cell(CellSpec("3", 0.5, "fitted", 1.0, 1.0, 4, 4, metric="l2"))

    def test_parallel_matches_serial(self):
        cells = [CellSpec("3", 0.4, "fitted", 1.0, 1.0, N, N) for N in (4, 8, 16)]
        serial = run_cells(cells, workers=1)
        parallel = run_cells(cells, workers=2)
        assert [res.error for res in serial] == [res.error for res in parallel]
        assert [res.cell for res in parallel] == cells


class TestReports:
    def test_exact_problem_rates(self):
        report = convergence_report("exact", 0.4, "fitted", "uniform", [4, 8], [4, 8], 1.0)
        assert max(report.errors) < 1e-13
        assert report.rates == [None]
        assert report.rate_cells() == ["exact", ""]

    def test_example3_converges(self):
        report = convergence_report("3", 0.5, SchemeKind.L1, "optimal", [8, 16, 32],
                                    [8, 16, 32], 1.0)
        assert report.r == pytest.approx(3.0)
        assert report.toc == pytest.approx(1.5)
        assert report.errors[0] > report.errors[1] > report.errors[2]
        assert all(rate > 0.8 for rate in report.rates)

        frame = report.to_frame()
        assert list(frame['N']) == [8, 16, 32]
        assert frame['rate'].iloc[-1] == ""

    @pytest.mark.parametrize("alpha,expected", [(0.2, 4.832e-3), (0.4, 1.323e-2)])
    def test_example3_smooth_table_cell(self, alpha, expected):
        # 非齐次边界 u(0,t) = u(1,t) = 5t^{3+α}，M = 4N
        report = convergence_report("3", alpha, "fitted", "uniform", [16], [64], 1.0)
        assert report.errors[0] == pytest.approx(expected, rel=0.01)
        assert report.toc == pytest.approx(2.0 - alpha)

    def test_two_mesh_report(self):
        report = convergence_report("2", 0.6, "fitted", "optimal", [8, 16], [8, 16], 1.0,
                                    metric=METRIC_TWO_MESH)
        assert report.problem_label == "D^{M,N}"
        assert report.errors[0] > report.errors[1] > 0.0

    def test_single_size_has_no_rates(self):
        report = convergence_report("3", 0.5, "fitted", "uniform", [8], [8], 1.0)
        assert report.rates == []
        assert report.rate_cells() == [""]

    def test_rejects_mismatched_sizes(self):
        with pytest.raises(ConfigError):
            convergence_report("3", 0.5, "fitted", "uniform", [8, 16], [8], 1.0)
        with pytest.raises(ConfigError):
            convergence_report("3", 0.5, "fitted", "uniform", [8, 24], [8, 16], 1.0)

    def test_growth_report(self):
        report = growth_report("3", 0.5, "fitted", "uniform", [8, 16], [8, 16])
        assert report.expected == pytest.approx(1.0)
        assert len(report.growth) == 2
        for e1, e10, g in zip(report.errors_T1, report.errors_T10, report.growth):
            assert g == pytest.approx(math.log10(e10 / e1))

    def test_growth_report_normalises_interval(self):
        report = growth_report("3", 0.5, "fitted", "uniform", [8], [8], times=(1.0, 4.0))
        e1, e4 = report.errors_T1[0], report.errors_T10[0]
        assert report.growth[0] == pytest.approx(math.log10(e4 / e1) / math.log10(4.0))

    def test_growth_report_rejects_times(self):
        with pytest.raises(ConfigError):
            growth_report("3", 0.5, "fitted", "uniform", [8], [8], times=(2.0, 1.0))
