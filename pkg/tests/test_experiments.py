import io

import numpy as np
import pytest

from fracstep.experiments import (
    ExperimentSpec,
    convergence_order,
    run_scalar_diagnostics,
    run_spatial_refinement,
    run_table_1d,
    run_table_2d,
    write_csv,
)
from fracstep.solvers import SolverPolicy


class TestConvergenceOrder:
    def test_quartering_gives_two(self):
        assert convergence_order(4.0e-3, 1.0e-3) == pytest.approx(2.0, abs=1e-14)

    def test_equal_errors_give_zero(self):
        assert convergence_order(7.7e-5, 7.7e-5) == 0.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            convergence_order(0.0, 1e-3)
        with pytest.raises(ValueError):
            convergence_order(1e-3, -1e-4)


class TestSpecValidation:
    def test_bad_scheme(self):
        with pytest.raises(ValueError):
            ExperimentSpec(scheme="euler")

    def test_unsorted_Ns(self):
        with pytest.raises(ValueError):
            ExperimentSpec(Ns=(16, 8))

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            ExperimentSpec(alphas=(0.5, 1.5))

    def test_fixed_policy_needs_L(self):
        with pytest.raises(ValueError):
            ExperimentSpec(L_policy="fixed")


class TestCsv:
    def test_header_and_determinism(self):
        rows = [{"a": 1, "b": 2.5, "c": "x"}, {"a": 2, "b": 1e-12, "c": "y"}]
        buf1, buf2 = io.StringIO(), io.StringIO()
        write_csv(rows, buf1)
        write_csv(rows, buf2)
        assert buf1.getvalue() == buf2.getvalue()
        lines = buf1.getvalue().splitlines()
        assert lines[0] == "a,b,c"
        assert lines[1].startswith("1,2.5")


@pytest.fixture(scope="module")
def small_1d_rows():
    spec = ExperimentSpec(dimension=1, data_cases=("c",), alphas=(0.5,),
                          ms=(1,), Ns=(8, 16), h=0.01)
    return run_table_1d(spec)


class TestTable1D:
    def test_rows_and_provenance(self, small_1d_rows):
        rows = small_1d_rows
        assert len(rows) == 4  # 2 schemes x 2 N values
        for row in rows:
            assert row["delta"] > 0
            assert row["solver"] == "direct"
            assert row["max_step_growth"] <= 1.0 + 1e-9
            assert row["rel_error"] > 0

    def test_grm_second_order(self, small_1d_rows):
        grm = [r for r in small_1d_rows if r["scheme"] == "GRM"]
        assert grm[-1]["order_vs_prev"] == pytest.approx(2.0, abs=0.1)

    def test_um_budget_convention(self, small_1d_rows):
        um = [r for r in small_1d_rows if r["scheme"] == "UM"]
        for row in um:
            assert row["steps"] == (row["L"] + 1) * row["N"]

    def test_determinism(self, small_1d_rows, tmp_path):
        spec = ExperimentSpec(dimension=1, data_cases=("c",), alphas=(0.5,),
                              ms=(1,), Ns=(8, 16), h=0.01,
                              output=str(tmp_path / "t1.csv"))
        run_table_1d(spec)
        first = (tmp_path / "t1.csv").read_bytes()
        run_table_1d(spec)
        assert (tmp_path / "t1.csv").read_bytes() == first


class TestTable2D:
    def test_small_grid_smoke(self):
        spec = ExperimentSpec(dimension=2, data_cases=("e",), alphas=(0.5,),
                              ms=(2,), Ns=(1, 2), n_per_side=20,
                              L_policy="experiment", scheme="grm")
        rows = run_table_2d(spec)
        assert len(rows) == 2
        assert rows[0]["L"] == 9  # ceil(2 log2 20)
        assert rows[1]["rel_error"] < rows[0]["rel_error"]

    def test_cg_solver_consistent_with_direct(self):
        base = dict(dimension=2, data_cases=("e",), alphas=(0.3,), ms=(2,),
                    Ns=(2,), n_per_side=12, L_policy="experiment", scheme="grm")
        direct = run_table_2d(ExperimentSpec(**base))
        cg = run_table_2d(ExperimentSpec(**base, solver=SolverPolicy("cg", 1e-13)))
        assert cg[0]["rel_error"] == pytest.approx(direct[0]["rel_error"], rel=1e-6)


class TestSpatialRefinement:
    def test_single_level(self):
        spec = ExperimentSpec(dimension=1, data_cases=("d",), ms=(1, 2),
                              Ns=(4,), um_steps=2000)
        rows = run_spatial_refinement(spec, alpha=0.5, reference_factor=4)
        row = rows[0]
        assert row["nx"] == 72
        assert row["NS_m2"] <= row["NS_m1"]
        assert row["E_GRM_m1"] <= row["e_semi_proxy"]
        assert row["E_GRM_m2"] <= row["e_semi_proxy"]
        assert row["threshold_kind"] == "proxy_fine_mesh"


class TestScalarDiagnostics:
    def test_slopes_recorded(self):
        rows = run_scalar_diagnostics(alphas=(0.5,), ms=(1,), Ns=(8, 16, 32),
                                      lambda_range=(1.0, 1e4), points=200)
        grm = [r for r in rows if r["scheme"] == "GRM"]
        um = [r for r in rows if r["scheme"] == "UM"]
        assert grm[0]["fitted_slope"] == pytest.approx(2.0, abs=0.15)
        assert um[0]["fitted_slope"] == pytest.approx(0.5, abs=0.15)
        assert {r["N"] for r in grm} == {8, 16, 32}
