"""Experiment harness: convergence tables, the spatial-refinement study and
scalar-sweep diagnostics, all emitted as provenance-carrying CSV rows.

Conventions baked in here (they reproduce the published tables):

* Convergence order between step-count levels n and 2n is
  log(E_n / E_2n) / log(2), evaluated at n = 8 for the 1D tables and at
  n = 2 refinement units for the 2D tables.
* Each table column "N" means N substeps per dyadic interval for the
  geometric scheme, i.e. (L+1)*N steps in total.  Uniform runs in the same
  table use the same total step budget (L+1)*N, which is how the two
  schemes are compared solve-for-solve.
* The spatial-refinement study reports, per graded mesh, the smallest
  geometric step count whose error drops below a semi-discrete error proxy:
  the mismatch between this mesh's reference solution and a much finer
  graded mesh's solution (flagged as proxy in the output).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .fem import (
    DiscreteOperator,
    GridFunction,
    assemble_1d,
    assemble_2d_tensor,
    l2_project,
    m_norm,
)
from .meshes import (
    build_geometric_mesh,
    build_graded_spatial_mesh,
    build_uniform_mesh,
    experiment_refinement_level,
    refinement_level_for,
)
from .scalar import ScalarRunConfig, fit_loglog_slope, scalar_error_sweep
from .solvers import SolverPolicy
from .spectral import eig_1d, eig_2d_tensor, reference_power
from .stepping import StepperConfig, estimate_spectral_bounds, run_grm, run_um

DEFAULT_DELTA_FRACTION = 0.5


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment request; field names mirror the CLI flags."""

    dimension: int = 1
    data_cases: tuple = ("a", "b", "c", "d")
    alphas: tuple = (0.1, 0.5, 0.9)
    ms: tuple = (1, 2)
    scheme: str = "both"  # grm | um | both
    Ns: tuple = (8, 16)
    h: float = 1e-3
    n_per_side: int = 100
    L_policy: str = "experiment"  # theorem | experiment | fixed
    L_fixed: int | None = None
    delta: float | None = None
    delta_fraction: float = DEFAULT_DELTA_FRACTION
    solver: SolverPolicy = SolverPolicy()
    seed: int = 0
    um_steps: int = 100_000
    output: str | None = None

    def __post_init__(self):
        if self.scheme not in ("grm", "um", "both"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if list(self.Ns) != sorted(set(self.Ns)):
            raise ValueError("Ns must be strictly increasing")
        for a in self.alphas:
            if not 0 < a < 1:
                raise ValueError(f"alpha {a} outside (0, 1)")
        if self.L_policy not in ("theorem", "experiment", "fixed"):
            raise ValueError(f"unknown L policy {self.L_policy!r}")
        if self.L_policy == "fixed" and not self.L_fixed:
            raise ValueError("L_policy 'fixed' needs L_fixed")


def convergence_order(e_n: float, e_2n: float) -> float:
    """log2 of the error drop when the step count doubles."""
    if e_n <= 0 or e_2n <= 0:
        raise ValueError("convergence_order needs positive errors")
    return math.log(e_n / e_2n) / math.log(2.0)


def _resolve_L(spec: ExperimentSpec, op: DiscreteOperator, h_min: float, seed: int) -> int:
    if spec.L_policy == "fixed":
        return int(spec.L_fixed)
    if spec.L_policy == "experiment":
        return experiment_refinement_level(h_min)
    bounds = estimate_spectral_bounds(op, seed=seed)
    return refinement_level_for(bounds.lambda_max_est)


def _resolve_delta(spec: ExperimentSpec, op: DiscreteOperator) -> float:
    if spec.delta is not None:
        return float(spec.delta)
    bounds = estimate_spectral_bounds(op, seed=spec.seed)
    return spec.delta_fraction * bounds.lambda_min_est


def _provenance(spec: ExperimentSpec, delta: float) -> dict:
    return {
        "delta": delta,
        "solver": spec.solver.method,
        "solver_rtol": spec.solver.rtol,
        "seed": spec.seed,
    }


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12e}"
    return str(value)


def write_csv(rows: list[dict], path_or_file) -> None:
    """Write rows with a header naming every column; floats at 12 digits."""
    if not rows:
        return
    fields = list(rows[0].keys())
    close = False
    if isinstance(path_or_file, (str, bytes)):
        fh = open(path_or_file, "w", newline="")
        close = True
    else:
        fh = path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row[f]) for f in fields])
    finally:
        if close:
            fh.close()


# ---------------------------------------------------------------------------
# 1D / 2D convergence tables
# ---------------------------------------------------------------------------

def _table_runs(spec: ExperimentSpec, op: DiscreteOperator, decomp, L: int) -> list[dict]:
    delta = _resolve_delta(spec, op)
    prov = _provenance(spec, delta)
    schemes = ("grm", "um") if spec.scheme == "both" else (spec.scheme,)
    rows = []
    for tag in spec.data_cases:
        f = l2_project(op, tag)
        for alpha in spec.alphas:
            ref = reference_power(decomp, f, alpha)
            ref_norm = m_norm(op, ref)
            for m in spec.ms:
                for scheme in schemes:
                    errors = {}
                    for N in spec.Ns:
                        if scheme == "grm":
                            mesh = build_geometric_mesh(None, N, L_override=L)
                            runner = run_grm
                        else:
                            mesh = build_uniform_mesh((L + 1) * N)
                            runner = run_um
                        cfg = StepperConfig(alpha=alpha, m=m, delta=delta,
                                            mesh=mesh, solver=spec.solver)
                        out, stats = runner(f, op, cfg, return_stats=True)
                        diff = GridFunction(out.coeffs - ref.coeffs, op)
                        err = m_norm(op, diff) / ref_norm
                        errors[N] = err
                        order = (
                            convergence_order(errors[N // 2], err)
                            if N // 2 in errors else float("nan")
                        )
                        rows.append({
                            "dimension": spec.dimension,
                            "scheme": scheme.upper(),
                            "case": tag,
                            "alpha": alpha,
                            "m": m,
                            "L": L,
                            "N": N,
                            "steps": mesh.num_steps,
                            # one shifted solve per pole per step
                            "solves": stats.solves,
                            "rel_error": err,
                            "order_vs_prev": order,
                            "max_step_growth": stats.max_growth,
                            **prov,
                        })
    return rows


def run_table_1d(spec: ExperimentSpec) -> list[dict]:
    """Relative-error/order table on a uniform 1D mesh of size h."""
    if spec.dimension != 1:
        raise ValueError("run_table_1d needs a 1D spec")
    n = int(round(1.0 / spec.h))
    op = assemble_1d(np.linspace(0.0, 1.0, n + 1))
    decomp = eig_1d(op)
    L = _resolve_L(spec, op, spec.h, spec.seed)
    rows = _table_runs(spec, op, decomp, L)
    if spec.output:
        write_csv(rows, spec.output)
    return rows


def run_table_2d(spec: ExperimentSpec) -> list[dict]:
    """Tables on the tensor grid; terminal order evaluated at N = 2 -> 4."""
    op = assemble_2d_tensor(spec.n_per_side)
    decomp = eig_2d_tensor(op)
    spec2 = replace(spec, dimension=2)
    L = _resolve_L(spec2, op, 1.0 / spec.n_per_side, spec.seed)
    rows = _table_runs(spec2, op, decomp, L)
    if spec.output:
        write_csv(rows, spec.output)
    return rows


# ---------------------------------------------------------------------------
# spatial refinement study
# ---------------------------------------------------------------------------

def _graded_setup(N: int, alpha: float, delta_fraction: float, solver, seed: int):
    nodes = build_graded_spatial_mesh(N)
    op = assemble_1d(nodes)
    h_min = nodes[1] - nodes[0]
    L = experiment_refinement_level(h_min)
    bounds = estimate_spectral_bounds(op, seed=seed)
    delta = delta_fraction * bounds.lambda_min_est
    f = l2_project(op, "d")
    return nodes, op, L, delta, f


def _grm_at(op, f, alpha, m, delta, L, Nt, solver, return_stats=False):
    mesh = build_geometric_mesh(None, Nt, L_override=L)
    cfg = StepperConfig(alpha=alpha, m=m, delta=delta, mesh=mesh, solver=solver)
    return run_grm(f, op, cfg, return_stats=return_stats)


def _smallest_passing_Nt(op, f, alpha, m, delta, L, u_ref, threshold, solver,
                         Nt_cap=4096):
    """Smallest per-interval count whose geometric run beats the threshold."""
    def error_at(Nt):
        out = _grm_at(op, f, alpha, m, delta, L, Nt, solver)
        return m_norm(op, GridFunction(out.coeffs - u_ref.coeffs, op))

    lo, hi = 0, 1
    err_hi = error_at(hi)
    while err_hi > threshold:
        lo, hi = hi, hi * 2
        if hi > Nt_cap:
            raise RuntimeError(f"no Nt <= {Nt_cap} reaches threshold {threshold:.3e}")
        err_hi = error_at(hi)
    # invariant: error(hi) <= threshold < error(lo) (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if error_at(mid) <= threshold:
            hi = mid
        else:
            lo = mid
    return hi, error_at(hi)


def run_spatial_refinement(spec: ExperimentSpec, alpha: float = 0.5,
                           reference_factor: int = 4,
                           reference_Nt: int = 32) -> list[dict]:
    """Graded-mesh study: per N, the step count needed to reach the
    semi-discrete error proxy, plus the uniform scheme's error at a large
    fixed step count (default 1e5)."""
    Ns = spec.Ns
    solver = spec.solver
    # fine-mesh solution used as the stand-in for the continuum limit
    N_fine = max(Ns) * reference_factor
    fnodes, fop, fL, fdelta, ff = _graded_setup(
        N_fine, alpha, spec.delta_fraction, solver, spec.seed)
    u_fine = _grm_at(fop, ff, alpha, 2, fdelta, fL, reference_Nt, solver)
    xp = np.concatenate([[0.0], fop.dof_coords, [1.0]])
    fp = np.concatenate([[0.0], u_fine.coeffs, [0.0]])

    rows = []
    for N in Ns:
        nodes, op, L, delta, f = _graded_setup(
            N, alpha, spec.delta_fraction, solver, spec.seed)
        nx = len(nodes) - 1
        u_ref = _grm_at(op, f, alpha, 2, delta, L, reference_Nt, solver)
        fine_here = GridFunction(np.interp(op.dof_coords, xp, fp), op)
        threshold = m_norm(op, GridFunction(fine_here.coeffs - u_ref.coeffs, op))
        row = {
            "N": N, "nx": nx, "L": L,
            "e_semi_proxy": threshold,
            "threshold_kind": "proxy_fine_mesh",
        }
        growth = 0.0
        for m in spec.ms:
            Nt, err = _smallest_passing_Nt(
                op, f, alpha, m, delta, L, u_ref, threshold, solver)
            _, stats = _grm_at(op, f, alpha, m, delta, L, Nt, solver,
                               return_stats=True)
            growth = max(growth, stats.max_growth)
            row[f"NS_m{m}"] = (L + 1) * Nt
            row[f"E_GRM_m{m}"] = err
            cfg = StepperConfig(alpha=alpha, m=m, delta=delta,
                                mesh=build_uniform_mesh(spec.um_steps), solver=solver)
            u_um, um_stats = run_um(f, op, cfg, return_stats=True)
            growth = max(growth, um_stats.max_growth)
            row[f"E_UM_m{m}"] = m_norm(op, GridFunction(u_um.coeffs - u_ref.coeffs, op))
        row["max_step_growth"] = growth
        row.update(_provenance(spec, delta))
        rows.append(row)
    if spec.output:
        write_csv(rows, spec.output)
    return rows


# ---------------------------------------------------------------------------
# scalar diagnostics
# ---------------------------------------------------------------------------

def run_scalar_diagnostics(alphas=(0.1, 0.5, 0.9), ms=(1, 2), Ns=(8, 16, 32, 64),
                           lambda_range=(1.0, 1e6), delta=0.5, points=1000,
                           output=None) -> list[dict]:
    """Sup-error sweeps over a lambda grid with fitted convergence slopes."""
    lams = np.logspace(math.log10(lambda_range[0]), math.log10(lambda_range[1]), points)
    lam_max = float(lambda_range[1])
    rows = []
    for m in ms:
        for alpha in alphas:
            for scheme in ("grm", "um"):
                sups = []
                for N in Ns:
                    if scheme == "grm":
                        cfg = ScalarRunConfig.grm(alpha, delta, m, lam_max, N)
                    else:
                        cfg = ScalarRunConfig.um(alpha, delta, m, N)
                    sups.append(float(np.max(scalar_error_sweep(lams, cfg))))
                slope = fit_loglog_slope(Ns, sups)
                for N, sup in zip(Ns, sups):
                    rows.append({
                        "scheme": scheme.upper(), "m": m, "alpha": alpha,
                        "N": N, "sup_error": sup, "fitted_slope": slope,
                        "delta": delta, "lambda_lo": lambda_range[0],
                        "lambda_hi": lambda_range[1], "points": points,
                    })
    if output:
        write_csv(rows, output)
    return rows
