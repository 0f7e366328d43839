"""P1/Q1 finite element assembly on (0,1) and (0,1)^2 with Dirichlet walls.

1D operators are assembled on arbitrary strictly increasing node sets;
2D operators are tensor products of a uniform 1D factor, so the stiffness
and mass matrices satisfy K2 = kron(K, M) + kron(M, K) and M2 = kron(M, M)
exactly.  Boundary rows/columns are eliminated, keeping both matrices SPD.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)

DATA_CASE_DIM = {"a": 1, "b": 1, "c": 1, "d": 1, "e": 2, "f": 2}


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Mass/stiffness pair (M, K) over the interior degrees of freedom.

    For dim == 2 the operator is a tensor product of ``factor`` with itself
    and ``dof_coords`` has shape (n**2, 2) in row-major (x-major) ordering.
    """

    dim: int
    mass: sp.csr_matrix
    stiffness: sp.csr_matrix
    dof_coords: np.ndarray
    nodes: np.ndarray
    factor: "DiscreteOperator | None" = None
    # tridiagonal bands of the 1D matrices, reused heavily by the steppers
    mass_bands: tuple = field(default=None, repr=False)
    stiffness_bands: tuple = field(default=None, repr=False)

    @property
    def n_dofs(self) -> int:
        return self.mass.shape[0]

    @property
    def is_tensor(self) -> bool:
        return self.factor is not None


@dataclass
class GridFunction:
    """Coefficient vector in the interior nodal basis of one operator."""

    coeffs: np.ndarray
    op: DiscreteOperator

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.shape != (self.op.n_dofs,):
            raise ValueError(
                f"coefficient length {self.coeffs.shape} does not match operator "
                f"with {self.op.n_dofs} dofs"
            )

    def copy(self) -> "GridFunction":
        return GridFunction(self.coeffs.copy(), self.op)


def assemble_1d(nodes) -> DiscreteOperator:
    """Assemble interior M, K for piecewise linears on the given nodes.

    Element contributions are the exact integrals of hat functions:
    stiffness (1/h)[[1,-1],[-1,1]] and mass (h/6)[[2,1],[1,2]] per element.
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    if len(nodes) < 3:
        raise ValueError("need at least 3 nodes (one interior dof)")
    h = np.diff(nodes)
    if np.any(h <= 0):
        raise ValueError("nodes must be strictly increasing")
    n = len(nodes) - 2
    hl, hr = h[:-1], h[1:]
    Kd = 1.0 / hl + 1.0 / hr
    Kl = -1.0 / h[1:-1]
    Md = (hl + hr) / 3.0
    Ml = h[1:-1] / 6.0
    K = sp.diags([Kl, Kd, Kl], [-1, 0, 1], format="csr")
    M = sp.diags([Ml, Md, Ml], [-1, 0, 1], format="csr")
    return DiscreteOperator(
        dim=1,
        mass=M,
        stiffness=K,
        dof_coords=nodes[1:-1].copy(),
        nodes=nodes.copy(),
        mass_bands=(Ml.copy(), Md.copy(), Ml.copy()),
        stiffness_bands=(Kl.copy(), Kd.copy(), Kl.copy()),
    )


def assemble_2d_tensor(n_per_side: int) -> DiscreteOperator:
    """Tensor-product bilinear elements on a uniform n x n grid of (0,1)^2."""
    if n_per_side < 3:
        raise ValueError("need n_per_side >= 3 for at least one interior node per axis")
    f1 = assemble_1d(np.linspace(0.0, 1.0, n_per_side + 1))
    K1, M1 = f1.stiffness, f1.mass
    K2 = (sp.kron(K1, M1) + sp.kron(M1, K1)).tocsr()
    M2 = sp.kron(M1, M1).tocsr()
    x = f1.dof_coords
    coords = np.column_stack([np.repeat(x, len(x)), np.tile(x, len(x))])
    return DiscreteOperator(
        dim=2, mass=M2, stiffness=K2, dof_coords=coords, nodes=f1.nodes, factor=f1
    )


# ---------------------------------------------------------------------------
# data cases
# ---------------------------------------------------------------------------

def _case_a(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = (x > 0.0) & (x < 1.0)
    xi = x[inside]
    out[inside] = np.exp(-1.0 / xi - 1.0 / (1.0 - xi) + 4.0)
    return out


def data_case(tag: str, point):
    """Evaluate one of the named right-hand sides.

    1D: (a) exp(-1/x - 1/(1-x) + 4), (b) x(1-x), (c) min(x, 1-x), (d) 1.
    2D: (e) x(1-x) y(1-y), (f) the indicator of [1/4, 3/4]^2.
    ``point`` is a scalar/array for 1D tags and an (x, y) pair (or arrays)
    for 2D tags.
    """
    if tag not in DATA_CASE_DIM:
        raise ValueError(f"unknown data case {tag!r}")
    if DATA_CASE_DIM[tag] == 1:
        x = np.asarray(point, dtype=np.float64)
        if tag == "a":
            val = _case_a(x)
        elif tag == "b":
            val = x * (1.0 - x)
        elif tag == "c":
            val = np.minimum(x, 1.0 - x)
        else:
            val = np.ones_like(x)
        return val if x.ndim else float(val)
    try:
        x, y = point
    except (TypeError, ValueError) as exc:
        raise ValueError(f"data case {tag!r} is 2D and needs an (x, y) point") from exc
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if tag == "e":
        val = x * (1.0 - x) * y * (1.0 - y)
    else:
        val = ((x >= 0.25) & (x <= 0.75) & (y >= 0.25) & (y <= 0.75)).astype(np.float64)
    return val if x.ndim or y.ndim else float(val)


# ---------------------------------------------------------------------------
# load vectors and projection
# ---------------------------------------------------------------------------

def _element_load_1d(nodes, func, split_points=()):
    """b_i = int f phi_i dx with 5-point Gauss per (sub)element.

    Elements crossing a listed split point are integrated on each side, so
    kinks aligned with the splits do not degrade the quadrature.
    """
    nodes = np.asarray(nodes)
    b = np.zeros(len(nodes))
    for e in range(len(nodes) - 1):
        x0, x1 = nodes[e], nodes[e + 1]
        cuts = [x0] + [s for s in split_points if x0 < s < x1] + [x1]
        for a, c in zip(cuts[:-1], cuts[1:]):
            half = (c - a) / 2.0
            xs = (a + c) / 2.0 + half * _GAUSS_X
            fv = func(xs)
            b[e] += half * np.sum(_GAUSS_W * fv * (x1 - xs)) / (x1 - x0)
            b[e + 1] += half * np.sum(_GAUSS_W * fv * (xs - x0)) / (x1 - x0)
    return b[1:-1]


def _indicator_load_1d(nodes, lo=0.25, hi=0.75):
    """Exact hat-function integrals of the indicator of [lo, hi]."""
    nodes = np.asarray(nodes)
    b = np.zeros(len(nodes))
    for e in range(len(nodes) - 1):
        x0, x1 = nodes[e], nodes[e + 1]
        c, d = max(x0, lo), min(x1, hi)
        if d <= c:
            continue
        h = x1 - x0
        b[e] += ((x1 - c) ** 2 - (x1 - d) ** 2) / (2.0 * h)
        b[e + 1] += ((d - x0) ** 2 - (c - x0) ** 2) / (2.0 * h)
    return b[1:-1]


def _mass_solve_1d(op: DiscreteOperator, rhs):
    lo, d, up = op.mass_bands
    return _kernels.tridiag_solve(lo, d, up, rhs)


def load_vector(op: DiscreteOperator, f) -> np.ndarray:
    """Quadrature of f against every interior basis function."""
    if op.dim == 1:
        if isinstance(f, str):
            if DATA_CASE_DIM.get(f) != 1:
                raise ValueError(f"data case {f!r} does not match a 1D operator")
            splits = (0.5,) if f == "c" else ()
            return _element_load_1d(op.nodes, lambda x: data_case(f, x), splits)
        return _element_load_1d(op.nodes, f)
    f1 = op.factor
    if isinstance(f, str):
        if DATA_CASE_DIM.get(f) != 2:
            raise ValueError(f"data case {f!r} does not match a 2D operator")
        if f == "e":
            b1 = _element_load_1d(f1.nodes, lambda x: x * (1.0 - x))
            return np.kron(b1, b1)
        b1 = _indicator_load_1d(f1.nodes)
        return np.kron(b1, b1)
    # generic separable quadrature over the tensor grid, element by element
    n = f1.n_dofs
    b = np.zeros((n + 2, n + 2))
    nodes = f1.nodes
    for ex in range(len(nodes) - 1):
        x0, x1 = nodes[ex], nodes[ex + 1]
        hx = (x1 - x0) / 2.0
        xs = (x0 + x1) / 2.0 + hx * _GAUSS_X
        for ey in range(len(nodes) - 1):
            y0, y1 = nodes[ey], nodes[ey + 1]
            hy = (y1 - y0) / 2.0
            ys = (y0 + y1) / 2.0 + hy * _GAUSS_X
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            F = np.asarray(f((X, Y)), dtype=np.float64) * hx * hy
            wx0 = _GAUSS_W * (x1 - xs) / (x1 - x0)
            wx1 = _GAUSS_W * (xs - x0) / (x1 - x0)
            wy0 = _GAUSS_W * (y1 - ys) / (y1 - y0)
            wy1 = _GAUSS_W * (ys - y0) / (y1 - y0)
            b[ex, ey] += wx0 @ F @ wy0
            b[ex, ey + 1] += wx0 @ F @ wy1
            b[ex + 1, ey] += wx1 @ F @ wy0
            b[ex + 1, ey + 1] += wx1 @ F @ wy1
    return b[1:-1, 1:-1].ravel()


def l2_project(op: DiscreteOperator, f) -> GridFunction:
    """Orthogonal projection of f onto the FEM space: solve M c = b.

    ``f`` is either a data-case tag or a callable; callables receive node
    arrays (1D) or an (X, Y) pair (2D).
    """
    b = load_vector(op, f)
    if op.dim == 1:
        c = _mass_solve_1d(op, b)
    else:
        n = op.factor.n_dofs
        B = b.reshape(n, n)
        C = _mass_solve_1d(op.factor, _mass_solve_1d(op.factor, B).T).T
        c = C.ravel()
    residual = np.linalg.norm(op.mass @ c - b)
    scale = np.linalg.norm(b)
    if scale > 0 and residual > 1e-12 * scale:
        raise ArithmeticError(
            f"projection residual {residual:.2e} exceeds 1e-12 * |b| = {1e-12 * scale:.2e}"
        )
    return GridFunction(c, op)


def m_inner(op: DiscreteOperator, u: GridFunction, v: GridFunction) -> float:
    """The mass-weighted inner product u^T M v (the discrete L2 pairing)."""
    if u.op is not op or v.op is not op:
        raise ValueError("grid functions live on a different operator")
    return float(u.coeffs @ (op.mass @ v.coeffs))


def m_norm(op: DiscreteOperator, u: GridFunction) -> float:
    return float(np.sqrt(max(m_inner(op, u, u), 0.0)))


# ---------------------------------------------------------------------------
# debugging exports
# ---------------------------------------------------------------------------

def export_matrix_coo(matrix, path) -> None:
    """Write a sparse matrix as 'row col value' lines."""
    coo = sp.coo_matrix(matrix)
    with open(path, "w") as fh:
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {v:.17g}\n")


def export_dof_coords_csv(op: DiscreteOperator, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if op.dim == 1:
            writer.writerow(["x"])
            for x in op.dof_coords:
                writer.writerow([f"{x:.17g}"])
        else:
            writer.writerow(["x", "y"])
            for x, y in op.dof_coords:
                writer.writerow([f"{x:.17g}", f"{y:.17g}"])
