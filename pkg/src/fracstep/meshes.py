"""Time meshes on [0, 1] and the boundary-graded spatial mesh.

The geometric mesh covers [0, 1] with dyadic intervals [2**(i-1-L), 2**(i-L)]
plus the leading [0, 2**-L], each split into N equal steps; it resolves the
t -> 0 singularity of the evolution being stepped.  The uniform mesh is the
plain N-step grid.  The graded spatial mesh reuses the same dyadic layout,
restricted to [0, 1/2] and reflected, to concentrate elements at the domain
endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TimeMesh:
    """Ordered breakpoints of a stepping grid on [0, 1].

    kind is "geometric" (L+1 dyadic intervals times N substeps) or
    "uniform" (N equal steps).  ``t_left`` and ``k`` hold, per step, the
    left endpoint and the step size actually used by the recurrences.
    """

    kind: str
    N: int
    L: int | None
    breakpoints: np.ndarray

    def __post_init__(self):
        self.breakpoints.setflags(write=False)

    @property
    def num_steps(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def t_left(self) -> np.ndarray:
        return self.breakpoints[:-1]

    @property
    def k(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def step_of(self, n: int, j: int | None = None):
        """(k_n, t_{n,j}) accessor.

        Geometric meshes index by coarse interval n in [0, L] and substep
        j in [0, N]; uniform meshes take the step index n alone.
        """
        if self.kind == "geometric":
            if j is None:
                raise ValueError("geometric meshes need both n and j")
            if not (0 <= n <= self.L and 0 <= j <= self.N):
                raise IndexError(f"(n, j) = ({n}, {j}) outside mesh")
            base = n * self.N
            k_n = self.breakpoints[base + 1] - self.breakpoints[base]
            return k_n, self.breakpoints[base + j]
        if not 0 <= n <= self.N:
            raise IndexError(f"step {n} outside mesh")
        return 1.0 / self.N, self.breakpoints[n]


def refinement_level_for(lambda_max: float) -> int:
    """Smallest L with 2**-L <= 1/lambda_max, i.e. ceil(log2(lambda_max))."""
    return math.ceil(math.log2(lambda_max))


def experiment_refinement_level(h_min: float) -> int:
    """The experiments' choice L = ceil(2 |log h| / log 2) for mesh size h."""
    return math.ceil(2.0 * abs(math.log2(h_min)))


def build_geometric_mesh(lambda_max: float | None, N: int, L_override: int | None = None) -> TimeMesh:
    """Geometrically refined mesh with (L+1)*N intervals.

    L defaults to ceil(log2(lambda_max)), which guarantees
    k_0 * lambda_max <= 1/N.  Breakpoints are exact dyadics; every coarse
    interval endpoint t_{n,N} coincides bit-for-bit with t_{n+1}.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if L_override is not None:
        if L_override < 1:
            raise ValueError(f"L_override must be >= 1, got {L_override}")
        L = int(L_override)
    else:
        if lambda_max is None or lambda_max <= 1.0:
            raise ValueError("lambda_max must exceed 1 when L_override is not given")
        L = refinement_level_for(lambda_max)

    coarse = [0.0] + [math.ldexp(1.0, i - 1 - L) for i in range(1, L + 2)]
    pts = np.empty((L + 1) * N + 1)
    pts[0] = 0.0
    idx = 1
    for n in range(L + 1):
        k_n = (coarse[n + 1] - coarse[n]) / N
        for j in range(1, N):
            pts[idx] = coarse[n] + j * k_n
            idx += 1
        pts[idx] = coarse[n + 1]  # pin: keeps dyadic endpoints exact for any N
        idx += 1
    return TimeMesh(kind="geometric", N=N, L=L, breakpoints=pts)


def build_uniform_mesh(N: int) -> TimeMesh:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    pts = np.arange(N + 1, dtype=np.float64) / N
    pts[-1] = 1.0
    return TimeMesh(kind="uniform", N=N, L=None, breakpoints=pts)


def graded_refinement_level(N: int) -> int:
    """Spatial grading depth: smallest L with 2**-L < h**2 for h = 1/(4N)."""
    h = 1.0 / (4 * N)
    return int(math.floor(2 * math.log2(1.0 / h))) + 1


def build_graded_spatial_mesh(N: int) -> np.ndarray:
    """Boundary-graded node set on [0, 1], symmetric about 1/2.

    On [0, 1/2] the dyadic intervals [2**(n-1-L), 2**(n-L)] for n < L plus
    the leading [0, 2**-L] are each split into N equal elements, giving
    element size h = 1/(4N) on [1/4, 1/2] and a first element narrower than
    h**2; the right half mirrors the left.  2*L*N elements in total.
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    L = graded_refinement_level(N)
    coarse = [0.0] + [math.ldexp(1.0, n - 1 - L) for n in range(1, L + 1)]
    left = [0.0]
    for n in range(L):
        k_n = (coarse[n + 1] - coarse[n]) / N
        for j in range(1, N):
            left.append(coarse[n] + j * k_n)
        left.append(coarse[n + 1])
    left = np.asarray(left)
    right = 1.0 - left[:-1][::-1]
    return np.concatenate([left, right])
