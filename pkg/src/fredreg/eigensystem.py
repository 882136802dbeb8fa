"""Kernels, eigensystems, and quadrature on [a, b].

The integral operator (Af)(x) = int_a^b K(x,y) f(y) dy with a real symmetric
square-integrable kernel has an orthonormal eigenbasis {psi_k} with positive
decreasing eigenvalues {lam_k}.  This module supplies

  * composite-Simpson quadrature grids (inner products, norms),
  * the closed-form eigensystem of the triangular sample kernel
    K(x,y) = (1-x)y for y <= x, x(1-y) for y >= x on [0,1], whose
    eigenpairs are psi_k = sqrt(2) sin(k pi x), lam_k = 1/(k^2 pi^2),
  * a Nystrom-style numeric eigensystem for tabulated symmetric kernels,
  * projection onto and reconstruction from the eigenbasis.

Quadrature note: on a uniform grid of M+1 points the Simpson weights couple
sine modes with i + j = M (Gram entries ~1/6).  Orthonormality is therefore
only meaningful well below the grid Nyquist index; the default 513-point grid
is exact (to rounding) for i + j < 512.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

__all__ = [
    "QuadratureGrid",
    "simpson_grid",
    "EigenSystem",
    "TabulatedKernel",
    "EigenDecompositionError",
    "sample_kernel_eval",
    "sample_kernel_matrix",
    "analytic_eigensystem",
    "numeric_eigensystem",
    "project",
    "project_all",
    "reconstruct",
    "apply_kernel",
    "load_kernel_csv",
]

DEFAULT_GRID_SIZE = 513
DEFAULT_N_MAX = 64


class EigenDecompositionError(RuntimeError):
    """Numeric eigensystem could not be extracted reliably."""


@dataclass(frozen=True)
class QuadratureGrid:
    """Abscissae and weights discretizing the L2(a, b) inner product."""

    points: np.ndarray
    weights: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        if pts.ndim != 1 or pts.shape != wts.shape or pts.size < 3:
            raise ValueError("grid needs matching 1-d points/weights with >= 3 nodes")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if pts[0] < self.a - 1e-12 or pts[-1] > self.b + 1e-12:
            raise ValueError("grid points must lie in [a, b]")
        if abs(wts.sum() - (self.b - self.a)) > 1e-12:
            raise ValueError("quadrature weights must sum to b - a")

    @property
    def size(self) -> int:
        return self.points.size

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.sum(self.weights * np.asarray(f) * np.asarray(g)))

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.weights * np.asarray(f) ** 2)))


def simpson_grid(n: int = DEFAULT_GRID_SIZE, a: float = 0.0, b: float = 1.0) -> QuadratureGrid:
    """Composite Simpson rule on a uniform grid; n must be odd and >= 3."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"composite Simpson needs an odd point count >= 3, got {n}")
    pts = np.linspace(a, b, n)
    h = (b - a) / (n - 1)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    w *= h / 3.0
    # rounding can leave sum(w) off b-a by a few ulp; renormalize exactly
    w *= (b - a) / w.sum()
    return QuadratureGrid(points=pts, weights=w, a=a, b=b)


@dataclass(frozen=True)
class EigenSystem:
    """Ordered eigenpairs {psi_k, lam_k}, k = 1..count, of a symmetric kernel."""

    eigenvalues: np.ndarray
    evaluator: Callable[[int, np.ndarray], np.ndarray]
    count: int
    kind: str  # "analytic-sample-kernel" | "numeric-tabulated"

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", vals)
        if vals.size != self.count:
            raise ValueError("eigenvalue list does not match count")
        if np.any(vals <= 0):
            raise ValueError("eigenvalues must be strictly positive")
        if np.any(np.diff(vals) >= 0):
            raise ValueError("eigenvalues must be strictly decreasing")

    def eigenvalue(self, k: int) -> float:
        self._check_index(k)
        return float(self.eigenvalues[k - 1])

    def eigenfunction(self, k: int, x: np.ndarray) -> np.ndarray:
        self._check_index(k)
        return self.evaluator(k, np.asarray(x, dtype=float))

    def basis_matrix(self, x: np.ndarray, upto: int | None = None) -> np.ndarray:
        """psi_k(x) stacked row-wise for k = 1..upto."""
        upto = self.count if upto is None else upto
        self._check_index(upto)
        x = np.asarray(x, dtype=float)
        return np.vstack([self.evaluator(k, x) for k in range(1, upto + 1)])

    def _check_index(self, k: int) -> None:
        if not 1 <= k <= self.count:
            raise IndexError(f"eigenpair index {k} outside 1..{self.count}")


@dataclass(frozen=True)
class TabulatedKernel:
    """Symmetric kernel sampled on the tensor grid of a QuadratureGrid."""

    values: np.ndarray
    grid: QuadratureGrid

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        n = self.grid.size
        if vals.shape != (n, n):
            raise ValueError(f"kernel matrix must be {n}x{n} to match its grid")
        if np.max(np.abs(vals - vals.T)) > 1e-12:
            raise ValueError("kernel matrix must be symmetric within 1e-12")


def sample_kernel_eval(x: float, y: float) -> float:
    """Triangular sample kernel on the unit square: (1-x)y if y <= x, else x(1-y)."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"sample kernel defined on [0,1]^2, got ({x}, {y})")
    if y <= x:
        return (1.0 - x) * y
    return x * (1.0 - y)


def sample_kernel_matrix(grid: QuadratureGrid) -> TabulatedKernel:
    """Tabulate the sample kernel on a grid (grid must lie in [0, 1])."""
    x = grid.points
    X, Y = np.meshgrid(x, x, indexing="ij")
    vals = np.where(Y <= X, (1.0 - X) * Y, X * (1.0 - Y))
    return TabulatedKernel(values=vals, grid=grid)


def _sine_evaluator(k: int, x: np.ndarray) -> np.ndarray:
    return np.sqrt(2.0) * np.sin(k * np.pi * x)


def analytic_eigensystem(n_max: int = DEFAULT_N_MAX) -> EigenSystem:
    """Closed-form eigensystem of the sample kernel: lam_k = 1/(k pi)^2."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ks = np.arange(1, n_max + 1)
    return EigenSystem(
        eigenvalues=1.0 / (ks * np.pi) ** 2,
        evaluator=_sine_evaluator,
        count=n_max,
        kind="analytic-sample-kernel",
    )


def numeric_eigensystem(kernel: TabulatedKernel, n_max: int) -> EigenSystem:
    """Largest n_max eigenpairs of W^(1/2) K W^(1/2), mapped back to grid functions.

    Eigenfunctions are weight-orthonormalized, sign-fixed so the first nonzero
    grid value is positive, and evaluated off-grid by linear interpolation.
    Raises EigenDecompositionError on non-convergence, on eigenvalues <= 1e-14
    (rank deficiency), and on numerically repeated eigenvalues.
    """
    grid = kernel.grid
    npts = grid.size
    if not 1 <= n_max <= npts:
        raise ValueError(f"n_max must be in 1..{npts}")
    sw = np.sqrt(grid.weights)
    sym = sw[:, None] * kernel.values * sw[None, :]
    try:
        if n_max <= npts // 8:
            # Lanczos with a fixed start vector keeps large grids fast and deterministic
            vals, vecs = scipy.sparse.linalg.eigsh(
                sym, k=n_max, which="LA", v0=np.ones(npts)
            )
        else:
            vals, vecs = scipy.linalg.eigh(sym)
    except (np.linalg.LinAlgError, scipy.sparse.linalg.ArpackError) as exc:
        raise EigenDecompositionError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(vals)[::-1][:n_max]
    vals = vals[order]
    vecs = vecs[:, order]
    if np.any(vals <= 1e-14):
        raise EigenDecompositionError(
            f"requested {n_max} eigenpairs but smallest eigenvalue is {vals.min():.3e}"
        )
    rel_gap = np.diff(vals) / vals[:-1]
    if np.any(rel_gap > -1e-9):
        raise EigenDecompositionError("numerically repeated eigenvalues; basis is ambiguous")

    funcs = vecs / sw[:, None]  # quadrature-orthonormal grid functions, column k-1
    for j in range(n_max):
        col = funcs[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))[0]
        if nz.size and col[nz[0]] < 0:
            funcs[:, j] = -col
    pts = grid.points.copy()
    table = funcs.T.copy()

    def evaluator(k: int, x: np.ndarray) -> np.ndarray:
        return np.interp(x, pts, table[k - 1])

    return EigenSystem(
        eigenvalues=vals, evaluator=evaluator, count=n_max, kind="numeric-tabulated"
    )


def project(f: np.ndarray, es: EigenSystem, k: int, grid: QuadratureGrid) -> float:
    """Quadrature approximation of the inner product (f, psi_k)."""
    es._check_index(k)
    return grid.inner(np.asarray(f, dtype=float), es.eigenfunction(k, grid.points))


def project_all(f: np.ndarray, es: EigenSystem, grid: QuadratureGrid, upto: int | None = None) -> np.ndarray:
    """Coefficients (f, psi_k) for k = 1..upto in one matrix product."""
    basis = es.basis_matrix(grid.points, upto)
    return basis @ (grid.weights * np.asarray(f, dtype=float))


def reconstruct(
    coeffs: Sequence[tuple[int, float]], es: EigenSystem, grid: QuadratureGrid
) -> np.ndarray:
    """Sum of coeff_k * psi_k on the grid; an empty list gives the zero function."""
    out = np.zeros(grid.size)
    for k, value in coeffs:
        es._check_index(int(k))
        out += value * es.eigenfunction(int(k), grid.points)
    return out


def apply_kernel(kernel: TabulatedKernel, f: np.ndarray) -> np.ndarray:
    """Quadrature application of the integral operator to a grid function."""
    return kernel.values @ (kernel.grid.weights * np.asarray(f, dtype=float))


def load_kernel_csv(path: str, grid: QuadratureGrid | None = None) -> TabulatedKernel:
    """Load a tabulated kernel from CSV.

    Two layouts are accepted: a triplet table with header "x,y,value" covering
    the full tensor grid (the grid is inferred from the x column), or a dense
    matrix (no header) paired with an explicit `grid`.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty kernel file")
    header = [c.strip().lower() for c in rows[0]]
    if header == ["x", "y", "value"]:
        data = np.array([[float(c) for c in row] for row in rows[1:]])
        xs = np.unique(data[:, 0])
        n = xs.size
        if data.shape[0] != n * n:
            raise ValueError(f"{path}: triplet table must cover the full {n}x{n} grid")
        if grid is None:
            if xs[-1] == xs[0]:
                raise ValueError(f"{path}: cannot infer grid endpoints; pass grid=")
            grid = simpson_grid(n, a=float(xs[0]), b=float(xs[-1]))
        ix = np.searchsorted(xs, data[:, 0])
        iy = np.searchsorted(xs, data[:, 1])
        vals = np.zeros((n, n))
        vals[ix, iy] = data[:, 2]
        return TabulatedKernel(values=vals, grid=grid)
    if grid is None:
        raise ValueError(f"{path}: dense matrix form needs an explicit grid= (sidecar grid file)")
    vals = np.array([[float(c) for c in row] for row in rows])
    return TabulatedKernel(values=vals, grid=grid)
