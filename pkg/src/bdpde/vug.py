"""Virtual uniform grid: sparse deposit of particle weights into lattice cells.

Cells are hypercubes of side h anchored to the absolute lattice
idx_j = floor(x_j / h). Only occupied cells are stored; the piecewise
constant reconstruction is zero everywhere else. The accumulated weight W_k
of a cell gives the cell average W_k / (n0 * h^d).
"""

from __future__ import annotations

import csv
from typing import Callable, TextIO

import numpy as np

from bdpde.errors import ConfigurationError, NumericalBlowupError
from bdpde.particles import Ensemble

# Above this many addressable lattice cells, weight accumulation falls back
# from bincount to sort-based np.unique.
_BINCOUNT_CAP = 50_000_000


class _IndexedGrid:
    """Shared sparse-lattice machinery: packed-key storage and batched lookup."""

    __slots__ = ("h", "dim", "n0", "indices", "values", "_mins", "_maxs", "_strides", "_keys")

    def __init__(self, h: float, dim: int, n0: int, indices: np.ndarray, values: np.ndarray):
        self.h = float(h)
        self.dim = int(dim)
        self.n0 = int(n0)
        self.indices = indices  # (K, d) int64, sorted by packed key
        self.values = values  # (K,) float64, aligned with indices
        if len(indices):
            self._mins = indices.min(axis=0)
            self._maxs = indices.max(axis=0)
            extents = (self._maxs - self._mins + 1).astype(np.int64)
            strides = np.ones(self.dim, dtype=np.int64)
            for j in range(self.dim - 2, -1, -1):
                strides[j] = strides[j + 1] * extents[j + 1]
            self._strides = strides
            keys = (indices - self._mins) @ strides
            if np.any(keys[1:] <= keys[:-1]):
                order = np.argsort(keys)
                self.indices = indices = indices[order]
                self.values = values = values[order]
                keys = keys[order]
                if np.any(keys[1:] == keys[:-1]):
                    raise ConfigurationError("duplicate cell indices in grid")
            self._keys = keys
        else:
            self._mins = self._maxs = None
            self._strides = self._keys = None

    @property
    def n_cells(self) -> int:
        return len(self.values)

    def cell_volume(self) -> float:
        return self.h**self.dim

    def centers(self) -> np.ndarray:
        """Cell centers ((idx + 1/2) * h), shape (K, d)."""
        return (self.indices + 0.5) * self.h

    def lookup_indices(self, qidx: np.ndarray) -> np.ndarray:
        """Stored values at query cell indices (M, d); 0.0 for absent cells."""
        qidx = np.atleast_2d(np.asarray(qidx, dtype=np.int64))
        out = np.zeros(len(qidx), dtype=np.float64)
        if self._keys is None or not len(qidx):
            return out
        inside = np.all((qidx >= self._mins) & (qidx <= self._maxs), axis=1)
        if not inside.any():
            return out
        qkeys = (qidx[inside] - self._mins) @ self._strides
        pos = np.searchsorted(self._keys, qkeys)
        pos = np.minimum(pos, len(self._keys) - 1)
        hit = self._keys[pos] == qkeys
        vals = np.where(hit, self.values[pos], 0.0)
        out[inside] = vals
        return out

    def _points_to_indices(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None] if self.dim == 1 else points[None, :]
        return np.floor(points / self.h).astype(np.int64)


class SparseGrid(_IndexedGrid):
    """Accumulated signed particle weight per occupied cell."""

    def lookup_weight(self, qidx: np.ndarray) -> np.ndarray:
        return self.lookup_indices(qidx)

    def cell_averages(self) -> np.ndarray:
        """Piecewise-constant solution values on the occupied cells."""
        return self.values / (self.n0 * self.cell_volume())

    def values_at(self, points) -> np.ndarray:
        """Piecewise-constant reconstruction evaluated at arbitrary points."""
        qidx = self._points_to_indices(points)
        return self.lookup_indices(qidx) / (self.n0 * self.cell_volume())

    def gradient_at(self, points) -> np.ndarray:
        """Central-difference gradient of the reconstruction, shape (M, d).

        Component j uses the cell averages one cell away along axis j;
        absent neighbors contribute 0.
        """
        qidx = self._points_to_indices(points)
        grad = np.empty((len(qidx), self.dim), dtype=np.float64)
        scale = 1.0 / (self.n0 * self.cell_volume())
        for j in range(self.dim):
            shift = np.zeros(self.dim, dtype=np.int64)
            shift[j] = 1
            right = self.lookup_indices(qidx + shift) * scale
            left = self.lookup_indices(qidx - shift) * scale
            grad[:, j] = (right - left) / (2.0 * self.h)
        return grad

    def l1_mass(self) -> float:
        """Discrete L1 mass: sum over cells of |cell average| * h^d."""
        return float(np.abs(self.values).sum()) / self.n0

    def signed_l1_mass(self) -> float:
        """Signed counterpart: sum over cells of (cell average) * h^d."""
        return float(self.values.sum()) / self.n0

    def dump_csv(self, stream: TextIO) -> None:
        """Debug dump: idx_1,...,idx_d,accumulated_weight,cell_average rows."""
        writer = csv.writer(stream)
        writer.writerow([f"idx_{j + 1}" for j in range(self.dim)] + ["accumulated_weight", "cell_average"])
        averages = self.cell_averages()
        for k in range(self.n_cells):
            writer.writerow(
                [*map(int, self.indices[k]), repr(float(self.values[k])), repr(float(averages[k]))]
            )


class FieldGrid(_IndexedGrid):
    """Nonlinear-term values tabulated on the occupied cells of a SparseGrid."""

    def values_at(self, points) -> np.ndarray:
        return self.lookup_indices(self._points_to_indices(points))

    def integral_abs(self) -> float:
        """sum over occupied cells of |f(center)| * h^d."""
        return float(np.abs(self.values).sum()) * self.cell_volume()


def deposit(ensemble: Ensemble, h: float) -> SparseGrid:
    """Bin every particle's weight into its lattice cell floor(x / h).

    Occupancy is by particle presence: a cell whose weights cancel to zero is
    still stored. Total accumulated weight equals the ensemble's total weight
    up to floating-point summation.
    """
    if h <= 0:
        raise ConfigurationError(f"cell side h must be positive, got {h}")
    if ensemble.count() == 0:
        raise ConfigurationError("cannot deposit an empty ensemble")
    idx = np.floor(ensemble.locations / h).astype(np.int64)
    mins = idx.min(axis=0)
    extents = (idx.max(axis=0) - mins + 1).astype(np.int64)
    n_addressable = 1
    for e in extents:
        n_addressable *= int(e)
    if n_addressable >= 2**62:
        raise ConfigurationError("lattice index range too large to address; increase h")
    strides = np.ones(ensemble.dim, dtype=np.int64)
    for j in range(ensemble.dim - 2, -1, -1):
        strides[j] = strides[j + 1] * extents[j + 1]
    keys = (idx - mins) @ strides
    if n_addressable <= _BINCOUNT_CAP:
        acc = np.bincount(keys, weights=ensemble.weights, minlength=n_addressable)
        occupancy = np.bincount(keys, minlength=n_addressable)
        ukeys = np.flatnonzero(occupancy)
        weights = acc[ukeys]
    else:
        ukeys, inverse = np.unique(keys, return_inverse=True)
        weights = np.bincount(inverse, weights=ensemble.weights)
    indices = np.empty((len(ukeys), ensemble.dim), dtype=np.int64)
    rem = ukeys
    for j in range(ensemble.dim):
        indices[:, j] = rem // strides[j] + mins[j]
        rem = rem % strides[j]
    return SparseGrid(h, ensemble.dim, ensemble.n0, indices, weights)


def tabulate_field(grid: SparseGrid, f: "NonlinearTerm", t: float) -> FieldGrid:
    """Evaluate the nonlinear term at every occupied cell center.

    Uses the grid's own reconstruction for u and (when the term needs it)
    the central-difference gradient.
    """
    centers = grid.centers()
    u = grid.cell_averages()
    grad = grid.gradient_at(centers) if f.uses_gradient else None
    values = np.asarray(f(t, centers, u, grad), dtype=np.float64)
    if values.shape != (grid.n_cells,):
        raise ConfigurationError(
            f"nonlinear term returned shape {values.shape}, expected ({grid.n_cells},)"
        )
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise NumericalBlowupError(
            f"non-finite nonlinear term at cell {tuple(map(int, grid.indices[k]))} (t={t})"
        )
    return FieldGrid(grid.h, grid.dim, grid.n0, grid.indices, values)


class NonlinearTerm:
    """Descriptor for f(t, x, u, grad_u), vectorized over cells.

    fn receives (t, centers (K, d), u (K,), grad (K, d) or None) and returns
    a (K,) array. uses_gradient=False skips the gradient computation.
    """

    __slots__ = ("fn", "uses_gradient")

    def __init__(self, fn: Callable, uses_gradient: bool = False):
        self.fn = fn
        self.uses_gradient = uses_gradient

    def __call__(self, t, centers, u, grad):
        return self.fn(t, centers, u, grad)
