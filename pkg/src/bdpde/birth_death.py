"""Birth of particles from the nonlinear increment and annihilation by resampling.

Births: the number of new particles is N(0) * tau * integral(|f|) with
stochastic rounding; locations are drawn cell-categorically proportional to
|f| * h^d and uniformly inside the chosen cell, with unit weight carrying the
sign of f there. Annihilation: the whole cloud is replaced by exactly N(0)
particles resampled from |reconstruction|, each weighted +/-Z where Z is the
discrete L1 mass. The baseline full resample (from |u + tau*f|) is kept for
efficiency comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bdpde.errors import ConfigurationError, DegenerateSolutionError
from bdpde.particles import Ensemble
from bdpde.vug import FieldGrid, SparseGrid


@dataclass(frozen=True)
class BirthBudget:
    integral_abs_f: float
    expected_births: float
    realized_births: int


def birth_budget(fgrid: FieldGrid, n0: int, tau: float, rng: np.random.Generator) -> BirthBudget:
    """Number of particles to inject this step.

    Expected count is n0 * tau * sum(|f| * h^d); the realized count is the
    floor plus a Bernoulli draw on the fractional part, so the expected
    injected mass is exact.
    """
    integral = fgrid.integral_abs()
    expected = n0 * tau * integral
    whole = math.floor(expected)
    frac = expected - whole
    realized = whole + (1 if (frac > 0 and rng.random() < frac) else 0)
    return BirthBudget(integral, expected, realized)


def _sample_cells(rng: np.random.Generator, masses: np.ndarray, count: int) -> np.ndarray:
    """Categorical draw of `count` cell positions with probability ~ masses."""
    cdf = np.cumsum(masses)
    total = cdf[-1]
    u = rng.random(count) * total
    return np.searchsorted(cdf, u, side="right").clip(max=len(masses) - 1)


def _uniform_in_cells(rng: np.random.Generator, indices: np.ndarray, h: float) -> np.ndarray:
    return (indices + rng.random(indices.shape)) * h


def sample_births(
    fgrid: FieldGrid, count: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw `count` new particles from the normalized |f| density.

    Returns (locations (count, d), weights (count,)); weights are the sign of
    f at the sampled cell's center.
    """
    if count < 0:
        raise ConfigurationError(f"birth count must be >= 0, got {count}")
    if count == 0:
        return np.empty((0, fgrid.dim)), np.empty(0)
    masses = np.abs(fgrid.values)
    if masses.sum() == 0.0:
        raise ConfigurationError("cannot sample births from an identically zero field")
    cells = _sample_cells(rng, masses, count)
    locations = _uniform_in_cells(rng, fgrid.indices[cells], fgrid.h)
    weights = np.sign(fgrid.values[cells])
    return locations, weights


def annihilate(grid: SparseGrid, n0: int, rng: np.random.Generator, time: float = 0.0) -> Ensemble:
    """Replace the population: n0 particles resampled from |reconstruction|.

    Each particle carries weight Z * sign(cell average), Z the discrete L1
    mass, so the resampled cloud reproduces the reconstruction in expectation.
    """
    z = grid.l1_mass()
    if z <= 0.0:
        raise DegenerateSolutionError("reconstruction has zero L1 mass; cannot resample")
    masses = np.abs(grid.values)  # ~ |cell average| * h^d up to the constant n0
    cells = _sample_cells(rng, masses, n0)
    locations = _uniform_in_cells(rng, grid.indices[cells], grid.h)
    weights = z * np.sign(grid.values[cells])
    return Ensemble(locations, weights, n0, time)


def spm_full_resample(
    grid: SparseGrid,
    fgrid: FieldGrid,
    n0: int,
    tau: float,
    rng: np.random.Generator,
    time: float = 0.0,
) -> Ensemble:
    """Baseline step: resample n0 particles from |u + tau * f| on the occupied cells."""
    if fgrid.n_cells != grid.n_cells or not np.array_equal(fgrid.indices, grid.indices):
        raise ConfigurationError("field grid must be tabulated on the solution grid's cells")
    g = grid.cell_averages() + tau * fgrid.values
    z = float(np.abs(g).sum()) * grid.cell_volume()
    if z <= 0.0:
        raise DegenerateSolutionError("combined field u + tau*f has zero L1 mass; cannot resample")
    cells = _sample_cells(rng, np.abs(g), n0)
    locations = _uniform_in_cells(rng, grid.indices[cells], grid.h)
    weights = z * np.sign(g[cells])
    return Ensemble(locations, weights, n0, time)
