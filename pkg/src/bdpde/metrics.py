"""Error metrics, 2-D projections, and convergence-order estimation."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

import numpy as np

from bdpde.errors import ConfigurationError
from bdpde.particles import Ensemble
from bdpde.vug import SparseGrid

log = logging.getLogger(__name__)


@dataclass
class ProjectionGrid:
    """Marginal-solution estimates on a uniform (x1, x2) partition."""

    bounds: tuple[float, float, float, float]  # (l1, r1, l2, r2)
    h: float
    values: np.ndarray  # shape (n1, n2)

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        l1, _, l2, _ = self.bounds
        n1, n2 = self.values.shape
        c1 = l1 + (np.arange(n1) + 0.5) * self.h
        c2 = l2 + (np.arange(n2) + 0.5) * self.h
        return c1, c2

    def dump_csv(self, stream: TextIO) -> None:
        l1, r1, l2, r2 = self.bounds
        stream.write(f"# bounds={l1},{r1},{l2},{r2} h={self.h}\n")
        writer = csv.writer(stream)
        writer.writerow(["mu", "nu", "value"])
        n1, n2 = self.values.shape
        for mu in range(n1):
            for nu in range(n2):
                writer.writerow([mu, nu, repr(float(self.values[mu, nu]))])


def _cell_counts(lo: float, hi: float, h: float) -> int:
    n = (hi - lo) / h
    n_round = round(n)
    if n_round <= 0 or abs(n - n_round) > 1e-9 * max(abs(n), 1.0):
        raise ConfigurationError(f"bounds [{lo}, {hi}] are not an integral number of cells of size {h}")
    return n_round


def project_2d(ensemble: Ensemble, h: float, bounds: tuple[float, float, float, float]) -> ProjectionGrid:
    """Bin particle weights over the first two coordinates.

    Cell (mu, nu) holds (1/(n0 h^2)) * sum of weights landing there; particles
    outside the bounds are dropped with a logged count. Normalization is by
    the fixed n0, matching the weak-sum convention.
    """
    l1, r1, l2, r2 = bounds
    n1 = _cell_counts(l1, r1, h)
    n2 = _cell_counts(l2, r2, h)
    x1 = ensemble.locations[:, 0]
    x2 = ensemble.locations[:, 1]
    i1 = np.floor((x1 - l1) / h).astype(np.int64)
    i2 = np.floor((x2 - l2) / h).astype(np.int64)
    inside = (i1 >= 0) & (i1 < n1) & (i2 >= 0) & (i2 < n2)
    dropped = int((~inside).sum())
    if dropped:
        log.info("project_2d: dropped %d of %d particles outside bounds", dropped, ensemble.count())
    flat = i1[inside] * n2 + i2[inside]
    acc = np.bincount(flat, weights=ensemble.weights[inside], minlength=n1 * n2)
    values = acc.reshape(n1, n2) / (ensemble.n0 * h * h)
    return ProjectionGrid((l1, r1, l2, r2), h, values)


def relative_l2_1d(
    grid: SparseGrid,
    ref: Callable[[np.ndarray], np.ndarray],
    window: tuple[float, float],
) -> float:
    """||u_num - u_ref||_2 / ||u_ref||_2 on an audit grid of spacing h.

    Audit points are the lattice cell centers covering the window, so the
    piecewise-constant reconstruction is sampled once per cell.
    """
    lo, hi = window
    if not hi > lo:
        raise ConfigurationError(f"empty audit window [{lo}, {hi}]")
    h = grid.h
    ks = np.arange(math.floor(lo / h), math.ceil(hi / h))
    centers = (ks + 0.5) * h
    num = grid.values_at(centers)
    rv = np.asarray(ref(centers), dtype=np.float64)
    denom = np.linalg.norm(rv)
    if denom == 0.0:
        raise ConfigurationError("reference is identically zero on the audit window")
    return float(np.linalg.norm(num - rv) / denom)


def relative_l2_projection(
    num: ProjectionGrid, ref: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> float:
    """Relative L2 distance between a projection grid and a reference evaluated at cell centers."""
    c1, c2 = num.centers()
    g1, g2 = np.meshgrid(c1, c2, indexing="ij")
    rv = np.asarray(ref(g1, g2), dtype=np.float64)
    denom = np.linalg.norm(rv)
    if denom == 0.0:
        raise ConfigurationError("reference is identically zero on the projection grid")
    return float(np.linalg.norm(num.values - rv) / denom)


def convergence_order(
    points: Sequence[tuple[float, float]], error_falls_as_parameter_grows: bool = True
) -> list[float]:
    """Pairwise convergence orders from (parameter, error) pairs.

    For sample-size refinement the error falls as the parameter grows; for
    tau/h refinement the error falls as the parameter shrinks (flag False).
    """
    if len(points) < 2:
        raise ConfigurationError("need at least two (parameter, error) points")
    params = [p for p, _ in points]
    errors = [e for _, e in points]
    if any(p <= 0 for p in params) or any(e <= 0 for e in errors):
        raise ConfigurationError("parameters and errors must be positive")
    orders = []
    for i in range(len(points) - 1):
        if error_falls_as_parameter_grows:
            orders.append(math.log(errors[i] / errors[i + 1]) / math.log(params[i + 1] / params[i]))
        else:
            orders.append(math.log(errors[i] / errors[i + 1]) / math.log(params[i] / params[i + 1]))
    return orders
