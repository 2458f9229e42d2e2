"""Weighted particle ensembles and the weak-approximation functional.

The solution is carried by a signed point cloud: the weak pairing of the
numerical solution with a test function phi is (1/N(0)) * sum_i w_i phi(x_i),
where N(0) is the normalization count fixed at initialization (not the
current particle count, which grows and shrinks over a run).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bdpde.errors import ConfigurationError


@dataclass(frozen=True)
class Particle:
    """A single location/weight pair, mostly useful for inspection."""

    location: np.ndarray
    weight: float


class Ensemble:
    """A weighted point cloud with its fixed normalization count n0.

    Locations are stored as an (N, d) float array and weights as an (N,)
    float array; iteration order is stable within a time step.
    """

    __slots__ = ("locations", "weights", "_n0", "time")

    def __init__(self, locations, weights, n0: int, time: float = 0.0):
        locations = np.ascontiguousarray(locations, dtype=np.float64)
        if locations.ndim == 1:
            locations = locations[:, None]
        if locations.ndim != 2:
            raise ConfigurationError(f"locations must be (N, d), got shape {locations.shape}")
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if weights.shape != (locations.shape[0],):
            raise ConfigurationError(
                f"weights shape {weights.shape} does not match {locations.shape[0]} particles"
            )
        if not (isinstance(n0, (int, np.integer)) and n0 > 0):
            raise ConfigurationError(f"n0 must be a positive integer, got {n0!r}")
        if locations.size and not np.isfinite(locations).all():
            raise ConfigurationError("particle locations must be finite")
        if weights.size and (not np.isfinite(weights).all() or np.any(weights == 0.0)):
            raise ConfigurationError("particle weights must be finite and nonzero")
        self.locations = locations
        self.weights = weights
        self._n0 = int(n0)
        self.time = float(time)

    @property
    def n0(self) -> int:
        return self._n0

    @property
    def dim(self) -> int:
        return self.locations.shape[1]

    def count(self) -> int:
        return self.locations.shape[0]

    def __len__(self) -> int:
        return self.count()

    def particle(self, i: int) -> Particle:
        return Particle(self.locations[i].copy(), float(self.weights[i]))

    def with_particles(self, locations, weights, time: float | None = None) -> "Ensemble":
        """A new ensemble sharing n0 but holding different particles."""
        return Ensemble(locations, weights, self._n0, self.time if time is None else time)


def weak_sum(ensemble: Ensemble, testfn: Callable) -> float:
    """Pair the ensemble with a test function: (1/n0) * sum_i w_i * testfn(x_i).

    testfn may be vectorized over an (N, d) location array or act on a single
    location; the scalar form is detected and looped.
    """
    if ensemble.count() == 0:
        return 0.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            values = np.asarray(testfn(ensemble.locations), dtype=np.float64)
        if values.shape != (ensemble.count(),):
            raise ValueError
    except Exception:
        values = np.array([testfn(x) for x in ensemble.locations], dtype=np.float64)
    # np.dot is a deterministic reduction for a fixed array layout
    return float(ensemble.weights @ values) / ensemble.n0


def signed_mass(ensemble: Ensemble) -> float:
    """weak_sum against the constant test function 1: the estimated integral of u."""
    return float(ensemble.weights.sum()) / ensemble.n0
