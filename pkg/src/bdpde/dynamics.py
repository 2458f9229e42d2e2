"""Particle motion under the adjoint of L = b . grad + c * laplacian.

The adjoint semigroup acts on the point cloud as a deterministic shift along
the characteristic (x -> x - b * tau) followed by a Brownian kick with
per-component variance 2 * c * tau. Weights and particle count are untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bdpde.errors import ConfigurationError
from bdpde.particles import Ensemble


@dataclass(frozen=True)
class LinearOperator:
    """Constant-coefficient operator b . grad + c * laplacian."""

    advection: np.ndarray
    diffusion: float

    def __post_init__(self):
        b = np.asarray(self.advection, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "advection", b)
        if not np.isfinite(b).all():
            raise ConfigurationError("advection vector must be finite")
        if not (np.isfinite(self.diffusion) and self.diffusion >= 0):
            raise ConfigurationError(f"diffusion coefficient must be >= 0, got {self.diffusion}")


def _check_tau(tau: float) -> None:
    if tau <= 0:
        raise ConfigurationError(f"tau must be positive, got {tau}")


def advect(ensemble: Ensemble, b, tau: float) -> Ensemble:
    """Shift every location by -b * tau (characteristic of the adjoint)."""
    _check_tau(tau)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if len(b) != ensemble.dim:
        raise ConfigurationError(f"advection vector has length {len(b)}, ensemble dim {ensemble.dim}")
    return ensemble.with_particles(ensemble.locations - b * tau, ensemble.weights)


def diffuse(ensemble: Ensemble, c: float, tau: float, rng: np.random.Generator) -> Ensemble:
    """Add independent N(0, 2*c*tau) increments to every location component."""
    _check_tau(tau)
    if c < 0:
        raise ConfigurationError(f"diffusion coefficient must be >= 0, got {c}")
    if c == 0.0 or ensemble.count() == 0:
        return ensemble
    sigma = math.sqrt(2.0 * c * tau)
    kicks = rng.standard_normal(ensemble.locations.shape) * sigma
    return ensemble.with_particles(ensemble.locations + kicks, ensemble.weights)


def apply_semigroup(ensemble: Ensemble, op: LinearOperator, tau: float, rng: np.random.Generator) -> Ensemble:
    """One adjoint-semigroup step: advection then diffusion."""
    _check_tau(tau)
    moved = ensemble
    if np.any(op.advection != 0.0):
        moved = advect(moved, op.advection, tau)
    return diffuse(moved, op.diffusion, tau, rng)
