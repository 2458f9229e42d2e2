"""Concrete problem definitions.

Two problems are provided: a 1-D reaction-advection-diffusion benchmark
(u_t = u_x + u_xx + u - u^3 with a Gaussian-times-quartic initial datum) and
the d-D Allen-Cahn equation with a manufactured drifting two-peak solution
whose forcing term is derived in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from bdpde.dynamics import LinearOperator
from bdpde.errors import ConfigurationError
from bdpde.vug import NonlinearTerm

# Gaussian peak centers of the Allen-Cahn manufactured solution (first two
# coordinates; the rest are zero).
_P1 = (2.0, 2.0)
_P2 = (-1.0, -1.0)
_AC_DIFFUSION = 1.0


@dataclass
class ProblemSpec:
    """Everything a solver run needs to know about one PDE."""

    name: str
    dim: int
    op: LinearOperator
    nonlinear: NonlinearTerm
    u0: Callable[[np.ndarray], np.ndarray]
    sample_initial: Callable[[int, np.random.Generator], np.ndarray]
    z0: float  # integral of |u0|
    u_ref: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    m_ref: Optional[Callable[[np.ndarray, np.ndarray, float], np.ndarray]] = None


# ---------------------------------------------------------------------------
# 1-D benchmark: u_t = u_x + u_xx + u - u^3, u0 = exp(-x^2) (1 + x^4)
# ---------------------------------------------------------------------------


def _benchmark_u0(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[:, 0]
    return np.exp(-(x**2)) * (1.0 + x**4)


class _RejectionSampler1D:
    """Rejection sampler for |u0|/Z0 with a standard normal proposal.

    The envelope constant is found once on a fine grid and doubled at runtime
    if any observed acceptance ratio ever exceeds 1.
    """

    def __init__(self):
        xs = np.linspace(-12.0, 12.0, 20001)
        ratio = _benchmark_u0(xs) / np.exp(-(xs**2) / 2.0)
        self.envelope = float(ratio.max()) * 1.001
        self.acceptance_rate = None

    def __call__(self, n: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty(n)
        filled = 0
        proposed = 0
        while filled < n:
            m = max(2 * (n - filled), 1024)
            x = rng.standard_normal(m)
            ratio = _benchmark_u0(x) / (self.envelope * np.exp(-(x**2) / 2.0))
            if ratio.max() > 1.0:
                self.envelope *= 2.0
                continue
            accepted = x[rng.random(m) < ratio]
            proposed += m
            take = min(len(accepted), n - filled)
            out[filled : filled + take] = accepted[:take]
            filled += take
        self.acceptance_rate = filled / max(proposed, 1)
        return out[:, None]


def benchmark_1d() -> ProblemSpec:
    """The 1-D benchmark problem; reference comes from the spectral solver."""
    z0, _ = quad(_benchmark_u0, -np.inf, np.inf)  # = (7/4) sqrt(pi), u0 >= 0

    def f(t, centers, u, grad):
        return u - u**3

    return ProblemSpec(
        name="benchmark1d",
        dim=1,
        op=LinearOperator(advection=np.array([1.0]), diffusion=1.0),
        nonlinear=NonlinearTerm(f),
        u0=_benchmark_u0,
        sample_initial=_RejectionSampler1D(),
        z0=z0,
    )


# ---------------------------------------------------------------------------
# d-D Allen-Cahn: u_t = c*lap(u) + u - u^3 + r with a manufactured solution
# ---------------------------------------------------------------------------


def _spread(t: float) -> float:
    return 1.0 + 4.0 * _AC_DIFFUSION * t


def _peaks(x: np.ndarray, t: float, d: int) -> tuple[np.ndarray, np.ndarray, float]:
    """The two Gaussian factors exp(-||x - p_i||^2 / s) and the spread s."""
    s = _spread(t)
    sq1 = (x[:, 0] - _P1[0]) ** 2 + (x[:, 1] - _P1[1]) ** 2
    sq2 = (x[:, 0] - _P2[0]) ** 2 + (x[:, 1] - _P2[1]) ** 2
    if d > 2:
        tail = np.sum(x[:, 2:] ** 2, axis=1)
        sq1 = sq1 + tail
        sq2 = sq2 + tail
    return np.exp(-sq1 / s), np.exp(-sq2 / s), s


def u_ref(x, t: float, d: int) -> np.ndarray:
    """Manufactured Allen-Cahn solution: (x1+x2) times two spreading peaks."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    g1, g2, s = _peaks(x, t, d)
    return (x[:, 0] + x[:, 1]) / (math.pi * s) ** (d / 2.0) * (g1 + 2.0 * g2)


def m_ref(x1, x2, t: float, d: int = 2) -> np.ndarray:
    """Marginal of u_ref over coordinates 3..d; independent of d.

    Each trailing coordinate integrates a unit-mass Gaussian, so the closed
    form is the d=2 solution.
    """
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    s = _spread(t)
    g1 = np.exp(-((x1 - _P1[0]) ** 2 + (x2 - _P1[1]) ** 2) / s)
    g2 = np.exp(-((x1 - _P2[0]) ** 2 + (x2 - _P2[1]) ** 2) / s)
    return (x1 + x2) / (math.pi * s) * (g1 + 2.0 * g2)


def forcing_r(x, t: float, d: int) -> np.ndarray:
    """Forcing that makes u_ref an exact Allen-Cahn solution.

    u_ref = (x1+x2) * Phi with Phi a sum of heat kernels, so
    du/dt - c*lap(u) = -2c (d1 Phi + d2 Phi) and
    r = -2c (d1 Phi + d2 Phi) - u_ref + u_ref^3.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    g1, g2, s = _peaks(x, t, d)
    norm = (math.pi * s) ** (d / 2.0)
    d12_phi = (-2.0 / s) * (
        ((x[:, 0] - _P1[0]) + (x[:, 1] - _P1[1])) * g1
        + 2.0 * ((x[:, 0] - _P2[0]) + (x[:, 1] - _P2[1])) * g2
    ) / norm
    u = (x[:, 0] + x[:, 1]) / norm * (g1 + 2.0 * g2)
    return -2.0 * _AC_DIFFUSION * d12_phi - u + u**3


def _folded_normal_mean(mu: float) -> float:
    """E|Y| for Y ~ N(mu, 1)."""
    return mu * math.erf(mu / math.sqrt(2.0)) + math.sqrt(2.0 / math.pi) * math.exp(-(mu**2) / 2.0)


def _allen_cahn_z0() -> float:
    """integral of |u_ref(., 0)| over R^d.

    Trailing coordinates marginalize to 1; in the (x1, x2) plane each peak is
    a unit-mass Gaussian under which x1 + x2 is N(p_1 + p_2, 1), so the
    integral reduces to folded-normal means. Independent of d.
    """
    return _folded_normal_mean(_P1[0] + _P1[1]) + 2.0 * _folded_normal_mean(_P2[0] + _P2[1])


class _RejectionSamplerAC:
    """Rejection sampler for |u_ref(., 0)|/Z0 in d dimensions.

    Proposal: mixture of two isotropic Gaussians at the peak centers with
    variance 0.75 per component, mixture weights 1:2. The acceptance ratio
    factorizes over the trailing coordinates, so the envelope search only
    needs the (x1, x2) plane.
    """

    def __init__(self, d: int):
        self.d = d
        self.sigma2 = 0.75
        g1, g2 = np.meshgrid(np.linspace(-8.0, 8.0, 801), np.linspace(-8.0, 8.0, 801))
        pts = np.column_stack([g1.ravel(), g2.ravel()])
        ratio = np.abs(u_ref(pts, 0.0, 2)) / self._proposal_density(pts)
        self.envelope = float(ratio.max()) * 1.05
        self.acceptance_rate = None

    def _proposal_density(self, x: np.ndarray) -> np.ndarray:
        d = x.shape[1]
        norm = (2.0 * math.pi * self.sigma2) ** (-d / 2.0)
        q1 = np.exp(-((x[:, 0] - _P1[0]) ** 2 + (x[:, 1] - _P1[1]) ** 2) / (2.0 * self.sigma2))
        q2 = np.exp(-((x[:, 0] - _P2[0]) ** 2 + (x[:, 1] - _P2[1]) ** 2) / (2.0 * self.sigma2))
        if d > 2:
            tail = np.exp(-np.sum(x[:, 2:] ** 2, axis=1) / (2.0 * self.sigma2))
            q1 = q1 * tail
            q2 = q2 * tail
        return norm * (q1 + 2.0 * q2) / 3.0

    def _propose(self, m: int, rng: np.random.Generator) -> np.ndarray:
        x = rng.standard_normal((m, self.d)) * math.sqrt(self.sigma2)
        pick2 = rng.random(m) < 2.0 / 3.0
        x[:, 0] += np.where(pick2, _P2[0], _P1[0])
        x[:, 1] += np.where(pick2, _P2[1], _P1[1])
        return x

    def __call__(self, n: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty((n, self.d))
        filled = 0
        proposed = 0
        while filled < n:
            m = max(3 * (n - filled), 1024)
            x = self._propose(m, rng)
            ratio = np.abs(u_ref(x, 0.0, self.d)) / (self.envelope * self._proposal_density(x))
            if ratio.max() > 1.0:
                self.envelope *= 2.0
                continue
            accepted = x[rng.random(m) < ratio]
            proposed += m
            take = min(len(accepted), n - filled)
            out[filled : filled + take] = accepted[:take]
            filled += take
        self.acceptance_rate = filled / max(proposed, 1)
        return out


def allen_cahn(d: int) -> ProblemSpec:
    """The d-D Allen-Cahn problem with manufactured forcing, d >= 2."""
    if d < 2:
        raise ConfigurationError(f"Allen-Cahn needs d >= 2 (two-peak structure), got d={d}")

    def f(t, centers, u, grad):
        return u - u**3 + forcing_r(centers, t, d)

    return ProblemSpec(
        name=f"allen-cahn-{d}d",
        dim=d,
        op=LinearOperator(advection=np.zeros(d), diffusion=_AC_DIFFUSION),
        nonlinear=NonlinearTerm(f),
        u0=lambda x: u_ref(x, 0.0, d),
        sample_initial=_RejectionSamplerAC(d),
        z0=_allen_cahn_z0(),
        u_ref=lambda x, t: u_ref(x, t, d),
        m_ref=lambda x1, x2, t: m_ref(x1, x2, t, d),
    )


def by_name(name: str, dim: int | None = None) -> ProblemSpec:
    """CLI-facing problem lookup."""
    if name == "benchmark1d":
        return benchmark_1d()
    if name == "allen-cahn":
        return allen_cahn(dim if dim is not None else 2)
    raise ConfigurationError(f"unknown problem {name!r} (expected benchmark1d or allen-cahn)")
