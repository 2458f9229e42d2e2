"""Weighted-particle Monte Carlo solver for semilinear PDEs with birth-death dynamics."""

__version__ = "0.1.0"

from bdpde.particles import Ensemble, Particle, signed_mass, weak_sum
from bdpde.vug import FieldGrid, SparseGrid, deposit
from bdpde.dynamics import LinearOperator, advect, apply_semigroup, diffuse
from bdpde.birth_death import (
    BirthBudget,
    annihilate,
    birth_budget,
    sample_births,
    spm_full_resample,
)
from bdpde.solver import RunRecord, SolverConfig, run
from bdpde.problems import ProblemSpec, allen_cahn, benchmark_1d, forcing_r, m_ref, u_ref

__all__ = [
    "BirthBudget",
    "Ensemble",
    "FieldGrid",
    "LinearOperator",
    "Particle",
    "ProblemSpec",
    "RunRecord",
    "SolverConfig",
    "SparseGrid",
    "advect",
    "allen_cahn",
    "annihilate",
    "apply_semigroup",
    "benchmark_1d",
    "birth_budget",
    "deposit",
    "diffuse",
    "forcing_r",
    "m_ref",
    "run",
    "sample_births",
    "signed_mass",
    "spm_full_resample",
    "u_ref",
    "weak_sum",
]
