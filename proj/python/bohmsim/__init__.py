"""Bohmian trajectories along foliations of 1+1 Minkowski spacetime."""

from ._core import (
    DiracWaveFunction,
    Event,
    Foliation,
    FoliationFamily,
    Interval,
    NrWaveFunction,
    NumericalBudgetError,
    PoincareTransform,
    SpacePoint,
    ValidationError,
    WorldLines,
    commands,
    covariance_distance,
    default_family,
    equivariance_l1,
    flat_foliation,
    integrate_hbd,
    is_typical,
    normalization,
    nr_integrate,
    p_star,
    rho_sigma,
    run,
    sample_on_leaf,
    sine_foliation,
    tanh_foliation,
    wilson_interval,
)

__all__ = [name for name in dir() if not name.startswith("_")]
