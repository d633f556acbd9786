"""Normalized solutions of -Lap u = lambda u + mu |u|^{q-2} u + |u|^{p-2} u with prescribed mass."""

from ._core import (
    InfeasibleBranch,
    config_to_kv,
    fiber_roots,
    gn_constant,
    improvement_ratio,
    minimize_mu,
    mu_threshold,
    sobolev_constant,
    solve,
    verify,
)

__all__ = [
    "InfeasibleBranch",
    "config_to_kv",
    "fiber_roots",
    "gn_constant",
    "improvement_ratio",
    "minimize_mu",
    "mu_threshold",
    "sobolev_constant",
    "solve",
    "verify",
]
