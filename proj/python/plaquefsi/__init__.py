"""Fluid-structure interaction with plaque growth: Python bindings."""

from ._core import (
    ConfigError,
    assumption_report,
    baseline_config,
    check_config,
    eigen_study,
    growth_ode_study,
    mesh_summary,
    piola_convergence,
    run,
)

__all__ = [
    "ConfigError",
    "assumption_report",
    "baseline_config",
    "check_config",
    "eigen_study",
    "growth_ode_study",
    "mesh_summary",
    "piola_convergence",
    "run",
]
