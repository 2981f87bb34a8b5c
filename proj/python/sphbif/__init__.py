"""Python access to the sphbif core."""

from ._core import (
    DomainError,
    Error,
    LengthMismatch,
    NumericalError,
    beta0,
    bifurcation_points,
    condition_A_check,
    critical_exponent,
    decay_constant,
    eigenvalues,
    energy_h,
    g_condition_check,
    kelvin_rn,
    kelvin_value,
    moving_sphere_check_rn,
    nodal_zeros,
    nonexistence_sweep,
    periodic_sweep,
    run_cli,
    shoot,
    shooting_condition,
    solve_class,
    uniqueness_probe,
    verify,
    veron,
    version,
)

__version__ = version()

__all__ = [
    "DomainError",
    "Error",
    "LengthMismatch",
    "NumericalError",
    "beta0",
    "bifurcation_points",
    "condition_A_check",
    "critical_exponent",
    "decay_constant",
    "eigenvalues",
    "energy_h",
    "g_condition_check",
    "kelvin_rn",
    "kelvin_value",
    "moving_sphere_check_rn",
    "nodal_zeros",
    "nonexistence_sweep",
    "periodic_sweep",
    "run_cli",
    "shoot",
    "shooting_condition",
    "solve_class",
    "uniqueness_probe",
    "verify",
    "veron",
    "version",
]
