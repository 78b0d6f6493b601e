"""Embedded-domain Cahn-Hilliard solver.

Fields come back as NumPy arrays of shape (Ny, Nx); row j is the j-th row of
cells counted from the bottom.
"""

from ._opbde import (
    ConfigError,
    MeasurementError,
    RunConfig,
    SolveError,
    cmd_run,
    compare,
    contact_angle,
    gamma_sweep,
    initial_field,
    parse_config,
    parse_config_text,
    preset,
    psi,
    read_snapshot,
    run,
    seeded_uniform,
)

__all__ = [
    "ConfigError",
    "MeasurementError",
    "RunConfig",
    "SolveError",
    "cmd_run",
    "compare",
    "contact_angle",
    "gamma_sweep",
    "initial_field",
    "parse_config",
    "parse_config_text",
    "preset",
    "psi",
    "read_snapshot",
    "run",
    "seeded_uniform",
]
