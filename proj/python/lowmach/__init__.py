"""Scaled two-phase low-Mach finite-volume lab."""

import json

from ._core import (
    ConfigError,
    DomainError,
    Error,
    ModelId,
    PhaseState,
    RunConfig,
    Trajectory,
    __version__,
    active_fields,
    cli_main,
    describe_model,
    energy_audit,
    energy_total,
    equilibrium_closure,
    fit_order,
    indicators,
    make_well_prepared,
    pressure_barotropic,
    pressure_entropic,
    simulate,
    simulate_from,
    sound_speed,
    strang_step,
)
from ._core import mach_sweep_json as _mach_sweep_json


def mach_sweep(config, epsilons, workers=1):
    """Run the Mach ladder; returns the sweep report as a dict."""
    return json.loads(_mach_sweep_json(config, list(epsilons), workers))


__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "ModelId",
    "PhaseState",
    "RunConfig",
    "Trajectory",
    "active_fields",
    "cli_main",
    "describe_model",
    "energy_audit",
    "energy_total",
    "equilibrium_closure",
    "fit_order",
    "indicators",
    "mach_sweep",
    "make_well_prepared",
    "pressure_barotropic",
    "pressure_entropic",
    "simulate",
    "simulate_from",
    "sound_speed",
    "strang_step",
]
