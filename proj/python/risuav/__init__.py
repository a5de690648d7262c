"""Python interface to the risuav simulator core."""

import json

from . import _core
from ._core import (
    ChannelParams,
    ConfigError,
    DomainError,
    FrequencyChannel,
    IoError,
    OfdmParams,
    SolverOptions,
    SystemGeometry,
    achievable_rate,
    brute_force,
    build_quadratic,
    composite_channel,
    configure_sdr,
    coordinate_ascent,
    draw_realization,
    element_positions,
    fspl_amplitude,
    gen_cascaded_channel,
    noise_power,
    oracle_check,
    path_loss_fspl,
    power_objective,
    random_frequency_channel,
    read_results,
    sdr_solve,
    to_frequency_domain,
    unconfigured,
)

__all__ = [name for name in dir(_core) if not name.startswith("_")] + [
    "resolve_config",
    "run_sweep",
    "write_sweep",
]


def _dump(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def resolve_config(config=None):
    """Return the fully resolved config (defaults filled in) as a dict."""
    return json.loads(_core.resolve_config(_dump(config)))


def run_sweep(config=None, variable=None):
    """Run a sweep. Returns (rows, csv_text, resolved_config)."""
    rows, csv_text, resolved = _core.run_sweep(_dump(config), variable or "")
    return rows, csv_text, json.loads(resolved)


def write_sweep(path, config=None, variable=None):
    """Run a sweep and write <path> plus the <path>.config.json sidecar."""
    _core.write_sweep(_dump(config), variable or "", str(path))
