# -*- coding: utf-8 -*-
"""
Run configuration: built-in defaults, overridden by an optional Python
configuration module, overridden by command-line flags.
"""

import importlib
import logging
import os
import sys
from dataclasses import asdict
from dataclasses import dataclass

import numpy as np

from fockbounds.util.exceptions import ConfigError

# Module level logger.
logger = logging.getLogger(__name__)

SUBCOMMANDS = ("bounds", "sweep", "extremal", "dual", "sigma-check", "selftest")
FORMATS = ("csv", "json")

DEFAULTS = {
    "A": None,
    "A_MIN": None,
    "A_MAX": None,
    "STEPS": 1,
    "N": 300,
    "RHO": None,
    "C0": 2.0 ** -0.5,
    "EPS": None,
    "GRID": 0.05,
    "MARGIN": 6.0,
    "OUT": "-",
    "FORMAT": "csv",
    "WORKERS": None,
    "SEED": 0,
    "QUICK": False,
}

# Per-subcommand fallbacks for keys left unset.
SUBCOMMAND_DEFAULTS = {
    "bounds": {"A": (0.8,)},
    "sweep": {"A_MIN": 0.6, "A_MAX": 0.95, "STEPS": 8},
    "extremal": {"A": (0.99,), "EPS": 0.2},
    "dual": {"A": (0.8,)},
    "sigma-check": {"A": (1.0,), "EPS": 0.1},
    "selftest": {"A": (0.8,)},
}

# Open interval of admissible spacings per subcommand; the extremal
# construction narrows it further and reports that as a regime error.
A_RANGE = {
    "sigma-check": (0.5, 2.0),
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    a_values: tuple
    N: int = 300
    rho: float = None
    c0: float = 2.0 ** -0.5
    eps: float = 0.2
    grid: float = 0.05
    margin: float = 6.0
    out: str = "-"
    fmt: str = "csv"
    workers: int = 1
    seed: int = 0
    quick: bool = False
    debug: bool = False

    def echo(self):
        settings = asdict(self)
        settings["a_values"] = list(self.a_values)
        return settings


def load_config_module(config):
    """
    Import a configuration module given as a file path or dotted name.

    :param config: 'path/to/run_conf.py' or 'package.run_conf'
    :return: dict of the module's upper-case settings
    """
    if config.endswith(".py") or os.sep in config:
        path = os.path.abspath(config)
        if not os.path.isfile(path):
            raise ConfigError("Configuration file '%s' not found" % config)
        sys.path.insert(0, os.path.dirname(path))
        name = os.path.splitext(os.path.basename(path))[0]
    else:
        name = config
    try:
        module = importlib.import_module(name)
    except ImportError as error:
        raise ConfigError("Cannot import configuration '%s': %s"
                          % (config, error))
    settings = dict((key, getattr(module, key)) for key in dir(module)
                    if key.isupper() and not key.startswith("_"))
    unknown = sorted(set(settings) - set(DEFAULTS))
    if unknown:
        raise ConfigError("Unknown configuration keys in '%s': %s"
                          % (config, ", ".join(unknown)))
    logger.debug("loaded %d settings from %s" % (len(settings), config))
    return settings


def merge_settings(subcommand, flags=None, module_settings=None):
    """
    Flags over module settings over subcommand fallbacks over defaults.
    Unset flags are None.
    """
    merged = dict(DEFAULTS)
    merged.update(SUBCOMMAND_DEFAULTS.get(subcommand, {}))
    for source in (module_settings or {}, flags or {}):
        for key, value in source.items():
            if value is not None:
                merged[key] = value
    return merged


def _a_values(subcommand, settings, explicit_given=False):
    explicit = settings["A"]
    use_range = subcommand == "sweep" or (
        settings["A_MIN"] is not None or settings["A_MAX"] is not None)
    if use_range:
        if explicit_given:
            raise ConfigError("Give either explicit a values or an a-min/a-max "
                              "range for '%s', not both" % subcommand)
        if settings["A_MIN"] is None or settings["A_MAX"] is None:
            raise ConfigError("A range needs both a-min and a-max")
        steps = int(settings["STEPS"])
        if steps < 1:
            raise ConfigError("steps must be >= 1, got %d" % steps)
        if steps == 1:
            return (float(settings["A_MIN"]),)
        grid = np.linspace(float(settings["A_MIN"]), float(settings["A_MAX"]),
                           steps)
        return tuple(float(round(a, 12)) for a in grid)
    if explicit is None:
        raise ConfigError("No lattice spacing given for '%s'" % subcommand)
    if isinstance(explicit, (int, float)):
        explicit = (explicit,)
    return tuple(float(a) for a in explicit)


def build_run_config(subcommand, flags=None, module_settings=None, debug=False):
    """
    Validated RunConfig for a subcommand.

    :param subcommand: one of SUBCOMMANDS
    :param flags: command-line values keyed like the configuration module
    :param module_settings: output of load_config_module
    :param debug: debug mode
    :return: RunConfig
    """
    if subcommand not in SUBCOMMANDS:
        raise ConfigError("Unknown subcommand '%s'" % subcommand)
    settings = merge_settings(subcommand, flags, module_settings)
    try:
        explicit_given = any(source.get("A") is not None
                             for source in (flags or {}, module_settings or {}))
        a_values = _a_values(subcommand, settings, explicit_given)
        N = int(settings["N"])
        rho = None if settings["RHO"] is None else float(settings["RHO"])
        c0 = float(settings["C0"])
        eps = float(settings["EPS"]) if settings["EPS"] is not None else 0.2
        grid = float(settings["GRID"])
        margin = float(settings["MARGIN"])
        workers = settings["WORKERS"]
        workers = int(workers) if workers is not None else (os.cpu_count() or 1)
        seed = int(settings["SEED"])
    except (TypeError, ValueError) as error:
        raise ConfigError("Bad configuration value: %s" % error)

    lo, hi = A_RANGE.get(subcommand, (0.5, 1.0))
    for a in a_values:
        if not lo < a < hi:
            raise ConfigError("a=%g outside (%g, %g) for '%s'"
                              % (a, lo, hi, subcommand))
    if N < 1:
        raise ConfigError("N must be >= 1, got %d" % N)
    if workers < 1:
        raise ConfigError("workers must be >= 1, got %d" % workers)
    if not c0 > 0:
        raise ConfigError("c0 must be positive, got %g" % c0)
    if not (eps > 0 and grid > 0 and margin > 0):
        raise ConfigError("eps, grid and margin must be positive")
    fmt = str(settings["FORMAT"]).lower()
    if fmt not in FORMATS:
        raise ConfigError("format must be one of %s, got '%s'"
                          % (", ".join(FORMATS), fmt))
    return RunConfig(subcommand, a_values, N, rho, c0, eps, grid, margin,
                     str(settings["OUT"]), fmt, workers, seed,
                     bool(settings["QUICK"]), debug)
