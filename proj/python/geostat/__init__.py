"""Ordinary kriging and geographically weighted conformal prediction."""

import json

from ._core import (
    ConfigError,
    DataError,
    GeostatError,
    NumericalError,
    geocp,
    interval_metrics,
    interval_score,
    krige,
    preset_names,
    regression_metrics,
    synth_gaussian_field,
    variogram,
    weighted_quantile,
)
from . import _core


def preset_config(task, name):
    """Preset configuration as a dict."""
    return json.loads(_core.preset_config(task, name))


__all__ = [
    "ConfigError",
    "DataError",
    "GeostatError",
    "NumericalError",
    "geocp",
    "interval_metrics",
    "interval_score",
    "krige",
    "preset_config",
    "preset_names",
    "regression_metrics",
    "synth_gaussian_field",
    "variogram",
    "weighted_quantile",
]
