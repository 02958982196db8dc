"""Continuous-variable QKD post-processing with finite-size composable key rates."""

from .channel import ConfigError, DerivedParams, ProtocolConfig, derive_params
from .config import load_config, parse_config
from .gf import GfField, canonical_field, gf_build_tables
from .pipeline import RunReport, rate_summary, run_protocol

__all__ = [
    "ConfigError", "DerivedParams", "GfField", "ProtocolConfig", "RunReport",
    "canonical_field", "derive_params", "gf_build_tables", "load_config",
    "parse_config", "rate_summary", "run_protocol",
]
