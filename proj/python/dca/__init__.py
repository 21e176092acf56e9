"""Dendritic cell anomaly detection for host event traces."""

from ._core import (
    CallCategory,
    ConfigError,
    EventRecord,
    NormalizationConfig,
    ParseError,
    PreconditionError,
    SignalSample,
    ValidationError,
    classify,
    compute_danger,
    compute_mac,
    compute_mcav,
    compute_pamp,
    compute_safe,
    extract_signals,
    format_trace,
    fuse_signals,
    generate,
    mann_whitney_u,
    parse_trace,
    parse_trace_text,
    run,
    scenario_presets,
    sweep,
    weight_preset,
    weight_preset_names,
    wilcoxon_signed_rank,
)

__all__ = [name for name in dir() if not name.startswith("_")]
