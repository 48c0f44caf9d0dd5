"""
Pipeline module for spellkit.

This module contains station file ingestion, the synthetic station generator,
the per-station orchestration and the plot-ready tables.
"""

from .ingest import parse_series, write_series
from .synthetic import SpellLaws, StationProfile, SyntheticStationGenerator, bundled_profile, renewal_profile
from .tables import emit_plot_tables, plot_tables
from .orchestrate import PipelineConfig, PipelineResult, StationReport, load_inputs, run_pipeline, run_station

__all__ = [
    'parse_series', 'write_series',
    'SpellLaws', 'StationProfile', 'SyntheticStationGenerator', 'bundled_profile', 'renewal_profile',
    'emit_plot_tables', 'plot_tables',
    'PipelineConfig', 'PipelineResult', 'StationReport', 'load_inputs', 'run_pipeline', 'run_station',
]
