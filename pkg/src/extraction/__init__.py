"""
Extraction module for spellkit.

This module turns a daily rainfall series into the five duration samples
(it, ws, ds, wch, dch), with thresholding, seasonal splitting and the
missing-data policy.
"""

from .series import DRY, RAINY, MISSING, RainfallSeries, RainyIndicator, mark_rainy
from .seasons import Season, ExtractionConfig, split_seasons, standard_seasons
from .spells import find_runs, extract_it, derive_spells, derive_chains, extract_all

__all__ = [
    'DRY', 'RAINY', 'MISSING', 'RainfallSeries', 'RainyIndicator', 'mark_rainy',
    'Season', 'ExtractionConfig', 'split_seasons', 'standard_seasons',
    'find_runs', 'extract_it', 'derive_spells', 'derive_chains', 'extract_all',
]
