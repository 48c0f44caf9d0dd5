"""
Diagnostics module for spellkit.

This module contains the Mann-Kendall trend tests (classical and Hamed-Rao
corrected) and the empirical diagnostics reported next to the fits.
"""

from .trend import TrendResult, mk_test, mk_test_corrected, hamed_rao_factor
from .empirical import (
    RatioSeries, survival_ratios, theoretical_survival_ratios, empirical_quantile,
    quantile_compare, standard_error_of_estimate, cumfreq_ratio, summary_stats,
)

__all__ = [
    'TrendResult', 'mk_test', 'mk_test_corrected', 'hamed_rao_factor',
    'RatioSeries', 'survival_ratios', 'theoretical_survival_ratios', 'empirical_quantile',
    'quantile_compare', 'standard_error_of_estimate', 'cumfreq_ratio', 'summary_stats',
]
