"""
Goodness-of-fit module for spellkit.

This module contains frequency tables, class construction, outlier smoothing
and the simulated chi-square test.
"""

from .frequency import FrequencyTable, Binning, smooth_outliers
from .chi_square import GofResult, chi2_statistic, class_probabilities, mc_gof

__all__ = ['FrequencyTable', 'Binning', 'smooth_outliers',
           'GofResult', 'chi2_statistic', 'class_probabilities', 'mc_gof']
