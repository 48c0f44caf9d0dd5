"""
Inference module for spellkit.

This module contains maximum likelihood fitting of the Lerch family members,
likelihood-ratio tests and nested model selection.
"""

from .likelihood import FittedModel, log_likelihood, fit_mle, standard_errors, sample_moments
from .selection import CandidateRecord, LlrResult, SelectionTrace, llr_test, select_model

__all__ = [
    'FittedModel', 'log_likelihood', 'fit_mle', 'standard_errors', 'sample_moments',
    'CandidateRecord', 'LlrResult', 'SelectionTrace', 'llr_test', 'select_model',
]
