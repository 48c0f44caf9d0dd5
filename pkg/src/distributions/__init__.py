"""
Distributions module for spellkit.

This module contains the Hurwitz-Lerch-Zeta family (transcendent, pmf, cdf,
survival, hazard, quantiles, moments, sampling) and the tabulated pmf used
for every derived distribution.
"""

from .pmf_table import PmfTable
from .lerch import (
    FamilyId, LerchParams, LerchModel, MomentKind,
    phi, log_phi, pmf, log_pmf, cdf, survival, hazard, failure_rate, survival_ratio,
    quantile, moment, mean, sample, sample_values, to_pmf_table,
)

__all__ = [
    'PmfTable', 'FamilyId', 'LerchParams', 'LerchModel', 'MomentKind',
    'phi', 'log_phi', 'pmf', 'log_pmf', 'cdf', 'survival', 'hazard', 'failure_rate',
    'survival_ratio', 'quantile', 'moment', 'mean', 'sample', 'sample_values', 'to_pmf_table',
]
