"""
Methods module for spellkit.

This module contains the direct (DM) and indirect (IM) modelling pipelines
and the chain pmf machinery they share.
"""

from .derivations import dm_derive_ws, dm_derive_ds, chain_pmf, dm_wch_binomial, im_recover_it
from .bundle import DM, IM, FITTED, DERIVED, ModelBundle, run_dm, run_im

__all__ = [
    'dm_derive_ws', 'dm_derive_ds', 'chain_pmf', 'dm_wch_binomial', 'im_recover_it',
    'DM', 'IM', 'FITTED', 'DERIVED', 'ModelBundle', 'run_dm', 'run_im',
]
