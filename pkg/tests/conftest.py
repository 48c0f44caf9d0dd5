"""
Shared fixtures: src on the import path, a fresh configuration and a fixed
master seed for every test.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

import config  # noqa: E402
import rng  # noqa: E402
from extraction import RainyIndicator  # noqa: E402
from distributions import LerchModel  # noqa: E402

MASTER_SEED = 20240401

# 14 days: R R D R D D D R R R D R D D
TRACE = "RRDRDDDRRRDRDD"


@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from the standard profile and the default seed"""
    cfg = config.reset_config()
    rng.configure_rng("set", MASTER_SEED)
    yield cfg
    config.reset_config()


@pytest.fixture
def trace_indicator():
    return RainyIndicator.from_pattern(TRACE, station="TRC")


@pytest.fixture
def cev_it_model():
    """Inter-arrival law with the CEV yearly parameters"""
    return LerchModel.lerch3(0.913, 0.442, -0.953)
