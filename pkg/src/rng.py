"""
Random Number Generator Module

This module centralizes all random number generation for spellkit.
It provides configurable seeding based on different modes: date, random, or user-set value,
and derives independent numpy substreams from the master seed plus a tuple of keys
(station, period, variable, method, task, replicate index).
"""

import time
import zlib
from datetime import date
from typing import Optional, Tuple, Union

import numpy as np

Key = Union[int, str]


def _key_to_int(key: Key) -> int:
    """Map a substream key to a non-negative integer (CRC-32 for strings)"""
    if isinstance(key, (bool, np.bool_)):
        return int(key)
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"substream keys must be non-negative, got {key}")
        return int(key)
    return zlib.crc32(str(key).encode("utf-8"))


def spawn_key(*keys: Key) -> Tuple[int, ...]:
    """Integer spawn key for a tuple of substream keys"""
    return tuple(_key_to_int(k) for k in keys)


class RNGConfig:
    """Configuration for random number generation"""

    def __init__(self, mode: str = "set", seed_value: Optional[int] = None):
        self.mode = mode
        self.seed_value = seed_value
        self._current_seed = None
        self._initialize_seed()

    def _initialize_seed(self):
        """Initialize the master seed based on the configured mode"""
        if self.mode == "date":
            # Use current date as seed (YYYYMMDD format)
            today = date.today()
            self._current_seed = int(today.strftime("%Y%m%d"))
        elif self.mode == "random":
            # Use current unix timestamp
            self._current_seed = int(time.time())
        elif self.mode == "set":
            if self.seed_value is None:
                raise ValueError("RNG mode 'set' requires a seed_value to be provided")
            if self.seed_value < 0:
                raise ValueError(f"seed must be non-negative, got {self.seed_value}")
            self._current_seed = int(self.seed_value)
        else:
            raise ValueError(f"Unknown RNG mode: {self.mode}")

    def get_seed(self) -> int:
        """Get the current master seed"""
        return self._current_seed

    def substream(self, *keys: Key) -> np.random.SeedSequence:
        """Seed sequence that depends only on (master seed, keys)"""
        return np.random.SeedSequence(entropy=self._current_seed, spawn_key=spawn_key(*keys))

    def generator(self, *keys: Key) -> np.random.Generator:
        """PCG64 generator on the substream for keys"""
        return np.random.default_rng(self.substream(*keys))


def _default_config() -> RNGConfig:
    from config import RNGConfig as RNGSettings

    return RNGConfig(RNGSettings.DEFAULT_RNG_MODE.value, RNGSettings.DEFAULT_RNG_VALUE)


# Global RNG configuration instance
_rng_config = _default_config()


def configure_rng(mode: str, seed_value: Optional[int] = None):
    """Configure the global RNG settings"""
    global _rng_config
    _rng_config = RNGConfig(mode, seed_value)


def get_rng_config() -> RNGConfig:
    """Get the global RNG configuration"""
    return _rng_config


def get_current_seed() -> int:
    """Get the current master seed"""
    return _rng_config.get_seed()


def substream(*keys: Key) -> np.random.SeedSequence:
    """Seed sequence for keys under the global master seed"""
    return _rng_config.substream(*keys)


def generator(*keys: Key) -> np.random.Generator:
    """Generator for keys under the global master seed"""
    return _rng_config.generator(*keys)


def child_generator(parent: np.random.SeedSequence, *keys: Key) -> np.random.Generator:
    """Generator for a child of an existing substream (e.g. replicate j)"""
    child = np.random.SeedSequence(entropy=parent.entropy,
                                   spawn_key=tuple(parent.spawn_key) + spawn_key(*keys))
    return np.random.default_rng(child)
