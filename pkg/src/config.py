"""
Global configuration for spellkit.

This module contains all configurable parameters for series evaluation, fitting,
goodness-of-fit testing, extraction and diagnostics. Different analysis profiles
can have their own specific configurations.
"""

from typing import Dict, Optional
import os
from enum import Enum

from dotenv import load_dotenv


# Pick up SPELLKIT_* variables from a .env file at the repository root
load_dotenv(os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', '.env'))


class RNGMode(Enum):
    """Available RNG seeding modes"""
    DATE = "date"
    RANDOM = "random"
    SET = "set"


class RNGConfig:
    """Configuration for random number generation - Global across all profiles"""

    # Reports must be reproducible, so a fixed seed is the default
    DEFAULT_RNG_MODE = RNGMode.SET
    DEFAULT_RNG_VALUE = 20240401


class RuntimeConfig:
    """Configuration for parallel execution - Global across all profiles"""

    THREADS_ENV_VAR = "SPELLKIT_THREADS"
    DEFAULT_THREADS = 1

    _runtime_threads = None

    @property
    def THREADS(self) -> int:
        if self._runtime_threads is not None:
            return max(1, self._runtime_threads)
        value = os.getenv(self.THREADS_ENV_VAR)
        if value:
            try:
                return max(1, int(value))
            except ValueError:
                return self.DEFAULT_THREADS
        return self.DEFAULT_THREADS

    def set_threads(self, threads: Optional[int]):
        self._runtime_threads = threads


class ResultsConfig:
    """Configuration for results storage - Global across all profiles"""

    DEFAULT_OUTPUT_DIR = "results"
    SCHEMA_VERSION = "1.0"
    REPORT_SUFFIX = "_report.json"

    # Plot-ready tables
    CUMULATIVE_TABLE = "cumulative_frequencies.csv"
    ABS_DIFF_TABLE = "absolute_differences.csv"
    RATIO_TABLE = "survival_ratios.csv"
    CUMFREQ_RATIO_TABLE = "cumfreq_ratios.csv"
    QUANTILE_TABLE = "quantiles.csv"

    RESULTS_KEEP_COUNT = 50  # Number of recent reports to keep when cleaning up


class DistributionConfig:
    """Numerical settings for the Lerch family"""

    PHI_REL_TOL = 1e-13  # relative truncation error of the transcendent series
    PHI_MAX_TERMS = 10_000_000
    PHI_FIRST_BLOCK = 64  # series terms evaluated before the first tail check
    MOMENT_REL_TOL = 1e-13
    TABLE_TAIL_EPS = 1e-10  # default tail mass of every PmfTable
    MAX_TABLE_LENGTH = 5_000_000


class InferenceConfig:
    """Maximum likelihood fitting and model selection"""

    MIN_SAMPLE_SIZE = 10
    SMALL_SAMPLE_WARNING = 30
    N_STARTS = 5
    START_SEED = 1945  # starts are seed-derived, never time-derived
    START_JITTER = 0.75  # std of the jitter added to the moment start (transformed space)
    GRADIENT_TOL = 1e-6  # converged flag, on the mean log-likelihood
    GRADIENT_STEP = 1e-6
    HESSIAN_STEP = 1e-4
    MAX_ITERATIONS = 500
    DEFAULT_ALPHA = 0.05
    S_NONNEGATIVE = True
    LLR_TOLERANCE = 1e-6

    # Box bounds in transformed coordinates (logit theta, log s or s, log(1+a))
    LOGIT_THETA_BOUNDS = (-25.0, 9.2)  # theta up to ~0.9999
    LOG_S_BOUNDS = (-20.0, 4.0)
    FREE_S_BOUNDS = (-20.0, 50.0)
    LOG_SHIFT_BOUNDS = (-20.0, 7.0)

    _runtime_alpha = None
    _runtime_allow_negative_s = None

    @property
    def ALPHA(self) -> float:
        return self._runtime_alpha if self._runtime_alpha is not None else self.DEFAULT_ALPHA

    @property
    def ALLOW_NEGATIVE_S(self) -> bool:
        if self._runtime_allow_negative_s is not None:
            return self._runtime_allow_negative_s
        return not self.S_NONNEGATIVE


class GofConfig:
    """Simulated chi-square goodness-of-fit test"""

    DEFAULT_REPLICATES = 3000
    MIN_REPLICATES = 100
    GAP_THRESHOLD = 5
    OUTLIER_MAX_COUNT = 2
    SMOOTH_OUTLIERS = False
    REFIT = False

    _runtime_replicates = None
    _runtime_smooth = None
    _runtime_refit = None

    @property
    def REPLICATES(self) -> int:
        return self._runtime_replicates or self.DEFAULT_REPLICATES

    @property
    def SMOOTH(self) -> bool:
        return self._runtime_smooth if self._runtime_smooth is not None else self.SMOOTH_OUTLIERS

    @property
    def REFIT_REPLICATES(self) -> bool:
        return self._runtime_refit if self._runtime_refit is not None else self.REFIT


class ExtractionDefaultsConfig:
    """Rainy-day threshold and seasons"""

    DEFAULT_THRESHOLD_MM = 1.0
    S1_MONTHS = (4, 5, 6, 7, 8, 9)
    S2_MONTHS = (10, 11, 12, 1, 2, 3)
    ASSIGNMENT_RULE = "start"
    CENSORED_POLICY = "include"

    _runtime_threshold = None

    @property
    def THRESHOLD_MM(self) -> float:
        return self._runtime_threshold if self._runtime_threshold is not None else self.DEFAULT_THRESHOLD_MM


class MethodsConfig:
    """Direct / indirect derivations"""

    CHAIN_TAIL_EPS = 1e-9
    CHAIN_INNER_TAIL_EPS = 1e-12
    MAX_CHAIN_LENGTH = 200_000
    MAX_CONTINUATION = 1.0 - 1e-9  # p_it(1) above this is treated as degenerate


class DiagnosticsConfig:
    """Trend tests and empirical diagnostics"""

    MK_MIN_LENGTH = 10
    MK_CORRECTED_MIN_LENGTH = 20
    MAX_LAG = 20
    SIGNIFICANCE_BAND = 1.96
    RATIO_MIN_COUNT = 10
    QUANTILE_LEVEL = 0.99
    QUANTILE_MIN_SAMPLE = 100


# =============================================================================
# PROFILE SPECIFIC CONFIGURATIONS
# =============================================================================

class QuickGofConfig(GofConfig):
    """Fewer replicates for smoke runs"""

    DEFAULT_REPLICATES = 500


class QuickInferenceConfig(InferenceConfig):
    """Fewer multi-starts for smoke runs"""

    N_STARTS = 3


# =============================================================================
# PROFILE CONFIGURATIONS REGISTRY
# =============================================================================

ANALYSIS_PROFILE_CONFIGS = {
    "standard": {
        "distributions": DistributionConfig,
        "inference": InferenceConfig,
        "gof": GofConfig,
        "extraction": ExtractionDefaultsConfig,
        "methods": MethodsConfig,
        "diagnostics": DiagnosticsConfig,
    },
    "quick": {
        "distributions": DistributionConfig,
        "inference": QuickInferenceConfig,
        "gof": QuickGofConfig,
        "extraction": ExtractionDefaultsConfig,
        "methods": MethodsConfig,
        "diagnostics": DiagnosticsConfig,
    },
}


class Config:
    """Main configuration class that manages profile specific configurations"""

    def __init__(self, profile: str = "standard"):
        # Global configs (same across all profiles)
        self.rng = RNGConfig()
        self.runtime = RuntimeConfig()
        self.results = ResultsConfig()

        self.current_profile = profile
        self.activate_profile(profile)

    def activate_profile(self, profile: str):
        """Activate a specific analysis profile"""
        if profile not in ANALYSIS_PROFILE_CONFIGS:
            available = ", ".join(ANALYSIS_PROFILE_CONFIGS.keys())
            raise ValueError(f"Unknown profile '{profile}'. Available profiles: {available}")

        self.current_profile = profile
        profile_configs = ANALYSIS_PROFILE_CONFIGS[profile]

        self.distributions = profile_configs["distributions"]()
        self.inference = profile_configs["inference"]()
        self.gof = profile_configs["gof"]()
        self.extraction = profile_configs["extraction"]()
        self.methods = profile_configs["methods"]()
        self.diagnostics = profile_configs["diagnostics"]()

    def get_available_profiles(self) -> list:
        """Get list of available analysis profiles"""
        return list(ANALYSIS_PROFILE_CONFIGS.keys())

    def set_runtime_parameters(self, threshold=None, replicates=None, alpha=None,
                               allow_negative_s=None, smooth_outliers=None, refit=None,
                               threads=None):
        """Set runtime configuration overrides"""
        if threshold is not None:
            self.extraction._runtime_threshold = threshold
        if replicates is not None:
            self.gof._runtime_replicates = replicates
        if alpha is not None:
            self.inference._runtime_alpha = alpha
        if allow_negative_s is not None:
            self.inference._runtime_allow_negative_s = allow_negative_s
        if smooth_outliers is not None:
            self.gof._runtime_smooth = smooth_outliers
        if refit is not None:
            self.gof._runtime_refit = refit
        if threads is not None:
            self.runtime.set_threads(threads)

    def echo(self) -> Dict[str, object]:
        """Settings that determine a report, in a stable order"""
        return {
            "profile": self.current_profile,
            "threshold_mm": self.extraction.THRESHOLD_MM,
            "replicates": self.gof.REPLICATES,
            "alpha": self.inference.ALPHA,
            "allow_negative_s": self.inference.ALLOW_NEGATIVE_S,
            "smooth_outliers": self.gof.SMOOTH,
            "refit": self.gof.REFIT_REPLICATES,
            "gap_threshold": self.gof.GAP_THRESHOLD,
            "n_starts": self.inference.N_STARTS,
            "tail_eps": self.distributions.TABLE_TAIL_EPS,
        }


# Global configuration instance - starts with the standard profile
config = Config()


def get_config() -> Config:
    """Get the global configuration instance"""
    return config


def set_profile(profile: str):
    """Set the active analysis profile globally (drops runtime overrides)"""
    global config
    config.activate_profile(profile)


def reset_config():
    """Recreate the global configuration with defaults"""
    global config
    config = Config()
    return config
