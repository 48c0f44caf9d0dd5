"""
Calibration Testing Script

This script runs seeded simulation campaigns against the statistical procedures
(simulated chi-square test, maximum likelihood round trip, Mann-Kendall trend
tests) and saves rejection rates and coverage as JSON.
"""

import os
import sys
import json
import argparse
from datetime import datetime
from typing import Dict, List

import numpy as np

# Add src to path so we can import our modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from config import get_config, set_profile
from rng import configure_rng, generator, substream
from samples import Variable
from distributions import FamilyId, LerchModel, sample
from inference import fit_mle, standard_errors
from gof import mc_gof
from diagnostics import mk_test, mk_test_corrected


ROUND_TRIP_MODELS = {
    FamilyId.LERCH3: LerchModel.lerch3(0.913, 0.442, -0.953),
    FamilyId.POLYLOG: LerchModel.polylog(0.913, 0.433),
    FamilyId.LOGARITHMIC: LerchModel.logarithmic(0.8),
    FamilyId.GEOMETRIC: LerchModel.geometric(0.446),
    FamilyId.EXTENDED_LOG: LerchModel.extended_log(0.85, 2.0),
}


class CalibrationTester:
    """Class to run calibration campaigns with consecutive seeds"""

    def __init__(self, runs: int = 200, alpha: float = 0.05):
        self.runs = runs
        self.alpha = alpha

        # Track statistics
        self.stats: Dict[str, Dict[str, object]] = {}

    def _record(self, name: str, rejections: int, total: int, failures: List[int]):
        self.stats[name] = {
            "runs": total,
            "rejections": rejections,
            "rate": rejections / total if total else None,
            "failed_seeds": failures[:10],
        }

    def gof_campaign(self, base_seed: int, n: int = 2000, replicates: int = 500):
        """Null rejection rate with known parameters, then power against a wrong model"""
        null_model = LerchModel.geometric(0.5)
        wrong_model = LerchModel.geometric(0.9)
        null_rejections = power_rejections = 0
        failures = []
        for i in range(self.runs):
            seed = base_seed + i
            configure_rng("set", seed)
            try:
                data = sample(null_model.params, generator("data"), n, Variable.WS)
                p_null = mc_gof(data, null_model, replicates, stream=substream("null")).p_value
                short = data.with_values(data.values[:1000])
                p_wrong = mc_gof(short, wrong_model, replicates, stream=substream("power")).p_value
            except Exception as e:
                print(f"Error in chi-square campaign for seed {seed}: {e}")
                failures.append(seed)
                continue
            null_rejections += p_null < self.alpha
            power_rejections += p_wrong < self.alpha
            self._progress("gof", i)
        done = self.runs - len(failures)
        self._record("gof_null", null_rejections, done, failures)
        self._record("gof_power", power_rejections, done, failures)

    def mle_campaign(self, base_seed: int, n: int = 50_000):
        """Share of runs whose estimates lie within 3 standard errors of the truth"""
        for family, model in ROUND_TRIP_MODELS.items():
            covered = 0
            failures = []
            truth = np.array([model.params.as_dict()[p] for p in family.free_parameters])
            for i in range(self.runs):
                seed = base_seed + i
                configure_rng("set", seed)
                try:
                    data = sample(model.params, generator("mle", family.value), n)
                    fit = fit_mle(data, family)
                    se = standard_errors(fit, data)
                    estimate = np.array([fit.params.as_dict()[p] for p in family.free_parameters])
                    errors = np.array([se[p] for p in family.free_parameters])
                except Exception as e:
                    print(f"Error in {family.label} round trip for seed {seed}: {e}")
                    failures.append(seed)
                    continue
                covered += bool(np.all(np.abs(estimate - truth) <= 3.0 * errors))
                self._progress(f"mle {family.label}", i)
            self._record(f"mle_{family.name.lower()}", covered, self.runs - len(failures), failures)

    def trend_campaign(self, base_seed: int, n_iid: int = 200, n_ar: int = 500, phi: float = 0.5):
        """MK size on white noise, classical and corrected size on AR(1) noise"""
        iid_rejections = ar_classical = ar_corrected = 0
        for i in range(self.runs):
            seed = base_seed + i
            configure_rng("set", seed)
            gen = generator("trend")
            iid_rejections += mk_test(gen.standard_normal(n_iid)).p_classical < self.alpha

            noise = gen.standard_normal(n_ar)
            ar = np.empty(n_ar)
            ar[0] = noise[0] / np.sqrt(1.0 - phi * phi)
            for t in range(1, n_ar):
                ar[t] = phi * ar[t - 1] + noise[t]
            result = mk_test_corrected(ar)
            ar_classical += result.p_classical < self.alpha
            ar_corrected += result.p_corrected < self.alpha
            self._progress("trend", i)
        self._record("mk_iid_size", iid_rejections, self.runs, [])
        self._record("mk_ar1_classical_size", ar_classical, self.runs, [])
        self._record("mk_ar1_corrected_size", ar_corrected, self.runs, [])

    def _progress(self, label: str, i: int):
        if (i + 1) % 50 == 0 or i == 0:
            print(f"Progress {label}: {i + 1}/{self.runs}")

    def print_final_stats(self):
        """Print final campaign statistics"""
        print("\n" + "=" * 50)
        print("CALIBRATION RESULTS")
        print("=" * 50)
        for name, entry in self.stats.items():
            rate = entry["rate"]
            rate_text = f"{rate * 100:.1f}%" if rate is not None else "n/a"
            print(f"{name:<26} {entry['rejections']:>5}/{entry['runs']:<5} {rate_text}")
            if entry["failed_seeds"]:
                print(f"  first failed seeds: {entry['failed_seeds']}")

    def save_stats(self, filepath: str, base_seed: int):
        """Save statistics to JSON file"""
        stats_data = {
            "timestamp": datetime.now().isoformat(),
            "profile": get_config().current_profile,
            "base_seed": base_seed,
            "alpha": self.alpha,
            "statistics": self.stats,
        }
        with open(filepath, 'w') as f:
            json.dump(stats_data, f, indent=2)
        print(f"Statistics saved to: {filepath}")


def main():
    """Main function to run calibration campaigns"""
    parser = argparse.ArgumentParser(description="Run seeded calibration campaigns")
    parser.add_argument("--campaign", choices=["gof", "mle", "trend", "all"], default="all",
                        help="Campaign to run (default: all)")
    parser.add_argument("--runs", type=int, default=200,
                        help="Seeded runs per campaign (default: 200)")
    parser.add_argument("--start-seed", type=int, default=None,
                        help="Starting seed value (default: use current timestamp)")
    parser.add_argument("--profile", choices=get_config().get_available_profiles(), default="standard",
                        help="Analysis profile (default: standard)")
    parser.add_argument("--output-dir", type=str, default="results/calibration",
                        help="Output directory for the statistics (default: results/calibration)")
    args = parser.parse_args()

    set_profile(args.profile)
    if args.start_seed is not None:
        base_seed = args.start_seed
        print(f"Using starting seed: {base_seed}")
    else:
        base_seed = int(datetime.now().timestamp())
        print(f"Using timestamp-based starting seed: {base_seed}")

    tester = CalibrationTester(args.runs)
    if args.campaign in ("gof", "all"):
        tester.gof_campaign(base_seed)
    if args.campaign in ("mle", "all"):
        tester.mle_campaign(base_seed)
    if args.campaign in ("trend", "all"):
        tester.trend_campaign(base_seed)

    tester.print_final_stats()
    os.makedirs(args.output_dir, exist_ok=True)
    tester.save_stats(os.path.join(args.output_dir, f"calibration_{args.campaign}.json"), base_seed)


if __name__ == "__main__":
    main()
