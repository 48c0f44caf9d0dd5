import argparse
import json
import logging
import os
import sys
from dataclasses import replace

# Add src directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pandas as pd

from config import get_config, set_profile
from errors import EXIT_OK, EXIT_USAGE, SpellkitError, exit_code_for
from rng import configure_rng, get_current_seed, substream
from samples import Variable
from extraction import ExtractionConfig, extract_all, mark_rainy, split_seasons
from gof import mc_gof
from methods import DM, run_dm, run_im
from diagnostics import mk_test, mk_test_corrected, summary_stats
from pipeline import (
    PipelineConfig, SyntheticStationGenerator, bundled_profile, load_inputs, renewal_profile,
    run_pipeline, write_series,
)
from results import ResultsManager, to_jsonable

logger = logging.getLogger("spellkit")

COMMANDS = ("extract", "fit", "gof", "trend", "report", "reports", "simulate")


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with the spellkit usage code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    cfg = get_config()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], metavar="PATH",
                        help="Station CSV with header date,depth_mm (repeat for several stations)")
    common.add_argument("--synthetic", action="store_true",
                        help="Add the bundled synthetic station to the inputs")
    common.add_argument("--station", type=str,
                        help="Station label (single input or synthetic station)")
    common.add_argument("--threshold", type=float, default=cfg.extraction.DEFAULT_THRESHOLD_MM, metavar="MM",
                        help=f"Rainy-day threshold in mm (default: {cfg.extraction.DEFAULT_THRESHOLD_MM})")
    common.add_argument("--season", choices=["year", "s1", "s2", "all"], default="year",
                        help="Period(s) to analyse (default: year)")
    common.add_argument("--method", choices=["dm", "im", "both"], default="both",
                        help="Direct, indirect or both methods (default: both)")
    common.add_argument("--profile", choices=cfg.get_available_profiles(), default=cfg.current_profile,
                        help=f"Analysis profile (default: {cfg.current_profile})")
    common.add_argument("--seed", type=int, help="Master seed (implies --rng-mode set)")
    common.add_argument("--rng-mode", choices=["date", "random", "set"], default=cfg.rng.DEFAULT_RNG_MODE.value,
                        help="RNG seed mode: 'date' uses current date, 'random' uses timestamp, 'set' uses --seed")
    common.add_argument("--replicates", type=int,
                        help=f"Monte-Carlo replicates for the chi-square test (default: {cfg.gof.DEFAULT_REPLICATES})")
    common.add_argument("--alpha", type=float,
                        help=f"Significance level of the likelihood-ratio tests (default: {cfg.inference.DEFAULT_ALPHA})")
    common.add_argument("--smooth-outliers", action="store_true",
                        help="Smooth isolated outliers in the observed frequencies before the chi-square test")
    common.add_argument("--allow-negative-s", action="store_true",
                        help="Let the fits use s < 0")
    common.add_argument("--refit", action="store_true",
                        help="Re-estimate fitted models on every Monte-Carlo replicate")
    common.add_argument("--threads", type=int,
                        help="Worker threads (default: SPELLKIT_THREADS or 1)")
    common.add_argument("--out", type=str, metavar="DIR",
                        help=f"Output directory (report default: {cfg.results.DEFAULT_OUTPUT_DIR})")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = _Parser(prog="spellkit", description="Rainfall spell modelling with the Lerch family")
    sub = parser.add_subparsers(dest="command", metavar="|".join(COMMANDS), parser_class=_Parser)
    sub.required = True
    sub.add_parser("extract", parents=[common], help="Extract it, ws, ds, wch and dch samples")
    sub.add_parser("fit", parents=[common], help="Select and fit models with the chosen method(s)")
    sub.add_parser("gof", parents=[common], help="Fit and run the simulated chi-square test")
    sub.add_parser("trend", parents=[common], help="Mann-Kendall trend tests on every sample")
    sub.add_parser("report", parents=[common], help="Full pipeline: report and plot tables")
    reports = sub.add_parser("reports", parents=[common], help="List, show or prune saved station reports")
    reports.add_argument("--limit", type=int, help="List at most this many reports")
    reports.add_argument("--latest", action="store_true", help="Show only the most recently written report")
    reports.add_argument("--keep", type=int, nargs="?", const=cfg.results.RESULTS_KEEP_COUNT, metavar="N",
                         help=f"Delete all but the N newest reports (N defaults to {cfg.results.RESULTS_KEEP_COUNT})")
    simulate = sub.add_parser("simulate", parents=[common], help="Write a synthetic station CSV")
    simulate.add_argument("--years", type=int, default=30, help="Simulated years (default: 30)")
    simulate.add_argument("--missing-rate", type=float, default=0.0, help="Probability of a missing day")
    simulate.add_argument("--renewal", action="store_true",
                          help="Renewal process on inter-arrival times instead of alternating spells")
    return parser


def _configure(args):
    """Apply profile, RNG and runtime overrides from the parsed arguments"""
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    if args.profile != get_config().current_profile:
        set_profile(args.profile)
    cfg = get_config()

    if args.seed is not None:
        configure_rng("set", args.seed)
    elif args.rng_mode == "set":
        configure_rng("set", cfg.rng.DEFAULT_RNG_VALUE)
    else:
        configure_rng(args.rng_mode)
    logger.info("Using RNG seed: %d", get_current_seed())

    if args.threshold <= 0:
        raise _usage_error("threshold must be positive")
    if args.replicates is not None and args.replicates < cfg.gof.MIN_REPLICATES:
        raise _usage_error(f"--replicates must be at least {cfg.gof.MIN_REPLICATES}")
    if args.alpha is not None and not 0.0 < args.alpha < 1.0:
        raise _usage_error("--alpha must lie in (0, 1)")
    if args.threads is not None and args.threads < 1:
        raise _usage_error("--threads must be at least 1")

    # Set runtime configuration instead of passing parameters around
    cfg.set_runtime_parameters(
        threshold=args.threshold,
        replicates=args.replicates,
        alpha=args.alpha,
        allow_negative_s=True if args.allow_negative_s else None,
        smooth_outliers=True if args.smooth_outliers else None,
        refit=True if args.refit else None,
        threads=args.threads,
    )
    return cfg


def _usage_error(message: str) -> SystemExit:
    print(f"Error: {message}", file=sys.stderr)
    return SystemExit(EXIT_USAGE)


def _pipeline_config(args) -> PipelineConfig:
    if not args.input and not args.synthetic:
        raise _usage_error("give at least one --input or --synthetic")
    return PipelineConfig(
        inputs=tuple(args.input),
        extraction=ExtractionConfig.for_choice(args.season, threshold=args.threshold),
        method=args.method,
        out_dir=args.out,
        station=args.station,
        synthetic=args.synthetic,
    )


def _extracted(pcfg: PipelineConfig):
    """(station, period, samples) for every input and requested period"""
    for series in load_inputs(pcfg):
        indicator = mark_rainy(series, pcfg.extraction.threshold)
        for period, ind in split_seasons(indicator, pcfg.extraction).items():
            yield series.station, period, extract_all(ind)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_extract(args) -> int:
    pcfg = _pipeline_config(args)
    rows = []
    print(f"{'station':<10} {'period':<6} {'var':<4} {'n':>7} {'cens':>5} {'mean':>8} {'max':>6}")
    for station, period, samples in _extracted(pcfg):
        for variable, sample in samples.items():
            mean = f"{sample.values.mean():8.3f}" if sample.n else f"{'-':>8}"
            top = f"{sample.values.max():6d}" if sample.n else f"{'-':>6}"
            print(f"{station:<10} {period:<6} {variable.value:<4} {sample.n:7d} {sample.censored_count:5d} {mean} {top}")
            rows.extend({"station": station, "period": period, "variable": variable.value, "value": int(v)}
                        for v in sample.values)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "samples.csv")
        pd.DataFrame(rows, columns=["station", "period", "variable", "value"]).to_csv(path, index=False)
        print(f"Samples saved to: {path}")
    return EXIT_OK


def _bundles(pcfg: PipelineConfig):
    for station, period, samples in _extracted(pcfg):
        for method in pcfg.methods:
            if method == DM:
                bundle = run_dm(samples[Variable.IT])
            else:
                bundle = run_im(samples[Variable.WS], samples[Variable.DS])
            yield station, period, samples, bundle


def cmd_fit(args) -> int:
    pcfg = _pipeline_config(args)
    fits = []
    print(f"{'station':<10} {'period':<6} {'method':<6} {'var':<4} {'family':<22} {'loglik':>12}")
    for station, period, _, bundle in _bundles(pcfg):
        for variable in Variable:
            law = bundle.law(variable)
            label = law.describe() if variable in bundle.fits else bundle.provenance[variable]
            loglik = f"{bundle.fits[variable].loglik:12.3f}" if variable in bundle.fits else f"{'-':>12}"
            print(f"{station:<10} {period:<6} {bundle.method:<6} {variable.value:<4} {label:<22} {loglik}")
        fits.append({"station": station, "period": period, **bundle.to_dict()})
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "fits.json")
        with open(path, "w") as f:
            json.dump(to_jsonable(fits), f, indent=2)
        print(f"Fits saved to: {path}")
    return EXIT_OK


def cmd_gof(args) -> int:
    pcfg = _pipeline_config(args)
    print(f"{'station':<10} {'period':<6} {'method':<6} {'var':<4} {'chi2':>10} {'p':>7} {'smoothed':>8}")
    for station, period, samples, bundle in _bundles(pcfg):
        for variable in Variable:
            sample = samples[variable]
            if sample.is_empty:
                continue
            stream = substream(station, period, variable.value, bundle.method, "gof")
            result = mc_gof(sample, bundle.law(variable), stream=stream,
                            refit=get_config().gof.REFIT_REPLICATES and variable in bundle.fits)
            print(f"{station:<10} {period:<6} {bundle.method:<6} {variable.value:<4} "
                  f"{result.chi2_ref:10.3f} {result.p_value:7.4f} {str(result.smoothed):>8}")
    return EXIT_OK


def cmd_trend(args) -> int:
    pcfg = _pipeline_config(args)
    settings = get_config().diagnostics
    print(f"{'station':<10} {'period':<6} {'var':<4} {'n':>7} {'tau':>8} {'p':>9} {'p_corr':>9}")
    for station, period, samples in _extracted(pcfg):
        for variable, sample in samples.items():
            if sample.n < settings.MK_MIN_LENGTH:
                print(f"{station:<10} {period:<6} {variable.value:<4} {sample.n:7d}   too short")
                continue
            classical = mk_test(sample.values)
            corrected = mk_test_corrected(sample.values) if sample.n >= settings.MK_CORRECTED_MIN_LENGTH else None
            p_corr = f"{corrected.p_corrected:9.4f}" if corrected else f"{'-':>9}"
            print(f"{station:<10} {period:<6} {variable.value:<4} {sample.n:7d} {classical.tau:8.4f} "
                  f"{classical.p_classical:9.4f} {p_corr}")
            if args.verbose:
                logger.debug("%s/%s/%s summary %s", station, period, variable.value, summary_stats(sample))
    return EXIT_OK


def cmd_report(args) -> int:
    pcfg = _pipeline_config(args)
    if pcfg.out_dir is None:
        pcfg.out_dir = get_config().results.DEFAULT_OUTPUT_DIR
    result = run_pipeline(pcfg)
    for report in result.reports:
        status = "complete" if report.complete else f"incomplete ({len(report.errors)} errors)"
        print(f"{report.station}: {status}")
        for error in report.errors:
            print(f"  {error['period']}/{error['method'] or '-'}/{error['variable'] or '-'} "
                  f"{error['stage']}: {error['message']}", file=sys.stderr)
    for path in result.paths:
        print(f"Saved: {path}")
    return result.exit_code


def _report_line(report) -> str:
    status = "complete" if report.get("complete", True) else f"incomplete ({len(report.get('errors', []))} errors)"
    periods = ",".join(report.get("periods", {})) or "-"
    return f"{report['station']:<10} {str(report.get('seed', '-')):>10} {periods:<12} {status}"


def cmd_reports(args) -> int:
    manager = ResultsManager(args.out)
    if args.keep is not None:
        if args.keep < 0:
            raise _usage_error("--keep must be non-negative")
        deleted = manager.cleanup_old_reports(args.keep)
        print(f"Deleted {deleted} old report(s) from {manager.results_dir}")

    if args.latest:
        latest = manager.get_latest_report()
        reports = [latest] if latest is not None else []
    else:
        reports = manager.list_reports(limit=args.limit)
    if not reports:
        print(f"No reports in {manager.results_dir}")
        return EXIT_OK
    print(f"{'station':<10} {'seed':>10} {'periods':<12} status")
    for report in reports:
        print(_report_line(report))
    return EXIT_OK


def cmd_simulate(args) -> int:
    name = args.station or ("SYN-IT" if args.renewal else "SYN")
    profile = renewal_profile(args.years, name) if args.renewal else bundled_profile(args.years, name)
    if args.missing_rate:
        profile = replace(profile, missing_rate=args.missing_rate)
    series = SyntheticStationGenerator(profile).generate()
    out_dir = args.out or get_config().results.DEFAULT_OUTPUT_DIR
    path = write_series(series, os.path.join(out_dir, f"{name}.csv"))
    print(f"Synthetic station {name}: {len(series)} days written to {path}")
    return EXIT_OK


HANDLERS = {
    "extract": cmd_extract,
    "fit": cmd_fit,
    "gof": cmd_gof,
    "trend": cmd_trend,
    "report": cmd_report,
    "reports": cmd_reports,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _configure(args)
        return HANDLERS[args.command](args)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    except SpellkitError as e:
        print(f"Error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except KeyboardInterrupt:
        print("\nRun interrupted by user")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
