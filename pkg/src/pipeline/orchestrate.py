"""
Station pipeline: extraction, fitting, testing and diagnostics for every
requested period and method, assembled into one report per station.

Tasks are keyed by (period, method) and may run on a thread pool; the report
is assembled in a fixed order afterwards so its content does not depend on the
thread count. Every random draw comes from the substream
(station, period, variable, method, task) of the master seed.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import rng as rng_module
from config import get_config
from errors import EXIT_OK, SpellkitError, exit_code_for
from samples import SpellSample, Variable
from distributions import LerchModel
from extraction import ExtractionConfig, RainfallSeries, extract_all, mark_rainy, split_seasons
from gof import mc_gof
from methods import DM, IM, ModelBundle, run_dm, run_im
from diagnostics import (
    cumfreq_ratio, mk_test, mk_test_corrected, quantile_compare, standard_error_of_estimate,
    summary_stats, survival_ratios, theoretical_survival_ratios,
)
from results import ResultsManager
from .ingest import parse_series
from .synthetic import SyntheticStationGenerator, bundled_profile
from .tables import emit_plot_tables

logger = logging.getLogger(__name__)

METHOD_CHOICES = {"dm": (DM,), "im": (IM,), "both": (DM, IM)}
RATIO_VARIABLES = (Variable.WS, Variable.DS)
CHAIN_PAIRS = ((Variable.WS, Variable.WCH), (Variable.DS, Variable.DCH))


@dataclass
class PipelineConfig:
    """What to analyse and where to put it.

    Statistical settings (replicates, alpha, smoothing, refit, threads) are
    read from the global config, which main.py overrides from the CLI flags.
    """

    inputs: Sequence[str] = ()
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig.for_choice)
    method: str = "both"
    out_dir: Optional[str] = None
    station: Optional[str] = None
    synthetic: bool = False
    synthetic_years: int = 30
    write_tables: bool = True

    def __post_init__(self):
        if self.method not in METHOD_CHOICES:
            raise ValueError(f"method must be one of {sorted(METHOD_CHOICES)}, got '{self.method}'")
        if not self.inputs and not self.synthetic:
            raise ValueError("no input file given and the synthetic station not requested")

    @property
    def methods(self) -> Tuple[str, ...]:
        return METHOD_CHOICES[self.method]


@dataclass
class StationReport:
    """Report for one station, plus the errors met while building it"""

    station: str
    data: Dict[str, object]
    errors: List[Dict[str, object]] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.errors

    @property
    def exit_code(self) -> int:
        return self.errors[0]["exit_code"] if self.errors else EXIT_OK


@dataclass
class PipelineResult:
    reports: List[StationReport]
    paths: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        for report in self.reports:
            if report.exit_code != EXIT_OK:
                return report.exit_code
        return EXIT_OK


def _error_record(exc: BaseException, station: str, period: str, method: Optional[str] = None,
                  variable: Optional[Variable] = None, stage: str = "") -> Dict[str, object]:
    context = "/".join(p for p in (station, period, method, variable.value if variable else None) if p)
    logger.error("%s %s failed: %s", context, stage, exc)
    return {
        "period": period,
        "method": method,
        "variable": variable.value if variable else None,
        "stage": stage,
        "type": type(exc).__name__,
        "message": str(exc),
        "exit_code": exit_code_for(exc),
    }


# =============================================================================
# SAMPLE AND DIAGNOSTIC SECTIONS
# =============================================================================

def _sample_entry(sample: SpellSample) -> Dict[str, object]:
    entry = {
        "n": sample.n,
        "censored": sample.censored_count,
        "diagnostic": sample.diagnostic,
        "frequencies": [int(c) for c in sample.frequencies()],
    }
    entry["summary"] = summary_stats(sample) if not sample.is_empty else None
    return entry


def _trend_entry(sample: SpellSample) -> Dict[str, object]:
    settings = get_config().diagnostics
    entry = {"classical": None, "corrected": None}
    if sample.n >= settings.MK_MIN_LENGTH:
        entry["classical"] = mk_test(sample.values).to_dict()
    if sample.n >= settings.MK_CORRECTED_MIN_LENGTH:
        entry["corrected"] = mk_test_corrected(sample.values).to_dict()
    return entry


def _diagnostics(samples: Dict[Variable, SpellSample]) -> Dict[str, object]:
    trend = {v.value: _trend_entry(samples[v]) for v in Variable}
    ratios = {
        v.value: survival_ratios(samples[v]).to_dict() if not samples[v].is_empty else None
        for v in RATIO_VARIABLES
    }
    cumfreq = {}
    for spell_var, chain_var in CHAIN_PAIRS:
        spell, chain = samples[spell_var], samples[chain_var]
        key = f"{spell_var.value}/{chain_var.value}"
        if spell.is_empty or chain.is_empty:
            cumfreq[key] = []
        else:
            cumfreq[key] = [{"k": k, "ratio": r} for k, r in cumfreq_ratio(spell, chain)]
    return {"trend": trend, "survival_ratios": ratios, "cumfreq_ratios": cumfreq}


# =============================================================================
# METHOD SECTIONS
# =============================================================================

def _fit_bundle(method: str, samples: Dict[Variable, SpellSample]) -> ModelBundle:
    if method == DM:
        return run_dm(samples[Variable.IT], threads=1)
    return run_im(samples[Variable.WS], samples[Variable.DS], threads=1)


def _variable_entry(bundle: ModelBundle, sample: SpellSample, station: str, method: str,
                    errors: List[Dict[str, object]]) -> Dict[str, object]:
    variable = sample.variable
    law = bundle.law(variable)
    entry = {"provenance": bundle.provenance[variable], "n": sample.n}
    if isinstance(law, LerchModel):
        entry["family"] = law.family.label
        entry["params"] = law.params.as_dict()
    else:
        entry["family"] = None
        entry["params"] = None
    if variable in bundle.fits:
        fit = bundle.fits[variable]
        entry["loglik"] = fit.loglik
        entry["converged"] = fit.converged
        entry["selection"] = bundle.traces[variable].to_dict()
    entry["gof"] = None
    entry["quantile"] = None
    entry["fitted_pmf"] = []
    entry["theoretical_ratios"] = []
    if sample.is_empty:
        return entry

    k_max = int(sample.values.max())
    entry["fitted_pmf"] = [float(p) for p in np.atleast_1d(law.pmf(np.arange(1, k_max + 1)))]
    entry["quantile"] = quantile_compare(sample, law)
    if variable in RATIO_VARIABLES:
        entry["theoretical_ratios"] = [float(r) for r in theoretical_survival_ratios(law, k_max)]

    stream = rng_module.substream(station, sample.period, variable.value, method, "gof")
    refit = get_config().gof.REFIT_REPLICATES and variable in bundle.fits
    try:
        entry["gof"] = mc_gof(sample, law, stream=stream, refit=refit, threads=1).to_dict()
    except SpellkitError as exc:
        errors.append(_error_record(exc, station, sample.period, method, variable, "gof"))
    return entry


def _method_section(method: str, samples: Dict[Variable, SpellSample],
                    station: str) -> Tuple[Dict[str, object], List[Dict[str, object]]]:
    errors: List[Dict[str, object]] = []
    period = samples[Variable.IT].period
    try:
        bundle = _fit_bundle(method, samples)
    except SpellkitError as exc:
        errors.append(_error_record(exc, station, period, method, stage="fit"))
        return {"status": "failed", "variables": {}, "see": None}, errors

    variables = {v.value: _variable_entry(bundle, samples[v], station, method, errors) for v in Variable}
    pairs = [e["quantile"] for e in variables.values() if e["quantile"] is not None]
    section = {
        "status": "ok",
        "variables": variables,
        "see": standard_error_of_estimate(pairs) if pairs else None,
    }
    logger.info("%s/%s %s done", station, period, method)
    return section, errors


# =============================================================================
# STATION AND PIPELINE
# =============================================================================

def _series_entry(series: RainfallSeries, rainy_days: int) -> Dict[str, object]:
    return {
        "days": len(series),
        "start": str(series.dates[0]) if len(series) else None,
        "end": str(series.dates[-1]) if len(series) else None,
        "missing": series.missing_count,
        "inserted_missing": series.inserted_missing,
        "rainy_days": rainy_days,
    }


def run_station(series: RainfallSeries, pcfg: PipelineConfig) -> StationReport:
    """Extract, fit, test and diagnose one station"""
    cfg = get_config()
    station = series.station or "station"
    indicator = mark_rainy(series, pcfg.extraction.threshold)
    by_period = {label: extract_all(ind) for label, ind in split_seasons(indicator, pcfg.extraction).items()}

    tasks = [(period, method) for period in by_period for method in pcfg.methods]
    threads = cfg.runtime.THREADS

    def work(task):
        period, method = task
        return _method_section(method, by_period[period], station)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            outcomes = list(pool.map(work, tasks))
    else:
        outcomes = [work(task) for task in tasks]
    results = dict(zip(tasks, outcomes))

    errors: List[Dict[str, object]] = []
    periods = {}
    for period, samples in by_period.items():
        methods = {}
        for method in pcfg.methods:
            section, task_errors = results[(period, method)]
            methods[method] = section
            errors.extend(task_errors)
        try:
            diagnostics = _diagnostics(samples)
        except SpellkitError as exc:
            errors.append(_error_record(exc, station, period, stage="diagnostics"))
            diagnostics = None
        periods[period] = {
            "samples": {v.value: _sample_entry(samples[v]) for v in Variable},
            "methods": methods,
            "diagnostics": diagnostics,
        }

    data = {
        "schema_version": cfg.results.SCHEMA_VERSION,
        "station": station,
        "seed": rng_module.get_current_seed(),
        "config": {**cfg.echo(), "method": pcfg.method, "extraction": pcfg.extraction.to_dict()},
        "complete": not errors,
        "errors": errors,
        "series": _series_entry(series, indicator.rainy_days),
        "periods": periods,
    }
    if errors:
        logger.warning("%s: report incomplete (%d errors)", station, len(errors))
    return StationReport(station=station, data=data, errors=errors)


def load_inputs(pcfg: PipelineConfig) -> List[RainfallSeries]:
    series = [parse_series(path, station=pcfg.station if len(pcfg.inputs) == 1 else None)
              for path in pcfg.inputs]
    if pcfg.synthetic:
        profile = bundled_profile(years=pcfg.synthetic_years, name=pcfg.station or "SYN")
        series.append(SyntheticStationGenerator(profile).generate())
    return series


def run_pipeline(pcfg: PipelineConfig) -> PipelineResult:
    """Run every station, save the reports and, if asked, the plot tables.

    Stations are processed in input order; errors inside a station are kept
    in its report (marked incomplete) and do not stop the other stations.
    """
    result = PipelineResult(reports=[run_station(s, pcfg) for s in load_inputs(pcfg)])
    if pcfg.out_dir is not None:
        manager = ResultsManager(pcfg.out_dir)
        for report in result.reports:
            result.paths.append(manager.save_report(report.data))
            if pcfg.write_tables:
                result.paths.extend(emit_plot_tables(report.data, pcfg.out_dir))
    return result
