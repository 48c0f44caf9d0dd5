"""
Plot-ready tables built from a station report.

Every table is tidy: one row per plotted point. Tables are built from the
report dictionary alone, so they can be regenerated from a saved report.
"""

import logging
import os
from typing import Dict, List

import numpy as np
import pandas as pd

from config import get_config

logger = logging.getLogger(__name__)

CUMULATIVE_COLUMNS = ["station", "period", "variable", "method", "k", "empirical", "fitted"]
ABS_DIFF_COLUMNS = ["station", "period", "variable", "k", "observed", "abs_diff_DM", "abs_diff_IM"]
RATIO_COLUMNS = ["station", "period", "variable", "r", "empirical", "at_risk", "DM", "IM"]
CUMFREQ_COLUMNS = ["station", "period", "pair", "k", "ratio"]
QUANTILE_COLUMNS = ["station", "period", "record", "variable", "method", "empirical", "theoretical", "see"]


def _observed(sample_entry: Dict[str, object]) -> np.ndarray:
    counts = np.asarray(sample_entry["frequencies"], dtype=float)
    return counts / counts.sum() if counts.size else counts


def _method_variables(period_entry: Dict[str, object], method: str) -> Dict[str, Dict[str, object]]:
    return period_entry["methods"].get(method, {}).get("variables", {})


def cumulative_rows(report: Dict[str, object]) -> List[Dict[str, object]]:
    """Empirical cumulative frequency against the fitted cdf, per variable and method"""
    rows = []
    for period, entry in report["periods"].items():
        for variable, sample_entry in entry["samples"].items():
            empirical = np.cumsum(_observed(sample_entry))
            for method in entry["methods"]:
                fitted_pmf = _method_variables(entry, method).get(variable, {}).get("fitted_pmf") or []
                fitted = np.cumsum(fitted_pmf)
                for k in range(1, min(empirical.size, fitted.size) + 1):
                    rows.append({"station": report["station"], "period": period, "variable": variable,
                                 "method": method, "k": k, "empirical": float(empirical[k - 1]),
                                 "fitted": float(fitted[k - 1])})
    return rows


def abs_diff_rows(report: Dict[str, object]) -> List[Dict[str, object]]:
    """|observed frequency - fitted probability| per k, one column per method"""
    rows = []
    for period, entry in report["periods"].items():
        for variable, sample_entry in entry["samples"].items():
            observed = _observed(sample_entry)
            diffs = {}
            for method in ("DM", "IM"):
                fitted = _method_variables(entry, method).get(variable, {}).get("fitted_pmf") or []
                if len(fitted) == observed.size:
                    diffs[method] = np.abs(observed - np.asarray(fitted, dtype=float))
            for k in range(1, observed.size + 1):
                rows.append({
                    "station": report["station"], "period": period, "variable": variable, "k": k,
                    "observed": float(observed[k - 1]),
                    "abs_diff_DM": float(diffs["DM"][k - 1]) if "DM" in diffs else None,
                    "abs_diff_IM": float(diffs["IM"][k - 1]) if "IM" in diffs else None,
                })
    return rows


def ratio_rows(report: Dict[str, object]) -> List[Dict[str, object]]:
    """Observed S_{r+1}/S_r next to each method's theoretical ratio"""
    rows = []
    for period, entry in report["periods"].items():
        diagnostics = entry.get("diagnostics") or {}
        for variable, series in (diagnostics.get("survival_ratios") or {}).items():
            if not series:
                continue
            theoretical = {m: _method_variables(entry, m).get(variable, {}).get("theoretical_ratios") or []
                           for m in ("DM", "IM")}
            for r, ratio, at_risk in zip(series["r"], series["ratio"], series["at_risk"]):
                row = {"station": report["station"], "period": period, "variable": variable,
                       "r": r, "empirical": ratio, "at_risk": at_risk}
                for method, values in theoretical.items():
                    row[method] = values[r - 1] if r <= len(values) else None
                rows.append(row)
    return rows


def cumfreq_rows(report: Dict[str, object]) -> List[Dict[str, object]]:
    rows = []
    for period, entry in report["periods"].items():
        diagnostics = entry.get("diagnostics") or {}
        for pair, points in (diagnostics.get("cumfreq_ratios") or {}).items():
            for point in points:
                rows.append({"station": report["station"], "period": period, "pair": pair,
                             "k": point["k"], "ratio": point["ratio"]})
    return rows


def quantile_rows(report: Dict[str, object]) -> List[Dict[str, object]]:
    """Q pairs per (period, variable, method), then one SEE footer row per method"""
    rows = []
    pairs: Dict[str, List[float]] = {}
    for period, entry in report["periods"].items():
        for method in entry["methods"]:
            for variable, var_entry in _method_variables(entry, method).items():
                pair = var_entry.get("quantile")
                if not pair:
                    continue
                rows.append({"station": report["station"], "period": period, "record": "point",
                             "variable": variable, "method": method, "empirical": pair["empirical"],
                             "theoretical": pair["theoretical"], "see": None})
                pairs.setdefault(method, []).append(pair["empirical"] - pair["theoretical"])
    for method, diffs in pairs.items():
        see = float(np.sqrt(np.mean(np.square(diffs))))
        rows.append({"station": report["station"], "period": None, "record": "SEE", "variable": None,
                     "method": method, "empirical": None, "theoretical": None, "see": see})
    return rows


def plot_tables(report: Dict[str, object]) -> Dict[str, pd.DataFrame]:
    """All plot tables of a report, keyed by file name"""
    names = get_config().results
    return {
        names.CUMULATIVE_TABLE: pd.DataFrame(cumulative_rows(report), columns=CUMULATIVE_COLUMNS),
        names.ABS_DIFF_TABLE: pd.DataFrame(abs_diff_rows(report), columns=ABS_DIFF_COLUMNS),
        names.RATIO_TABLE: pd.DataFrame(ratio_rows(report), columns=RATIO_COLUMNS),
        names.CUMFREQ_RATIO_TABLE: pd.DataFrame(cumfreq_rows(report), columns=CUMFREQ_COLUMNS),
        names.QUANTILE_TABLE: pd.DataFrame(quantile_rows(report), columns=QUANTILE_COLUMNS),
    }


def emit_plot_tables(report: Dict[str, object], out_dir: str) -> List[str]:
    """Write the plot tables as ``<station>_<table>.csv`` files.

    A period without spells yields tables with a header and no rows.

    Returns:
        Paths of the written files
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, frame in plot_tables(report).items():
        path = os.path.join(out_dir, f"{report['station']}_{name}")
        frame.to_csv(path, index=False, float_format="%.10g")
        paths.append(path)
        logger.debug("wrote %s (%d rows)", path, len(frame))
    return paths
