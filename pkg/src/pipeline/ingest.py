"""
Reading and writing daily rainfall files.

Format: comma-separated, header ``date,depth_mm``, ISO-8601 dates, one row per
day. An empty depth field or ``NA`` marks a missing day. Gaps in the dates are
filled with missing days.
"""

import logging
import os
import re
from typing import Optional

import numpy as np
import pandas as pd

from errors import DataError
from extraction import RainfallSeries

logger = logging.getLogger(__name__)

HEADER = ["date", "depth_mm"]
MISSING_MARKERS = ("", "NA")
DATE_FORMAT = "%Y-%m-%d"

_PARSER_LINE = re.compile(r"line (\d+)")


def _line(index: int) -> int:
    # row 0 sits on line 2, after the header
    return int(index) + 2


def _read_frame(path: str) -> pd.DataFrame:
    if not os.path.exists(path):
        raise DataError(f"no such file: {path}")
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False,
                           skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataError(f"{path} is empty") from None
    except pd.errors.ParserError as exc:
        match = _PARSER_LINE.search(str(exc))
        raise DataError(f"malformed row in {path}: {exc}",
                        line=int(match.group(1)) if match else None) from None


def parse_series(path: str, station: Optional[str] = None) -> RainfallSeries:
    """Parse a station file into a contiguous RainfallSeries.

    Args:
        path: CSV file with header ``date,depth_mm``
        station: Station label; defaults to the file name without extension

    Returns:
        The validated series, with date gaps filled by missing days

    Raises:
        DataError: empty file, wrong header, malformed row (with its line
            number), unparseable date or depth, negative depth, or dates that
            do not strictly increase
    """
    if station is None:
        station = os.path.splitext(os.path.basename(path))[0]

    frame = _read_frame(path)
    columns = [c.strip() for c in frame.columns]
    if columns != HEADER:
        raise DataError(f"expected header '{','.join(HEADER)}', got '{','.join(columns)}'", line=1)
    frame.columns = HEADER

    # Blank lines come back as empty rows; they keep their place in the line count
    blank = frame["date"].fillna("").eq("") & frame["depth_mm"].fillna("").eq("")
    frame = frame[~blank]
    if frame.empty:
        raise DataError(f"{path} has no data rows")

    short = frame["depth_mm"].isna() | frame["date"].isna()
    if short.any():
        raise DataError("expected 2 fields (date,depth_mm)", line=_line(frame.index[short.argmax()]))

    dates = pd.to_datetime(frame["date"].str.strip(), format=DATE_FORMAT, errors="coerce")
    if dates.isna().any():
        bad = dates.isna().argmax()
        raise DataError(f"invalid date '{frame['date'].iloc[bad]}'", line=_line(frame.index[bad]))

    raw_depth = frame["depth_mm"].str.strip()
    missing = raw_depth.isin(MISSING_MARKERS)
    depths = pd.to_numeric(raw_depth.where(~missing), errors="coerce")
    unparsed = depths.isna() & ~missing
    if unparsed.any():
        bad = unparsed.argmax()
        raise DataError(f"invalid depth '{raw_depth.iloc[bad]}'", line=_line(frame.index[bad]))
    negative = depths < 0
    if negative.any():
        bad = negative.argmax()
        raise DataError(f"negative depth {depths.iloc[bad]}", line=_line(frame.index[bad]))

    steps = dates.diff().dt.days.iloc[1:]
    not_increasing = steps <= 0
    if not_increasing.any():
        bad = int(not_increasing.argmax()) + 1
        raise DataError(f"date {frame['date'].iloc[bad]} does not follow {frame['date'].iloc[bad - 1]}",
                        line=_line(frame.index[bad]))

    daily = pd.Series(depths.to_numpy(dtype=float), index=pd.DatetimeIndex(dates))
    full_index = pd.date_range(daily.index[0], daily.index[-1], freq="D")
    inserted = len(full_index) - len(daily)
    if inserted:
        logger.warning("%s: %d missing dates inserted as missing days", station, inserted)
        daily = daily.reindex(full_index)

    logger.info("%s: %d days from %s to %s, %d missing", station, len(daily),
                full_index[0].date(), full_index[-1].date(), int(daily.isna().sum()))
    return RainfallSeries(daily.index.to_numpy().astype("datetime64[D]"), daily.to_numpy(dtype=float),
                          station=station, inserted_missing=inserted)


def write_series(series: RainfallSeries, path: str) -> str:
    """Write a series in the format parse_series reads (missing days as NA)"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    frame = pd.DataFrame({
        "date": np.datetime_as_string(series.dates, unit="D"),
        "depth_mm": series.depths,
    })
    frame.to_csv(path, index=False, na_rep="NA")
    return path
