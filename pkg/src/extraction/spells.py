"""
Inter-arrival times, wet/dry spells and wet/dry chains from a rainy-day indicator.

A missing day splits the record into independent segments. Runs touching a
segment boundary are censored: their observed length may be shorter than the
true one. Chain lengths count member days only (rainy days for wet chains,
dry days for dry chains).
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from samples import SpellSample, Variable
from .series import DRY, MISSING, RAINY, RainyIndicator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Runs:
    """Maximal runs of identical flags, missing runs removed"""

    kind: np.ndarray
    start: np.ndarray
    length: np.ndarray
    segment: np.ndarray
    touches_left: np.ndarray
    touches_right: np.ndarray

    @property
    def end(self) -> np.ndarray:
        return self.start + self.length - 1

    @property
    def censored(self) -> np.ndarray:
        return self.touches_left | self.touches_right

    def __len__(self) -> int:
        return int(self.kind.size)


def find_runs(flags: np.ndarray) -> Runs:
    flags = np.asarray(flags, dtype=np.int8)
    n = flags.size
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return Runs(empty, empty, empty, empty, empty.astype(bool), empty.astype(bool))
    change = np.flatnonzero(np.diff(flags)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [n])) - 1
    kinds = flags[starts]
    segment = np.cumsum(flags == MISSING)[starts]

    before = np.where(starts > 0, flags[np.maximum(starts - 1, 0)], MISSING)
    after = np.where(ends < n - 1, flags[np.minimum(ends + 1, n - 1)], MISSING)
    keep = kinds != MISSING
    return Runs(
        kind=kinds[keep].astype(np.int64),
        start=starts[keep].astype(np.int64),
        length=(ends - starts + 1)[keep].astype(np.int64),
        segment=segment[keep].astype(np.int64),
        touches_left=(before == MISSING)[keep],
        touches_right=(after == MISSING)[keep],
    )


def _assigned(ind: RainyIndicator, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    day = start if ind.assignment == "start" else end
    return ind.in_season(day)


def _finish(ind: RainyIndicator, variable: Variable, values: np.ndarray, start: np.ndarray,
            end: np.ndarray, censored: np.ndarray, diagnostic: str = None) -> SpellSample:
    in_season = _assigned(ind, start, end)
    seen_censored = int(np.count_nonzero(censored & in_season))
    keep = in_season if ind.censored_policy == "include" else in_season & ~censored
    values = values[keep]
    if values.size == 0 and diagnostic is None:
        diagnostic = f"no {variable.value} in {ind.period}"
    return SpellSample(variable=variable, values=values, period=ind.period, station=ind.station,
                       censored_count=seen_censored, diagnostic=diagnostic if values.size == 0 else None)


def extract_it(ind: RainyIndicator) -> SpellSample:
    """Days between each rainy day and the previous one within a missing-free stretch"""
    rainy = np.flatnonzero(ind.flags == RAINY)
    segment = np.cumsum(ind.flags == MISSING)
    if rainy.size < 2:
        empty = np.zeros(0, dtype=np.int64)
        return _finish(ind, Variable.IT, empty, empty, empty, empty.astype(bool),
                       diagnostic=f"fewer than 2 rainy days ({rainy.size})")
    prev, curr = rainy[:-1], rainy[1:]
    same = segment[prev] == segment[curr]
    prev, curr = prev[same], curr[same]
    return _finish(ind, Variable.IT, curr - prev, prev + 1, curr, np.zeros(curr.size, dtype=bool))


def derive_spells(ind: RainyIndicator) -> Dict[Variable, SpellSample]:
    """Wet spells (every rainy run) and dry spells (dry runs between two rainy days)"""
    runs = find_runs(ind.flags)
    wet = runs.kind == RAINY
    ws = _finish(ind, Variable.WS, runs.length[wet], runs.start[wet], runs.end[wet], runs.censored[wet])

    # Dry runs touching a boundary are not bracketed by rainy days
    dry = (runs.kind == DRY) & ~runs.censored
    ds = _finish(ind, Variable.DS, runs.length[dry], runs.start[dry], runs.end[dry],
                 np.zeros(int(dry.sum()), dtype=bool))
    return {Variable.WS: ws, Variable.DS: ds}


def _group_chains(runs: Runs, member: np.ndarray) -> List[Tuple[int, int]]:
    """(first, last) run indices of each chain; members link across one-day breakers"""
    chains = []
    indices = np.flatnonzero(member)
    i = 0
    while i < indices.size:
        first = last = int(indices[i])
        i += 1
        while (i < indices.size and indices[i] == last + 2
               and runs.length[last + 1] == 1
               and runs.segment[last] == runs.segment[last + 2]):
            last = int(indices[i])
            i += 1
        chains.append((first, last))
    return chains


def _chain_censored(runs: Runs, first: int, last: int) -> bool:
    if runs.censored[first] or runs.censored[last]:
        return True
    prev_open = first == 0 or runs.segment[first - 1] != runs.segment[first] or runs.length[first - 1] == 1
    next_open = (last == len(runs) - 1 or runs.segment[last + 1] != runs.segment[last]
                 or runs.length[last + 1] == 1)
    return bool(prev_open or next_open)


def _chains(ind: RainyIndicator, runs: Runs, member: np.ndarray, variable: Variable) -> SpellSample:
    groups = _group_chains(runs, member)
    if not groups:
        empty = np.zeros(0, dtype=np.int64)
        return _finish(ind, variable, empty, empty, empty, empty.astype(bool))
    values = np.array([runs.length[f:l + 1:2].sum() for f, l in groups], dtype=np.int64)
    start = np.array([runs.start[f] for f, _ in groups], dtype=np.int64)
    end = np.array([runs.end[l] for _, l in groups], dtype=np.int64)
    censored = np.array([_chain_censored(runs, f, l) for f, l in groups], dtype=bool)
    return _finish(ind, variable, values, start, end, censored)


def derive_chains(ind: RainyIndicator) -> Dict[Variable, SpellSample]:
    """Wet chains (wet spells joined across 1-day dry spells) and the dry counterpart"""
    runs = find_runs(ind.flags)
    wet_members = runs.kind == RAINY
    dry_members = (runs.kind == DRY) & ~runs.censored
    return {
        Variable.WCH: _chains(ind, runs, wet_members, Variable.WCH),
        Variable.DCH: _chains(ind, runs, dry_members, Variable.DCH),
    }


def extract_all(ind: RainyIndicator) -> Dict[Variable, SpellSample]:
    """The five samples for one indicator (one season)"""
    out = {Variable.IT: extract_it(ind)}
    out.update(derive_spells(ind))
    out.update(derive_chains(ind))
    logger.debug("%s/%s: %s", ind.station, ind.period,
                 ", ".join(f"{v.value}={s.n}" for v, s in out.items()))
    return out
