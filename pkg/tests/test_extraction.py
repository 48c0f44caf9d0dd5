"""
Tests for thresholding, seasonal splitting and the five duration samples.
"""

import numpy as np
import pytest

from errors import InvalidArgumentError
from rng import generator
from samples import S1, S2, YEAR, Variable
from extraction import (
    DRY, MISSING, RAINY, ExtractionConfig, RainfallSeries, RainyIndicator, Season,
    extract_all, extract_it, find_runs, mark_rainy, split_seasons,
)
from diagnostics import cumfreq_ratio
from pipeline import SyntheticStationGenerator, renewal_profile


def _values(samples, variable):
    return samples[variable].values.tolist()


class TestSeries:

    def test_mark_rainy(self):
        series = RainfallSeries.from_depths([0.5, 1.0, np.nan, 2.0, 0.0])
        np.testing.assert_array_equal(mark_rainy(series, 1.0).flags, [DRY, RAINY, MISSING, RAINY, DRY])
        np.testing.assert_array_equal(mark_rainy(series, 0.4).flags, [RAINY, RAINY, MISSING, RAINY, DRY])

    def test_threshold_must_be_positive(self):
        series = RainfallSeries.from_depths([0.5, 1.0])
        with pytest.raises(InvalidArgumentError):
            mark_rainy(series, 0.0)

    def test_empty_series(self):
        with pytest.raises(InvalidArgumentError):
            mark_rainy(RainfallSeries.from_depths([]), 1.0)

    def test_dates_must_be_contiguous(self):
        dates = np.array(["2000-01-01", "2000-01-03"], dtype="datetime64[D]")
        with pytest.raises(InvalidArgumentError):
            RainfallSeries(dates, np.array([1.0, 2.0]))

    def test_negative_depth(self):
        with pytest.raises(InvalidArgumentError):
            RainfallSeries.from_depths([1.0, -0.1])

    def test_pattern_codes(self):
        ind = RainyIndicator.from_pattern("RD.M")
        np.testing.assert_array_equal(ind.flags, [RAINY, DRY, MISSING, MISSING])
        with pytest.raises(InvalidArgumentError):
            RainyIndicator.from_pattern("RDX")


class TestTrace:

    def test_samples(self, trace_indicator):
        samples = extract_all(trace_indicator)
        assert _values(samples, Variable.IT) == [1, 2, 4, 1, 1, 2]
        assert _values(samples, Variable.WS) == [2, 1, 3, 1]
        assert _values(samples, Variable.DS) == [1, 3, 1]
        assert _values(samples, Variable.WCH) == [3, 4]
        assert _values(samples, Variable.DCH) == [4, 1]

    def test_censored_counts(self, trace_indicator):
        samples = extract_all(trace_indicator)
        assert samples[Variable.WS].censored_count == 1
        assert samples[Variable.WCH].censored_count == 1
        assert samples[Variable.DCH].censored_count == 1
        assert samples[Variable.IT].censored_count == 0

    def test_exclude_censored(self, trace_indicator):
        ind = trace_indicator.with_season(YEAR, None, "start", "exclude")
        samples = extract_all(ind)
        assert _values(samples, Variable.WS) == [1, 3, 1]
        assert _values(samples, Variable.DS) == [1, 3, 1]
        assert _values(samples, Variable.WCH) == [4]
        assert _values(samples, Variable.DCH) == [4]

    def test_metadata(self, trace_indicator):
        ws = extract_all(trace_indicator)[Variable.WS]
        assert ws.station == "TRC"
        assert ws.period == YEAR
        assert ws.label() == "TRC/Year/ws"

    def test_runs(self, trace_indicator):
        runs = find_runs(trace_indicator.flags)
        assert runs.length.tolist() == [2, 1, 1, 3, 3, 1, 1, 2]
        assert runs.censored.tolist() == [True] + [False] * 6 + [True]


class TestMissingDays:

    def test_missing_day_splits_inter_arrivals(self):
        assert extract_it(RainyIndicator.from_pattern("RRMRR")).values.tolist() == [1, 1]

    def test_spells_next_to_missing_are_censored(self):
        samples = extract_all(RainyIndicator.from_pattern("DRRDDMDRDDR"))
        assert _values(samples, Variable.WS) == [2, 1, 1]
        assert samples[Variable.WS].censored_count == 1
        # dry runs touching the gap or the record ends are not bracketed by rain
        assert _values(samples, Variable.DS) == [2]

    def test_too_few_rainy_days(self):
        it = extract_it(RainyIndicator.from_pattern("DDRDD"))
        assert it.is_empty
        assert "fewer than 2 rainy days" in it.diagnostic

    def test_all_missing(self):
        samples = extract_all(RainyIndicator.from_pattern("MMMM"))
        assert all(s.is_empty for s in samples.values())


class TestInvariants:

    @pytest.mark.parametrize("seed", range(20))
    def test_sums(self, seed):
        gen = generator("extraction", seed)
        flags = np.where(gen.random(400) < 0.35, RAINY, DRY)
        ind = RainyIndicator(np.datetime64("2000-01-01") + np.arange(400), flags)
        samples = extract_all(ind)
        rainy = np.flatnonzero(flags == RAINY)

        assert samples[Variable.WS].values.sum() == rainy.size
        assert samples[Variable.IT].values.sum() == rainy[-1] - rainy[0]
        assert samples[Variable.IT].n == rainy.size - 1
        assert samples[Variable.WCH].values.sum() == samples[Variable.WS].values.sum()
        assert samples[Variable.DCH].values.sum() == samples[Variable.DS].values.sum()
        assert samples[Variable.WCH].n <= samples[Variable.WS].n
        for sample in samples.values():
            assert sample.is_empty or sample.values.min() >= 1


class TestSeasons:

    def _indicator(self):
        # 25-27 Sep rainy, 28 Sep to 3 Oct dry, 4-5 Oct rainy
        return RainyIndicator.from_pattern("RRRDDDDDDRR", start="2001-09-25", station="SEA")

    def test_spell_assigned_to_start_season(self):
        split = split_seasons(self._indicator(), ExtractionConfig.for_choice("all"))
        assert list(split) == [YEAR, S1, S2]
        assert extract_all(split[S1])[Variable.DS].values.tolist() == [6]
        assert extract_all(split[S2])[Variable.DS].is_empty
        assert extract_all(split[YEAR])[Variable.DS].values.tolist() == [6]

    def test_end_assignment(self):
        split = split_seasons(self._indicator(), ExtractionConfig.for_choice("all", assignment="end"))
        assert extract_all(split[S1])[Variable.DS].is_empty
        assert extract_all(split[S2])[Variable.DS].values.tolist() == [6]

    def test_crossing_spell_keeps_full_length(self):
        split = split_seasons(self._indicator(), ExtractionConfig.for_choice("s1"))
        ws = extract_all(split[S1])[Variable.WS]
        assert ws.values.tolist() == [3]
        assert "no ws" not in (ws.diagnostic or "")

    def test_empty_season_has_diagnostic(self):
        split = split_seasons(RainyIndicator.from_pattern("RDRDR", start="2001-01-10"),
                              ExtractionConfig.for_choice("s1"))
        ws = extract_all(split[S1])[Variable.WS]
        assert ws.is_empty
        assert ws.diagnostic == "no ws in S1"

    def test_config_validation(self):
        with pytest.raises(InvalidArgumentError):
            ExtractionConfig.for_choice("spring")
        with pytest.raises(InvalidArgumentError):
            ExtractionConfig(seasons=(Season("A", frozenset({1, 2})), Season("B", frozenset({2, 3}))))
        with pytest.raises(InvalidArgumentError):
            ExtractionConfig(threshold=0.0)
        with pytest.raises(InvalidArgumentError):
            Season("bad", frozenset({13}))

    def test_custom_season(self):
        cfg = ExtractionConfig.custom("JJA", [6, 7, 8])
        assert cfg.to_dict()["seasons"] == {"JJA": [6, 7, 8]}

    def test_threshold_from_config(self, fresh_config):
        fresh_config.set_runtime_parameters(threshold=2.5)
        assert ExtractionConfig.for_choice().threshold == 2.5


def _pattern(wet, dry):
    """R/D pattern for alternating spells wet[0], dry[0], wet[1], ..., wet[-1]"""
    parts = []
    for i, w in enumerate(wet):
        parts.append("R" * w)
        if i < len(dry):
            parts.append("D" * dry[i])
    return "".join(parts)


def _joined(members, breakers):
    """Sum members across one-day breakers; breakers[i] sits between members i and i + 1"""
    out = [members[0]]
    for breaker, member in zip(breakers, members[1:]):
        if breaker == 1:
            out[-1] += member
        else:
            out.append(member)
    return out


class TestSpellProperties:

    def test_round_trip(self):
        gen = generator("round-trip")
        for _ in range(1000):
            n = int(gen.integers(1, 12))
            wet = gen.integers(1, 6, size=n).tolist()
            dry = gen.integers(1, 6, size=n - 1).tolist()
            samples = extract_all(RainyIndicator.from_pattern(_pattern(wet, dry)))

            expected_it = []
            for i, w in enumerate(wet):
                expected_it += [1] * (w - 1)
                if i < len(dry):
                    expected_it.append(dry[i] + 1)
            assert _values(samples, Variable.WS) == wet
            assert _values(samples, Variable.DS) == dry
            assert _values(samples, Variable.IT) == expected_it
            assert _values(samples, Variable.WCH) == _joined(wet, dry)
            if dry:
                assert _values(samples, Variable.DCH) == _joined(dry, wet[1:-1])

    @pytest.mark.parametrize("seed", range(20))
    def test_counts(self, seed):
        gen = generator("extraction-counts", seed)
        flags = np.where(gen.random(500) < 0.4, RAINY, DRY)
        samples = extract_all(RainyIndicator(np.datetime64("2000-01-01") + np.arange(500), flags))
        ws, ds, it = (samples[v].values for v in (Variable.WS, Variable.DS, Variable.IT))

        assert ds.size == np.count_nonzero(it > 1)
        assert np.count_nonzero(it == 1) == ws.sum() - ws.size
        assert ws.size - ds.size in (0, 1)

    def test_station_chains_dominate_spells(self):
        series = SyntheticStationGenerator(renewal_profile(years=30)).generate()
        samples = extract_all(mark_rainy(series, 1.0))
        for spell, chain in ((Variable.WS, Variable.WCH), (Variable.DS, Variable.DCH)):
            k = np.arange(1, int(samples[chain].values.max()) + 1)
            s_spell = (samples[spell].values[:, None] > k).mean(axis=0)
            s_chain = (samples[chain].values[:, None] > k).mean(axis=0)
            assert np.all(s_chain >= s_spell)
            ratios = [r for _, r in cumfreq_ratio(samples[spell], samples[chain])]
            assert min(ratios) >= 1.0
