"""
Tests for frequency tables, outlier smoothing and the simulated chi-square test.
"""

import numpy as np
import pytest

from errors import InvalidArgumentError
from rng import configure_rng, generator, substream
from samples import SpellSample, Variable
from distributions import LerchModel, PmfTable, sample
from gof import Binning, FrequencyTable, GofResult, chi2_statistic, class_probabilities, mc_gof, smooth_outliers

GEOM_HALF = LerchModel.geometric(0.5)


class TestFrequencyTable:

    def test_from_values(self):
        table = FrequencyTable.from_values([1, 1, 3])
        np.testing.assert_array_equal(table.counts, [2.0, 0.0, 1.0])
        assert table.total == 3.0
        assert table.count(2) == 0.0
        assert table.count(9) == 0.0

    def test_mass_is_checked(self):
        with pytest.raises(InvalidArgumentError):
            FrequencyTable(np.array([1.0, 2.0]), 4.0)
        with pytest.raises(InvalidArgumentError):
            FrequencyTable(np.array([-1.0, 2.0]), 1.0)

    def test_binning(self):
        classes = Binning.per_value(3)
        assert classes.n_classes == 4
        assert classes.labels() == ["1", "2", "3", ">=4"]
        np.testing.assert_array_equal(classes.classify(np.array([1, 2, 9, 4, 1])), [2.0, 1.0, 0.0, 2.0])
        with pytest.raises(InvalidArgumentError):
            Binning(np.array([2, 3]))
        with pytest.raises(InvalidArgumentError):
            Binning(np.array([1, 3, 3]))


class TestSmoothing:

    def test_single_outlier(self):
        counts = {k: 5.0 for k in range(1, 11)}
        counts[20] = 1.0
        table = FrequencyTable.from_mapping(counts)
        smoothed = smooth_outliers(table, gap_threshold=5)
        np.testing.assert_allclose(smoothed.counts[10:20], 0.1)
        np.testing.assert_allclose(smoothed.counts[:10], 5.0)
        assert smoothed.counts.sum() == pytest.approx(table.total, abs=1e-9)

    def test_no_gap_is_identity(self):
        table = FrequencyTable.from_values([1, 1, 2, 3, 3, 4, 6])
        np.testing.assert_array_equal(smooth_outliers(table, gap_threshold=5).counts, table.counts)

    def test_two_outliers(self):
        table = FrequencyTable.from_mapping({1: 5.0, 5: 1.0, 9: 1.0})
        smoothed = smooth_outliers(table, gap_threshold=3)
        np.testing.assert_allclose(smoothed.counts, [5.0] + [0.25] * 8)

    def test_frequent_value_is_not_an_outlier(self):
        table = FrequencyTable.from_mapping({1: 5.0, 12: 3.0})
        np.testing.assert_array_equal(smooth_outliers(table, gap_threshold=5).counts, table.counts)

    def test_mass_conservation(self):
        gen = generator("smooth")
        for _ in range(1000):
            counts = gen.poisson(0.4, size=40).astype(float)
            counts[0] += 1.0
            table = FrequencyTable(counts, counts.sum())
            smoothed = smooth_outliers(table, gap_threshold=int(gen.integers(1, 6)))
            assert smoothed.counts.sum() == pytest.approx(table.total, abs=1e-9)
            assert smoothed.counts.min() >= 0.0

    def test_threshold_range(self):
        with pytest.raises(InvalidArgumentError):
            smooth_outliers(FrequencyTable.from_values([1, 9]), gap_threshold=0)


class TestChiSquareStatistic:

    def test_hand_computed(self):
        observed = FrequencyTable.from_mapping({1: 60.0, 2: 40.0})
        assert chi2_statistic(observed, GEOM_HALF) == pytest.approx(36.0, rel=1e-12)

    def test_proportional_is_zero(self):
        observed = FrequencyTable.from_mapping({1: 50.0, 2: 25.0, 3: 25.0})
        classes = Binning(np.array([1, 2, 3]))
        assert chi2_statistic(observed, GEOM_HALF, classes) == pytest.approx(0.0, abs=1e-12)

    def test_zero_expected_with_observations(self):
        table = PmfTable(np.array([0.5, 0.5]), 0.0)
        observed = FrequencyTable.from_mapping({1: 3.0, 3: 1.0})
        assert chi2_statistic(observed, table) == float("inf")

    def test_empty_classes_can_be_merged(self):
        table = PmfTable(np.array([0.5, 0.5]), 0.0)
        observed = FrequencyTable.from_mapping({1: 3.0, 2: 1.0})
        split = chi2_statistic(observed, table, Binning(np.array([1, 2, 3, 4])))
        merged = chi2_statistic(observed, table, Binning(np.array([1, 2, 3])))
        assert split == pytest.approx(merged, rel=1e-14)

    def test_class_probabilities_sum_to_one(self, cev_it_model):
        probs = class_probabilities(cev_it_model, Binning.per_value(25))
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_empty_table(self):
        with pytest.raises(InvalidArgumentError):
            chi2_statistic(FrequencyTable.from_values([]), GEOM_HALF)


class TestMcGof:

    def test_exact_fit_gives_p_one(self):
        data = SpellSample.of(Variable.WS, [1] * 50 + [2] * 25 + [3] * 25)
        classes = Binning(np.array([1, 2, 3]))
        result = mc_gof(data, GEOM_HALF, replicates=200, stream=substream("exact"), classes=classes)
        assert result.chi2_ref == 0.0
        # only replicates that hit 50/25/25 exactly tie with the reference
        assert result.p_value >= 0.95

    def test_p_value_rule(self):
        data = sample(GEOM_HALF.params, generator("rule"), 300, Variable.WS)
        result = mc_gof(data, GEOM_HALF, replicates=250, stream=substream("rule-gof"))
        assert result.replicates == 250
        assert result.p_value == np.count_nonzero(result.replicate_stats > result.chi2_ref) / 250
        assert isinstance(result, GofResult)

    def test_deterministic(self):
        data = sample(GEOM_HALF.params, generator("det"), 300, Variable.WS)
        a = mc_gof(data, GEOM_HALF, replicates=150, stream=substream("det-gof"))
        b = mc_gof(data, GEOM_HALF, replicates=150, stream=substream("det-gof"))
        np.testing.assert_array_equal(a.replicate_stats, b.replicate_stats)
        assert a.p_value == b.p_value

    def test_thread_count_does_not_matter(self):
        data = sample(GEOM_HALF.params, generator("threads"), 300, Variable.WS)
        single = mc_gof(data, GEOM_HALF, replicates=120, stream=substream("t"), threads=1)
        pooled = mc_gof(data, GEOM_HALF, replicates=120, stream=substream("t"), threads=4)
        np.testing.assert_array_equal(single.replicate_stats, pooled.replicate_stats)

    def test_power_against_wrong_model(self):
        data = sample(GEOM_HALF.params, generator("power"), 1000, Variable.WS)
        result = mc_gof(data, LerchModel.geometric(0.9), replicates=200, stream=substream("power-gof"))
        assert result.p_value < 0.01

    def test_derived_table_model(self):
        table = GEOM_HALF.to_pmf_table()
        data = sample(GEOM_HALF.params, generator("table"), 400, Variable.DS)
        result = mc_gof(data, table, replicates=150, stream=substream("table-gof"))
        assert 0.0 <= result.p_value <= 1.0
        with pytest.raises(InvalidArgumentError):
            mc_gof(data, table, replicates=150, refit=True)

    def test_smoothing_flag(self):
        data = SpellSample.of(Variable.WS, [1] * 40 + [2] * 20 + [3] * 10 + [15])
        result = mc_gof(data, GEOM_HALF, replicates=100, stream=substream("smooth"), smooth=True)
        assert result.smoothed
        assert np.isfinite(result.chi2_ref)

    def test_refit_replicates(self):
        data = sample(GEOM_HALF.params, generator("refit"), 200, Variable.WS)
        result = mc_gof(data, GEOM_HALF, replicates=100, stream=substream("refit-gof"), refit=True)
        assert result.refit
        assert 0.0 <= result.p_value <= 1.0

    def test_replicate_minimum(self):
        data = sample(GEOM_HALF.params, generator("few"), 100, Variable.WS)
        with pytest.raises(InvalidArgumentError):
            mc_gof(data, GEOM_HALF, replicates=99)

    def test_empty_sample(self):
        with pytest.raises(InvalidArgumentError):
            mc_gof(SpellSample.of(Variable.WS, []), GEOM_HALF, replicates=100)

    def test_to_dict(self):
        data = sample(GEOM_HALF.params, generator("dict"), 200, Variable.WS)
        entry = mc_gof(data, GEOM_HALF, replicates=100, stream=7).to_dict()
        assert entry["replicates"] == 100
        assert set(entry) == {"chi2_ref", "p_value", "replicates", "n_classes", "smoothed", "refit",
                              "replicate_chi2_mean", "replicate_chi2_q95"}


@pytest.mark.slow
def test_null_rejection_rate():
    rejections = 0
    for seed in range(200):
        configure_rng("set", seed)
        data = sample(GEOM_HALF.params, generator("null"), 2000, Variable.WS)
        rejections += mc_gof(data, GEOM_HALF, replicates=500, stream=substream("null-gof")).p_value < 0.05
    assert 4 <= rejections <= 20
