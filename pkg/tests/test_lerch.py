"""
Tests for the Lerch transcendent and the Lerch family of distributions.
"""

import math

import mpmath
import numpy as np
import pytest

from config import get_config
from errors import InvalidArgumentError, NonConvergenceError
from rng import generator
from distributions import (
    FamilyId, LerchModel, LerchParams, MomentKind, PmfTable,
    cdf, hazard, moment, phi, pmf, quantile, sample, sample_values, survival, survival_ratio, to_pmf_table,
)

GEOM_CEV = LerchModel.geometric(0.446)


class TestPhi:

    def test_geometric_series(self):
        assert phi(0.5, 0, 1) == pytest.approx(2.0, rel=1e-14)

    def test_zero_theta_keeps_first_term(self):
        assert phi(0.0, 2, 4) == pytest.approx(0.0625, rel=1e-14)
        assert phi(0.0, -1.5, 3) == pytest.approx(3 ** 1.5, rel=1e-14)

    def test_log_identity(self):
        assert phi(0.5, 1, 1) == pytest.approx(1.3862944, abs=1e-7)
        assert phi(0.5, 1, 1) == pytest.approx(-math.log(0.5) / 0.5, rel=1e-14)

    @pytest.mark.parametrize("theta,s,x", [
        (0.913, 0.442, 0.047),
        (0.9, 2.5, 3.0),
        (0.99, 0.3, 1.0),
        (0.3, 7.0, 0.2),
        (0.5, -1.2, 2.0),
        (0.87, 1.3, 0.5),
    ])
    def test_matches_mpmath(self, theta, s, x):
        expected = float(mpmath.lerchphi(theta, s, x))
        assert phi(theta, s, x) == pytest.approx(expected, rel=1e-11)

    def test_domain(self):
        with pytest.raises(InvalidArgumentError):
            phi(1.0, 1.0, 1.0)
        with pytest.raises(InvalidArgumentError):
            phi(0.5, 1.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            phi(-0.1, 1.0, 1.0)

    def test_term_cap(self):
        get_config().distributions.PHI_MAX_TERMS = 10
        with pytest.raises(NonConvergenceError) as info:
            phi(0.99, 0.5, 1.0)
        assert info.value.partial_sum > 1.0
        assert info.value.bound > 0.0


class TestParameters:

    def test_domain(self):
        with pytest.raises(InvalidArgumentError):
            LerchParams(1.0, 1.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            LerchParams(0.5, 1.0, -1.0)
        with pytest.raises(InvalidArgumentError):
            LerchParams(0.5, float("nan"), 0.0)

    def test_family_fixed_fields(self):
        with pytest.raises(InvalidArgumentError):
            LerchModel(FamilyId.POLYLOG, LerchParams(0.5, 1.0, 0.3))
        with pytest.raises(InvalidArgumentError):
            LerchModel(FamilyId.GEOMETRIC, LerchParams(0.5, 0.0, 0.0))
        model = LerchModel.from_free(FamilyId.EXTENDED_LOG, {"theta": 0.6, "a": 2.0})
        assert model.params.as_dict() == {"theta": 0.6, "s": 1.0, "a": 2.0}

    def test_nesting(self):
        assert FamilyId.LOGARITHMIC.is_nested_in(FamilyId.POLYLOG)
        assert FamilyId.LOGARITHMIC.is_nested_in(FamilyId.EXTENDED_LOG)
        assert FamilyId.GEOMETRIC.is_nested_in(FamilyId.POLYLOG)
        assert FamilyId.GEOMETRIC.is_nested_in(FamilyId.LERCH3)
        assert not FamilyId.GEOMETRIC.is_nested_in(FamilyId.EXTENDED_LOG)
        assert not FamilyId.EXTENDED_LOG.is_nested_in(FamilyId.POLYLOG)
        assert FamilyId.LERCH3.nests(FamilyId.EXTENDED_LOG)

    def test_parameter_counts(self):
        counts = [f.n_params for f in (FamilyId.LERCH3, FamilyId.POLYLOG, FamilyId.LOGARITHMIC,
                                       FamilyId.GEOMETRIC, FamilyId.EXTENDED_LOG)]
        assert counts == [3, 2, 1, 1, 2]


class TestPmf:

    def test_geometric_values(self):
        assert GEOM_CEV.pmf(1) == pytest.approx(0.554, abs=1e-12)
        assert GEOM_CEV.pmf(2) == pytest.approx(0.247084, abs=1e-12)

    def test_logarithmic_first_value(self):
        assert LerchModel.logarithmic(0.5).pmf(1) == pytest.approx(0.7213475, abs=1e-7)

    @pytest.mark.parametrize("theta", [0.1, 0.5, 0.9])
    def test_logarithmic_closed_form(self, theta):
        k = np.arange(1, 101)
        expected = -theta ** k / (k * math.log(1.0 - theta))
        np.testing.assert_allclose(LerchModel.logarithmic(theta).pmf(k), expected, rtol=1e-10, atol=1e-300)

    def test_lerch_with_zero_s_is_geometric(self):
        k = np.arange(1, 201)
        lerch = pmf(LerchParams(0.7, 0.0, 2.5), k)
        geom = LerchModel.geometric(0.7).pmf(k)
        np.testing.assert_allclose(lerch, geom, rtol=0, atol=1e-14)

    def test_normalization(self, cev_it_model):
        k = np.arange(1, 2001)
        total = float(np.sum(cev_it_model.pmf(k)))
        assert total + cev_it_model.survival(2000) == pytest.approx(1.0, abs=1e-10)
        assert total <= 1.0 + 1e-12

    @pytest.mark.parametrize("model", [
        LerchModel.lerch3(0.913, 0.442, -0.953),
        LerchModel.polylog(0.95, 2.0),
        LerchModel.extended_log(0.8, 5.0),
    ])
    def test_mode_at_one(self, model):
        p = model.pmf(np.arange(1, 202))
        assert np.all(np.diff(p) <= 0.0)

    def test_support(self, cev_it_model):
        with pytest.raises(InvalidArgumentError):
            cev_it_model.pmf(0)
        with pytest.raises(InvalidArgumentError):
            cev_it_model.pmf(1.5)


class TestSurvivalAndHazard:

    def test_survival_at_zero(self, cev_it_model):
        assert cev_it_model.survival(0) == 1.0

    def test_geometric_survival(self):
        assert LerchModel.geometric(0.5).survival(3) == pytest.approx(0.125, rel=1e-12)

    def test_survival_identity(self, cev_it_model):
        r = np.arange(0, 51)
        direct = cev_it_model.survival(r)
        summed = 1.0 - np.concatenate(([0.0], np.cumsum(cev_it_model.pmf(np.arange(1, 51)))))
        np.testing.assert_allclose(direct, summed, rtol=0, atol=1e-10)
        assert np.all(np.diff(direct) <= 0)

    def test_cdf(self, cev_it_model):
        assert cdf(cev_it_model.params, 0) == 0.0
        assert cdf(cev_it_model.params, 1) == pytest.approx(cev_it_model.pmf(1), abs=1e-12)

    def test_geometric_hazard_is_constant(self):
        np.testing.assert_allclose(GEOM_CEV.hazard(np.arange(1, 101)), 0.554, rtol=0, atol=1e-12)

    def test_logarithmic_hazard(self):
        assert LerchModel.logarithmic(0.5).hazard(1) == pytest.approx(0.7213475, abs=1e-7)

    def test_hazard_definition(self, cev_it_model):
        for r in range(1, 31):
            expected = cev_it_model.pmf(r) / cev_it_model.survival(r - 1)
            assert cev_it_model.hazard(r) == pytest.approx(expected, rel=1e-10)

    def test_hazard_survival_recursion(self, cev_it_model):
        for r in range(1, 101):
            expected = cev_it_model.survival(r - 1) * (1.0 - cev_it_model.hazard(r))
            assert cev_it_model.survival(r) == pytest.approx(expected, abs=1e-12)

    def test_geometric_survival_ratio(self):
        np.testing.assert_allclose(survival_ratio(GEOM_CEV.params, np.arange(0, 20)), 0.446, atol=1e-12)


class TestQuantileAndMoments:

    def test_geometric_quantile(self):
        assert LerchModel.geometric(0.5).quantile(0.99) == 7

    def test_lower_quantile_is_one(self, cev_it_model):
        assert cev_it_model.quantile(1e-9) == 1
        assert GEOM_CEV.quantile(0.5) == 1

    def test_quantile_domain(self, cev_it_model):
        for q in (0.0, 1.0, 1.5):
            with pytest.raises(InvalidArgumentError):
                quantile(cev_it_model.params, q)

    def test_geometric_mean(self):
        assert GEOM_CEV.mean() == pytest.approx(1.0 / 0.554, rel=1e-10)
        assert GEOM_CEV.mean() == pytest.approx(1.8050542, abs=1e-7)

    def test_degenerate_mean(self):
        assert moment(LerchParams(0.0, 0.0, 1.0), MomentKind.MEAN) == 1.0

    def test_logarithmic_mean(self):
        theta = 0.5
        expected = -theta / ((1.0 - theta) * math.log(1.0 - theta))
        assert LerchModel.logarithmic(theta).mean() == pytest.approx(expected, rel=1e-10)
        assert expected == pytest.approx(1.4426950, abs=1e-7)

    @pytest.mark.parametrize("kind", list(MomentKind))
    def test_moments_match_brute_force(self, cev_it_model, kind):
        p = cev_it_model.params
        k = np.arange(1, 20001, dtype=float)
        weights = {MomentKind.MEAN: k, MomentKind.LOG_SHIFTED_MEAN: np.log(p.a + k),
                   MomentKind.INVERSE_SHIFTED_MEAN: 1.0 / (p.a + k)}[kind]
        expected = float(np.sum(weights * cev_it_model.pmf(k)))
        assert moment(p, kind) == pytest.approx(expected, rel=1e-9)


class TestTabulation:

    def test_geometric_length(self):
        table = LerchModel.geometric(0.5).to_pmf_table(1e-10)
        assert table.K == 34
        assert table.total() == pytest.approx(1.0, abs=1e-12)

    def test_geometric_cev_length(self):
        table = to_pmf_table(GEOM_CEV.params, 1e-10)
        assert 0.446 ** table.K < 1e-10
        assert 0.446 ** (table.K - 1) >= 1e-10

    def test_tail_eps_range(self):
        with pytest.raises(InvalidArgumentError):
            GEOM_CEV.to_pmf_table(1e-5)
        with pytest.raises(InvalidArgumentError):
            GEOM_CEV.to_pmf_table(0.0)

    def test_table_matches_model(self, cev_it_model):
        table = cev_it_model.to_pmf_table()
        k = np.arange(1, table.K + 1)
        np.testing.assert_allclose(table.pmf(k), cev_it_model.pmf(k), rtol=1e-12)
        assert table.tail_mass < 1e-10
        assert table.total() == pytest.approx(1.0, abs=1e-12)


class TestPmfTable:

    def setup_method(self):
        geom = LerchModel.geometric(0.5)
        self.table = PmfTable(geom.pmf(np.arange(1, 6)), geom.survival(5))

    def test_pmf_outside_support(self):
        assert self.table.pmf(0) == 0.0
        assert self.table.pmf(6) == 0.0
        assert self.table.pmf(3) == pytest.approx(0.125)

    def test_survival_and_cdf(self):
        assert self.table.survival(0) == 1.0
        assert self.table.survival(2) == pytest.approx(0.25)
        assert self.table.survival(9) == pytest.approx(1.0 / 32.0)
        assert self.table.cdf(5) == pytest.approx(31.0 / 32.0)

    def test_quantile_in_tail(self):
        assert self.table.quantile(0.5) == 1
        assert self.table.quantile(0.99) == 6

    def test_mean_extrapolates_geometric_tail(self):
        assert self.table.mean() == pytest.approx(2.0, rel=1e-12)

    def test_hazard(self):
        assert self.table.hazard(3) == pytest.approx(0.5)

    def test_normalization_is_checked(self):
        with pytest.raises(InvalidArgumentError):
            PmfTable(np.array([0.5, 0.4]), 0.0)
        with pytest.raises(InvalidArgumentError):
            PmfTable(np.array([1.2, -0.2]), 0.0)

    def test_from_probabilities(self):
        table = PmfTable.from_probabilities([0.5, 0.3])
        assert table.tail_mass == pytest.approx(0.2)
        assert table.to_dict()["K"] == 2
        assert PmfTable.from_probabilities([0.5, 0.5 + 5e-13]).tail_mass == 0.0
        with pytest.raises(InvalidArgumentError):
            PmfTable.from_probabilities([0.5, 0.5 + 1e-10])


class TestSampling:

    def test_deterministic(self, cev_it_model):
        a = sample_values(cev_it_model.params, generator("draws"), 1000)
        b = sample_values(cev_it_model.params, generator("draws"), 1000)
        np.testing.assert_array_equal(a, b)

    def test_geometric_mean(self):
        draws = sample(LerchModel.geometric(0.5).params, generator("geom"), 100_000)
        assert draws.n == 100_000
        assert draws.values.min() >= 1
        assert abs(draws.values.mean() - 2.0) < 0.02

    def test_empirical_pmf(self, cev_it_model):
        draws = sample_values(cev_it_model.params, generator("cev"), 1_000_000)
        k = np.arange(1, 51)
        empirical = np.bincount(draws, minlength=51)[1:51] / draws.size
        assert np.max(np.abs(empirical - cev_it_model.pmf(k))) < 5e-3

    def test_tail_beyond_table(self):
        model = LerchModel.polylog(0.8, 1.5)
        table = PmfTable(model.pmf(np.arange(1, 6)), model.survival(5))
        draws = sample_values(model.params, generator("tail"), 200_000, table)
        tail = draws[draws > 5]
        k = np.arange(6, 3001)
        expected = float(np.sum(k * model.pmf(k))) / model.survival(5)
        assert tail.size > 0
        assert abs(tail.mean() - expected) < 0.25
        assert abs(tail.size / draws.size - model.survival(5)) < 0.005

    def test_invalid_size(self, cev_it_model):
        with pytest.raises(InvalidArgumentError):
            sample_values(cev_it_model.params, generator("x"), 0)
