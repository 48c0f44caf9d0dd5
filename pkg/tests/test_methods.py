"""
Tests for the chain laws and the direct / indirect derivations.
"""

from itertools import product

import numpy as np
import pytest

from errors import InsufficientDataError, InvalidArgumentError, NumericalDegeneracyError
from rng import generator
from samples import SpellSample, Variable
from distributions import LerchModel, PmfTable, sample
from distributions.pmf_table import DERIVED_NORMALIZATION_TOLERANCE
from extraction import extract_all, mark_rainy
from pipeline import SyntheticStationGenerator, renewal_profile
from methods import (
    DERIVED, DM, FITTED, IM, chain_pmf, dm_derive_ds, dm_derive_ws, dm_wch_binomial, im_recover_it,
    run_dm, run_im,
)


def _brute_force_chain(inner, p_break, m_max):
    """Enumerate every composition of m into k spells"""
    out = np.zeros(m_max + 1)
    for k in range(1, m_max + 1):
        weight = p_break ** (k - 1) * (1.0 - p_break)
        for lengths in product(range(1, inner.size + 1), repeat=k):
            m = sum(lengths)
            if m <= m_max:
                out[m] += weight * np.prod([inner[length - 1] for length in lengths])
    return out[1:]


class TestChainPmf:

    def test_matches_compositions(self):
        inner = np.array([0.5, 0.3, 0.2])
        table = chain_pmf(PmfTable(inner, 0.0), 0.4, m_max=8)
        np.testing.assert_allclose(table.pmf(np.arange(1, 9)), _brute_force_chain(inner, 0.4, 8), atol=1e-14)

    def test_no_breaks_is_inner_law(self):
        inner = PmfTable(np.array([0.6, 0.3, 0.1]), 0.0)
        table = chain_pmf(inner, 0.0)
        np.testing.assert_allclose(table.pmf(np.arange(1, 4)), [0.6, 0.3, 0.1], atol=1e-15)

    def test_normalized(self):
        inner = LerchModel.polylog(0.8, 0.6).to_pmf_table(1e-12)
        table = chain_pmf(inner, 0.35)
        assert table.total() == pytest.approx(1.0, abs=1e-9)
        assert table.tail_mass <= 2.0 * inner.tail_mass / 0.65 + 1e-9

    def test_arguments(self):
        inner = PmfTable(np.array([1.0]), 0.0)
        with pytest.raises(InvalidArgumentError):
            chain_pmf(inner, 1.0)
        with pytest.raises(InvalidArgumentError):
            chain_pmf(inner, 0.5, m_max=0)


class TestDirectMethod:

    def test_wet_spells_are_geometric(self, cev_it_model):
        ws = dm_derive_ws(cev_it_model)
        p1 = cev_it_model.pmf(1)
        k = np.arange(1, 21)
        np.testing.assert_allclose(ws.pmf(k), (1.0 - p1) * p1 ** (k - 1), rtol=1e-10)

    def test_cev_continuation(self, cev_it_model):
        assert cev_it_model.pmf(1) == pytest.approx(0.446, abs=0.01)

    def test_dry_spells_shift_inter_arrivals(self, cev_it_model):
        ds = dm_derive_ds(cev_it_model)
        p1 = cev_it_model.pmf(1)
        k = np.arange(1, 41)
        np.testing.assert_allclose(ds.pmf(k), cev_it_model.pmf(k + 1) / (1.0 - p1), rtol=1e-10)
        assert ds.total() == pytest.approx(1.0, abs=1e-9)

    def test_wet_chain_binomial_form(self, cev_it_model):
        inner = 1e-12
        ws = dm_derive_ws(cev_it_model, inner)
        ds = dm_derive_ds(cev_it_model, inner)
        chain = chain_pmf(ws, ds.pmf(1))
        for k in range(1, 21):
            assert chain.pmf(k) == pytest.approx(dm_wch_binomial(cev_it_model, k), abs=1e-10)

    def test_wet_chain_binomial_form_random_parameters(self):
        gen = generator("chain-binomial")
        k = np.arange(1, 101)
        for _ in range(100):
            model = LerchModel.lerch3(gen.uniform(0.2, 0.95), gen.uniform(0.0, 2.0), gen.uniform(-0.5, 3.0))
            ws = dm_derive_ws(model, 1e-12)
            ds = dm_derive_ds(model, 1e-12)
            chain = chain_pmf(ws, ds.pmf(1), m_max=100)
            binomial = [dm_wch_binomial(model, m) for m in k]
            np.testing.assert_allclose(chain.pmf(k), binomial, rtol=0, atol=1e-10, err_msg=model.describe())

    def test_cev_dry_spells_match_published_polylog(self, cev_it_model):
        k = np.arange(1, 31)
        derived = dm_derive_ds(cev_it_model).pmf(k)
        published = LerchModel.polylog(0.913, 0.433).pmf(k)
        assert np.max(np.abs(derived - published)) < 0.01

    def test_derived_laws_are_normalized(self, cev_it_model):
        ws = dm_derive_ws(cev_it_model, 1e-12)
        ds = dm_derive_ds(cev_it_model, 1e-12)
        for table in (ds, im_recover_it(ws, ds), chain_pmf(ws, ds.pmf(1)), chain_pmf(ds, ws.pmf(1))):
            assert abs(table.total() - 1.0) <= DERIVED_NORMALIZATION_TOLERANCE

    def test_binomial_argument(self, cev_it_model):
        with pytest.raises(InvalidArgumentError):
            dm_wch_binomial(cev_it_model, 0)
        with pytest.raises(InvalidArgumentError):
            dm_wch_binomial(cev_it_model, 2.5)

    def test_degenerate_continuation(self):
        with pytest.raises(NumericalDegeneracyError):
            dm_derive_ws(LerchModel.polylog(0.5, 40.0))


class TestIndirectMethod:

    def test_recovered_inter_arrivals(self):
        ws = LerchModel.geometric(0.4)
        ds = LerchModel.polylog(0.9, 0.5)
        it = im_recover_it(ws, ds)
        assert it.pmf(1) == pytest.approx(0.4, abs=1e-10)
        k = np.arange(2, 12)
        np.testing.assert_allclose(it.pmf(k), 0.6 * ds.pmf(k - 1), rtol=1e-10)
        assert it.total() == pytest.approx(1.0, abs=1e-9)

    def test_round_trip_through_direct_laws(self, cev_it_model):
        ws = dm_derive_ws(cev_it_model, 1e-12)
        ds = dm_derive_ds(cev_it_model, 1e-12)
        it = im_recover_it(ws, ds)
        k = np.arange(1, 31)
        np.testing.assert_allclose(it.pmf(k), cev_it_model.pmf(k), atol=1e-9)


class TestBundles:

    def test_run_dm(self, cev_it_model):
        data = sample(cev_it_model.params, generator("dm"), 3000, Variable.IT, station="SYN")
        bundle = run_dm(data)
        assert bundle.method == DM
        assert bundle.provenance[Variable.IT] == FITTED
        assert all(bundle.provenance[v] == DERIVED for v in (Variable.WS, Variable.DS, Variable.WCH, Variable.DCH))
        assert isinstance(bundle.law(Variable.IT), LerchModel)
        assert isinstance(bundle.law(Variable.WCH), PmfTable)
        assert bundle.fitted_variables() == [Variable.IT]
        for variable in Variable:
            assert bundle.table(variable).total() == pytest.approx(1.0, abs=1e-8)
        entry = bundle.to_dict()
        assert set(entry["variables"]) == {"it", "ws", "ds", "wch", "dch"}
        assert "selection" in entry["variables"]["it"]

    def test_run_im(self):
        ws = sample(LerchModel.geometric(0.4).params, generator("im-ws"), 2000, Variable.WS)
        ds = sample(LerchModel.polylog(0.9, 0.5).params, generator("im-ds"), 2000, Variable.DS)
        bundle = run_im(ws, ds)
        assert bundle.method == IM
        assert bundle.fitted_variables() == [Variable.WS, Variable.DS]
        assert isinstance(bundle.law(Variable.IT), PmfTable)
        p1 = bundle.law(Variable.IT).pmf(1)
        assert p1 == pytest.approx((ws.values.mean() - 1.0) / ws.values.mean(), abs=0.02)

    def test_dm_needs_data(self):
        with pytest.raises(InsufficientDataError):
            run_dm(SpellSample.of(Variable.IT, [1, 2, 3]))


@pytest.mark.slow
def test_direct_and_indirect_agree_on_renewal_station():
    series = SyntheticStationGenerator(renewal_profile(years=30)).generate()
    samples = extract_all(mark_rainy(series, 1.0))
    dm = run_dm(samples[Variable.IT])
    im = run_im(samples[Variable.WS], samples[Variable.DS])

    k = np.arange(1, 11)
    for variable in (Variable.IT, Variable.WS, Variable.DS):
        np.testing.assert_allclose(im.table(variable).pmf(k), dm.table(variable).pmf(k), atol=0.03,
                                   err_msg=variable.value)

    k = np.arange(1, 31)
    for bundle in (dm, im):
        for spell, chain in ((Variable.WS, Variable.WCH), (Variable.DS, Variable.DCH)):
            assert np.all(bundle.table(chain).survival(k) >= bundle.table(spell).survival(k) - 1e-12)
