"""
Direct (DM) and indirect (IM) modelling pipelines.

DM fits the inter-arrival law once and derives the four spell and chain laws
from it. IM fits wet and dry spells separately and rebuilds the inter-arrival
law and both chains from those two fits.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

from config import get_config
from samples import SpellSample, Variable
from distributions import LerchModel, PmfTable
from inference import FittedModel, SelectionTrace, select_model
from .derivations import chain_pmf, dm_derive_ds, dm_derive_ws, im_recover_it

logger = logging.getLogger(__name__)

DM = "DM"
IM = "IM"
FITTED = "fitted"
DERIVED = "derived"

Law = Union[LerchModel, PmfTable]


@dataclass
class ModelBundle:
    """The five per-variable laws produced by one method for one station/period"""

    method: str
    laws: Dict[Variable, Law]
    provenance: Dict[Variable, str]
    fits: Dict[Variable, FittedModel] = field(default_factory=dict)
    traces: Dict[Variable, SelectionTrace] = field(default_factory=dict)

    def law(self, variable: Variable) -> Law:
        return self.laws[variable]

    def table(self, variable: Variable, tail_eps: Optional[float] = None) -> PmfTable:
        law = self.laws[variable]
        return law.to_pmf_table(tail_eps) if isinstance(law, LerchModel) else law

    def fitted_variables(self):
        return [v for v in Variable if self.provenance.get(v) == FITTED]

    def to_dict(self, max_terms: int = 60) -> Dict[str, object]:
        out = {"method": self.method, "variables": {}}
        for variable in Variable:
            if variable not in self.laws:
                continue
            law = self.laws[variable]
            entry = {"provenance": self.provenance[variable]}
            if isinstance(law, LerchModel):
                entry["model"] = law.to_dict()
                entry["description"] = law.describe()
            if variable in self.fits:
                entry["fit"] = self.fits[variable].to_dict()
                entry["selection"] = self.traces[variable].to_dict()
            entry["table"] = self.table(variable).to_dict(max_terms)
            out["variables"][variable.value] = entry
        return out


def run_dm(it_sample: SpellSample, alpha: Optional[float] = None, allow_negative_s: Optional[bool] = None,
           threads: Optional[int] = None) -> ModelBundle:
    """Fit the inter-arrival law and derive ws, ds, wch and dch from it"""
    inner_eps = get_config().methods.CHAIN_INNER_TAIL_EPS
    fit, trace = select_model(it_sample, alpha=alpha, allow_negative_s=allow_negative_s, threads=threads)
    it_model = fit.model

    ws = dm_derive_ws(it_model, inner_eps)
    ds = dm_derive_ds(it_model, inner_eps)
    wch = chain_pmf(ws, ds.pmf(1))
    dch = chain_pmf(ds, ws.pmf(1))
    logger.info("DM %s: it %s, ws continuation %.4f", it_sample.label(), it_model.describe(), 1.0 - ws.pmf(1))

    return ModelBundle(
        method=DM,
        laws={Variable.IT: it_model, Variable.WS: ws, Variable.DS: ds, Variable.WCH: wch, Variable.DCH: dch},
        provenance={Variable.IT: FITTED, Variable.WS: DERIVED, Variable.DS: DERIVED,
                    Variable.WCH: DERIVED, Variable.DCH: DERIVED},
        fits={Variable.IT: fit},
        traces={Variable.IT: trace},
    )


def run_im(ws_sample: SpellSample, ds_sample: SpellSample, alpha: Optional[float] = None,
           allow_negative_s: Optional[bool] = None, threads: Optional[int] = None) -> ModelBundle:
    """Fit ws and ds separately and derive it, wch and dch from the two fits"""
    inner_eps = get_config().methods.CHAIN_INNER_TAIL_EPS
    ws_fit, ws_trace = select_model(ws_sample, alpha=alpha, allow_negative_s=allow_negative_s, threads=threads)
    ds_fit, ds_trace = select_model(ds_sample, alpha=alpha, allow_negative_s=allow_negative_s, threads=threads)
    ws_model, ds_model = ws_fit.model, ds_fit.model

    it = im_recover_it(ws_model, ds_model, inner_eps)
    wch = chain_pmf(ws_model.to_pmf_table(inner_eps), ds_model.pmf(1))
    dch = chain_pmf(ds_model.to_pmf_table(inner_eps), ws_model.pmf(1))
    logger.info("IM %s: ws %s, ds %s", ws_sample.label(), ws_model.describe(), ds_model.describe())

    return ModelBundle(
        method=IM,
        laws={Variable.IT: it, Variable.WS: ws_model, Variable.DS: ds_model, Variable.WCH: wch, Variable.DCH: dch},
        provenance={Variable.IT: DERIVED, Variable.WS: FITTED, Variable.DS: FITTED,
                    Variable.WCH: DERIVED, Variable.DCH: DERIVED},
        fits={Variable.WS: ws_fit, Variable.DS: ds_fit},
        traces={Variable.WS: ws_trace, Variable.DS: ds_trace},
    )
