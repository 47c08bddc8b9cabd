import logging
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..bands.band_factory import BandFactory
from ..bands.dmax import dmax_for_fdr
from ..bands.fdp_bounds import FdpBounds, interpolate, vbar_from_xi
from ..calibration.quantile_table import QuantileTable
from ..core.band_base import BandKind, UbMode
from ..core.competition import CompetitionSequence
from ..core.errors import ParameterError
from ..core.params import BandParams
from ..core.report import DecisionReport

logger = logging.getLogger(__name__)


def check_length(seq: CompetitionSequence, params: BandParams) -> None:
    if seq.m != params.m:
        raise ParameterError(f"params.m={params.m} does not match the {seq.m} hypotheses in the sequence")


def band_bounds(
    seq: CompetitionSequence,
    params: BandParams,
    kind: Union[BandKind, str],
    tables: Optional[Dict[BandKind, QuantileTable]] = None,
    mode: UbMode = UbMode.DETERMINISTIC,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[FdpBounds, Dict[str, float]]:
    """
    Interpolated bounds at every index for a band built with params.d_max
    :return: (bounds, quantile actually used: {"u": ...} for UB, {"z": ...} for SB, {"C": ...} for KR)
    """
    builder = BandFactory.create_band(kind, tables, mode=mode, rng=rng)
    band = builder.build(params)
    used: Dict[str, float] = {}
    if builder.kind is BandKind.UB and builder.last_u is not None:
        used["u"] = builder.last_u
    elif builder.kind is BandKind.SB and builder.last_z is not None:
        used["z"] = builder.last_z
    elif builder.kind is BandKind.KR:
        used["C"] = band.kr_constant
    return interpolate(seq, vbar_from_xi(seq, band)), used


def tdc_bound(
    seq: CompetitionSequence,
    tau: int,
    params: BandParams,
    kind: Union[BandKind, str],
    tables: Optional[Dict[BandKind, QuantileTable]] = None,
    mode: UbMode = UbMode.DETERMINISTIC,
    rng: Optional[np.random.Generator] = None,
) -> DecisionReport:
    """
    1-gamma upper prediction bound on the FDP among the target wins in the top tau,
    using d_max = d_c so that tau = k_AS is always covered
    :param tau: usually the output of as_threshold
    """
    check_length(seq, params)
    if isinstance(kind, str):
        kind = BandKind.parse(kind)
    if not (0 <= tau <= seq.m):
        raise ParameterError(f"tau must lie in [0, {seq.m}], got {tau}")
    p = params.with_dmax(dmax_for_fdr(params))
    n_disc = seq.tallies_at(tau)["T"]
    if tau == 0 or n_disc == 0:
        return DecisionReport(k_threshold=tau, n_discoveries=n_disc, q_bound=0.0, band_kind=kind, params=p, q_bound_raw=0.0)

    bounds, used = band_bounds(seq, p, kind, tables, mode, rng)
    report = DecisionReport(
        k_threshold=tau,
        n_discoveries=n_disc,
        q_bound=bounds.at(tau),
        band_kind=kind,
        params=p,
        q_bound_raw=bounds.raw_at(tau),
        u_used=used.get("u"),
        extras={"vbar": int(bounds.vbar[tau - 1]), "gbar": int(bounds.gbar[tau - 1])},
    )
    if "z" in used:
        report.extras["z_used"] = used["z"]
    logger.info(f"TDC bound {report}")
    return report
