import logging
from typing import Dict, Optional, Union

import numpy as np

from ..bands.dmax import dmax_for_fdp
from ..calibration.quantile_table import QuantileTable
from ..core.band_base import BandKind, UbMode
from ..core.competition import CompetitionSequence, TARGET_WIN
from ..core.params import BandParams
from ..core.report import DecisionReport
from .fdp_bounds import band_bounds, check_length
from .fdr_control import RATIO_SLACK

logger = logging.getLogger(__name__)


def fdp_control_threshold(
    seq: CompetitionSequence,
    params: BandParams,
    kind: Union[BandKind, str],
    tables: Optional[Dict[BandKind, QuantileTable]] = None,
    mode: UbMode = UbMode.DETERMINISTIC,
    rng: Optional[np.random.Generator] = None,
    d_max: Optional[int] = None,
) -> DecisionReport:
    """
    FDP control: k0 = max{i : L_i = +1, Q_i <= alpha}, or 0, with the interpolated band built at d_max = d_inf
    :param d_max: precomputed d_inf for these params (it depends on m, alpha, gamma, B only)
    """
    check_length(seq, params)
    if isinstance(kind, str):
        kind = BandKind.parse(kind)
    if d_max is None:
        d_max = dmax_for_fdp(params, kind, tables)
    p = params.with_dmax(d_max)

    bounds, used = band_bounds(seq, p, kind, tables, mode, rng)
    eligible = (seq.labels == TARGET_WIN) & (bounds.qbar <= params.alpha + RATIO_SLACK)
    hits = np.flatnonzero(eligible)
    k0 = int(hits[-1]) + 1 if hits.size else 0

    report = DecisionReport(
        k_threshold=k0,
        n_discoveries=seq.tallies_at(k0)["T"],
        q_bound=bounds.at(k0),
        band_kind=kind,
        params=p,
        q_bound_raw=bounds.raw_at(k0),
        u_used=used.get("u"),
    )
    logger.info(f"FDP control {report}")
    return report
