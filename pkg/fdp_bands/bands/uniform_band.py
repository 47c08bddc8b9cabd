import logging
from typing import Optional

import numpy as np

from ..calibration.quantile_table import QuantileTable, lookup_ub_u
from ..core.band_base import BandBuilder, BandKind, UbMode, XiBand
from ..core.params import BandParams
from ..dist.negbin import NegBinSpec, NegBinTable, nb_quantile, support_ceiling

logger = logging.getLogger(__name__)


def _ub_value(params: BandParams, u: float, d: int, memoized: bool = True) -> int:
    if u <= 0:
        # degenerate calibration: N_d <= m always holds
        return params.m
    if u >= 1:
        return 0
    spec = NegBinSpec(d, params.R)
    if memoized:
        return nb_quantile(spec, 1 - u)
    return NegBinTable(spec, support_ceiling()).quantile(1 - u)


def xi_ub(params: BandParams, u: float) -> XiBand:
    """xi_d = 1-u quantile of NB(d, R) for d in [1, d_max]; xi_0 = 0"""
    xi = np.zeros(params.d_max + 1, dtype=np.int64)
    for d in range(1, params.d_max + 1):
        xi[d] = _ub_value(params, u, d)
    return XiBand(kind=BandKind.UB, xi=xi, params=params)


class UniformBand(BandBuilder):
    """Band on the survival-probability-normalized process, thresholded at an MC quantile u"""

    kind = BandKind.UB

    def __init__(
        self,
        table: QuantileTable,
        mode: UbMode = UbMode.DETERMINISTIC,
        rng: Optional[np.random.Generator] = None,
    ):
        self.table = table
        self.mode = mode
        self.rng = rng
        self.last_u: Optional[float] = None

    def build(self, params: BandParams) -> XiBand:
        if params.d_max == 0:
            return XiBand(kind=self.kind, xi=np.zeros(1, dtype=np.int64), params=params)
        self.last_u = lookup_ub_u(self.table, params.gamma, params.d_max, self.mode, self.rng, R=params.R)
        logger.debug(f"UB u={self.last_u} at gamma={params.gamma}, d_max={params.d_max}")
        return xi_ub(params, self.last_u)

    def self_referential_value(self, params: BandParams, d0: int) -> int:
        if d0 == 0:
            return 0
        # the d_max scan always uses the conservative rho
        u = lookup_ub_u(self.table, params.gamma, d0, UbMode.DETERMINISTIC, R=params.R)
        return _ub_value(params, u, d0, memoized=False)
