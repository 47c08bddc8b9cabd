import math
import logging
from typing import Optional

import numpy as np

from ..calibration.quantile_table import QuantileTable, lookup_sb_z
from ..core.band_base import BandBuilder, BandKind, XiBand, floor_int
from ..core.params import BandParams

logger = logging.getLogger(__name__)


def xi_sb(params: BandParams, z: float) -> XiBand:
    """xi_d = floor(z sqrt(B (1+B) d) + B d) for d in [1, d_max]; xi_0 = 0"""
    B = params.B
    d = np.arange(params.d_max + 1, dtype=float)
    raw = floor_int(z * np.sqrt(B * (1 + B) * d) + B * d)
    xi = np.maximum.accumulate(np.maximum(raw, 0))
    xi[0] = 0
    return XiBand(kind=BandKind.SB, xi=xi, params=params)


class StandardizedBand(BandBuilder):
    """Band on the mean/variance-standardized process, scaled by an MC quantile z"""

    kind = BandKind.SB

    def __init__(self, table: QuantileTable):
        self.table = table
        self.last_z: Optional[float] = None

    def build(self, params: BandParams) -> XiBand:
        if params.d_max == 0:
            return XiBand(kind=self.kind, xi=np.zeros(1, dtype=np.int64), params=params)
        self.last_z = lookup_sb_z(self.table, params.gamma, params.d_max, R=params.R)
        return xi_sb(params, self.last_z)

    def self_referential_value(self, params: BandParams, d0: int) -> int:
        if d0 == 0:
            return 0
        z = lookup_sb_z(self.table, params.gamma, d0, R=params.R)
        B = params.B
        return max(int(floor_int(z * math.sqrt(B * (1 + B) * d0) + B * d0)), 0)
