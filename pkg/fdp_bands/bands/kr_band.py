import math

import numpy as np

from ..core.band_base import BandBuilder, BandKind, XiBand, floor_int
from ..core.errors import ParameterError
from ..core.params import BandParams


def kr_constant(gamma: float, B: float) -> float:
    """C = -log(gamma) / log(1 + (1 - gamma**B) / B)"""
    if not (0 < gamma < 1):
        raise ParameterError(f"gamma must lie in (0,1), got {gamma}")
    if B <= 0:
        raise ParameterError(f"B must be positive, got {B}")
    return -math.log(gamma) / math.log1p((1 - gamma ** B) / B)


def xi_kr(params: BandParams) -> XiBand:
    """Closed-form band xi_d = floor(C (1 + B d)), stored on [0, d_max]"""
    C = kr_constant(params.gamma, params.B)
    d = np.arange(params.d_max + 1)
    return XiBand(kind=BandKind.KR, xi=floor_int(C * (1 + params.B * d)), params=params, kr_constant=C)


class KRBand(BandBuilder):
    """Closed-form band of Katsevich and Ramdas; needs no calibration"""

    kind = BandKind.KR

    def build(self, params: BandParams) -> XiBand:
        return xi_kr(params)

    def self_referential_value(self, params: BandParams, d0: int) -> int:
        if d0 == 0:
            return 0
        C = kr_constant(params.gamma, params.B)
        return int(floor_int(C * (1 + params.B * d0)))
