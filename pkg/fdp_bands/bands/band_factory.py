from typing import Dict, Optional, Union

import numpy as np

from ..calibration.quantile_table import QuantileTable
from ..core.band_base import BandBuilder, BandKind, UbMode
from ..core.errors import TableCoverageError
from .kr_band import KRBand
from .standardized_band import StandardizedBand
from .uniform_band import UniformBand


class BandFactory:
    """Band builder factory class"""

    @staticmethod
    def create_band(
        kind: Union[BandKind, str],
        tables: Optional[Dict[BandKind, QuantileTable]] = None,
        mode: UbMode = UbMode.DETERMINISTIC,
        rng: Optional[np.random.Generator] = None,
    ) -> BandBuilder:
        """
        Create a band builder
        :param kind: band kind ("kr", "sb" or "ub")
        :param tables: calibrated quantile tables keyed by kind; KR needs none
        :param mode: how the uniform band picks u
        :param rng: generator for randomized UB lookups
        :return: BandBuilder instance
        """
        if isinstance(kind, str):
            kind = BandKind.parse(kind)

        if kind is BandKind.KR:
            return KRBand()

        table = (tables or {}).get(kind)
        if table is None:
            raise TableCoverageError(kind.name, reason="load one with --table or FDP_BANDS_TABLE")

        if kind is BandKind.SB:
            return StandardizedBand(table)

        elif kind is BandKind.UB:
            return UniformBand(table, mode=mode, rng=rng)

        else:
            raise ValueError(f"Unsupported band kind: {kind}")
