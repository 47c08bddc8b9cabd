from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ..calibration.quantile_table import QuantileTable
from ..core.band_base import BandKind, UbMode
from ..core.params import BandParams
from .band_factory import BandFactory


def compare_bands(
    params: BandParams,
    tables: Optional[Dict[BandKind, QuantileTable]] = None,
    kinds: Sequence[BandKind] = (BandKind.SB, BandKind.UB, BandKind.KR),
    mode: UbMode = UbMode.DETERMINISTIC,
    rng: Optional[np.random.Generator] = None,
) -> pd.DataFrame:
    """
    xi_d of each band kind side by side for d in [1, d_max]
    :return: DataFrame with column d and one xi_<kind> column per kind
    """
    frame = pd.DataFrame({"d": np.arange(1, params.d_max + 1, dtype=np.int64)})
    for kind in kinds:
        band = BandFactory.create_band(kind, tables, mode=mode, rng=rng).build(params)
        frame[f"xi_{kind.value}"] = band.values(frame["d"].to_numpy())
    return frame
