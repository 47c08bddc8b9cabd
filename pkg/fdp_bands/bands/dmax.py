import logging
from typing import Dict, Optional, Union

from ..calibration.quantile_table import QuantileTable
from ..core.band_base import BandKind, UbMode, floor_int
from ..core.errors import TableCoverageError
from ..core.params import BandParams
from .band_factory import BandFactory

logger = logging.getLogger(__name__)


def dmax_for_fdr(params: BandParams) -> int:
    """
    d_c = floor(alpha (m+1) / (alpha + B)), capped at m.
    Whenever AS rejects anything, D_{k_AS} + 1 <= d_c.
    """
    d_c = int(floor_int(params.alpha * (params.m + 1) / (params.alpha + params.B)))
    return min(d_c, params.m)


def dmax_for_fdp(
    params: BandParams,
    kind: Union[BandKind, str],
    tables: Optional[Dict[BandKind, QuantileTable]] = None,
) -> int:
    """
    d_inf = max{d0 : xi^{d0}_{d0} / (m - d0 + 1) <= alpha}, where xi^{d0} is the band built
    with d_max = d0 and xi^0_0 = 0. The condition need not be monotone in d0 for
    calibrated bands, so the whole range is scanned from the top.
    :raises TableCoverageError: if the condition still holds at a table ceiling below m
    """
    builder = BandFactory.create_band(kind, tables, mode=UbMode.DETERMINISTIC)
    m, alpha = params.m, params.alpha
    upper = m
    if builder.kind is not BandKind.KR:
        table = tables[builder.kind]
        # raises when gamma or R is not calibrated at all
        table.row(params.gamma, 1, R=params.R)
        upper = min(m, table.d_ceiling(params.gamma))

    for d0 in range(upper, 0, -1):
        xi = builder.self_referential_value(params, d0)
        if xi / (m - d0 + 1) <= alpha:
            if d0 == upper and upper < m:
                raise TableCoverageError(
                    builder.kind.name, params.gamma, upper + 1, params.R,
                    reason=f"d_inf scan needs d_max beyond the calibrated ceiling {upper}",
                )
            logger.debug(f"d_inf={d0} for {builder.kind.name} at alpha={alpha}, m={m}")
            return d0
    return 0
