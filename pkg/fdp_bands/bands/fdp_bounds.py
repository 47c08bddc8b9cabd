"""Conversion of a xi-band on N_d into per-index bounds on V_i and the FDP.

For SB/UB bands the bound at index i depends on the label:

    L_i = -1 and D_i <= d_max       ->  xi_{D_i}
    L_i in {+1, 0} and D_i+1 <= d_max ->  xi_{D_i + 1}
    otherwise                       ->  T_i

KR bands hold for every d, so V_i <= xi_{D_i} at every index.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.band_base import BandKind, XiBand
from ..core.competition import CompetitionSequence, DECOY_WIN


@dataclass
class FdpBounds:
    """Per-index bounds; position i-1 holds index i"""
    T: np.ndarray
    vbar: np.ndarray
    qbar_raw: np.ndarray
    gbar: Optional[np.ndarray] = None
    qbar: Optional[np.ndarray] = None

    @property
    def interpolated(self) -> bool:
        return self.qbar is not None

    def at(self, k: int) -> float:
        """Interpolated Q-bar at 1-based index k (0 when k = 0 or T_k = 0)"""
        if k <= 0 or self.T[k - 1] == 0:
            return 0.0
        source = self.qbar if self.interpolated else self.qbar_raw
        return float(source[k - 1])

    def raw_at(self, k: int) -> float:
        if k <= 0 or self.T[k - 1] == 0:
            return 0.0
        return float(self.qbar_raw[k - 1])

    def interpolation_gain(self) -> np.ndarray:
        """qbar_raw - qbar, nonnegative everywhere"""
        if not self.interpolated:
            return np.zeros_like(self.qbar_raw)
        return self.qbar_raw - self.qbar


def _qbar(numerator: np.ndarray, T: np.ndarray) -> np.ndarray:
    return np.minimum(numerator / np.maximum(T, 1), 1.0)


def vbar_from_xi(seq: CompetitionSequence, band: XiBand) -> FdpBounds:
    """V-bar (and the raw Q-bar it implies) at every index of seq"""
    T, D = seq.T, seq.D
    if band.kind is BandKind.KR:
        vbar = band.values(D)
    else:
        d_max = band.d_max
        idx = np.where(seq.labels == DECOY_WIN, D, D + 1)
        covered = idx <= d_max
        vbar = T.copy()
        vbar[covered] = band.xi[idx[covered]]
    vbar = vbar.astype(np.int64)
    return FdpBounds(T=T, vbar=vbar, qbar_raw=_qbar(vbar, T))


def interpolate(seq: CompetitionSequence, bounds: FdpBounds) -> FdpBounds:
    """
    Propagate guaranteed true discoveries forward:
    G_k = max_{i<=k} (T_i - V_i) v 0 and Q_k = (T_k - G_k) / (T_k v 1) ^ 1
    """
    T = seq.T
    gbar = np.maximum.accumulate(np.maximum(T - bounds.vbar, 0)) if T.size else np.zeros(0, dtype=np.int64)
    qbar = _qbar(T - gbar, T)
    return FdpBounds(T=T, vbar=bounds.vbar, qbar_raw=bounds.qbar_raw, gbar=gbar, qbar=qbar)
