import logging

import numpy as np

from ..core.competition import CompetitionSequence
from ..core.params import BandParams

logger = logging.getLogger(__name__)

# slack for ratios that land on alpha exactly (e.g. 1/4 <= 0.25)
RATIO_SLACK = 1e-12


def as_threshold(seq: CompetitionSequence, params: BandParams) -> int:
    """
    Adaptive SeqStep cutoff k_AS = max{k : (D_k + 1) / T_k * B <= alpha}, or 0.
    With c = lambda = 1/2 this is TDC. The discoveries are the T_{k_AS} target wins in the top k_AS.
    """
    if seq.m == 0:
        return 0
    T, D = seq.T, seq.D
    ratio = np.where(T > 0, (D + 1) / np.maximum(T, 1) * params.B, np.inf)
    passing = np.flatnonzero(ratio <= params.alpha + RATIO_SLACK)
    k = int(passing[-1]) + 1 if passing.size else 0
    logger.debug(f"k_AS={k} with {seq.tallies_at(k)['T']} discoveries at alpha={params.alpha}")
    return k
