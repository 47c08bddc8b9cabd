"""Target-decoy competition with one or more decoys per hypothesis.

The target's rank p-value in the combined list of its d+1 scores is
p = (1 + #{j : decoy_j >= target}) / (d + 1); exact ties with the target are
either given a uniformly random rank or discarded. The max method uses
c = lambda = 1/(d+1), so only a top-ranked target wins; the mirror method is
supported for a single decoy, where it coincides with standard TDC.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..core.competition import CompetitionSequence, TARGET_WIN, DECOY_WIN, DISCARDED
from ..core.errors import ParameterError
from ..core.params import BandParams

# p-values are rational; compare them with a little room
_P_SLACK = 1e-12


class MultiDecoyMethod(Enum):
    MAX = "max"
    MIRROR = "mirror"


class TiePolicy(Enum):
    RANDOM = "random"
    DISCARD = "discard"


def competition_params(method: Union[MultiDecoyMethod, str], n_decoys: int) -> Tuple[float, float]:
    """(c, lambda) for a competition method"""
    method = MultiDecoyMethod(method)
    if n_decoys < 1:
        raise ParameterError(f"at least one decoy is required, got {n_decoys}")
    if method is MultiDecoyMethod.MAX:
        c = 1.0 / (n_decoys + 1)
        return c, c
    if n_decoys % 2 == 0:
        raise ParameterError("the mirror method needs an odd number of decoys")
    if n_decoys > 1:
        raise ParameterError("the mirror method is only supported with a single decoy")
    return 0.5, 0.5


def band_params_for(
    method: Union[MultiDecoyMethod, str],
    n_decoys: int,
    m: int,
    alpha: float,
    gamma: float,
) -> BandParams:
    c, lam = competition_params(method, n_decoys)
    return BandParams(c=c, lam=lam, m=m, alpha=alpha, gamma=gamma)


@dataclass
class MultiDecoyInput:
    """One hypothesis: a target score against its decoy scores"""
    target_score: float
    decoy_scores: Sequence[float]
    method: MultiDecoyMethod = MultiDecoyMethod.MAX
    tie_policy: TiePolicy = TiePolicy.RANDOM
    rng: Optional[np.random.Generator] = field(default=None, repr=False)

    def __post_init__(self):
        self.decoy_scores = np.atleast_1d(np.asarray(self.decoy_scores, dtype=float))
        self.method = MultiDecoyMethod(self.method)
        self.tie_policy = TiePolicy(self.tie_policy)
        competition_params(self.method, self.decoy_scores.size)

    @property
    def n_decoys(self) -> int:
        return int(self.decoy_scores.size)


def _labels_from_ranks(ranks: np.ndarray, n_decoys: int, c: float, lam: float) -> np.ndarray:
    p = ranks / (n_decoys + 1)
    labels = np.full(ranks.shape, DISCARDED, dtype=np.int64)
    labels[p <= c + _P_SLACK] = TARGET_WIN
    labels[p > lam + _P_SLACK] = DECOY_WIN
    return labels


def _rank_and_label(
    targets: np.ndarray,
    decoys: np.ndarray,
    method: MultiDecoyMethod,
    tie_policy: TiePolicy,
    rng: Optional[np.random.Generator],
) -> Tuple[np.ndarray, np.ndarray]:
    n_decoys = decoys.shape[1]
    c, lam = competition_params(method, n_decoys)
    above = (decoys > targets[:, None]).sum(axis=1)
    tied = (decoys == targets[:, None]).sum(axis=1)
    if tie_policy is TiePolicy.RANDOM:
        if rng is None:
            raise ParameterError("the random tie policy needs a random generator")
        ranks = 1 + above + rng.integers(0, tied + 1)
        labels = _labels_from_ranks(ranks, n_decoys, c, lam)
    else:
        labels = _labels_from_ranks(1 + above + tied, n_decoys, c, lam)
        labels[tied > 0] = DISCARDED
    scores = np.maximum(targets, decoys.max(axis=1))
    return scores, labels


def assign_label_multi(inp: MultiDecoyInput) -> Tuple[float, int]:
    """
    Winning score and label for one hypothesis
    :return: (W, L) with L in {+1, -1, 0}
    """
    scores, labels = _rank_and_label(
        np.array([inp.target_score], dtype=float),
        inp.decoy_scores[None, :],
        inp.method,
        inp.tie_policy,
        inp.rng,
    )
    return float(scores[0]), int(labels[0])


def compete(
    targets: Sequence[float],
    decoys: Union[Sequence[float], np.ndarray],
    method: Union[MultiDecoyMethod, str] = MultiDecoyMethod.MAX,
    tie_policy: Union[TiePolicy, str] = TiePolicy.RANDOM,
    rng: Union[np.random.Generator, int, None] = None,
) -> CompetitionSequence:
    """
    Run the competition for every hypothesis and sort by winning score
    :param targets: m target scores
    :param decoys: m x d decoy scores (a flat array means d = 1)
    :param rng: generator or seed for tie ranks and the equal-score permutation
    :return: CompetitionSequence whose order field maps positions back to hypotheses
    """
    targets = np.asarray(targets, dtype=float)
    decoys = np.asarray(decoys, dtype=float)
    if decoys.ndim == 1:
        decoys = decoys[:, None]
    if decoys.ndim != 2 or decoys.shape[0] != targets.size:
        raise ParameterError(f"decoys must have shape ({targets.size}, d), got {decoys.shape}")
    if decoys.shape[1] < 1:
        raise ParameterError("at least one decoy is required")
    rng = np.random.default_rng(rng)
    scores, labels = _rank_and_label(targets, decoys, MultiDecoyMethod(method), TiePolicy(tie_policy), rng)
    return CompetitionSequence.from_scores(scores, labels, rng)
