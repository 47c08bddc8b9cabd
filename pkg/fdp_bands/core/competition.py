from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Sequence, Union

import numpy as np

from .errors import ParameterError

TARGET_WIN = 1
DECOY_WIN = -1
DISCARDED = 0


@dataclass
class CompetitionSequence:
    """Win labels (+1 target, -1 decoy, 0 discarded) ordered by decreasing winning score.

    T and D are the running target-win / decoy-win tallies; position i-1 holds T_i, D_i.
    order, when set, maps each position back to its hypothesis index in the unsorted input.
    """
    labels: np.ndarray
    scores: Optional[np.ndarray] = None
    order: Optional[np.ndarray] = None
    T: np.ndarray = field(init=False, repr=False)
    D: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise ParameterError("labels must be one-dimensional")
        if labels.size and not np.isin(labels, (TARGET_WIN, DECOY_WIN, DISCARDED)).all():
            bad = sorted(set(labels[~np.isin(labels, (TARGET_WIN, DECOY_WIN, DISCARDED))].tolist()))
            raise ParameterError(f"labels must be in {{1, -1, 0}}, found {bad}")
        self.labels = labels.astype(np.int8)
        if self.scores is not None:
            self.scores = np.asarray(self.scores, dtype=float)
            if self.scores.shape != self.labels.shape:
                raise ParameterError("scores and labels must have the same length")
            if self.scores.size > 1 and np.any(np.diff(self.scores) > 0):
                raise ParameterError("scores must be nonincreasing; use CompetitionSequence.from_scores")
        if self.order is not None:
            self.order = np.asarray(self.order, dtype=np.int64)
            if self.order.shape != self.labels.shape:
                raise ParameterError("order and labels must have the same length")
        self.T = np.cumsum(self.labels == TARGET_WIN, dtype=np.int64)
        self.D = np.cumsum(self.labels == DECOY_WIN, dtype=np.int64)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "CompetitionSequence":
        """Labels taken in the given order"""
        return cls(labels=np.asarray(labels, dtype=np.int64))

    @classmethod
    def from_scores(
        cls,
        scores: Sequence[float],
        labels: Sequence[int],
        rng: Union[np.random.Generator, int, None] = None,
    ) -> "CompetitionSequence":
        """
        Sort by nonincreasing winning score, breaking equal scores uniformly at random
        :param scores: winning scores W_i
        :param labels: win labels L_i aligned with scores
        :param rng: generator or seed used for the tie permutation
        """
        scores = np.asarray(scores, dtype=float)
        labels = np.asarray(labels, dtype=np.int64)
        if scores.shape != labels.shape:
            raise ParameterError("scores and labels must have the same length")
        rng = np.random.default_rng(rng)
        perm = rng.permutation(scores.size)
        order = perm[np.argsort(-scores[perm], kind="stable")]
        return cls(labels=labels[order], scores=scores[order], order=order)

    @property
    def m(self) -> int:
        return int(self.labels.size)

    def tallies_at(self, k: int) -> Dict[str, int]:
        """T_k and D_k for 1-based k (k = 0 gives zeros)"""
        if k <= 0:
            return {"T": 0, "D": 0}
        return {"T": int(self.T[k - 1]), "D": int(self.D[k - 1])}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "labels": self.labels.tolist(),
            "scores": None if self.scores is None else self.scores.tolist(),
        }

    def __len__(self) -> int:
        return self.m
