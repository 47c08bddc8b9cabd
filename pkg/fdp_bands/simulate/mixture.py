"""Normal mixture model for target/decoy scores.

True nulls draw the target and every decoy iid from N(mu_i, sigma_i^2); false
nulls shift the target by rho_i. Calibrated scores fix mu_i = 0, sigma_i = 1 and
rho_i = rho. Uncalibrated scores draw mu_i ~ N(0, 1), sigma_i = 1 + Exp(1) and
rho_i = 1 + Exp(rate nu) for every dataset.
"""
from dataclasses import dataclass, asdict
from typing import Dict, Any, List, Optional, Tuple
import logging

import numpy as np

from ..core.competition import CompetitionSequence, TARGET_WIN, DECOY_WIN
from ..core.errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MixtureConfig:
    m: int
    pi0: float
    calibrated: bool = True
    rho: float = 3.0
    nu: float = 0.075
    n_decoys: int = 1
    seed: Optional[int] = None

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError(f"m must be positive, got {self.m}")
        if not (0 <= self.pi0 <= 1):
            raise ParameterError(f"pi0 must lie in [0,1], got {self.pi0}")
        if self.nu <= 0:
            raise ParameterError(f"nu must be positive, got {self.nu}")
        if self.n_decoys < 1:
            raise ParameterError(f"n_decoys must be positive, got {self.n_decoys}")

    @property
    def n_nulls(self) -> int:
        return int(np.floor(self.pi0 * self.m + 1e-9))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class MixtureDataset:
    """Scores of one simulated competition; the first n_nulls hypotheses are the true nulls"""
    targets: np.ndarray
    decoys: np.ndarray
    is_null: np.ndarray

    @property
    def m(self) -> int:
        return int(self.targets.size)

    @property
    def n_nulls(self) -> int:
        return int(self.is_null.sum())

    def records(self) -> List[Tuple[float, List[float]]]:
        """(target_score, decoy_scores) per hypothesis"""
        return [(float(t), d.tolist()) for t, d in zip(self.targets, self.decoys)]


def gen_dataset(cfg: MixtureConfig, rng: Optional[np.random.Generator] = None) -> MixtureDataset:
    """
    Draw one dataset
    :param rng: overrides cfg.seed when given
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    m, d = cfg.m, cfg.n_decoys
    is_null = np.zeros(m, dtype=bool)
    is_null[:cfg.n_nulls] = True

    if cfg.calibrated:
        mu = np.zeros(m)
        sigma = np.ones(m)
        shift = np.full(m, cfg.rho)
    else:
        mu = rng.normal(0.0, 1.0, size=m)
        sigma = 1.0 + rng.exponential(1.0, size=m)
        shift = 1.0 + rng.exponential(1.0 / cfg.nu, size=m)

    decoys = mu[:, None] + sigma[:, None] * rng.standard_normal((m, d))
    targets = mu + sigma * rng.standard_normal(m)
    targets[~is_null] += shift[~is_null]
    return MixtureDataset(targets=targets, decoys=decoys, is_null=is_null)


def null_flags(seq: CompetitionSequence, dataset: MixtureDataset) -> np.ndarray:
    """Ground-truth null flags in sequence order"""
    if seq.order is None:
        raise ParameterError("the sequence carries no hypothesis order")
    return dataset.is_null[seq.order]


def false_discoveries(seq: CompetitionSequence, null_in_order: np.ndarray) -> np.ndarray:
    """V_i: true-null target wins in the top i"""
    return np.cumsum((seq.labels == TARGET_WIN) & null_in_order, dtype=np.int64)


def null_process(seq: CompetitionSequence, null_in_order: np.ndarray, d_max: int) -> np.ndarray:
    """
    N_d = V at the d-th decoy win (V_m when fewer than d decoy wins occur), for d = 1..d_max
    """
    V = false_discoveries(seq, null_in_order)
    if d_max == 0:
        return np.zeros(0, dtype=np.int64)
    decoy_positions = np.flatnonzero(seq.labels == DECOY_WIN)
    last = seq.m - 1
    positions = np.full(d_max, last, dtype=np.int64)
    n = min(d_max, decoy_positions.size)
    positions[:n] = decoy_positions[:n]
    return V[positions] if seq.m else np.zeros(d_max, dtype=np.int64)
