"""Monte-Carlo calibration of the standardized (SB) and uniform (UB) band quantiles.

Each path is a sequence of iid Bernoulli(R) decoy-win events. U_d counts the
target wins before the d-th decoy win, so U has NB(d, R) marginals. Along each
path we keep the running maximum of the standardized values
(U_d - B d) / sqrt(B (1+B) d) and the running minimum of G_d(U_d). One pass
over d = 1..d_ceiling fills the rows for every d_max and every gamma at once.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from ..core.band_base import BandKind
from ..core.errors import ParameterError
from ..dist.negbin import NegBinSpec, NegBinTable, DEFAULT_SUPPORT_CEILING, nb_survival
from .quantile_table import QuantileTable, SbRow, UbRow

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 4096


@dataclass(frozen=True)
class SimConfig:
    """Calibration settings: N paths, d_ceiling (largest d_max), R, gammas, seed"""
    n_paths: int
    d_ceiling: int
    R: float
    gammas: Tuple[float, ...]
    seed: int
    block_size: int = DEFAULT_BLOCK_SIZE
    support_ceiling: int = DEFAULT_SUPPORT_CEILING

    def __post_init__(self):
        if self.n_paths < 1:
            raise ParameterError(f"n_paths must be positive, got {self.n_paths}")
        if self.d_ceiling < 1:
            raise ParameterError(f"d_ceiling must be positive, got {self.d_ceiling}")
        if not (0 < self.R < 1):
            raise ParameterError(f"R must lie in (0,1), got {self.R}")
        if not self.gammas:
            raise ParameterError("at least one gamma is required")
        for gamma in self.gammas:
            if not (0 < gamma < 1):
                raise ParameterError(f"gammas must lie in (0,1), got {gamma}")
        if self.block_size < 1:
            raise ParameterError(f"block_size must be positive, got {self.block_size}")
        object.__setattr__(self, "gammas", tuple(sorted(set(float(g) for g in self.gammas))))

    @property
    def B(self) -> float:
        return (1 - self.R) / self.R


def u_path_from_bernoulli(draws: Sequence[int], d_ceiling: int) -> np.ndarray:
    """
    U_1..U_{d_ceiling} from explicit draws (1 = target win, 0 = decoy win)
    :raises ParameterError: if the draws hold fewer than d_ceiling decoy wins
    """
    draws = np.asarray(draws, dtype=np.int64)
    wins = np.cumsum(draws)
    failures = np.flatnonzero(draws == 0)
    if failures.size < d_ceiling:
        raise ParameterError(f"need {d_ceiling} decoy wins, the draws hold {failures.size}")
    return wins[failures[:d_ceiling]]


def standardized_path(u_path: np.ndarray, B: float) -> np.ndarray:
    """(U_d - B d) / sqrt(B (1+B) d) for d = 1..len(u_path)"""
    d = np.arange(1, len(u_path) + 1)
    return (np.asarray(u_path) - B * d) / np.sqrt(B * (1 + B) * d)


def uniform_path(u_path: np.ndarray, R: float) -> np.ndarray:
    """G_d(U_d) for d = 1..len(u_path)"""
    return np.array([nb_survival(NegBinSpec(d, R), int(u)) for d, u in enumerate(u_path, start=1)])


def _upper_rank(level: float, n: int) -> int:
    """ceil(level * n) clamped to [1, n], immune to 0.95*100 = 95.00000000000001"""
    return min(max(int(math.ceil(level * n - 1e-9)), 1), n)


def _lower_count(level: float, n: int) -> int:
    """floor(level * n) with the same guard"""
    return max(int(math.floor(level * n + 1e-9)), 0)


class PathSimulator:
    """Advances every MC path one decoy win at a time"""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        n_blocks = -(-cfg.n_paths // cfg.block_size)
        seeds = np.random.SeedSequence(cfg.seed).spawn(n_blocks)
        self.streams = [np.random.default_rng(s) for s in seeds]
        self.block_sizes = [cfg.block_size] * (n_blocks - 1) + [cfg.n_paths - cfg.block_size * (n_blocks - 1)]
        self.d = 0
        self.U = np.zeros(cfg.n_paths, dtype=np.int64)
        self.max_std = np.full(cfg.n_paths, -np.inf)
        self.min_unif = np.ones(cfg.n_paths)

    def step(self) -> None:
        """Draw the target wins preceding the next decoy win on every path"""
        cfg = self.cfg
        self.d += 1
        # numpy's geometric counts trials up to and including the decoy win
        increments = np.concatenate([g.geometric(cfg.R, size=n) - 1 for g, n in zip(self.streams, self.block_sizes)])
        self.U += increments
        std = (self.U - cfg.B * self.d) / math.sqrt(cfg.B * (1 + cfg.B) * self.d)
        np.maximum(self.max_std, std, out=self.max_std)
        table = NegBinTable(NegBinSpec(self.d, cfg.R), cfg.support_ceiling)
        np.minimum(self.min_unif, table.survival_array(self.U), out=self.min_unif)


def _ub_row(sorted_min: np.ndarray, gamma: float, rho_cap: float) -> UbRow:
    n = sorted_min.size
    k = min(_lower_count(gamma, n), n - 1)
    sigma = float(sorted_min[k])
    below = int(np.searchsorted(sorted_min, sigma, side="left"))
    s = int(np.searchsorted(sorted_min, sigma, side="right")) / n
    rho = float(sorted_min[below - 1]) if below > 0 else 0.0
    # a smaller u only widens the band, so rho is kept nonincreasing in d_max
    rho = min(rho, rho_cap)
    r = int(np.searchsorted(sorted_min, rho, side="right")) / n if rho > 0 else 0.0
    return UbRow(rho=rho, sigma=sigma, r=r, s=s)


def build_tables(cfg: SimConfig) -> Tuple[QuantileTable, QuantileTable]:
    """
    Calibrate SB and UB quantiles for every d_max in [1, d_ceiling] and every gamma
    :return: (SB table, UB table)
    """
    logger.info(
        f"Calibrating band quantiles: N={cfg.n_paths}, d_ceiling={cfg.d_ceiling}, R={cfg.R}, "
        f"gammas={list(cfg.gammas)}, seed={cfg.seed}"
    )
    sb = QuantileTable(kind=BandKind.SB, R=cfg.R, seed=cfg.seed, n_paths=cfg.n_paths)
    ub = QuantileTable(kind=BandKind.UB, R=cfg.R, seed=cfg.seed, n_paths=cfg.n_paths)
    simulator = PathSimulator(cfg)
    rho_caps = {gamma: 1.0 for gamma in cfg.gammas}
    milestone = max(cfg.d_ceiling // 10, 1)

    for d in range(1, cfg.d_ceiling + 1):
        simulator.step()
        sorted_max = np.sort(simulator.max_std)
        sorted_min = np.sort(simulator.min_unif)
        for gamma in cfg.gammas:
            sb.rows[(gamma, d)] = SbRow(z=float(sorted_max[_upper_rank(1 - gamma, cfg.n_paths) - 1]))
            row = _ub_row(sorted_min, gamma, rho_caps[gamma])
            rho_caps[gamma] = row.rho
            if row.degenerate:
                logger.debug(f"Degenerate UB row at gamma={gamma}, d_max={d}")
            ub.rows[(gamma, d)] = row
        if d % milestone == 0:
            logger.info(f"Calibrated d_max up to {d}/{cfg.d_ceiling}")
    return sb, ub


@dataclass
class ExactExtrema:
    """Exact laws of max standardized value and min uniform value over d <= d_max"""
    max_std: Dict[float, float] = field(default_factory=dict)
    min_unif: Dict[float, float] = field(default_factory=dict)
    missing_mass: float = 0.0

    @staticmethod
    def _cdf(law: Dict[float, float], x: float, strict: bool) -> float:
        return sum(p for v, p in law.items() if (v < x if strict else v <= x))

    def max_std_cdf(self, x: float, strict: bool = False) -> float:
        return self._cdf(self.max_std, x, strict)

    def min_unif_cdf(self, x: float, strict: bool = False) -> float:
        return self._cdf(self.min_unif, x, strict)


def exact_extrema(R: float, d_max: int, cap: int = 40) -> ExactExtrema:
    """
    Enumerate every path prefix with at most cap target wins between decoy wins
    :param d_max: keep this small (<= 3); the enumeration has (cap+1)**d_max prefixes
    """
    if d_max < 1 or d_max > 4:
        raise ParameterError("exhaustive enumeration is limited to 1 <= d_max <= 4")
    B = (1 - R) / R
    result = ExactExtrema()
    total = 0.0
    for gaps in product(range(cap + 1), repeat=d_max):
        prob = float(np.prod([(1 - R) ** g * R for g in gaps]))
        u_path = np.cumsum(gaps)
        top = float(np.max(standardized_path(u_path, B)))
        low = float(np.min(uniform_path(u_path, R)))
        result.max_std[top] = result.max_std.get(top, 0.0) + prob
        result.min_unif[low] = result.min_unif.get(low, 0.0) + prob
        total += prob
    result.missing_mass = 1.0 - total
    return result
