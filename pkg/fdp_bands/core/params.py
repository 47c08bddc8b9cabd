from dataclasses import dataclass, replace, asdict
from typing import Dict, Any
import math

from .errors import ParameterError


@dataclass(frozen=True)
class BandParams:
    """Competition and band parameters shared by every procedure.

    c and lam are the AS target-win / decoy-win thresholds; B and R are derived.
    """
    c: float
    lam: float
    m: int
    alpha: float
    gamma: float
    d_max: int = 0

    def __post_init__(self):
        if not (0 < self.c <= self.lam < 1):
            raise ParameterError(f"Need 0 < c <= lambda < 1, got c={self.c}, lambda={self.lam}")
        if self.m < 1:
            raise ParameterError(f"Number of hypotheses must be positive, got m={self.m}")
        if not (0 < self.alpha < 1):
            raise ParameterError(f"alpha must lie in (0,1), got {self.alpha}")
        if not (0 < self.gamma < 1):
            raise ParameterError(f"gamma must lie in (0,1), got {self.gamma}")
        if not (0 <= self.d_max <= self.m):
            raise ParameterError(f"d_max must lie in [0, m={self.m}], got {self.d_max}")

    @property
    def B(self) -> float:
        return self.c / (1 - self.lam)

    @property
    def R(self) -> float:
        return (1 - self.lam) / (self.c + 1 - self.lam)

    def with_dmax(self, d_max: int) -> "BandParams":
        """Copy of these parameters with another d_max"""
        return replace(self, d_max=int(d_max))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["B"] = self.B
        data["R"] = self.R
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BandParams":
        data = {k: v for k, v in data.items() if k not in ("B", "R")}
        return cls(**data)

    @classmethod
    def for_tdc(cls, m: int, alpha: float, gamma: float, d_max: int = 0) -> "BandParams":
        """Single-decoy TDC: c = lambda = 1/2, so B = 1"""
        return cls(c=0.5, lam=0.5, m=m, alpha=alpha, gamma=gamma, d_max=d_max)


def same_R(a: float, b: float) -> bool:
    """R values coming from tables and from parameters are compared with this"""
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)
