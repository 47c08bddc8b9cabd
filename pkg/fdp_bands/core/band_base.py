from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any, Optional

import numpy as np

from .params import BandParams

# floors absorb representation error at exact integers (e.g. 4.0 stored as 3.9999999999999996)
FLOOR_SLACK = 1e-9


def floor_int(x):
    """floor(x) as int64 with FLOOR_SLACK tolerance; accepts scalars and arrays"""
    return np.floor(np.asarray(x, dtype=float) + FLOOR_SLACK).astype(np.int64)


class BandKind(Enum):
    """Band kind enumeration"""
    SB = "sb"
    UB = "ub"
    KR = "kr"

    @classmethod
    def parse(cls, value: str) -> "BandKind":
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"Unsupported band kind: {value}") from None


class UbMode(Enum):
    """How the uniform band picks u from a straddling (rho, sigma) pair"""
    DETERMINISTIC = "det"
    RANDOMIZED = "rand"


@dataclass
class XiBand:
    """Upper prediction band xi_d on N_d, stored for d = 0..d_max (xi[0] is the empty-index value).

    KR bands are defined for every d; their values past the stored range are computed on demand.
    """
    kind: BandKind
    xi: np.ndarray
    params: BandParams
    kr_constant: Optional[float] = None

    @property
    def d_max(self) -> int:
        return self.params.d_max

    def value(self, d: int) -> int:
        """xi_d"""
        if self.kind is BandKind.KR and d >= self.xi.size:
            return int(floor_int(self.kr_constant * (1 + self.params.B * d)))
        return int(self.xi[d])

    def values(self, d: np.ndarray) -> np.ndarray:
        """Vectorised xi_d"""
        d = np.asarray(d, dtype=np.int64)
        if self.kind is BandKind.KR:
            return floor_int(self.kr_constant * (1 + self.params.B * d))
        return self.xi[d]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "xi": self.xi.tolist(),
            "params": self.params.to_dict(),
        }


class BandBuilder(ABC):
    """Builder base class. Every band kind implements build()."""

    kind: BandKind

    @abstractmethod
    def build(self, params: BandParams) -> XiBand:
        """Materialise xi_d for d in [0, params.d_max]"""
        pass

    def self_referential_value(self, params: BandParams, d0: int) -> int:
        """xi_{d0} of the band built with d_max = d0 (xi_0^0 := 0)"""
        if d0 == 0:
            return 0
        return self.build(params.with_dmax(d0)).value(d0)

    def __str__(self) -> str:
        return f"{type(self).__name__}({self.kind.value})"
