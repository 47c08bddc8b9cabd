from dataclasses import dataclass, field
from typing import Dict, Any, Optional

from .band_base import BandKind
from .params import BandParams


@dataclass
class DecisionReport:
    """Outcome of a thresholding or bounding procedure"""
    k_threshold: int
    n_discoveries: int
    q_bound: float
    band_kind: Optional[BandKind]
    params: BandParams
    q_bound_raw: Optional[float] = None
    u_used: Optional[float] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.k_threshold == 0:
            self.q_bound = 0.0
            if self.q_bound_raw is not None:
                self.q_bound_raw = 0.0

    @property
    def d_max(self) -> int:
        return self.params.d_max

    def to_dict(self) -> Dict[str, Any]:
        """Convert report to dictionary format"""
        return {
            "k_threshold": self.k_threshold,
            "n_discoveries": self.n_discoveries,
            "q_bound": self.q_bound,
            "q_bound_raw": self.q_bound_raw,
            "band_kind": None if self.band_kind is None else self.band_kind.value,
            "d_max": self.d_max,
            "u_used": self.u_used,
            "params": self.params.to_dict(),
            **self.extras,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DecisionReport":
        """Create report object from dictionary"""
        data = data.copy()
        known = {"k_threshold", "n_discoveries", "q_bound", "q_bound_raw", "band_kind", "u_used", "params", "d_max"}
        extras = {k: v for k, v in data.items() if k not in known}
        kind = data.get("band_kind")
        return cls(
            k_threshold=data["k_threshold"],
            n_discoveries=data["n_discoveries"],
            q_bound=data["q_bound"],
            band_kind=None if kind is None else BandKind(kind),
            params=BandParams.from_dict(data["params"]),
            q_bound_raw=data.get("q_bound_raw"),
            u_used=data.get("u_used"),
            extras=extras,
        )

    def __str__(self) -> str:
        kind = self.band_kind.value if self.band_kind else "none"
        return f"[{kind}] k={self.k_threshold} discoveries={self.n_discoveries} Q<={self.q_bound:.4f}"
