"""MC-calibrated band quantiles and their CSV persistence.

File layout::

    # fdp-bands-table v1 seed=<seed> npaths=<N>
    kind,R,gamma,dmax,v1,v2,v3,v4
    SB,...,z,,,
    UB,...,rho,sigma,r,s
    # sha256=<hex digest of the header and rows>
"""
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
import hashlib
import logging
import math
import re

import numpy as np
import pandas as pd

from ..core.band_base import BandKind, UbMode
from ..core.errors import ParameterError, TableCoverageError, TableFormatError
from ..core.params import same_R

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
COLUMNS = ["kind", "R", "gamma", "dmax", "v1", "v2", "v3", "v4"]
_PROVENANCE = re.compile(r"^# fdp-bands-table v(\d+) seed=(\S+) npaths=(\S+)$")
_CHECKSUM = re.compile(r"^# sha256=([0-9a-f]{64})$")


@dataclass(frozen=True)
class SbRow:
    """1-gamma quantile of max_{d <= d_max} of the standardized process"""
    z: float


@dataclass(frozen=True)
class UbRow:
    """Straddling pair of observed cumulative minima and their empirical masses"""
    rho: float
    sigma: float
    r: float
    s: float

    @property
    def degenerate(self) -> bool:
        """No observed minimum had mass <= gamma; rho fell back to 0"""
        return self.rho == 0.0 and self.r == 0.0

    def weight(self, gamma: float) -> float:
        """Probability of picking rho so that w*r + (1-w)*s = gamma"""
        return (self.s - gamma) / (self.s - self.r)


Row = Union[SbRow, UbRow]


@dataclass
class QuantileTable:
    """Quantile rows of one band kind keyed by (gamma, d_max)"""
    kind: BandKind
    R: float
    rows: Dict[Tuple[float, int], Row] = field(default_factory=dict)
    seed: Optional[int] = None
    n_paths: Optional[int] = None

    def __post_init__(self):
        if self.kind is BandKind.KR:
            raise ParameterError("KR bands need no quantile table")

    def gammas(self) -> List[float]:
        return sorted({g for g, _ in self.rows})

    def d_ceiling(self, gamma: float) -> int:
        """Largest calibrated d_max for gamma (0 if gamma is absent)"""
        key = self._gamma_key(gamma)
        if key is None:
            return 0
        return max(d for g, d in self.rows if g == key)

    def _gamma_key(self, gamma: float) -> Optional[float]:
        for g in self.gammas():
            if math.isclose(g, gamma, rel_tol=1e-12, abs_tol=1e-15):
                return g
        return None

    def row(self, gamma: float, d_max: int, R: Optional[float] = None) -> Row:
        """Row for (gamma, d_max); never extrapolates"""
        if R is not None and not same_R(R, self.R):
            raise TableCoverageError(self.kind.name, gamma, d_max, R, reason=f"table was calibrated for R={self.R}")
        key = self._gamma_key(gamma)
        row = None if key is None else self.rows.get((key, int(d_max)))
        if row is None:
            reason = None
            if key is not None:
                reason = f"table covers d_max <= {self.d_ceiling(gamma)}"
            raise TableCoverageError(self.kind.name, gamma, d_max, self.R if R is None else R, reason=reason)
        return row

    def __len__(self) -> int:
        return len(self.rows)


def lookup_sb_z(table: QuantileTable, gamma: float, d_max: int, R: Optional[float] = None) -> float:
    """Stored z for the standardized band"""
    if table.kind is not BandKind.SB:
        raise ParameterError(f"expected an SB table, got {table.kind.name}")
    return table.row(gamma, d_max, R).z


def lookup_ub_u(
    table: QuantileTable,
    gamma: float,
    d_max: int,
    mode: UbMode = UbMode.DETERMINISTIC,
    rng: Optional[np.random.Generator] = None,
    R: Optional[float] = None,
) -> float:
    """
    u for the uniform band
    :param mode: DETERMINISTIC returns rho; RANDOMIZED returns rho with probability (s-gamma)/(s-r), else sigma
    :param rng: generator for the randomized choice
    """
    if table.kind is not BandKind.UB:
        raise ParameterError(f"expected a UB table, got {table.kind.name}")
    row = table.row(gamma, d_max, R)
    if mode is UbMode.DETERMINISTIC:
        return row.rho
    if rng is None:
        raise ParameterError("randomized u lookup needs a random generator")
    w = row.weight(gamma)
    return row.rho if rng.random() < w else row.sigma


def _body(tables: Sequence[QuantileTable]) -> str:
    records = []
    for table in tables:
        for (gamma, d_max), row in sorted(table.rows.items()):
            if isinstance(row, SbRow):
                values = [row.z, np.nan, np.nan, np.nan]
            else:
                values = [row.rho, row.sigma, row.r, row.s]
            records.append([table.kind.name, table.R, gamma, d_max] + values)
    frame = pd.DataFrame(records, columns=COLUMNS)
    return frame.to_csv(index=False, float_format="%.17g", na_rep="", lineterminator="\n")


def save_tables(tables: Sequence[QuantileTable], path: Union[str, Path]) -> Path:
    """Write one or more tables (one per kind) to a single file"""
    if not tables:
        raise ParameterError("nothing to save")
    kinds = [t.kind for t in tables]
    if len(set(kinds)) != len(kinds):
        raise ParameterError("at most one table per kind can share a file")
    first = tables[0]
    seed = "none" if first.seed is None else str(first.seed)
    npaths = "none" if first.n_paths is None else str(first.n_paths)
    header = f"# fdp-bands-table v{FORMAT_VERSION} seed={seed} npaths={npaths}\n"
    body = header + _body(tables)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(body)
        f.write(f"# sha256={digest}\n")
    logger.info(f"Saved {sum(len(t) for t in tables)} quantile rows to {path}")
    return path


def save_table(table: QuantileTable, path: Union[str, Path]) -> Path:
    return save_tables([table], path)


def _parse_optional_int(text: str) -> Optional[int]:
    return None if text == "none" else int(text)


def load_tables(path: Union[str, Path]) -> Dict[BandKind, QuantileTable]:
    """Read every table stored in path"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise TableFormatError(f"cannot read quantile table {path}: {e}") from e

    lines = text.splitlines(keepends=True)
    if not lines:
        raise TableFormatError(f"{path} is empty")
    match = _PROVENANCE.match(lines[0].rstrip("\n"))
    if not match:
        raise TableFormatError(f"{path} is missing the fdp-bands-table provenance line")
    version = int(match.group(1))
    if version != FORMAT_VERSION:
        raise TableFormatError(f"{path} has table format v{version}, expected v{FORMAT_VERSION}")
    check = _CHECKSUM.match(lines[-1].rstrip("\n"))
    if not check:
        raise TableFormatError(f"{path} is truncated (no checksum line)")
    body = "".join(lines[:-1])
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != check.group(1):
        raise TableFormatError(f"{path} failed its checksum")

    try:
        seed = _parse_optional_int(match.group(2))
        n_paths = _parse_optional_int(match.group(3))
        frame = pd.read_csv(
            StringIO("".join(lines[1:-1])),
            dtype={"kind": str},
            float_precision="round_trip",
        )
    except (ValueError, pd.errors.ParserError) as e:
        raise TableFormatError(f"{path} could not be parsed: {e}") from e
    if list(frame.columns) != COLUMNS:
        raise TableFormatError(f"{path} has columns {list(frame.columns)}, expected {COLUMNS}")

    tables: Dict[BandKind, QuantileTable] = {}
    for rec in frame.itertuples(index=False):
        try:
            kind = BandKind[rec.kind]
        except KeyError:
            raise TableFormatError(f"{path} has unknown table kind {rec.kind!r}") from None
        table = tables.get(kind)
        if table is None:
            table = tables[kind] = QuantileTable(kind=kind, R=float(rec.R), seed=seed, n_paths=n_paths)
        elif float(rec.R) != table.R:
            raise TableFormatError(f"{path} mixes R values within the {kind.name} table")
        if kind is BandKind.SB:
            row: Row = SbRow(z=float(rec.v1))
        else:
            row = UbRow(rho=float(rec.v1), sigma=float(rec.v2), r=float(rec.v3), s=float(rec.v4))
        if any(math.isnan(v) for v in vars(row).values()):
            raise TableFormatError(f"{path} has an incomplete {kind.name} row at gamma={rec.gamma}, dmax={rec.dmax}")
        table.rows[(float(rec.gamma), int(rec.dmax))] = row
    logger.info(f"Loaded quantile tables {[k.name for k in tables]} from {path}")
    return tables


def load_table(path: Union[str, Path], kind: Optional[BandKind] = None) -> QuantileTable:
    """Read a single table; kind is required when the file holds both"""
    tables = load_tables(path)
    if kind is None:
        if len(tables) != 1:
            raise ParameterError(f"{path} holds {len(tables)} tables; pass the kind to load")
        return next(iter(tables.values()))
    if kind not in tables:
        raise TableFormatError(f"{path} holds no {kind.name} table")
    return tables[kind]
