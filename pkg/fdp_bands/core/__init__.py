from .errors import (
    FdpBandsError,
    ParameterError,
    NegBinOverflowError,
    InputFormatError,
    TableFormatError,
    TableCoverageError,
)
from .params import BandParams
from .competition import CompetitionSequence, TARGET_WIN, DECOY_WIN, DISCARDED
from .band_base import BandKind, UbMode, XiBand, BandBuilder, FLOOR_SLACK, floor_int
from .report import DecisionReport
