from typing import Optional


class FdpBandsError(Exception):
    """Base class for all errors raised by fdp_bands"""


class ParameterError(FdpBandsError, ValueError):
    """Invalid argument or parameter combination"""


class NegBinOverflowError(FdpBandsError, OverflowError):
    """Negative binomial support grew past the configured ceiling"""


class InputFormatError(FdpBandsError, ValueError):
    """Competition input could not be parsed"""


class TableFormatError(FdpBandsError, ValueError):
    """Quantile table file is malformed, of another version, or corrupted"""


class TableCoverageError(FdpBandsError, LookupError):
    """A quantile table has no row for the requested key (or no table is loaded at all)"""

    def __init__(
        self,
        kind: str,
        gamma: Optional[float] = None,
        d_max: Optional[int] = None,
        R: Optional[float] = None,
        reason: Optional[str] = None,
    ):
        self.kind = kind
        self.gamma = gamma
        self.d_max = d_max
        self.R = R
        if gamma is None:
            message = f"No {kind} quantile table"
        else:
            message = f"No {kind} quantile for gamma={gamma}, d_max={d_max}, R={R}"
        if reason:
            message = f"{message}: {reason}"
        super().__init__(message)
