from .kr_band import KRBand, kr_constant, xi_kr
from .standardized_band import StandardizedBand, xi_sb
from .uniform_band import UniformBand, xi_ub
from .band_factory import BandFactory
from .fdp_bounds import FdpBounds, vbar_from_xi, interpolate
from .dmax import dmax_for_fdr, dmax_for_fdp
from .compare import compare_bands
