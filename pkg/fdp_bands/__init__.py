"""FDR control and simultaneous FDP bounds for competition-based multiple testing."""
from .core import (
    BandParams,
    CompetitionSequence,
    DecisionReport,
    BandKind,
    UbMode,
    XiBand,
    FdpBandsError,
    ParameterError,
    InputFormatError,
    TableFormatError,
    TableCoverageError,
    NegBinOverflowError,
)
from .dist import NegBinSpec, nb_pmf, nb_cdf, nb_survival, nb_quantile
from .calibration import SimConfig, QuantileTable, build_tables, lookup_sb_z, lookup_ub_u, save_table, load_table
from .bands import (
    BandFactory,
    FdpBounds,
    xi_kr,
    xi_sb,
    xi_ub,
    vbar_from_xi,
    interpolate,
    dmax_for_fdr,
    dmax_for_fdp,
    compare_bands,
)
from .procedures import (
    as_threshold,
    tdc_bound,
    fdp_control_threshold,
    assign_label_multi,
    compete,
    MultiDecoyInput,
    MultiDecoyMethod,
    TiePolicy,
)
from .simulate import MixtureConfig, gen_dataset, run_experiment, ExperimentSummary

__version__ = "0.1.0"
