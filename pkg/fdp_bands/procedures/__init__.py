from .fdr_control import as_threshold
from .fdp_bounds import tdc_bound, band_bounds
from .fdp_control import fdp_control_threshold
from .multi_decoy import (
    MultiDecoyMethod,
    TiePolicy,
    MultiDecoyInput,
    assign_label_multi,
    compete,
    competition_params,
    band_params_for,
)
