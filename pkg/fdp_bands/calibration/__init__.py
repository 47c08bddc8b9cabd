from .quantile_table import (
    QuantileTable,
    SbRow,
    UbRow,
    lookup_sb_z,
    lookup_ub_u,
    save_table,
    save_tables,
    load_table,
    load_tables,
)
from .simulator import (
    SimConfig,
    PathSimulator,
    build_tables,
    u_path_from_bernoulli,
    standardized_path,
    uniform_path,
    exact_extrema,
)
