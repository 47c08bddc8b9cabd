from .mixture import MixtureConfig, MixtureDataset, gen_dataset, null_flags, false_discoveries, null_process
from .experiment import (
    ExperimentSummary,
    ExperimentRecorder,
    run_experiment,
    simulate_competition,
    rep_rng,
)
