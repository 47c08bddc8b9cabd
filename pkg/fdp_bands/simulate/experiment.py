"""Repeated mixture-model experiments: TDC thresholds, FDP bounds and FDP control.

Rep r draws everything from SeedSequence([seed, r]), so the summary does not
depend on how reps are scheduled across workers.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Any, List, Optional, Sequence, Tuple, Union
from collections import defaultdict
import logging

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..bands.dmax import dmax_for_fdr, dmax_for_fdp
from ..calibration.quantile_table import QuantileTable
from ..core.band_base import BandKind, UbMode
from ..core.competition import CompetitionSequence
from ..core.errors import ParameterError
from ..dist.negbin import set_support_ceiling, support_ceiling
from ..procedures.fdp_bounds import tdc_bound
from ..procedures.fdp_control import fdp_control_threshold
from ..procedures.fdr_control import as_threshold
from ..procedures.multi_decoy import MultiDecoyMethod, TiePolicy, band_params_for, compete
from .mixture import MixtureConfig, MixtureDataset, gen_dataset, null_flags, false_discoveries

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["alpha", "kind", "statistic", "value"]
# FDP and its bounds are ratios of small integers computed along different routes
FDP_SLACK = 1e-12


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, rep]))


def simulate_competition(
    cfg: MixtureConfig,
    rep: int,
    method: MultiDecoyMethod = MultiDecoyMethod.MAX,
    tie_policy: TiePolicy = TiePolicy.RANDOM,
) -> Tuple[MixtureDataset, CompetitionSequence, np.random.Generator]:
    """Dataset and competition of rep; the returned generator continues that rep's stream"""
    rng = rep_rng(cfg.seed, rep)
    dataset = gen_dataset(cfg, rng)
    seq = compete(dataset.targets, dataset.decoys, method, tie_policy, rng)
    return dataset, seq, rng


def _fdp(V: np.ndarray, seq: CompetitionSequence, k: int) -> Tuple[int, int, float]:
    """(discoveries, false discoveries, FDP) among the target wins in the top k"""
    if k == 0:
        return 0, 0, 0.0
    T, v = int(seq.T[k - 1]), int(V[k - 1])
    return T, v, v / max(T, 1)


def _run_rep(
    cfg: MixtureConfig,
    rep: int,
    alphas: Sequence[float],
    gamma: float,
    kinds: Sequence[BandKind],
    tables: Optional[Dict[BandKind, QuantileTable]],
    mode: UbMode,
    method: MultiDecoyMethod,
    tie_policy: TiePolicy,
    d_inf: Optional[Dict[Tuple[float, BandKind], int]],
    ceiling: Optional[int] = None,
) -> List[Dict[str, Any]]:
    if ceiling is not None:
        # worker processes start from the module default
        set_support_ceiling(ceiling)
    dataset, seq, rng = simulate_competition(cfg, rep, method, tie_policy)
    V = false_discoveries(seq, null_flags(seq, dataset))
    n_false_nulls = dataset.m - dataset.n_nulls
    rows = []

    for alpha in alphas:
        params = band_params_for(method, cfg.n_decoys, cfg.m, alpha, gamma)
        k = as_threshold(seq, params)
        n_disc, n_false, fdp = _fdp(V, seq, k)
        power = (n_disc - n_false) / n_false_nulls if n_false_nulls else 0.0
        d_c = dmax_for_fdr(params)
        dc_ok = k == 0 or int(seq.D[k - 1]) + 1 <= d_c
        if not dc_ok:
            logger.error(f"rep {rep}: D_k+1={int(seq.D[k - 1]) + 1} exceeds d_c={d_c} at alpha={alpha}")

        for kind in kinds:
            report = tdc_bound(seq, k, params, kind, tables, mode, rng)
            gain = report.q_bound_raw - report.q_bound
            if gain < 0:
                logger.error(f"rep {rep}: interpolation raised the {kind.name} bound by {-gain}")
            row = {
                "rep": rep,
                "alpha": alpha,
                "kind": kind.value,
                "k_as": k,
                "discoveries": n_disc,
                "false_discoveries": n_false,
                "fdp": fdp,
                "power": power,
                "bound": report.q_bound,
                "bound_raw": report.q_bound_raw,
                "gain": gain,
                "violated": fdp > report.q_bound + FDP_SLACK,
                "dc_ok": dc_ok,
            }
            if d_inf is not None:
                control = fdp_control_threshold(seq, params, kind, tables, mode, rng, d_max=d_inf[(alpha, kind)])
                c_disc, c_false, c_fdp = _fdp(V, seq, control.k_threshold)
                row.update({
                    "control_k": control.k_threshold,
                    "control_discoveries": c_disc,
                    "control_fdp": c_fdp,
                    "control_power": (c_disc - c_false) / n_false_nulls if n_false_nulls else 0.0,
                    "control_violated": c_fdp > alpha + FDP_SLACK,
                })
            rows.append(row)
    return rows


@dataclass
class ExperimentSummary:
    """Per (alpha, kind) statistics over reps, in long format"""
    frame: pd.DataFrame
    n_reps: int
    config: Dict[str, Any] = field(default_factory=dict)

    def value(self, alpha: float, kind: Union[BandKind, str], statistic: str) -> float:
        kind = BandKind.parse(kind) if isinstance(kind, str) else kind
        hit = self.frame[
            np.isclose(self.frame["alpha"], alpha)
            & (self.frame["kind"] == kind.value)
            & (self.frame["statistic"] == statistic)
        ]
        if hit.empty:
            raise KeyError(f"no {statistic} for alpha={alpha}, kind={kind.value}")
        return float(hit["value"].iloc[0])

    def statistics(self) -> List[str]:
        return list(dict.fromkeys(self.frame["statistic"]))

    def to_csv(self, path: Union[str, Path, None] = None) -> Optional[str]:
        """Write (or return) the summary CSV"""
        return self.frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_reps": self.n_reps,
            "config": self.config,
            "rows": self.frame.to_dict(orient="records"),
        }


class ExperimentRecorder:
    """Collects per-rep rows and reduces them into an ExperimentSummary"""

    def __init__(self):
        self.rows: List[Dict[str, Any]] = []
        self.rep_rows: Dict[int, List[Dict[str, Any]]] = defaultdict(list)

    def add_rep(self, rows: List[Dict[str, Any]]) -> None:
        for row in rows:
            self.rows.append(row)
            self.rep_rows[row["rep"]].append(row)

    def get_rep(self, rep: int) -> List[Dict[str, Any]]:
        return list(self.rep_rows.get(rep, []))

    @property
    def n_reps(self) -> int:
        return len(self.rep_rows)

    def to_frame(self) -> pd.DataFrame:
        """Per-rep rows sorted by rep index"""
        frame = pd.DataFrame(self.rows)
        if frame.empty:
            return frame
        return frame.sort_values(["rep", "alpha", "kind"], kind="stable").reset_index(drop=True)

    def summarize(self, config: Optional[Dict[str, Any]] = None) -> ExperimentSummary:
        frame = self.to_frame()
        records = []
        if not frame.empty:
            for (alpha, kind), group in frame.groupby(["alpha", "kind"], sort=True):
                stats = {
                    "median_bound": group["bound"].median(),
                    "median_bound_raw": group["bound_raw"].median(),
                    "median_gain": group["gain"].median(),
                    "median_fdp": group["fdp"].median(),
                    "mean_fdp": group["fdp"].mean(),
                    "median_discoveries": group["discoveries"].median(),
                    "median_power": group["power"].median(),
                    "violation_rate": group["violated"].mean(),
                    "dc_failures": float((~group["dc_ok"]).sum()),
                }
                if "control_k" in group:
                    stats.update({
                        "control_median_discoveries": group["control_discoveries"].median(),
                        "control_median_power": group["control_power"].median(),
                        "control_mean_fdp": group["control_fdp"].mean(),
                        "control_violation_rate": group["control_violated"].mean(),
                    })
                records.extend([alpha, kind, name, float(value)] for name, value in stats.items())
        summary = pd.DataFrame(records, columns=SUMMARY_COLUMNS)
        return ExperimentSummary(frame=summary, n_reps=self.n_reps, config=config or {})


def run_experiment(
    cfg: MixtureConfig,
    alphas: Sequence[float],
    gamma: float,
    kinds: Sequence[Union[BandKind, str]],
    n_reps: int,
    tables: Optional[Dict[BandKind, QuantileTable]] = None,
    mode: UbMode = UbMode.DETERMINISTIC,
    method: Union[MultiDecoyMethod, str] = MultiDecoyMethod.MAX,
    tie_policy: Union[TiePolicy, str] = TiePolicy.RANDOM,
    control: bool = True,
    n_jobs: int = 1,
    recorder: Optional[ExperimentRecorder] = None,
) -> ExperimentSummary:
    """
    Simulate n_reps competitions and summarize AS thresholds, FDP bounds and FDP control
    :param cfg: mixture settings; cfg.seed must be set
    :param kinds: band kinds to bound with (SB/UB need tables)
    :param control: also run FDP control at each alpha
    :param n_jobs: joblib worker count
    :param recorder: receives the per-rep rows when given
    """
    if cfg.seed is None:
        raise ParameterError("run_experiment needs a seeded MixtureConfig")
    if n_reps < 1:
        raise ParameterError(f"n_reps must be positive, got {n_reps}")
    if n_jobs == 0:
        raise ParameterError("n_jobs must be nonzero (negative counts back from the CPU count)")
    kinds = [BandKind.parse(k) if isinstance(k, str) else k for k in kinds]
    method, tie_policy = MultiDecoyMethod(method), TiePolicy(tie_policy)
    alphas = [float(a) for a in alphas]

    d_inf = None
    if control:
        # d_inf depends on (m, alpha, gamma, B) only, so it is shared by every rep
        d_inf = {}
        for alpha in alphas:
            params = band_params_for(method, cfg.n_decoys, cfg.m, alpha, gamma)
            for kind in kinds:
                d_inf[(alpha, kind)] = dmax_for_fdp(params, kind, tables)
        logger.info(f"d_inf per (alpha, kind): {[(a, k.value, d) for (a, k), d in d_inf.items()]}")

    logger.info(f"Running {n_reps} reps: m={cfg.m}, pi0={cfg.pi0}, calibrated={cfg.calibrated}, seed={cfg.seed}")
    results = Parallel(n_jobs=n_jobs)(
        delayed(_run_rep)(cfg, rep, alphas, gamma, kinds, tables, mode, method, tie_policy, d_inf, support_ceiling())
        for rep in range(n_reps)
    )
    recorder = recorder if recorder is not None else ExperimentRecorder()
    for rows in results:
        recorder.add_rep(rows)

    config = {
        "mixture": cfg.to_dict(),
        "alphas": alphas,
        "gamma": gamma,
        "kinds": [k.value for k in kinds],
        "mode": mode.value,
        "method": method.value,
        "tie_policy": tie_policy.value,
    }
    return recorder.summarize(config)
