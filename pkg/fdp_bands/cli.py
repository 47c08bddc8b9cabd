"""Command-line front end.

    python -m fdp_bands bounds  FILE [--kind kr|sb|ub|all] [--table PATH] ...
    python -m fdp_bands control FILE ...
    python -m fdp_bands tables  --npaths N --dceiling D --gammas 0.05,0.01 --R 0.5 --output PATH
    python -m fdp_bands compare --dmax 100 [--output PATH]
    python -m fdp_bands simulate --m 500 --pi0 0.5 --reps 50 [--output PATH] [--dump-scores PATH]

Decisions are printed as JSON, tables as CSV. Exit codes: 0 success, 2 bad input or
parameters, 3 a quantile table does not cover the request.
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .bands.compare import compare_bands
from .bands.dmax import dmax_for_fdr
from .calibration.quantile_table import QuantileTable, load_tables, save_tables
from .calibration.simulator import SimConfig, build_tables
from .config.settings_loader import SettingsLoader
from .core.band_base import BandKind, UbMode
from .core.competition import CompetitionSequence
from .core.errors import (
    FdpBandsError,
    InputFormatError,
    NegBinOverflowError,
    ParameterError,
    TableCoverageError,
    TableFormatError,
)
from .core.params import BandParams
from .dist.negbin import DEFAULT_SUPPORT_CEILING, set_support_ceiling, support_ceiling
from .procedures.fdp_bounds import tdc_bound
from .procedures.fdp_control import fdp_control_threshold
from .procedures.fdr_control import as_threshold
from .procedures.multi_decoy import MultiDecoyMethod, TiePolicy, compete, competition_params
from .simulate.experiment import run_experiment, simulate_competition
from .simulate.mixture import MixtureConfig
from .utils.io_utils import IOUtils

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COVERAGE = 3


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _pick(value, default):
    return default if value is None else value


def _kinds(value: str) -> List[BandKind]:
    if value == "all":
        return [BandKind.SB, BandKind.UB, BandKind.KR]
    return [BandKind.parse(value)]


def _resolve_seed(args: argparse.Namespace) -> int:
    """--seed, or fresh entropy reported on stderr"""
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy)
        print(f"seed={args.seed}", file=sys.stderr)
    return args.seed


def _load_tables(args: argparse.Namespace, kinds: Sequence[BandKind]) -> Optional[Dict[BandKind, QuantileTable]]:
    if all(kind is BandKind.KR for kind in kinds):
        return None
    path = SettingsLoader.table_path(args.table)
    if path is None:
        logger.warning("No quantile table given (--table or FDP_BANDS_TABLE); only KR bands are available")
        return None
    return load_tables(path)


def _read_sequence(args: argparse.Namespace, rng: np.random.Generator) -> CompetitionSequence:
    if args.decoys:
        targets, decoys = IOUtils.read_multi_decoy(args.input, args.decoys)
        return compete(targets, decoys, args.method, args.ties, rng)
    return IOUtils.read_competition(args.input, rng)


def _cl(args: argparse.Namespace):
    """(c, lambda) from the competition method in multi-decoy mode, else from --c/--lambda"""
    if args.decoys:
        return competition_params(args.method, args.decoys)
    return args.c, args.lam


def _params(args: argparse.Namespace, m: int) -> BandParams:
    c, lam = _cl(args)
    return BandParams(c=c, lam=lam, m=m, alpha=args.alpha, gamma=args.gamma)


def _decision_header(args: argparse.Namespace, m: int) -> Dict[str, Any]:
    c, lam = _cl(args)
    return {"m": m, "alpha": args.alpha, "gamma": args.gamma, "c": c, "lambda": lam, "seed": args.seed}


def _report_entry(report) -> Dict[str, Any]:
    entry = report.to_dict()
    entry.pop("params")
    entry.pop("band_kind")
    return entry


def cmd_bounds(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """k_AS and the FDP bound among its discoveries, per band kind"""
    rng = np.random.default_rng(_resolve_seed(args))
    seq = _read_sequence(args, rng)
    kinds = _kinds(args.kind)
    output = _decision_header(args, seq.m)
    if seq.m == 0:
        output.update({"k_as": 0, "discoveries": 0, "d_max": 0})
        output["bounds"] = {k.value: {"q_bound": 0.0, "q_bound_raw": 0.0} for k in kinds}
        IOUtils.write_json(output)
        return EXIT_OK

    params = _params(args, seq.m)
    tables = _load_tables(args, kinds)
    k = as_threshold(seq, params)
    output.update({"k_as": k, "discoveries": seq.tallies_at(k)["T"], "d_max": dmax_for_fdr(params)})
    output["bounds"] = {
        kind.value: _report_entry(tdc_bound(seq, k, params, kind, tables, UbMode(args.mode), rng))
        for kind in kinds
    }
    IOUtils.write_json(output)
    return EXIT_OK


def cmd_control(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """FDP control: k0 and its discoveries, per band kind"""
    rng = np.random.default_rng(_resolve_seed(args))
    seq = _read_sequence(args, rng)
    kinds = _kinds(args.kind)
    output = _decision_header(args, seq.m)
    if seq.m == 0:
        output["control"] = {k.value: {"k_threshold": 0, "n_discoveries": 0, "q_bound": 0.0} for k in kinds}
        IOUtils.write_json(output)
        return EXIT_OK

    params = _params(args, seq.m)
    tables = _load_tables(args, kinds)
    output["control"] = {
        kind.value: _report_entry(fdp_control_threshold(seq, params, kind, tables, UbMode(args.mode), rng))
        for kind in kinds
    }
    IOUtils.write_json(output)
    return EXIT_OK


def cmd_tables(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """Calibrate SB and UB quantile tables and write them to one file"""
    calib = settings.get("calibration", {})
    output = SettingsLoader.table_path(args.output)
    if output is None:
        raise ParameterError("tables needs --output (or FDP_BANDS_TABLE)")
    R = args.R
    if R is None:
        R = BandParams(c=args.c, lam=args.lam, m=1, alpha=0.5, gamma=0.5).R if args.c_given else calib.get("R", 0.5)
    cfg = SimConfig(
        n_paths=_pick(args.npaths, calib["n_paths"]),
        d_ceiling=_pick(args.dceiling, calib["d_ceiling"]),
        R=R,
        gammas=tuple(args.gammas or calib["gammas"]),
        seed=_resolve_seed(args),
        block_size=calib.get("block_size", 4096),
        support_ceiling=support_ceiling(),
    )
    sb, ub = build_tables(cfg)
    path = save_tables([sb, ub], output)
    print(f"# fdp-bands-table v1 seed={cfg.seed} npaths={cfg.n_paths}")
    logger.info(f"Wrote {len(sb)} SB and {len(ub)} UB rows to {path}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """xi_d of each band kind for d in [1, d_max]"""
    kinds = _kinds(args.kind)
    params = BandParams(c=args.c, lam=args.lam, m=args.dmax, alpha=0.5, gamma=args.gamma, d_max=args.dmax)
    tables = _load_tables(args, kinds)
    rng = np.random.default_rng(_resolve_seed(args)) if args.mode == UbMode.RANDOMIZED.value else None
    frame = compare_bands(params, tables, kinds=kinds, mode=UbMode(args.mode), rng=rng)
    IOUtils.write_csv(frame, args.output)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    """Mixture-model experiment; writes the long-format summary CSV"""
    mix = settings.get("mixture", {})
    exp = settings.get("experiment", {})
    cfg = MixtureConfig(
        m=_pick(args.m, mix["m"]),
        pi0=_pick(args.pi0, mix["pi0"]),
        calibrated=not args.uncalibrated and mix.get("calibrated", True),
        rho=_pick(args.rho, mix["rho"]),
        nu=_pick(args.nu, mix["nu"]),
        n_decoys=args.decoys or mix.get("n_decoys", 1),
        seed=_resolve_seed(args),
    )
    kinds = _kinds(args.kind) if args.kind else [BandKind.parse(k) for k in exp["kinds"]]
    tables = _load_tables(args, kinds)
    if args.dump_scores:
        _, seq, _ = simulate_competition(cfg, 0, MultiDecoyMethod(args.method), TiePolicy(args.ties))
        IOUtils.write_competition(seq, args.dump_scores)
        logger.info(f"Dumped the competition of rep 0 to {args.dump_scores}")
    summary = run_experiment(
        cfg,
        alphas=_pick(args.alphas, exp["alphas"]),
        gamma=_pick(args.gamma, exp.get("gamma", 0.05)),
        kinds=kinds,
        n_reps=_pick(args.reps, exp["n_reps"]),
        tables=tables,
        mode=UbMode(args.mode),
        method=args.method,
        tie_policy=args.ties,
        control=not args.no_control,
        n_jobs=_pick(args.n_jobs, exp.get("n_jobs", 1)),
    )
    IOUtils.write_csv(summary.frame, args.output)
    return EXIT_OK


def _shared(parser: argparse.ArgumentParser, decision: bool = True, gamma: Optional[float] = 0.05) -> None:
    parser.add_argument("--alpha", type=float, default=0.05, help="FDR / FDP level")
    parser.add_argument("--gamma", type=float, default=gamma, help="band exceedance probability")
    parser.add_argument("--c", type=float, default=None, help="target-win threshold (default 0.5)")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="decoy-win threshold (default c)")
    parser.add_argument("--kind", choices=["kr", "sb", "ub", "all"], default="all" if decision else None)
    parser.add_argument("--mode", choices=[m.value for m in UbMode], default=UbMode.DETERMINISTIC.value,
                        help="UB quantile choice: det (conservative) or rand (randomized)")
    parser.add_argument("--seed", type=int, default=None, help="random seed (drawn from entropy and printed if omitted)")
    parser.add_argument("--table", default=None, help="quantile table file (default $FDP_BANDS_TABLE)")


def _competition_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--decoys", type=int, default=0, help="multi-decoy input with this many decoy columns")
    parser.add_argument("--method", choices=[m.value for m in MultiDecoyMethod], default=MultiDecoyMethod.MAX.value)
    parser.add_argument("--ties", choices=[t.value for t in TiePolicy], default=TiePolicy.RANDOM.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdp_bands", description="FDR control and FDP bounds for target-decoy competition")
    parser.add_argument("--profile", default=None, help="settings profile (desk or full)")
    parser.add_argument("--config", default=None, help="YAML file merged over the default settings")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="AS threshold and FDP bounds on its discoveries")
    p.add_argument("input", help="competition file ('-' for stdin)")
    _shared(p)
    _competition_flags(p)
    p.add_argument("--kr-only", action="store_const", dest="kind", const="kr", default="all", help="same as --kind kr")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("control", help="FDP control through a band")
    p.add_argument("input", help="competition file ('-' for stdin)")
    _shared(p)
    _competition_flags(p)
    p.add_argument("--kr-only", action="store_const", dest="kind", const="kr", default="all", help="same as --kind kr")
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("tables", help="calibrate SB/UB quantile tables")
    _shared(p, decision=False)
    p.add_argument("--npaths", type=int, default=None)
    p.add_argument("--dceiling", type=int, default=None)
    p.add_argument("--gammas", type=_float_list, default=None, help="comma-separated gammas")
    p.add_argument("--R", type=float, default=None, help="decoy-win probability (default from --c/--lambda)")
    p.add_argument("--output", "-o", default=None, help="table file (default $FDP_BANDS_TABLE)")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("compare", help="xi_d of the bands side by side")
    _shared(p)
    p.add_argument("--dmax", type=int, default=100)
    p.add_argument("--output", "-o", default=None, help="CSV file (default stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="mixture-model experiment")
    _shared(p, decision=False, gamma=None)
    _competition_flags(p)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--pi0", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--uncalibrated", action="store_true")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--alphas", type=_float_list, default=None, help="comma-separated alphas")
    p.add_argument("--n-jobs", dest="n_jobs", type=int, default=None)
    p.add_argument("--no-control", action="store_true", help="skip FDP control")
    p.add_argument("--output", "-o", default=None, help="summary CSV (default stdout)")
    p.add_argument("--dump-scores", default=None, help="write the rep-0 competition as score,label CSV")
    p.set_defaults(func=cmd_simulate)
    return parser


def _finish_args(args: argparse.Namespace) -> None:
    args.c_given = args.c is not None or args.lam is not None
    if args.c is None:
        args.c = 0.5 if args.lam is None else args.lam
    if args.lam is None:
        args.lam = args.c


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.ERROR if args.quiet else [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    _finish_args(args)

    try:
        settings = SettingsLoader(config_path=args.config, profile=args.profile).get_settings()
        set_support_ceiling(settings.get("negbin", {}).get("support_ceiling", DEFAULT_SUPPORT_CEILING))
        return args.func(args, settings)
    except TableCoverageError as e:
        logger.error(str(e))
        return EXIT_COVERAGE
    except (InputFormatError, ParameterError, TableFormatError, NegBinOverflowError) as e:
        logger.error(str(e))
        return EXIT_INPUT
    except FdpBandsError as e:
        logger.error(str(e))
        return EXIT_INPUT
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
