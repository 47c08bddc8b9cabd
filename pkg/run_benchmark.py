from pathlib import Path
import logging
import os
import shutil

from fdp_bands.calibration.quantile_table import load_tables, save_tables
from fdp_bands.calibration.simulator import SimConfig, build_tables
from fdp_bands.config.settings_loader import SettingsLoader
from fdp_bands.core.band_base import BandKind
from fdp_bands.simulate.experiment import run_experiment
from fdp_bands.simulate.mixture import MixtureConfig
from fdp_bands.utils.io_utils import IOUtils

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

KINDS = [BandKind.SB, BandKind.UB, BandKind.KR]


def clean_reports_dir(output_dir: str = "benchmark_reports"):
    """Clean the reports directory"""
    if os.path.exists(output_dir):
        shutil.rmtree(output_dir)
    os.makedirs(output_dir)


def prepare_tables(settings: dict, output_dir: str = "benchmark_reports"):
    """Load the tables named by FDP_BANDS_TABLE, or calibrate them at the profile's scale"""
    path = SettingsLoader.table_path()
    if path and Path(path).exists():
        return load_tables(path)
    calib = settings["calibration"]
    cfg = SimConfig(
        n_paths=calib["n_paths"],
        d_ceiling=calib["d_ceiling"],
        R=calib["R"],
        gammas=tuple(calib["gammas"]),
        seed=1,
        block_size=calib["block_size"],
    )
    sb, ub = build_tables(cfg)
    save_tables([sb, ub], os.path.join(output_dir, "quantile_tables.csv"))
    return {BandKind.SB: sb, BandKind.UB: ub}


def print_summary(title: str, summary, alphas, statistics):
    print(f"\n=== {title} ===")
    for alpha in alphas:
        print(f"\nalpha={alpha}")
        for kind in KINDS:
            values = ", ".join(f"{s}={summary.value(alpha, kind, s):.4f}" for s in statistics)
            print(f"  [{kind.value}] {values}")


def run_interpolation_benchmark(tables, settings: dict, seed: int = 11):
    """Median gain of interpolation on the bound at k_AS"""
    exp = settings["experiment"]
    cfg = MixtureConfig(m=2000, pi0=0.5, rho=3.0, seed=seed)
    alphas = [0.01, 0.025, 0.05, 0.075, 0.1]
    summary = run_experiment(
        cfg, alphas, exp["gamma"], KINDS, exp["n_reps"], tables=tables, control=False, n_jobs=exp["n_jobs"]
    )
    print_summary("Interpolation impact (m=2000, pi0=0.5, rho=3)", summary, alphas, ["median_gain"])
    return summary


def run_tightness_benchmark(tables, settings: dict, seed: int = 12):
    """Median bounds on TDC's FDP over the mixture grid"""
    exp = settings["experiment"]
    results = {}
    for calibrated in (True, False):
        for m in (500, 2000):
            for pi0 in (0.2, 0.5, 0.8):
                cfg = MixtureConfig(m=m, pi0=pi0, calibrated=calibrated, seed=seed)
                for gamma in (0.01, 0.05):
                    summary = run_experiment(
                        cfg, exp["alphas"], gamma, KINDS, exp["n_reps"],
                        tables=tables, control=False, n_jobs=exp["n_jobs"],
                    )
                    name = f"cal{int(calibrated)}_m{m}_pi{pi0}_g{gamma}"
                    results[name] = summary.to_dict()
                    print_summary(name, summary, exp["alphas"], ["median_bound", "violation_rate"])
    return results


def run_control_benchmark(tables, settings: dict, seed: int = 13):
    """Power and validity of FDP control through each band"""
    exp = settings["experiment"]
    cfg = MixtureConfig(m=2000, pi0=0.5, rho=3.0, seed=seed)
    summary = run_experiment(cfg, exp["alphas"], exp["gamma"], KINDS, exp["n_reps"], tables=tables, n_jobs=exp["n_jobs"])
    print_summary(
        "FDP control (m=2000, pi0=0.5, rho=3)",
        summary,
        exp["alphas"],
        ["control_median_power", "control_violation_rate"],
    )
    return summary


def run_all_benchmarks(output_dir: str = "benchmark_reports"):
    """Run all desk-scale benchmarks"""
    print("Starting all benchmarks...")
    clean_reports_dir(output_dir)
    settings = SettingsLoader().get_settings()
    logger.info(f"Using profile {settings['profile']}")
    tables = prepare_tables(settings, output_dir)

    print("\nRunning interpolation benchmark...")
    summary = run_interpolation_benchmark(tables, settings)
    path = IOUtils.save_report("interpolation", summary.to_dict(), output_dir)
    print(f"\nReport saved to: {path}")

    print("\nRunning tightness benchmark...")
    results = run_tightness_benchmark(tables, settings)
    path = IOUtils.save_report("tightness", {"settings": results}, output_dir)
    print(f"\nReport saved to: {path}")

    print("\nRunning FDP control benchmark...")
    summary = run_control_benchmark(tables, settings)
    path = IOUtils.save_report("control", summary.to_dict(), output_dir)
    print(f"\nReport saved to: {path}")


if __name__ == "__main__":
    run_all_benchmarks()
