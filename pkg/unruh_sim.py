#!/usr/bin/env python3
"""
Unruh Sim - Photon pairs from an oscillating detector in a cavity, and its FBAR circuit analogue
Runs one scenario per call and writes a CSV table plus a JSON sidecar.
"""

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from dotenv import load_dotenv

from commands.circuit import CircuitCommands, circuit_spec_from
from commands.dynamics import DynamicsCommands
from commands.figures import FigureCommands
from commands.spectra import SpectraCommands, measurement_params_from
from models.run_config import CIRCUIT, MEASUREMENT, MODEL, SCENARIOS, RunConfig, ScenarioOutput, parse_run_config
from services.circuit_service import CircuitService
from services.langevin_service import LangevinService
from services.rwa_service import RwaService
from services.spectra_service import SpectraService
from utils.errors import ConfigError, UnruhSimError
from utils.helpers import (
    VERSION,
    ensure_output_dir,
    format_duration,
    load_config,
    load_run_config,
    load_sidecar,
    read_csv,
    save_data,
    table_difference,
    write_csv,
)
from utils.logger import LOGGER_NAME, ContextLogger, log_error, log_scenario_run, log_warnings, setup_logger

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
THRESHOLD_MARGIN = 0.05


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def _eta_warning(eta: float, label: str = "eta") -> Optional[str]:
    margin = (0.5 - abs(eta)) / 0.5
    if margin <= 0:
        return f"{label}={eta:.4g} is at or beyond the instability threshold 1/2"
    if margin <= THRESHOLD_MARGIN:
        return f"{label}={eta:.2f} within 5% of instability threshold"
    return None


class UnruhSimulator:
    def __init__(self, threads: int = 1):
        self.logger = logging.getLogger(LOGGER_NAME)
        self.threads = max(1, threads)

        self.rwa = RwaService()
        self.langevin = LangevinService()
        self.circuit = CircuitService()
        self.spectra = SpectraService()

        self.dynamics_commands = DynamicsCommands(self)
        self.figure_commands = FigureCommands(self)
        self.registry: Dict[str, Callable[[RunConfig], ScenarioOutput]] = {}
        for commands in (self.dynamics_commands, CircuitCommands(self), SpectraCommands(self), self.figure_commands):
            self.registry.update(commands.scenarios())

        self.logger.debug(f"Simulator ready with {len(self.registry)} scenarios, {self.threads} thread(s)")

    def scenario(self, name: str) -> Callable[[RunConfig], ScenarioOutput]:
        if name not in self.registry:
            raise ConfigError(f"unknown scenario {name!r}", field="scenario")
        return self.registry[name]

    def run(self, config: RunConfig, out_dir: str) -> Tuple[str, str]:
        """Execute the scenario and write <out>/<name>.csv with its .json sidecar"""
        start = time.perf_counter()
        with ContextLogger(self.logger, f"scenario {config.scenario}", "INFO"):
            output = self.scenario(config.scenario)(config)
        wall_time = time.perf_counter() - start

        ensure_output_dir(out_dir)
        base = os.path.join(out_dir, output.name)
        csv_path = write_csv(base + ".csv", output.table, output.units, output.comments)
        sidecar = {
            "scenario": config.scenario,
            "parameters": config.resolved(),
            "defaults_used": config.defaults_used,
            "columns": {col: output.units.get(col, "1") for col in output.table.columns},
            "metadata": output.metadata,
            "version": VERSION,
            "wall_time_s": wall_time,
        }
        json_path = base + ".json"
        if not save_data(json_path, _jsonable(sidecar)):
            raise UnruhSimError(f"could not write {json_path}")
        self.logger.info(f"Wrote {csv_path} ({len(output.table)} rows) and {json_path} in {format_duration(wall_time)}")
        return csv_path, json_path

    def validate(self, config: RunConfig) -> Dict[str, Any]:
        """Dry run: resolved defaults, unit families, stability pre-checks and single-mode validity"""
        report: Dict[str, Any] = {
            "scenario": config.scenario,
            "resolved": config.resolved(),
            "defaults_used": config.defaults_used,
            "unit_families": config.families,
            "warnings": [],
            "errors": [],
        }
        warnings: List[str] = report["warnings"]
        try:
            if config.scenario == "reproduce-figure":
                inner = self.figure_commands.figure_config(config.figure)
                report["figure_scenario"] = inner.scenario
                report["resolved"] = inner.resolved()
                config = inner
            params = config.parameters

            if MODEL in config.families:
                self._validate_model(config, report)
            if CIRCUIT in config.families:
                L_m = params.get("L_m_um", params.get("L_m_min_um"))
                warnings.extend(circuit_spec_from(config, L_m=L_m).validate())
            if MEASUREMENT in config.families:
                warnings.extend(measurement_params_from(config).validate())
        except UnruhSimError as e:
            report["errors"].append(str(e))

        log_warnings(self.logger, warnings, "validate")
        return report

    def _validate_model(self, config: RunConfig, report: Dict[str, Any]):
        params = config.parameters
        warnings = report["warnings"]
        if "eta_max" in params:
            eta_warning = _eta_warning(max(abs(params["eta_min"]), abs(params["eta_max"])), "eta_max")
            self.rwa.lorentz_coefficients(params["xi"])
        elif "xi" in params:
            detector, coefficients = self.dynamics_commands.detector_setup(config)
            warnings.extend(detector.validate())
            if coefficients.B >= 1.0:
                warnings.append(f"Jacobi-Anger argument B={coefficients.B:.3g} >= 1")
            resonance = 1.0 + coefficients.omega_d
            if abs(detector.Omega_m - resonance) > 1e-3:
                warnings.append(f"Omega_m={detector.Omega_m:.6g} is off the resonance 1 + omega_d={resonance:.6g}")
            eta_warning = _eta_warning(coefficients.lam / detector.gamma)
            pairs = self.rwa.single_mode_validity(detector, params.get("k_max", 40), params.get("n_max", 40))
            report["single_mode_validity"] = [r._asdict() for r in pairs if r.flagged]
        else:
            eta_warning = _eta_warning(params["eta"])
            for N in params.get("N_values", []):
                collective = _eta_warning(params["eta"] * np.sqrt(N), f"sqrt({N}) eta")
                if collective and N > 1:
                    warnings.append(collective)
        if eta_warning:
            warnings.append(eta_warning)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unruh-sim",
        description="Photon-pair production from an oscillating detector and its FBAR circuit analogue",
    )
    parser.add_argument("scenario", choices=list(SCENARIOS), help="scenario to run")
    parser.add_argument("figure", nargs="?", help="figure name for reproduce-figure (fig2a ... fig6)")
    parser.add_argument("--config", help="JSON file with unit-suffixed parameters")
    parser.add_argument("--out", help="output directory (default $UNRUH_SIM_OUTPUT_DIR or ./output)")
    parser.add_argument("--threads", type=int, help="worker threads for sweeps")
    parser.add_argument("--log-level", choices=LOG_LEVELS, help="console log level")
    parser.add_argument("--validate", action="store_true", help="print a validation report instead of running")
    parser.add_argument("--rerun", metavar="SIDECAR",
                        help="repeat the run recorded in an earlier JSON sidecar and compare the tables")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main function to run one scenario; returns the exit code"""
    load_dotenv()
    args = build_parser().parse_args(argv)
    env = load_config()

    level = (args.log_level or env["log_level"]).upper()
    if level not in LOG_LEVELS:
        level = "INFO"
    logger = setup_logger(level=level, logs_dir=env["logs_dir"], root=True)

    start = time.perf_counter()
    try:
        if args.figure is not None and args.scenario != "reproduce-figure":
            raise ConfigError(f"a figure name only goes with reproduce-figure, got {args.figure!r}", field="figure")
        previous = None
        if args.rerun:
            if args.config:
                raise ConfigError("--rerun takes its parameters from the sidecar, drop --config", field="config")
            sidecar = load_sidecar(args.rerun)
            if sidecar["scenario"] != args.scenario:
                raise ConfigError(f"sidecar records {sidecar['scenario']!r}, not {args.scenario!r}", field="scenario")
            data = sidecar["parameters"]
            previous_csv = os.path.splitext(args.rerun)[0] + ".csv"
            if os.path.exists(previous_csv):
                previous = (previous_csv, read_csv(previous_csv))
        else:
            data = load_run_config(args.config) if args.config else {}
        try:
            config = parse_run_config(args.scenario, data, figure=args.figure)
        except ConfigError as e:
            if args.validate:
                print(json.dumps({"scenario": args.scenario, "warnings": [], "errors": [str(e)]}, indent=2))
            raise

        threads = args.threads if args.threads is not None else (config.threads or env["threads"])
        if threads < 1:
            raise ConfigError(f"must be at least 1, got {threads}", field="threads")
        simulator = UnruhSimulator(threads=threads)

        if args.validate:
            report = simulator.validate(config)
            print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
            return ConfigError.exit_code if report["errors"] else 0

        out_dir = args.out or config.output_dir or env["output_dir"]
        csv_path, _ = simulator.run(config, out_dir)
        if previous is not None:
            difference = table_difference(previous[1], read_csv(csv_path))
            if difference == 0.0:
                logger.info(f"Rerun reproduces {previous[0]}")
            else:
                logger.warning(f"Rerun differs from {previous[0]} by up to {difference:.3e}")
        log_scenario_run(logger, args.scenario, "ok", time.perf_counter() - start)
        return 0
    except UnruhSimError as e:
        log_error(logger, e, f"Scenario {args.scenario} failed")
        log_scenario_run(logger, args.scenario, f"failed (exit {e.exit_code})", time.perf_counter() - start)
        return e.exit_code
    except Exception as e:
        log_error(logger, e, f"Unexpected failure in scenario {args.scenario}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
