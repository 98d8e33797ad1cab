"""
Run Config Model - per-scenario parameter schema with unit-suffixed keys
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

REQUIRED = object()

MODEL = "model"
CIRCUIT = "circuit"
MEASUREMENT = "measurement"
RUN = "run"

FIGURES = ("fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6")


@dataclass(frozen=True)
class FieldSpec:
    """One config key: its unit family, type, default and the factor taking it to internal units"""

    family: str
    kind: str  # float, int, str, int_list
    default: Any = None
    scale: float = 1.0
    choices: Tuple[str, ...] = ()
    help: str = ""
    minimum: Optional[int] = None


FIELDS: Dict[str, FieldSpec] = {
    # dimensionless detector model, frequencies in units of the cavity frequency
    "xi": FieldSpec(MODEL, "float", REQUIRED, help="peak detector speed over c"),
    "omega_d0_wc": FieldSpec(MODEL, "float", 0.8, help="bare detector frequency"),
    "lambda0_wc": FieldSpec(MODEL, "float", 0.01, help="bare coupling"),
    "Omega_m_wc": FieldSpec(MODEL, "float", None, help="drive frequency; default 1 + omega_d"),
    "gamma_wc": FieldSpec(MODEL, "float", None, help="damping; default lambda / eta"),
    "eta": FieldSpec(MODEL, "float", 0.4, help="lambda / gamma"),
    "eta_min": FieldSpec(MODEL, "float", 0.0),
    "eta_max": FieldSpec(MODEL, "float", 0.49),
    "eta_points": FieldSpec(MODEL, "int", 50, minimum=2),
    "N_values": FieldSpec(MODEL, "int_list", [1, 2, 4, 16], help="detector counts"),
    "t_end_per_gamma": FieldSpec(MODEL, "float", 30.0, help="integration time in units of 1/gamma"),
    "relaxation_times": FieldSpec(MODEL, "float", 30.0, help="integration time in units of 1/(gamma - 2 lambda)"),
    "n_samples": FieldSpec(MODEL, "int", 601, minimum=2),
    "tolerance": FieldSpec(MODEL, "float", 1e-8, help="integrator relative tolerance"),
    "model": FieldSpec(MODEL, "str", "both", choices=("rwa", "full", "both")),
    "full_every": FieldSpec(MODEL, "int", 1, minimum=1, help="full-model stride along the eta grid"),
    "k_max": FieldSpec(MODEL, "int", 40, minimum=1, help="highest drive harmonic in the validity scan"),
    "n_max": FieldSpec(MODEL, "int", 40, minimum=1, help="highest cavity mode in the validity scan"),
    # circuit, SI after scaling
    "C_pF_per_m": FieldSpec(CIRCUIT, "float", 100.0, 1e-12),
    "L_uH_per_m": FieldSpec(CIRCUIT, "float", None, 1e-6, help="default calibrated from f_cal_GHz"),
    "Cm_pF_per_m": FieldSpec(CIRCUIT, "float", 2000.0, 1e-12),
    "L_c_mm": FieldSpec(CIRCUIT, "float", 11.0, 1e-3),
    "L_d_mm": FieldSpec(CIRCUIT, "float", 8.0, 1e-3),
    "L_m_um": FieldSpec(CIRCUIT, "float", 90.0, 1e-6),
    "D_nm": FieldSpec(CIRCUIT, "float", 500.0, 1e-9),
    "A_pm": FieldSpec(CIRCUIT, "float", 10.0, 1e-12),
    "v_l_m_per_s": FieldSpec(CIRCUIT, "float", 1e4),
    "f_cal_GHz": FieldSpec(CIRCUIT, "float", 4.5, 1e9),
    "n_modes": FieldSpec(CIRCUIT, "int", 2, minimum=2),
    "sample_points": FieldSpec(CIRCUIT, "int", 1101, minimum=2),
    "L_m_min_um": FieldSpec(CIRCUIT, "float", 5.0, 1e-6),
    "L_m_max_um": FieldSpec(CIRCUIT, "float", 150.0, 1e-6),
    "n_points": FieldSpec(CIRCUIT, "int", 30, minimum=2),
    # measurement, SI after scaling
    "f1_GHz": FieldSpec(MEASUREMENT, "float", 3.8, 1e9),
    "f2_GHz": FieldSpec(MEASUREMENT, "float", 5.7, 1e9),
    "lambda_per_s": FieldSpec(MEASUREMENT, "float", 2.45e4),
    "Q": FieldSpec(MEASUREMENT, "float", 1e5),
    "temperature_mK": FieldSpec(MEASUREMENT, "float", 0.0, 1e-3),
    "split_c1": FieldSpec(MEASUREMENT, "float", 0.5),
    "split_c2": FieldSpec(MEASUREMENT, "float", 0.5),
    "Z_T_ohm": FieldSpec(MEASUREMENT, "float", 50.0),
    "points_per_lobe": FieldSpec(MEASUREMENT, "int", 4001, minimum=3),
    "span_linewidths": FieldSpec(MEASUREMENT, "float", 10.0),
    "theta_rad": FieldSpec(MEASUREMENT, "float", math.pi / 2),
    "T_max_mK": FieldSpec(MEASUREMENT, "float", 100.0, 1e-3),
    "n_theta": FieldSpec(MEASUREMENT, "int", 100, minimum=1),
    "n_temperature": FieldSpec(MEASUREMENT, "int", 100, minimum=1),
    # run plumbing
    "scenario": FieldSpec(RUN, "str", None),
    "output_dir": FieldSpec(RUN, "str", None),
    "threads": FieldSpec(RUN, "int", None),
    "figure": FieldSpec(RUN, "str", None, choices=FIGURES),
}

_DETECTOR = ("xi", "omega_d0_wc", "lambda0_wc", "Omega_m_wc", "gamma_wc", "eta")
_CIRCUIT = ("C_pF_per_m", "L_uH_per_m", "Cm_pF_per_m", "L_c_mm", "L_d_mm", "D_nm", "A_pm",
            "v_l_m_per_s", "f_cal_GHz", "n_modes")
_MEASUREMENT = ("f1_GHz", "f2_GHz", "lambda_per_s", "Q", "temperature_mK", "split_c1", "split_c2", "Z_T_ohm")

SCENARIOS: Dict[str, Tuple[str, ...]] = {
    "rwa-coeffs": _DETECTOR + ("k_max", "n_max"),
    "evolve": _DETECTOR + ("t_end_per_gamma", "n_samples", "tolerance", "model"),
    "steady-state": ("eta", "gamma_wc", "relaxation_times", "tolerance"),
    "entanglement-sweep": ("eta_min", "eta_max", "eta_points", "gamma_wc", "xi", "omega_d0_wc", "lambda0_wc", "model",
                           "full_every", "relaxation_times", "n_samples", "tolerance"),
    "many-detectors": ("eta", "gamma_wc", "N_values"),
    "circuit-modes": _CIRCUIT + ("L_m_um", "sample_points"),
    "coupling-sweep": _CIRCUIT + ("L_m_min_um", "L_m_max_um", "n_points"),
    "spectrum": _MEASUREMENT + ("points_per_lobe", "span_linewidths"),
    "squeezing": _MEASUREMENT + ("theta_rad", "T_max_mK", "n_theta", "n_temperature"),
    "reproduce-figure": ("figure",),
}

# defaults that differ from the field default for one scenario
SCENARIO_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "entanglement-sweep": {"xi": 0.8, "model": "rwa", "relaxation_times": 6.0, "n_samples": 201},
}

RUN_KEYS = ("scenario", "output_dir", "threads")


@dataclass
class RunConfig:
    """A scenario with its resolved parameters, each in internal units"""

    scenario: str
    parameters: Dict[str, Any]
    output_dir: Optional[str] = None
    threads: Optional[int] = None
    defaults_used: List[str] = field(default_factory=list)

    def __getitem__(self, key: str) -> Any:
        return self.parameters[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.parameters.get(key, default)

    @property
    def families(self) -> List[str]:
        return sorted({FIELDS[key].family for key in SCENARIOS[self.scenario]} - {RUN})

    @property
    def figure(self) -> Optional[str]:
        return self.parameters.get("figure")

    def resolved(self) -> Dict[str, Any]:
        """Parameters echoed back under their unit-suffixed keys"""
        echoed = {}
        for key, value in self.parameters.items():
            spec = FIELDS[key]
            if isinstance(value, float) and spec.scale != 1.0:
                value = value / spec.scale
            echoed[key] = value
        return echoed


def _coerce(key: str, spec: FieldSpec, value: Any) -> Any:
    if spec.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", field=key)
        if not math.isfinite(value):
            raise ConfigError(f"expected a finite number, got {value!r}", field=key)
        return float(value) * spec.scale
    if spec.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", field=key)
        if spec.minimum is not None and value < spec.minimum:
            raise ConfigError(f"must be at least {spec.minimum}, got {value}", field=key)
        return value
    if spec.kind == "int_list":
        if not isinstance(value, list) or not value or not all(type(v) is int for v in value):
            raise ConfigError(f"expected a non-empty list of integers, got {value!r}", field=key)
        return list(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}", field=key)
    if spec.choices and value not in spec.choices:
        raise ConfigError(f"expected one of {', '.join(spec.choices)}, got {value!r}", field=key)
    return value


def parse_run_config(scenario: str, data: Optional[Dict[str, Any]] = None, figure: Optional[str] = None) -> RunConfig:
    """Check a raw JSON object against the scenario's schema and resolve defaults"""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}", field="scenario")
    data = dict(data or {})
    allowed = SCENARIOS[scenario]

    declared = data.pop("scenario", scenario)
    if declared != scenario:
        raise ConfigError(f"config is for {declared!r} but {scenario!r} was requested", field="scenario")

    families = {FIELDS[key].family for key in allowed} - {RUN}
    for key in data:
        if key in RUN_KEYS or key in allowed:
            continue
        if key not in FIELDS:
            raise ConfigError("unknown key", field=key)
        family = FIELDS[key].family
        if family not in families:
            raise ConfigError(
                f"{family} parameter cannot be mixed into '{scenario}', which takes "
                f"{' and '.join(sorted(families)) or 'no'} parameters",
                field=key,
            )
        raise ConfigError(f"not a parameter of '{scenario}'", field=key)

    if figure is not None:
        if "figure" in data and data["figure"] != figure:
            raise ConfigError(f"conflicts with positional figure {figure!r}", field="figure")
        data["figure"] = figure

    overrides = SCENARIO_DEFAULTS.get(scenario, {})
    parameters, defaults_used = {}, []
    for key in allowed:
        spec = FIELDS[key]
        if key in data and data[key] is not None:
            parameters[key] = _coerce(key, spec, data[key])
        elif key in overrides:
            parameters[key] = _coerce(key, spec, overrides[key])
            defaults_used.append(key)
        elif spec.default is REQUIRED or (key == "figure" and scenario == "reproduce-figure"):
            raise ConfigError("missing required key", field=key)
        else:
            default = list(spec.default) if isinstance(spec.default, list) else spec.default
            parameters[key] = default * spec.scale if isinstance(default, float) else default
            defaults_used.append(key)

    output_dir = data.get("output_dir")
    threads = data.get("threads")
    if output_dir is not None:
        output_dir = _coerce("output_dir", FIELDS["output_dir"], output_dir)
    if threads is not None:
        threads = _coerce("threads", FIELDS["threads"], threads)
        if threads < 1:
            raise ConfigError("must be at least 1", field="threads")

    logger.debug(f"Resolved {scenario} config, defaults used for: {', '.join(defaults_used) or 'none'}")
    return RunConfig(scenario, parameters, output_dir=output_dir, threads=threads, defaults_used=defaults_used)


@dataclass
class ScenarioOutput:
    """A scenario's data table with column units and the metadata echoed in the sidecar"""

    name: str
    table: pd.DataFrame
    units: Dict[str, str]
    metadata: Dict[str, Any] = field(default_factory=dict)
    comments: List[str] = field(default_factory=list)
