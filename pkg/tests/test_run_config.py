import math

import pytest

from models.run_config import FIELDS, REQUIRED, SCENARIOS, parse_run_config
from utils.errors import ConfigError


def test_defaults_are_resolved_and_recorded():
    config = parse_run_config("rwa-coeffs", {"xi": 0.8})
    assert config["xi"] == 0.8
    assert config["omega_d0_wc"] == 0.8
    assert config["Omega_m_wc"] is None
    assert "xi" not in config.defaults_used
    assert "lambda0_wc" in config.defaults_used
    assert config.families == ["model"]


def test_missing_required_key():
    with pytest.raises(ConfigError) as info:
        parse_run_config("rwa-coeffs", {})
    assert info.value.field == "xi"
    assert "missing required key" in str(info.value)
    assert ConfigError.exit_code == 2


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError, match="unknown key") as info:
        parse_run_config("rwa-coeffs", {"xi": 0.8, "xii": 0.1})
    assert info.value.field == "xii"


def test_foreign_family_key_is_rejected():
    with pytest.raises(ConfigError, match="cannot be mixed") as info:
        parse_run_config("rwa-coeffs", {"xi": 0.8, "L_m_um": 90.0})
    assert info.value.field == "L_m_um"


def test_known_key_of_another_scenario_in_the_same_family():
    with pytest.raises(ConfigError, match="not a parameter"):
        parse_run_config("steady-state", {"xi": 0.8})


def test_unit_suffixes_scale_to_si():
    config = parse_run_config("circuit-modes", {"L_m_um": 45.0, "A_pm": 20.0})
    assert config["L_m_um"] == pytest.approx(45e-6)
    assert config["A_pm"] == pytest.approx(20e-12)
    assert config["L_c_mm"] == pytest.approx(0.011)
    assert config.resolved()["L_m_um"] == pytest.approx(45.0)

    spectrum = parse_run_config("spectrum", {"temperature_mK": 30.0})
    assert spectrum["f1_GHz"] == pytest.approx(3.8e9)
    assert spectrum["temperature_mK"] == pytest.approx(0.03)


@pytest.mark.parametrize("key,value", [
    ("xi", "fast"),
    ("xi", True),
    ("xi", math.inf),
    ("k_max", 4.5),
    ("model", "exact"),
])
def test_bad_values(key, value):
    data = {"xi": 0.8, key: value}
    with pytest.raises(ConfigError) as info:
        parse_run_config("evolve" if key == "model" else "rwa-coeffs", data)
    assert info.value.field == key


def test_list_defaults_are_not_shared():
    first = parse_run_config("many-detectors", {})
    first["N_values"].append(64)
    assert parse_run_config("many-detectors", {})["N_values"] == [1, 2, 4, 16]


def test_scenario_key_must_match():
    assert parse_run_config("steady-state", {"scenario": "steady-state"}).scenario == "steady-state"
    with pytest.raises(ConfigError):
        parse_run_config("steady-state", {"scenario": "evolve"})
    with pytest.raises(ConfigError):
        parse_run_config("run-everything", {})


def test_run_keys_and_threads():
    config = parse_run_config("spectrum", {"output_dir": "elsewhere", "threads": 3})
    assert config.output_dir == "elsewhere"
    assert config.threads == 3
    with pytest.raises(ConfigError):
        parse_run_config("spectrum", {"threads": 0})


def test_reproduce_figure_needs_a_known_figure():
    assert parse_run_config("reproduce-figure", figure="fig3").figure == "fig3"
    with pytest.raises(ConfigError, match="missing required key"):
        parse_run_config("reproduce-figure", {})
    with pytest.raises(ConfigError):
        parse_run_config("reproduce-figure", figure="fig9")
    with pytest.raises(ConfigError):
        parse_run_config("reproduce-figure", {"figure": "fig4"}, figure="fig5")


def test_every_scenario_key_is_declared():
    for scenario, keys in SCENARIOS.items():
        for key in keys:
            assert key in FIELDS, f"{scenario}: {key}"
    assert FIELDS["xi"].default is REQUIRED


@pytest.mark.parametrize("scenario,key,value", [
    ("entanglement-sweep", "eta_points", 0),
    ("evolve", "n_samples", 1),
    ("coupling-sweep", "n_points", 1),
    ("entanglement-sweep", "full_every", 0),
])
def test_counts_below_their_minimum(scenario, key, value):
    data = {key: value, "xi": 0.8} if scenario == "evolve" else {key: value}
    with pytest.raises(ConfigError, match="at least") as info:
        parse_run_config(scenario, data)
    assert info.value.field == key


def test_sweep_has_its_own_defaults():
    config = parse_run_config("entanglement-sweep", {})
    assert config["model"] == "rwa"
    assert config["xi"] == 0.8
    assert config["relaxation_times"] == 6.0
    assert {"model", "xi", "relaxation_times"} <= set(config.defaults_used)
    assert parse_run_config("evolve", {"xi": 0.8})["model"] == "both"
