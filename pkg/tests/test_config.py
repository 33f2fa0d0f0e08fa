import math

import pytest

from magnon_qi.config import load_config, parse_config
from magnon_qi.errors import ConfigError
from magnon_qi.system_params import TWO_PI, SystemParams, cooperativities, intracavity_pump_photons


def test_empty_document_gives_defaults():
    cfg = parse_config("")
    assert cfg.params == SystemParams()
    assert cfg.eta == 0.07
    assert cfg.room_temperature == 293.0
    assert cfg.eom_point == (668.43, 5181.95)
    assert cfg.eom_resonator_frequency == pytest.approx(TWO_PI * 10e6)
    assert cfg.discord_convention == "both" and cfg.occupancy == "both"
    assert len(cfg.grid("grid.lambda_a")) == 20
    lb = cfg.grid("grid.lambda_b")
    assert (lb[0], lb[-1], len(lb)) == (1.0, 1600.0, 20)
    assert load_config(None) == cfg


def test_pump_power_doubles_photon_number():
    base = parse_config("").params
    doubled = parse_config("pump_power_mw = 120").params
    n0 = intracavity_pump_photons(base.pump_power, base.pump_wavelength, base.optical_damping)
    n1 = intracavity_pump_photons(doubled.pump_power, doubled.pump_wavelength, doubled.optical_damping)
    assert n1 == pytest.approx(2 * n0, rel=1e-14)
    assert cooperativities(doubled).lambda_a == pytest.approx(2 * cooperativities(base).lambda_a, rel=1e-14)


def test_log_grid_with_zero_minimum_is_rejected():
    text = "# sweep\n[grid.lambda_b]\nspacing = \"log\"\nmin = 0\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == "grid.lambda_b.min"
    assert info.value.line == 4
    assert "grid.lambda_b.min" in str(info.value) and "line 4" in str(info.value)


def test_dotted_inline_grid_form():
    cfg = parse_config("grid.lambda_a = { min = 0.01, max = 0.02, points = 3 }")
    assert cfg.grid("grid.lambda_a") == pytest.approx((0.01, 0.015, 0.02))


@pytest.mark.parametrize("text, key", [
    ("pump_power = 60", "pump_power"),
    ("[scenario]\nbeta = 1", "scenario.beta"),
    ("[grid.lambda_a]\nstep = 0.1", "grid.lambda_a.step"),
])
def test_unknown_keys_rejected(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


@pytest.mark.parametrize("text", [
    "[grid.lambda_a]\npoints = 1",
    "[grid.lambda_a]\nmin = 0.5\nmax = 0.1",
    "sphere_radius_um = -3",
    "discord_convention = \"third\"",
    "[scenario]\neta = 1.5",
    "pump_power_mw = \"sixty\"",
    "this is not toml",
])
def test_invalid_documents(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_units_are_normalized():
    cfg = parse_config("magnon_damping_mhz = 2\nmicrowave_frequency_ghz = 5\nenvironment_temperature_mk = 10")
    assert cfg.params.magnon_damping == pytest.approx(TWO_PI * 2e6)
    assert cfg.params.microwave_frequency == pytest.approx(TWO_PI * 5e9)
    assert cfg.params.environment_temperature == pytest.approx(0.010)


def test_hash_tracks_content_not_formatting():
    a = parse_config("pump_power_mw = 120")
    b = parse_config("# comment\npump_power_mw   =   120.0\n")
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != parse_config("").config_hash()
    assert math.isfinite(a.params.pump_power)


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
