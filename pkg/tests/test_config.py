import numpy as np
import pytest

from radial_dunkl.config import SCHEMA, ConfigError, ExperimentConfig, load_config, parse_cfg_text
from radial_dunkl.roots import min_wall_distance


def test_parse_comments_and_errors():
    raw = parse_cfg_text("# c\nfamily = B  # trailing\n\nsize=2\n")
    assert raw == {"family": "B", "size": "2"}
    with pytest.raises(ConfigError, match="unknown"):
        parse_cfg_text("colour = red")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_cfg_text("size = 2\nsize = 3")
    with pytest.raises(ConfigError):
        parse_cfg_text("size 2")


def test_defaults():
    exp = load_config()
    for key, (_, default, _, _) in SCHEMA.items():
        if key not in ("multiplicities", "x0", "chamber_vector"):
            assert exp.values[key] == default
    assert exp.multiplicities == [0.25]
    assert np.isclose(min_wall_distance(exp.x0, exp.system), 1.0)


def test_file_and_overrides(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("family = B\nsize = 2\nmultiplicities = 0.45, 0.2\ndt = 1e-4\n")
    exp = load_config(p, {"dt": "1e-3", "seed": None})
    assert exp.family == "B" and exp.dt == 1e-3 and exp.seed == 0
    assert list(exp.multiplicity.per_orbit) == [0.45, 0.2]
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_multiplicity_broadcast_and_mismatch():
    exp = ExperimentConfig.from_mapping({"family": "B", "size": "3", "multiplicities": "0.3"})
    assert exp.multiplicities == [0.3, 0.3]
    with pytest.raises(ConfigError, match="orbits"):
        ExperimentConfig.from_mapping({"family": "A", "size": "3", "multiplicities": "0.3, 0.2"})


@pytest.mark.parametrize("raw", [
    {"family": "E"},
    {"family": "A", "size": "1"},
    {"size": "2.5"},
    {"multiplicities": "-0.1"},
    {"dt": "0.3"},
    {"theta": "2"},
    {"x0": "3, 2, 1"},
    {"path_count": "0"},
    {"calibrate": "sphere"},
    {"suite": "slow"},
    {"write_csv": "maybe"},
    {"epsilon_coeff": "-1"},
    {"start_distance": "0"},
])
def test_invalid_values(raw):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(raw)


def test_hash_ignores_output_settings():
    a = ExperimentConfig.from_mapping({"out": "x", "thread_count": "2"})
    b = ExperimentConfig.from_mapping({"out": "y"})
    c = ExperimentConfig.from_mapping({"seed": "1"})
    assert a.hash == b.hash != c.hash


def test_simulation_overrides():
    exp = ExperimentConfig.from_mapping({"T": "1", "dt": "1e-3"})
    sim = exp.simulation(T=0.5)
    assert sim.T == 0.5 and sim.dt == 1e-3 and np.array_equal(sim.x0, exp.x0)
