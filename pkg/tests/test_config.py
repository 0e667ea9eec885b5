import json

import pytest
from hypothesis import given, strategies as st

from hyperlasso.config import ExperimentConfig, load_config
from hyperlasso.errors import ConfigError
from hyperlasso.noise import NoiseSpec


def _base(**kw):
    d = dict(domain="interval", L=10, quadrature=12, test_function="exp_sq")
    d.update(kw)
    return d


def test_roundtrip_through_json():
    cfg = ExperimentConfig.from_dict(_base(noise=[{"kind": "gaussian", "sigma": 0.1}],
                                           lambda_grid=[-2, -1.5], mu=2.0))
    again = ExperimentConfig.from_dict(json.loads(cfg.to_json()))
    assert again == cfg
    assert again.noise == (NoiseSpec.gaussian(0.1),)
    assert again.lambda_grid == (-2.0, -1.5)


@given(st.lists(st.floats(-4, 0), min_size=1, max_size=5),
       st.lists(st.floats(0, 1), min_size=1, max_size=3),
       st.integers(1, 9), st.integers(0, 2**32))
def test_roundtrip_property(grid, sigmas, trials, seed):
    cfg = ExperimentConfig.from_dict(_base(lambda_grid=grid, trials=trials, seed=seed,
                                           noise=[{"kind": "gaussian", "sigma": s} for s in sigmas]))
    assert ExperimentConfig.from_dict(json.loads(cfg.to_json())) == cfg


@pytest.mark.parametrize("bad", [
    {"colour": "red"},
    {"trials": 0},
    {"L": -3},
    {"estimators": ["ridge"]},
    {"domain": "torus"},
    {"test_function": "wendland_caps"},
    {"tikhonov_penalty": "laplace_beltrami"},
    {"mu": [1.0, 2.0]},
    {"mu": 0.0},
    {"noise": [{"kind": "gaussian", "sigma": -1}]},
    {"noise_mask": "odd"},
    {"test_function": "user-file"},
    {"t_design": "x.txt", "t": 30},
])
def test_rejects_bad_configs(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(_base(**bad))


def test_missing_keys():
    with pytest.raises(ConfigError, match="missing"):
        ExperimentConfig.from_dict({"domain": "disc"})


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.json")


def test_shipped_configs_parse():
    from pathlib import Path
    files = sorted((Path(__file__).parents[1] / "configs").glob("*.json"))
    assert files
    for f in files:
        assert load_config(f).trials >= 1
