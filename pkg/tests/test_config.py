import pytest

from geoforge.config import PipelineConfig, config_from_dict, load_config
from geoforge.errors import ConfigError


def test_defaults():
    config = PipelineConfig()
    assert config.per_seed == 12
    assert config.seed == 42
    assert config.image_ratio == 0.5
    assert config.sizes == (112, 224, 336)
    assert config.layout.restarts == 20
    assert config.layout.max_iterations == 500
    assert not config.rewriter.enabled
    assert config.resume is False


def test_yaml_file_is_loaded(tmp_path, seeds_dir):
    path = tmp_path / "run.yaml"
    path.write_text(
        f"seeds: [{seeds_dir}]\n"
        "per_seed: 3\n"
        "resume: true\n"
        "sizes: [224]\n"
        "layout:\n"
        "  restarts: 5\n"
        "budget:\n"
        "  max_rounds: 4\n"
        "rewriter:\n"
        "  endpoint: http://rewriter.local/v1\n"
        "  model: small\n",
        encoding="utf-8",
    )
    config = load_config(path).validate()
    assert config.seeds == (str(seeds_dir),)
    assert config.per_seed == 3
    assert config.sizes == (224,)
    assert config.resume is True
    assert config.layout.restarts == 5
    assert config.layout.tau_metric == 1e-2
    assert config.budget.max_rounds == 4
    assert config.rewriter.enabled


def test_overrides_skip_missing_values():
    config = PipelineConfig(per_seed=3).merged(per_seed=None, seed=7)
    assert config.per_seed == 3
    assert config.seed == 7


@pytest.mark.parametrize("payload", [
    {"per_seed": 0},
    {"sizes": [200]},
    {"image_ratio": 1.5},
    {"workers": 0},
])
def test_bad_values_fail_validation(payload):
    with pytest.raises(ConfigError):
        config_from_dict(payload).validate(check_paths=False)


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"per_seeds": 3})
    with pytest.raises(ConfigError):
        config_from_dict({"layout": {"restart": 3}})


def test_missing_seed_path(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig(seeds=(str(tmp_path / "nope"),)).validate()


def test_unreadable_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("per_seed: [1,\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_api_key_is_not_serialized():
    config = config_from_dict({"rewriter": {"endpoint": "http://x", "api_key": "secret"}})
    assert "api_key" not in config.to_dict()["rewriter"]
