import json

import pytest

from src.directions import BetaFamily
from src.exceptions import ConfigError
from src.settings import RunConfig, RuntimeSettings, load_run_config
from src.solver import StepsizeMode


def write_config(tmp_path, text):
    path = tmp_path / "config.json"
    path.write_text(text)
    return path


class TestRunConfig:
    """Parsing and validation of JSON run configurations."""

    def test_minimal(self, tmp_path):
        config = load_run_config(write_config(tmp_path, '{"problem": "quad-pair"}'))
        assert config.dimension == 2
        assert config.beta.to_rule().fr_cap_xi == 0.9
        assert config.to_solve_config().stepsize_mode == StepsizeMode.FIXED

    def test_round_trip(self):
        config = RunConfig(
            problem="jos1",
            dimension=3,
            x0=[0.1, 0.2, 0.3],
            beta={"family": "dy", "eta": 0.2},
            metric=[1.0, 2.0, 0.5],
            safety=0.5,
        )
        again = RunConfig.model_validate_json(config.model_dump_json())
        assert again == config
        assert RunConfig.model_validate_json(again.model_dump_json()) == again

    def test_unknown_key_rejected(self, tmp_path):
        path = write_config(tmp_path, '{\n  "problem": "quad-pair",\n  "colour": 1\n}')
        with pytest.raises(ConfigError) as excinfo:
            load_run_config(path)
        assert excinfo.value.line == 3
        assert f"{path}:3: colour:" in str(excinfo.value)

    def test_unknown_beta_family(self, tmp_path):
        text = json.dumps({"problem": "quad-pair", "beta": {"family": "xyz"}}, indent=2)
        with pytest.raises(ConfigError) as excinfo:
            load_run_config(write_config(tmp_path, text))
        assert "beta.family" in str(excinfo.value)
        assert excinfo.value.line == 4

    @pytest.mark.parametrize("safety", [1.2, 1.0, 0.0])
    def test_safety_domain(self, tmp_path, safety):
        text = json.dumps({"problem": "quad-pair", "safety": safety})
        with pytest.raises(ConfigError):
            load_run_config(write_config(tmp_path, text))

    def test_unknown_problem(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            load_run_config(write_config(tmp_path, '{"problem": "zdt1"}'))
        assert "quad-pair" in str(excinfo.value)

    def test_malformed_json(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            load_run_config(write_config(tmp_path, '{\n"problem": "quad-pair",\n}'))
        assert excinfo.value.line == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "missing.json")

    @pytest.mark.parametrize(
        "overrides",
        [
            {"x0": [0.0]},
            {"x0": [20.0, 0.0]},
            {"metric": [1.0]},
            {"rho1": 0.5, "rho2": 0.1},
            {"beta": {"family": "fr", "eta": 0.1}},
            {"max_iters": 0},
        ],
    )
    def test_inconsistent_fields(self, overrides):
        with pytest.raises(ValueError):
            RunConfig(problem="quad-pair", **overrides)

    def test_seeded_start_is_reproducible(self):
        config = RunConfig(problem="quad-pair", seed=4)
        first, second = config.initial_point(), config.initial_point()
        assert (first == second).all()
        assert config.build_problem().in_domain(first)

    def test_solve_config(self):
        config = RunConfig(
            problem="quad-pair",
            beta={"family": "prp"},
            metric=[1.0, 2.0],
            stepsize_mode="strong-wolfe",
            guard="off",
        )
        solve_config = config.to_solve_config()
        assert solve_config.beta_rule.family == BetaFamily.PRP
        assert solve_config.beta_rule.clamp_nonneg
        assert solve_config.metric.a_max == 2.0
        assert config.to_solve_config("fixed").stepsize_mode == StepsizeMode.FIXED


class TestRuntimeSettings:
    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("MOCG_PARALLEL", "true")
        monkeypatch.setenv("MOCG_CHECK_POINTS", "7")
        settings = RuntimeSettings()
        assert settings.parallel
        assert settings.check_points == 7
        assert settings.scheduler == "threads"

    def test_serial_by_default(self, monkeypatch):
        monkeypatch.delenv("MOCG_PARALLEL", raising=False)
        assert RuntimeSettings().scheduler == "synchronous"
