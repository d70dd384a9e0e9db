import json
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from src.logging_utils import ExperimentLoggingAdapter, configure_logger
from src.models.experiment_config import GlobalOptions, OperatorOptions, PerturbConfig, SimulateConfig
from src.numerics.errors import ConfigError
from src.numerics.twopoint import FluxId
from src.preferences import DEFAULT_CONFIG, get_log_path, get_output_dir, load_config, save_config
from src.system.output import write_csv, write_json
from src.system.parallel import parallel_map
from src.system.safety import PACKAGE_ROOT, is_safe_output_file, is_safe_path, require_safe_path


# --- preferences ---

def test_missing_config_falls_back_to_defaults(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        config = load_config(tmp_path / "absent.json")
    assert config == DEFAULT_CONFIG
    assert "missing" in caplog.text


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_unreadable_config_falls_back_to_defaults(tmp_path, caplog, content):
    path = tmp_path / "config.json"
    path.write_text(content)
    with caplog.at_level(logging.ERROR):
        assert load_config(path) == DEFAULT_CONFIG
    assert "Using default settings" in caplog.text


def test_config_merges_over_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"gamma": 1.3, "cfl": "", "log_level": " debug ", "theme": "dark"}))
    config = load_config(path)
    assert config["gamma"] == 1.3
    assert config["cfl"] == DEFAULT_CONFIG["cfl"]
    assert config["log_level"] == "debug"
    assert "theme" not in config


def test_save_config_merges(tmp_path):
    path = tmp_path / "nested" / "config.json"
    save_config({"seed": 9}, path)
    save_config({"threads": 4}, path)
    assert json.loads(path.read_text()) == {"seed": 9, "threads": 4}
    assert load_config(path)["seed"] == 9

    path.write_text("{broken")
    with pytest.raises(ConfigError):
        save_config({"seed": 1}, path)


def test_directory_getters(tmp_path):
    logs = tmp_path / "logs"
    assert get_log_path({"log_dir": str(logs)}) == logs
    assert logs.is_dir()
    assert get_output_dir({"output_dir": str(tmp_path / "out")}) == tmp_path / "out"
    with pytest.raises(RuntimeError):
        get_output_dir({"output_dir": str(PACKAGE_ROOT / "numerics")})


# --- safety ---

def test_safety_checks(tmp_path):
    assert is_safe_path(tmp_path / "results")
    assert not is_safe_path(PACKAGE_ROOT)
    assert not is_safe_path(PACKAGE_ROOT / "numerics" / "out.csv")
    assert not is_safe_output_file(tmp_path)
    with pytest.raises(RuntimeError, match=r"\[SAFETY BLOCK\]"):
        require_safe_path(tmp_path.anchor, "test")


# --- output ---

def test_write_json_is_plain_and_sorted(capsys):
    write_json(None, {"b": np.float64(np.nan), "a": np.arange(3), "c": np.bool_(True), "d": (np.int64(2), 0.5)})
    text = capsys.readouterr().out
    assert json.loads(text) == {"a": [0, 1, 2], "b": None, "c": True, "d": [2, 0.5]}
    assert text.index('"a"') < text.index('"b"')


def test_write_csv_keeps_every_digit(tmp_path):
    path = tmp_path / "sub" / "rows.csv"
    write_csv(path, ("x", "y"), [(np.int64(1), 0.1 + 0.2), ("z", np.float32(0.5))])
    assert path.read_text() == "x,y\n1,0.30000000000000004\nz,0.5\n"


def test_output_refuses_package_tree():
    with pytest.raises(RuntimeError):
        write_csv(PACKAGE_ROOT / "rows.csv", ("x",), [(1,)])


# --- parallel ---

@pytest.mark.parametrize("threads", [1, 4])
def test_parallel_map_keeps_order(threads):
    progress = []
    result = parallel_map(lambda x: x * x, range(20), threads=threads,
                          on_progress=lambda done, total: progress.append((done, total)))
    assert result == [x * x for x in range(20)]
    assert progress[-1] == (20, 20)
    assert len(progress) == 20


def test_parallel_map_rejects_zero_threads():
    with pytest.raises(ValueError):
        parallel_map(abs, [1], threads=0)


# --- logging and options ---

def test_experiment_adapter_prefix():
    adapter = ExperimentLoggingAdapter(logging.getLogger("splitform"), "flux check")
    assert adapter.process("done", {}) == ("[flux check] done", {})
    assert ExperimentLoggingAdapter(logging.getLogger("splitform")).process("done", {}) == ("done", {})


def test_configure_logger_writes_file(tmp_path):
    path = configure_logger(tmp_path / "logs", level=logging.DEBUG)
    logging.getLogger("splitform").debug("hello")
    for handler in logging.root.handlers:
        handler.flush()
    assert path.parent == tmp_path / "logs"
    assert "hello" in path.read_text()
    assert configure_logger(tmp_path / "logs", reuse_existing=True) == path
    labelled = configure_logger(tmp_path / "other", run_label="flux check")
    assert labelled.name.endswith("_flux_check.log")
    with pytest.raises(RuntimeError):
        configure_logger(PACKAGE_ROOT / "logs")


def test_option_models():
    options = GlobalOptions(log_level="debug")
    assert options.log_level == "DEBUG"
    assert options.level == logging.DEBUG
    with pytest.raises(ValidationError):
        GlobalOptions(log_level="chatty")
    with pytest.raises(ValidationError):
        GlobalOptions(colour="red")

    assert OperatorOptions(family="cg", elements=4, degree=3).size == 4
    assert OperatorOptions(family="fd4", nodes=32).size == 32

    perturb = PerturbConfig()
    assert perturb.flux is FluxId.SHIMA
    assert perturb.surface_flux is FluxId.SHIMA
    assert perturb.amplitude == 1e-3
    assert perturb.t_end == 10.0


def test_initial_condition_option():
    assert SimulateConfig(t_end=1.0).ic == DEFAULT_CONFIG["ic"] == "density_wave"
    assert PerturbConfig(ic="density_wave").ic == "density_wave"
    with pytest.raises(ValidationError):
        SimulateConfig(t_end=1.0, ic="vortex")
