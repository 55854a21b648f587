import pytest

from app.errors import ConfigError
from app.models.request import RunConfig
from app.services.config_service import build_config, parse_config_text, read_config_file


def test_parse_config_text_skips_comments_and_blank_lines():
    text = (
        "# a small run\n"
        "\n"
        "model = log_diffusion\n"
        "n = 16   # coarse\n"
        "\n"
        "preset = two_mode(0.3, 0.2)\n"
    )
    assert parse_config_text(text) == {"model": "log_diffusion", "n": "16", "preset": "two_mode(0.3, 0.2)"}


def test_parse_config_text_keeps_the_last_repeated_key():
    assert parse_config_text("n = 16\nn = 32\n") == {"n": "32"}


@pytest.mark.parametrize(
    "text, line",
    [
        ("n = 16\nbogus line\n", 2),
        ("model\n", 1),
        ("# header\n\n\nmodel\n", 4),
    ],
)
def test_parse_config_text_reports_malformed_lines(text, line):
    with pytest.raises(ConfigError) as excinfo:
        parse_config_text(text)
    assert f"line {line}" in str(excinfo.value)


def test_config_file_values_validate_into_a_run_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("model = regularized\nn = 32\nepsilon = 0.01\n")
    config = build_config(RunConfig, read_config_file(str(path)), {"t_end": 0.1, "cfl": None})
    assert config.n == 32
    assert config.epsilon == pytest.approx(0.01)
    assert config.t_end == pytest.approx(0.1)


def test_missing_config_file_names_the_config_field(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        read_config_file(str(tmp_path / "absent.cfg"))
    assert excinfo.value.field == "config"
