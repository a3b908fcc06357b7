"""
Тесты загрузки конфигурации и валидации параметров.
"""

from pathlib import Path

import pytest

from cfdim.models.config import OutputFormat, RunConfig
from cfdim.utils.config import ConfigError, ConfigLoader, build_run_config, read_environment
from cfdim.utils.validation import (
    ValidationError,
    validate_digits,
    validate_positive_int,
    validate_scales,
    validate_theta,
    validate_tolerance,
)


@pytest.mark.unit
class TestConfigLoader:
    """Тесты чтения YAML."""

    def test_dot_notation(self, config_file: Path):
        """Тест: доступ к вложенным ключам через точку."""
        loader = ConfigLoader(config_file)
        assert loader.get("pressure.grid_size") == 128
        assert loader.get("output.format") == "json"
        assert loader.get("missing.key", "default") == "default"

    def test_missing_file_is_empty(self, tmp_path: Path):
        """Тест: отсутствующий файл означает пустую конфигурацию."""
        loader = ConfigLoader(tmp_path / "absent.yaml")
        assert loader.get("pressure") is None

    def test_broken_yaml(self, tmp_path: Path):
        """Тест: ошибка разбора YAML даёт ConfigError."""
        path = tmp_path / "broken.yaml"
        path.write_text("pressure: [1, 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            ConfigLoader(path)

    def test_root_must_be_mapping(self, tmp_path: Path):
        """Тест: корень конфигурации должен быть словарём."""
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            ConfigLoader(path)


@pytest.mark.unit
class TestBuildRunConfig:
    """Тесты приоритета источников конфигурации."""

    def test_defaults(self, tmp_path: Path):
        """Тест: без источников берутся значения по умолчанию."""
        config = build_run_config(config_path=tmp_path / "absent.yaml", environ={})
        assert config == RunConfig()

    def test_file_values(self, config_file: Path):
        """Тест: значения из файла."""
        config = build_run_config(config_path=config_file, environ={})
        assert config.grid_size == 128
        assert config.record_runtime is False
        assert config.log_level == "ERROR"

    def test_environment_over_file(self, config_file: Path):
        """Тест: окружение важнее файла."""
        config = build_run_config(config_path=config_file, environ={"CFDIM_GRID_SIZE": "256"})
        assert config.grid_size == 256

    def test_flags_over_environment(self, config_file: Path):
        """Тест: флаги важнее окружения, None не переопределяет."""
        config = build_run_config(
            overrides={"grid_size": 64, "seed": None},
            config_path=config_file,
            environ={"CFDIM_GRID_SIZE": "256", "CFDIM_SEED": "5"},
        )
        assert config.grid_size == 64
        assert config.seed == 5

    def test_invalid_value(self, config_file: Path):
        """Тест: недопустимое значение даёт ConfigError."""
        with pytest.raises(ConfigError):
            build_run_config(overrides={"interpolation_order": 2}, config_path=config_file, environ={})

    def test_read_environment_ignores_empty(self):
        """Тест: пустые переменные окружения не учитываются."""
        values = read_environment({"CFDIM_FORMAT": "csv", "CFDIM_SEED": "", "OTHER": "1"})
        assert values == {"output.format": "csv"}

    def test_format_enum(self):
        """Тест: формат вывода приводится к перечислению."""
        assert RunConfig(output_format="table").output_format == OutputFormat.TABLE


@pytest.mark.unit
class TestValidation:
    """Тесты валидаторов входных параметров."""

    def test_theta(self):
        """Тест: θ должно превосходить нижнюю границу."""
        assert validate_theta(0.7, lower=0.5) == 0.7
        with pytest.raises(ValidationError):
            validate_theta(0.5, lower=0.5)
        with pytest.raises(ValidationError):
            validate_theta(float("nan"))

    def test_positive_int(self):
        """Тест: натуральные числа, bool не считается числом."""
        assert validate_positive_int(3, "N") == 3
        with pytest.raises(ValidationError):
            validate_positive_int(0, "N")
        with pytest.raises(ValidationError):
            validate_positive_int(True, "N")

    def test_tolerance(self):
        """Тест: допуск положителен."""
        assert validate_tolerance(1e-3) == 1e-3
        with pytest.raises(ValidationError):
            validate_tolerance(0.0)

    def test_scales(self):
        """Тест: масштабы положительны и строго убывают."""
        assert validate_scales([0.1, 0.01]) == [0.1, 0.01]
        with pytest.raises(ValidationError):
            validate_scales([0.01, 0.1])
        with pytest.raises(ValidationError):
            validate_scales([0.1])

    def test_digits(self):
        """Тест: цифры цепной дроби натуральны, набор непустой."""
        assert validate_digits([1, 2, 3]) == [1, 2, 3]
        with pytest.raises(ValidationError):
            validate_digits([1, 0])
        with pytest.raises(ValidationError):
            validate_digits([])
