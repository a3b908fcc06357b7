"""
Загрузка конфигурации: YAML-файл, переменные окружения CFDIM_ и флаги CLI.

Приоритет источников: флаги > окружение > файл > значения по умолчанию.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml
from dotenv import load_dotenv
from loguru import logger

from cfdim.models.config import RunConfig


ENV_PREFIX = "CFDIM_"

# Переменная окружения -> ключ конфигурационного файла (dot notation)
ENV_KEYS = {
    "TOLERANCE": "solver.tolerance",
    "ENUMERATION_CAP": "pressure.enumeration_cap",
    "GRID_SIZE": "pressure.grid_size",
    "K_MAX": "profile.k_max",
    "N_MAX": "profile.n_max",
    "FORMAT": "output.format",
    "SEED": "empirical.seed",
    "THREADS": "numerics.threads",
    "LOG_LEVEL": "logging.level",
}

# Поле RunConfig -> ключ конфигурационного файла
FIELD_KEYS = {
    "tolerance": "solver.tolerance",
    "enumeration_cap": "pressure.enumeration_cap",
    "grid_size": "pressure.grid_size",
    "interpolation_order": "pressure.interpolation_order",
    "explicit_digits": "pressure.explicit_digits",
    "singularity_margin": "pressure.singularity_margin",
    "max_depth": "solver.max_depth",
    "k_max": "profile.k_max",
    "n_max": "profile.n_max",
    "output_format": "output.format",
    "seed": "empirical.seed",
    "node_cap": "empirical.node_cap",
    "threads": "numerics.threads",
    "log_level": "logging.level",
    "log_files": "logging.files",
    "record_runtime": "output.runtime",
}


@dataclass
class ConfigError(Exception):
    """Ошибка загрузки конфигурации."""
    message: str


class ConfigLoader:
    """Загрузчик YAML-конфигурации с доступом по ключам через точку."""

    def __init__(self, config_path: Union[str, Path, None] = None):
        if config_path is None:
            config_path = Path(__file__).parent.parent.parent / "config.yaml"

        self.config_path = Path(config_path)
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self) -> None:
        """Загрузить YAML-файл. Отсутствующий файл означает пустую конфигурацию."""
        if not self.config_path.exists():
            logger.debug(f"Config file not found, using defaults: {self.config_path}")
            return

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                self._config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Error parsing YAML config: {e}")
        except Exception as e:
            raise ConfigError(f"Error loading config: {e}")

        if not isinstance(self._config, dict):
            raise ConfigError(f"Config root must be a mapping: {self.config_path}")

    def get(self, key: str, default: Any = None) -> Any:
        """Получить значение по ключу вида 'a.b.c'."""
        value: Any = self._config
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value


def read_environment(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
    """Значения CFDIM_* из окружения, сопоставленные ключам файла."""
    environ = os.environ if environ is None else environ
    values: Dict[str, str] = {}
    for suffix, key in ENV_KEYS.items():
        raw = environ.get(ENV_PREFIX + suffix)
        if raw is not None and raw != "":
            values[key] = raw
    return values


def build_run_config(
    overrides: Optional[Dict[str, Any]] = None,
    config_path: Union[str, Path, None] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """
    Собрать RunConfig из всех источников.

    Args:
        overrides: значения флагов CLI (None означает "не задано")
        config_path: путь к YAML-файлу
        environ: окружение (по умолчанию os.environ после load_dotenv)

    Returns:
        Валидированная конфигурация запуска
    """
    if environ is None:
        load_dotenv()
    loader = ConfigLoader(config_path)
    env_values = read_environment(environ)

    values: Dict[str, Any] = {}
    for field, key in FIELD_KEYS.items():
        file_value = loader.get(key)
        if file_value is not None:
            values[field] = file_value
        if key in env_values:
            values[field] = env_values[key]

    for field, value in (overrides or {}).items():
        if value is not None:
            values[field] = value

    try:
        return RunConfig(**values)
    except Exception as e:
        raise ConfigError(f"Invalid configuration: {e}")

