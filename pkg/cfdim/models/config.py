"""
Модель конфигурации запуска.
"""

from enum import Enum

from pydantic import Field, field_validator

from .base import BaseModel


LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


class OutputFormat(str, Enum):
    """Формат отчёта CLI."""

    JSON = "json"
    CSV = "csv"
    TABLE = "table"


class RunConfig(BaseModel):
    """Параметры запуска: допуски, лимиты, горизонты, формат вывода."""

    tolerance: float = Field(1e-3, gt=0, description="Допуск решателя по θ")
    enumeration_cap: int = Field(50_000_000, gt=0, description="Лимит перебора слов")
    grid_size: int = Field(512, ge=16, description="Размер сетки оператора переноса")
    interpolation_order: int = Field(3, description="Порядок интерполяции (1 или 3)")
    explicit_digits: int = Field(64, gt=0, description="Явные цифры до дзета-хвоста")
    singularity_margin: float = Field(0.005, gt=0, lt=0.5, description="Отступ от θ=1/2")
    max_depth: int = Field(16384, gt=0, description="Максимальная глубина n")
    k_max: int = Field(24, ge=8, description="Горизонт по k для профилей последовательностей")
    n_max: int = Field(2**40, ge=64, description="Горизонт по n для профилей функций")
    output_format: OutputFormat = Field(OutputFormat.JSON, description="Формат отчёта")
    seed: int = Field(0, ge=0, description="Зерно генератора")
    node_cap: int = Field(5_000_000, gt=0, description="Лимит узлов дерева перебора")
    threads: int = Field(1, gt=0, description="Число рабочих потоков")
    log_level: str = Field("WARNING", description="Уровень логирования")
    log_files: bool = Field(False, description="Писать журналы в каталог logs/")
    record_runtime: bool = Field(True, description="Записывать время счёта в отчёт")

    @field_validator("interpolation_order")
    @classmethod
    def _check_order(cls, value: int) -> int:
        if value not in (1, 3):
            raise ValueError(f"interpolation_order={value}: допустимо 1 или 3")
        return value

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        level = str(value).upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"Неизвестный уровень логирования: {value}")
        return level
