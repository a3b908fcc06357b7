"""
Конфигурация pytest с фикстурами для всех тестов.
"""

from pathlib import Path

import pytest
from click.testing import CliRunner
from loguru import logger

from cfdim.models.profile import SequenceTriple
from cfdim.services.dimension_service import DimensionService
from cfdim.services.empirical_service import EmpiricalService
from cfdim.services.pressure_service import PressureService
from cfdim.services.profile_service import ProfileService


# Сетка оператора в тестах меньше рабочей: 128 точек хватает для допусков тестов
TEST_GRID_SIZE = 128


@pytest.fixture(autouse=True)
def quiet_logger():
    """Журнал в тестах только с уровня ERROR."""
    logger.remove()
    logger.add(lambda message: None, level="ERROR")
    yield
    logger.remove()


@pytest.fixture
def pressure_service() -> PressureService:
    """Сервис давления для тестов."""
    return PressureService(grid_size=TEST_GRID_SIZE)


@pytest.fixture
def profile_service() -> ProfileService:
    """Сервис профилей для тестов."""
    return ProfileService()


@pytest.fixture
def dimension_service(pressure_service, profile_service) -> DimensionService:
    """Сервис размерностей для тестов."""
    return DimensionService(pressure_service, profile_service)


@pytest.fixture
def empirical_service(pressure_service) -> EmpiricalService:
    """Сервис эмпирических оценок для тестов."""
    return EmpiricalService(pressure_service, node_cap=2_000_000, seed=7)


@pytest.fixture
def exp_square_triple() -> SequenceTriple:
    """n_k = k, s_k = t_k = e^{k²}."""
    return SequenceTriple(n_gen="k", s_gen="exp(k^2)", t_gen="exp(k^2)", name="exp_square")


@pytest.fixture
def linear_triple() -> SequenceTriple:
    """n_k = 2^{k²}, s_k = t_k = 2^{n_k}: α = β = log 2."""
    return SequenceTriple(n_gen="2^(k^2)", s_gen="2^n_k", t_gen="2^n_k", name="linear")


@pytest.fixture
def cli_runner() -> CliRunner:
    """Тестовый запуск команд click."""
    return CliRunner()


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """Минимальный config.yaml для команд CLI."""
    path = tmp_path / "config.yaml"
    path.write_text(
        "pressure:\n"
        f"  grid_size: {TEST_GRID_SIZE}\n"
        "output:\n"
        "  format: json\n"
        "  runtime: false\n"
        "logging:\n"
        "  level: ERROR\n"
        "  files: false\n",
        encoding="utf-8",
    )
    return path
