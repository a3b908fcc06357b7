"""
Интеграционные тесты командной строки cfdim.
"""

import csv
import io
import json
from pathlib import Path

import pytest

from cfdim import __version__
from cfdim.cli.main import cli, execute
from cfdim.utils.error_handling import EXIT_BUDGET, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE


REPORT_KEYS = ["query", "branch", "value_lo", "value_hi", "diagnostics", "provenance"]


def run(capsys, config: Path, *args: str):
    """Выполнить команду с тестовой конфигурацией, вернуть код и stdout."""
    code = execute(["--config", str(config), *args])
    captured = capsys.readouterr()
    return code, captured.out


def run_json(capsys, config: Path, *args: str) -> dict:
    code, out = run(capsys, config, *args)
    assert code == EXIT_OK
    return json.loads(out)


@pytest.mark.integration
class TestReports:
    """Тесты формата отчётов."""

    def test_json_report_keys(self, capsys, config_file: Path):
        """Тест: отчёт содержит ключи верхнего уровня в фиксированном порядке."""
        report = run_json(capsys, config_file, "verify", "bands", "--k", "2", "--cap", "2")
        assert list(report) == REPORT_KEYS
        assert report["branch"] == "band_counts"
        assert report["diagnostics"]["table"] == {"3": 1, "4": 2, "6": 1}
        assert report["provenance"] == {"M": 2, "n": 2, "tol": None, "runtime": None}

    def test_csv_format(self, capsys, config_file: Path):
        """Тест: --format csv даёт заголовок и одну строку."""
        code, out = run(capsys, config_file, "--format", "csv", "verify", "bands", "--k", "2", "--cap", "2")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["query", "branch", "value_lo", "value_hi", "M", "n", "tol", "runtime"]
        assert rows[1][1] == "band_counts"
        assert len(rows) == 2

    def test_table_format(self, capsys, config_file: Path):
        """Тест: --format table печатает таблицу rich."""
        code, out = run(capsys, config_file, "--format", "table", "verify", "bands", "--k", "2", "--cap", "2")
        assert code == EXIT_OK
        assert "cfdim: band_counts" in out
        assert "diagnostics.table" in out

    def test_reruns_bit_identical(self, capsys, tmp_path: Path):
        """Тест: с --no-runtime повторный запуск даёт тот же отчёт байт в байт."""
        config = tmp_path / "runtime.yaml"
        config.write_text(
            "pressure:\n  grid_size: 128\noutput:\n  runtime: true\nlogging:\n  level: ERROR\n  files: false\n",
            encoding="utf-8",
        )
        args = ("--no-runtime", "pressure", "--theta", "0.8", "--cap", "2", "--depth", "12", "--restricted")
        first_code, first = run(capsys, config, *args)
        second_code, second = run(capsys, config, *args)
        assert first_code == second_code == EXIT_OK
        assert first == second
        assert json.loads(first)["provenance"]["runtime"] is None

    def test_runtime_recorded(self, capsys, tmp_path: Path):
        """Тест: без --no-runtime время счёта записывается."""
        config = tmp_path / "runtime.yaml"
        config.write_text("output:\n  runtime: true\nlogging:\n  level: ERROR\n  files: false\n", encoding="utf-8")
        report = run_json(capsys, config, "verify", "bands", "--k", "2", "--cap", "2")
        assert report["provenance"]["runtime"] >= 0

    def test_emit_plot(self, capsys, config_file: Path, tmp_path: Path):
        """Тест: --emit-plot пишет CSV со столбцами x,y."""
        plot = tmp_path / "plots" / "stopping.csv"
        report = run_json(
            capsys, config_file, "verify", "stopping", "--cap", "2", "--m", "8", "--m", "10", "--emit-plot", str(plot)
        )
        lines = plot.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "x,y"
        assert len(lines) == 3
        assert [float(line.split(",")[0]) for line in lines[1:]] == [8.0, 10.0]
        assert report["branch"] == "stopping_cover"

    def test_version(self, cli_runner):
        """Тест: --version печатает версию."""
        result = cli_runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output


@pytest.mark.integration
class TestComputations:
    """Тесты вычислений через командную строку."""

    def test_pressure_contains_zero(self, capsys, config_file: Path):
        """Тест: скобка P(1) при M = 100 содержит ноль."""
        report = run_json(capsys, config_file, "pressure", "--theta", "1.0", "--cap", "100", "--depth", "14")
        assert report["branch"] == "pressure_full"
        assert report["value_lo"] <= 0.0 <= report["value_hi"]
        assert report["query"]["method"] == "operator_iteration"
        assert report["diagnostics"]["certified"] is True

    def test_pressure_without_cap_is_estimate(self, capsys, config_file: Path):
        """Тест: P(θ) без --cap считается оператором и помечается как несертифицированная."""
        report = run_json(capsys, config_file, "pressure", "--theta", "0.8", "--depth", "16")
        assert report["diagnostics"]["certified"] is False
        assert report["provenance"]["M"] is None

    def test_dim_f2(self, capsys, config_file: Path):
        """Тест: dim F_2 ≈ 0.5313."""
        report = run_json(capsys, config_file, "dim", "fn", "--N", "2", "--tol", "5e-4")
        assert report["branch"] == "bounded_digits"
        assert 0.5306 <= report["value_lo"] <= report["value_hi"] <= 0.5320
        assert report["provenance"]["M"] == 2
        assert report["diagnostics"]["case"] == "цифры не больше N"

    def test_dim_e_skip_hypotheses(self, capsys, config_file: Path):
        """Тест: n_k = k, s_k = t_k = e^{k²} без проверки условий: 1/2."""
        report = run_json(
            capsys, config_file, "dim", "e", "--n", "k", "--s", "exp(k^2)", "--t", "exp(k^2)", "--skip-hypotheses"
        )
        assert report["branch"] == "alpha_infinite_xi"
        assert report["value_lo"] == pytest.approx(0.5)

    def test_profile_seq_hypotheses(self, capsys, config_file: Path):
        """Тест: для n_k = 2^{k²}, s_k = t_k = 2^{n_k} условия выполнены."""
        report = run_json(capsys, config_file, "profile", "seq", "--n", "2^(k^2)", "--s", "2^n_k", "--t", "2^n_k")
        assert report["branch"] == "growth_profile"
        assert report["diagnostics"]["hypotheses"] == {"h1": "holds", "h2": "holds", "h3": "holds"}

    def test_dim_digits_inf(self, capsys, config_file: Path):
        """Тест: {a_n → ∞} имеет размерность ровно 1/2."""
        report = run_json(capsys, config_file, "dim", "digits-inf")
        assert report["branch"] == "digits_to_infinity"
        assert report["value_lo"] == report["value_hi"] == 0.5
        assert report["diagnostics"]["kind"] == "exact"

    def test_boxcount_scales(self, capsys, config_file: Path):
        """Тест: --scales задаёт сетку масштабов подсчёта ящиков."""
        report = run_json(
            capsys, config_file, "verify", "boxcount", "--cap", "2", "--count", "2000", "--depth", "24",
            "--scales", "0.01,0.001,0.0001",
        )
        assert report["diagnostics"]["scales"] == pytest.approx([0.0001, 0.001, 0.01])
        assert report["query"]["scales"] == "0.01,0.001,0.0001"

    def test_wang_wu_enumerated(self, capsys, config_file: Path):
        """Тест: строгая скобка s_2(2) перебором помечена как сертифицированная."""
        report = run_json(capsys, config_file, "verify", "wang-wu", "--B", "2", "--n", "2", "--enumerate")
        assert report["diagnostics"]["method"] == "enumerate"
        assert report["diagnostics"]["certified"] is True
        assert report["provenance"]["M"] == 1024
        assert 0.5 <= report["value_lo"] <= report["value_hi"] <= 1.0

    def test_lemma_restricted_above_dimension(self, capsys, config_file: Path):
        """Тест: θ = 0.9 > dim F_2 отмечается в отчёте."""
        report = run_json(
            capsys, config_file, "verify", "lemma-np", "--theta", "0.9", "--eps", "0", "--k", "10",
            "--mode", "restricted", "--cap", "2",
        )
        assert report["branch"] == "lemma_np_not_found"
        assert report["diagnostics"]["above_dimension"] is True


@pytest.mark.integration
class TestExitCodes:
    """Тесты кодов выхода."""

    def test_domain_error(self, capsys, config_file: Path):
        """Тест: P(θ) при θ ≤ 1/2 даёт код 2."""
        code, out = run(capsys, config_file, "pressure", "--theta", "0.4")
        assert code == EXIT_DOMAIN
        assert out == ""

    def test_failed_hypotheses(self, capsys, config_file: Path):
        """Тест: нарушенное условие (H1) даёт код 2."""
        code, _ = run(capsys, config_file, "dim", "e", "--n", "k", "--s", "exp(k^2)", "--t", "exp(k^2)")
        assert code == EXIT_DOMAIN

    def test_budget_error(self, capsys, tmp_path: Path):
        """Тест: исчерпание лимита узлов даёт код 3."""
        config = tmp_path / "budget.yaml"
        config.write_text("empirical:\n  node_cap: 10\nlogging:\n  level: ERROR\n  files: false\n", encoding="utf-8")
        code, _ = run(capsys, config, "verify", "bands", "--k", "6", "--cap", "5")
        assert code == EXIT_BUDGET

    @pytest.mark.parametrize(
        "args",
        [
            ("dim", "limsup", "--psi", "B^n", "--B", "1"),
            ("pressure", "--theta", "1.0", "--unknown"),
            ("pressure",),
            ("solve", "--slope", "1.0", "--log-b", "0.5"),
            ("verify", "boxcount", "--cap", "2", "--digits", "1,2"),
            ("verify", "boxcount", "--digits", "1,0"),
            ("verify", "boxcount", "--cap", "2", "--scales", "0.001,0.01"),
            ("verify", "boxcount", "--cap", "2", "--scales", "0.1,abc"),
            ("dim", "e", "--n", "k", "--s", "2^k", "--t", "2^k", "--const", "broken"),
        ],
    )
    def test_usage_errors(self, capsys, config_file: Path, args):
        """Тест: ошибки флагов дают код 64."""
        code, _ = run(capsys, config_file, *args)
        assert code == EXIT_USAGE

    def test_invalid_config(self, capsys, tmp_path: Path):
        """Тест: недопустимое значение в конфигурации даёт код 64."""
        config = tmp_path / "bad.yaml"
        config.write_text("pressure:\n  interpolation_order: 2\n", encoding="utf-8")
        code, _ = run(capsys, config, "verify", "bands", "--k", "2", "--cap", "2")
        assert code == EXIT_USAGE
