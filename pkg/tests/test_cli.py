import orjson
import pytest
from click.testing import CliRunner

from app import __version__
from app.cli import cli
from app.core.logging import setup_logging


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture(autouse=True)
def restore_logging():
    yield
    # CliRunner cierra el stderr capturado por el sink
    setup_logging("WARNING")


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_columns_writes_one_file_per_table(runner, tmp_path):
    out = tmp_path / "cols.csv"
    result = runner.invoke(cli, [
        "columns", "--alpha", "0.25", "--n", "64", "--k", "0", "--k", "1", "--x", "0.5", "--out", str(out),
    ])
    assert result.exit_code == 0, result.stderr
    for name in ("columns", "edge", "far_edge", "bulk"):
        path = tmp_path / f"cols_{name}.csv"
        assert path.exists()
        lines = path.read_text().splitlines()
        assert lines[0] == "# command: columns"
        assert f"# table: {name}" in lines


def test_phi_json(runner, tmp_path):
    out = tmp_path / "phi.json"
    result = runner.invoke(cli, ["phi", "--alpha", "-0.2", "--n", "16", "--format", "json", "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    data = orjson.loads(out.read_bytes())
    assert data["command"] == "phi"
    assert data["metadata"]["normalization"] == "monic"
    assert len(data["tables"][0]["rows"]) == 17


def test_gap_to_stdout(runner):
    result = runner.invoke(cli, [
        "gap", "--alpha", "0.25", "--interval", "0.5", "3", "--m-max", "3", "--nodes", "16", "--format", "json",
    ])
    assert result.exit_code == 0, result.stderr
    data = orjson.loads(result.stdout)
    assert data["summary"]["det"] == pytest.approx(data["summary"]["probabilities"][0])


def test_c_file(runner, tmp_path):
    c_file = tmp_path / "c.json"
    c_file.write_bytes(orjson.dumps({"alpha": 0.1, "c": [[1.09, 0.0], [0.3, 0.0]]}))
    out = tmp_path / "phi.json"
    result = runner.invoke(cli, [
        "phi", "--alpha", "0.25", "--c-file", str(c_file), "--n", "8", "--format", "json", "--out", str(out),
    ])
    assert result.exit_code == 0, result.stderr
    metadata = orjson.loads(out.read_bytes())["metadata"]
    assert metadata["alpha"] == 0.25
    assert len(metadata["c"]) == 2


def test_alpha_out_of_range(runner):
    result = runner.invoke(cli, ["columns", "--alpha", "0.7", "--n", "8"])
    assert result.exit_code == 2
    assert "VALIDATION_ERROR" in result.stderr


def test_alpha_required(runner):
    result = runner.invoke(cli, ["columns", "--n", "8"])
    assert result.exit_code == 2


def test_non_positive_weight(runner, tmp_path):
    c_file = tmp_path / "c.json"
    c_file.write_bytes(orjson.dumps({"alpha": 0.25, "c": [[1.0, 0.0], [0.6, 0.0]]}))
    result = runner.invoke(cli, ["columns", "--c-file", str(c_file), "--n", "8"])
    assert result.exit_code == 2
    assert "WEIGHT_NOT_POSITIVE" in result.stderr


def test_kernel_rejects_zero_alpha(runner):
    result = runner.invoke(cli, ["kernel", "--alpha", "0", "--points", "2"])
    assert result.exit_code == 2
    assert "KERNEL_DOMAIN" in result.stderr


def test_coarse_grid_is_a_numerical_diagnostic(runner):
    result = runner.invoke(cli, [
        "sample", "--alpha", "0.25", "--n", "128", "--grid-size", "512", "--samples", "10",
    ])
    assert result.exit_code == 3
    assert "GRID_TOO_COARSE" in result.stderr


def test_output_write_failure(runner, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    result = runner.invoke(cli, [
        "gap", "--alpha", "0.25", "--m-max", "1", "--nodes", "16", "--out", str(blocker / "gap.csv"),
    ])
    assert result.exit_code == 1
    assert "OUTPUT_WRITE" in result.stderr


def test_appendix_single_d(runner, tmp_path):
    out = tmp_path / "appendix.json"
    result = runner.invoke(cli, [
        "appendix", "--d", "0.1", "--n-min", "400", "--n-max", "412", "--step", "6",
        "--format", "json", "--out", str(out),
    ])
    assert result.exit_code == 0, result.stderr
    data = orjson.loads(out.read_bytes())
    assert [t["name"] for t in data["tables"]] == ["appendix_d0.100"]
    assert [row[0] for row in data["tables"][0]["rows"]] == [400, 406, 412]


def test_edge_index_outside_regime(runner):
    result = runner.invoke(cli, ["columns", "--alpha", "0.25", "--n", "64", "--k", "9"])
    assert result.exit_code == 2
    assert "edge regime" in result.stderr
