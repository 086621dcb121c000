import numpy as np
import orjson
import pytest
from pydantic import ValidationError

from app.core.exceptions import IndexOutOfRangeException, OutputWriteException
from app.models.weight import WeightSpec
from app.schemas.results import THEOREM_COLUMNS, ResultSet, ResultTable
from app.schemas.run_config import Command, OutputFormat, OutputTarget, RunConfig
from app.services.appendix_service import AppendixService
from app.services.command_service import CommandService
from app.services.verification_service import VerificationService
from app.utils.emit import emit, format_value, json_ready, render_csv
from tests.conftest import pure_phi_at_one


def _config(command, params=None, alpha=0.25, **weight):
    return RunConfig.model_validate({
        "command": command,
        "weight": {"alpha": alpha, **weight},
        "params": params or {},
    })


class TestAppendix:

    def test_sweep_matches_closed_form(self):
        n_values = np.array([10, 50, 120])
        values = AppendixService.phi_at_one_sweep(WeightSpec.pure(0.25), n_values)
        assert np.real(values) == pytest.approx([pure_phi_at_one(0.25, n) for n in n_values], rel=1e-11)

    def test_table_properties(self):
        table, summary = AppendixService.run_appendix_table(0.25)
        assert table.name == "appendix_d-0.250"
        assert table.columns[0] == "n"
        assert table.column("n")[0] == 400 and table.column("n")[-1] == 640
        assert summary["relative_spread"] <= 5e-4
        assert summary["theory_rel_dev"] <= 0.02
        theory_dev = table.column("theory_rel_dev")
        assert theory_dev[-1] < theory_dev[0]
        assert table.column("rel_dev")[0] == pytest.approx(0.0, abs=1e-15)

    def test_table_name_has_no_negative_zero(self):
        table, _ = AppendixService.run_appendix_table(-0.1, 400, 412, 6)
        assert table.name == "appendix_d0.100"


class TestVerification:

    def test_edge_table_layout(self):
        w = WeightSpec.pure(0.25)
        d = VerificationService.outer_data(w, [0, 1])
        columns = VerificationService.columns_by_n(w, [64, 128])
        table = VerificationService.edge_table(d, columns, [0, 1])
        assert table.columns == THEOREM_COLUMNS
        assert len(table.rows) == 4
        assert np.isnan(table.rows[0][THEOREM_COLUMNS.index("estimated_order")])
        assert all(np.isfinite(r[-1]) for r in table.rows)

    def test_edge_table_index_guard(self):
        w = WeightSpec.pure(0.25)
        d = VerificationService.outer_data(w, [20])
        with pytest.raises(IndexOutOfRangeException):
            VerificationService.edge_table(d, VerificationService.columns_by_n(w, [8]), [20])

    @pytest.mark.parametrize("table", ["edge_table", "far_edge_table"])
    def test_edge_regime_is_enforced(self, table):
        w = WeightSpec.pure(0.25)
        d = VerificationService.outer_data(w, [9])
        columns = VerificationService.columns_by_n(w, [64])
        assert len(getattr(VerificationService, table)(d, columns, [8]).rows) == 1
        with pytest.raises(IndexOutOfRangeException) as exc:
            getattr(VerificationService, table)(d, columns, [9])
        assert exc.value.extra_data["upper"] == 9

    def test_summarize(self):
        w = WeightSpec.pure(0.25)
        d = VerificationService.outer_data(w)
        columns = VerificationService.columns_by_n(w, [128, 256])
        tables = VerificationService.at_one_tables(w, d, columns, [0])
        summary = VerificationService.summarize(tables)
        assert set(summary) >= {"phi_at_one.max_rel_err", "phi_star_at_one.max_rel_err"}
        assert summary["phi_at_one.max_rel_err"] < 0.01

    def test_beta_identity_table(self):
        table = VerificationService.beta_identity_table(np.linspace(-0.45, 0.45, 20), [0, 1, 2])
        assert len(table.rows) == 60
        assert max(table.column("defect")) <= 1e-10


class TestCommandService:

    def test_columns(self):
        result = CommandService.run(_config(Command.COLUMNS, {"n": 64, "ks": [0, 1], "xs": [0.5]}))
        assert [t.name for t in result.tables] == ["columns", "edge", "far_edge", "bulk"]
        assert len(result.table("columns").rows) == 65
        assert result.metadata["alpha"] == 0.25
        assert result.summary["norm_relation_rel_dev"] < 1e-3

    @pytest.mark.parametrize("command, params", [
        (Command.COLUMNS, {"n": 64, "ks": [9]}),
        (Command.VERIFY_THEOREMS, {"n_values": [64, 256], "ks": [0, 9]}),
    ])
    def test_edge_regime_validation(self, command, params):
        with pytest.raises(ValidationError):
            _config(command, params)

    def test_phi(self):
        result = CommandService.run(_config(Command.PHI, {"n": 32, "j_max": 1, "normalization": "predictor"}))
        names = [t.name for t in result.tables]
        assert names == ["coefficients", "verblunsky", "phi_star_at_one", "phi_at_one"]
        assert result.metadata["normalization"] == "predictor"

    def test_gap(self):
        result = CommandService.run(_config(Command.GAP, {"interval": [0.5, 3.0], "m_max": 3, "nodes": 32}))
        probabilities = result.summary["probabilities"]
        assert len(probabilities) == 4
        assert probabilities[0] == pytest.approx(result.summary["det"])
        assert result.summary["det"] == pytest.approx(result.summary["det_direct"], abs=1e-12)
        assert result.summary["self_convergence"] < 1e-8
        assert not result.summary["extrapolated"]

    def test_kernel(self):
        result = CommandService.run(_config(Command.KERNEL, {"u_min": 0.5, "u_max": 2.0, "points": 4}))
        assert len(result.table("kernel").rows) == 16
        assert result.summary["matching_diagonal"] == "modulus_minus_cross"
        assert result.table("diagonal").columns == ["u", "limit", "analytic", "modulus_minus_cross", "cross_only"]
        assert result.summary["diagonal_variant_defects"]["analytic"] < 1e-6
        assert result.metadata["branch"] == "positive_alpha"

    def test_kernel_c_factor_metadata(self):
        result = CommandService.run(_config(
            Command.KERNEL, {"points": 2, "apply_c_factor": True}, c=[[1.09, 0.0], [0.3, 0.0]]
        ))
        assert result.metadata["apply_c_factor"] is True
        assert result.metadata["c1_at_1_sq"] == pytest.approx(1.69, rel=1e-8)

    def test_sample(self):
        result = CommandService.run(_config(Command.SAMPLE, {"n": 8, "samples": 200, "m_max": 3}))
        table = result.table("histogram")
        assert table.columns == ["m", "count", "probability", "std_error", "fredholm"]
        assert sum(table.column("count")) <= 200
        assert result.summary["diagnostics"]["method"] == "dpp"

    def test_appendix_custom_alphas(self):
        result = CommandService.run(_config(
            Command.APPENDIX, {"alphas": [0.25], "n_min": 400, "n_max": 412}, alpha=0.0
        ))
        assert [t.name for t in result.tables] == ["appendix_d-0.250"]
        assert "appendix_d-0.250" in result.summary


class TestEmit:

    @pytest.fixture
    def result(self):
        return ResultSet(
            command=Command.GAP,
            metadata={"alpha": 0.25, "c": [[1.0, 0.0]]},
            tables=[
                ResultTable(name="first", columns=["m", "value"], rows=[[0, 0.1], [1, float("nan")]]),
                ResultTable(name="second", columns=["flag"], rows=[[True]]),
            ],
            summary={"det": 0.5},
        )

    def test_format_value(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(True) == "true"
        assert format_value(3) == "3"

    def test_render_csv_header(self, result):
        text = render_csv(result, result.tables[0])
        lines = text.splitlines()
        assert lines[0] == "# alpha: 0.25"
        assert lines[1] == "# c: [[1.0,0.0]]"
        assert "# summary.det: 0.5" in lines
        assert "# table: first" in lines
        assert lines[-3:] == ["m,value", "0,0.10000000000000001", "1,nan"]

    def test_one_file_per_table(self, result, tmp_path):
        written = emit(result, OutputTarget(path=str(tmp_path / "out.csv"), format=OutputFormat.CSV))
        assert [p.name for p in written] == ["out_first.csv", "out_second.csv"]
        assert (tmp_path / "out_second.csv").read_text().endswith("flag\ntrue\n")

    def test_empty_result_writes_header_only(self, tmp_path):
        empty = ResultSet(command=Command.GAP, metadata={"alpha": 0.1})
        (path,) = emit(empty, OutputTarget(path=str(tmp_path / "empty.csv")))
        assert path.read_text() == "# alpha: 0.10000000000000001\n"
        assert float(path.read_text().split(": ")[1]) == 0.1

    def test_json(self, result, tmp_path):
        (path,) = emit(result, OutputTarget(path=str(tmp_path / "out.json"), format=OutputFormat.JSON))
        data = orjson.loads(path.read_bytes())
        assert data["command"] == "gap"
        assert data["tables"][0]["rows"][1][1] == "nan"
        assert data["summary"]["det"] == 0.5

    def test_json_ready_tags_non_finite(self):
        data = json_ready({"a": [float("inf"), -np.inf, 1.5], "b": np.array([np.nan, 2.0])})
        assert data == {"a": ["inf", "-inf", 1.5], "b": ["nan", 2.0]}

    def test_write_failure(self, result, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OutputWriteException) as exc:
            emit(result, OutputTarget(path=str(blocker / "out.json"), format=OutputFormat.JSON))
        assert exc.value.exit_code == 1
