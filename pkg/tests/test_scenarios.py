"""Scenario schema, presets, runner outputs, sweeps and the CLI."""

import json

import numpy as np
import pytest

from fockladder import (
    ScenarioValidationError,
    evaluate_check,
    list_presets,
    load_scenario,
    parse_config,
    preset_document,
    run_scenario,
    series_to_csv,
    summary_to_json,
    sweep,
)
from fockladder.cli import main as cli_main
from fockladder.scenarios import SCHEMA_VERSION

EXPECTED_PRESETS = {
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig6a", "fig6b",
    "regime-check-fig2a", "regime-check-fig2b",
    "regime-check-fig3a", "regime-check-fig3b",
}


def engineered_doc(**overrides):
    """Minimal fast scenario: one-step engineered ladder, half a period."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": "unit",
        "model": "engineered-ladder",
        "reference_rate": {"unit": "lambda1"},
        "cutoff": 8,
        "grid": {"start": 0.0, "stop": float(np.pi), "samples": 21},
        "initial_state": {"field": {"0": 1.0}, "atom": {"e": 1.0}},
        "outputs": ["P0", "P1"],
        "parameters": {
            "ladder": {"base": 0, "weights": [1.0]},
            "zeta_ref": 0.01,
        },
    }
    doc.update(overrides)
    return doc


class TestSchema:
    def test_minimal_document_parses(self):
        cfg = parse_config(engineered_doc())
        assert cfg.model == "engineered-ladder"
        assert cfg.time_column == "zeta1_t"

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ScenarioValidationError):
            parse_config(engineered_doc(extra=1))

    def test_unknown_parameter_key_rejected(self):
        doc = engineered_doc()
        doc["parameters"]["bogus"] = 1.0
        with pytest.raises(ScenarioValidationError):
            parse_config(doc)

    def test_schema_version_checked(self):
        with pytest.raises(ScenarioValidationError):
            parse_config(engineered_doc(schema_version=99))

    def test_unknown_model_rejected(self):
        with pytest.raises(ScenarioValidationError):
            parse_config(engineered_doc(model="bogus"))

    def test_bad_grid_rejected(self):
        with pytest.raises(ScenarioValidationError):
            parse_config(engineered_doc(grid={"start": 1.0, "stop": 0.0, "samples": 5}))

    def test_bad_output_rejected(self):
        with pytest.raises(ScenarioValidationError):
            parse_config(engineered_doc(outputs=["bogus"]))

    def test_output_beyond_cutoff_rejected(self):
        with pytest.raises(ScenarioValidationError):
            parse_config(engineered_doc(outputs=["P99"]))

    def test_missing_keys_reported(self):
        doc = engineered_doc()
        del doc["cutoff"]
        with pytest.raises(ScenarioValidationError, match="cutoff"):
            parse_config(doc)

    def test_complex_amplitude_pairs(self):
        doc = engineered_doc()
        doc["initial_state"]["field"] = {"0": [0.6, 0.0], "1": [0.0, 0.8]}
        cfg = parse_config(doc)
        run_scenario(cfg)


class TestPresets:
    def test_exact_preset_set(self):
        names = {name for name, _ in list_presets()}
        assert names == EXPECTED_PRESETS

    def test_descriptions_nonempty(self):
        for _, description in list_presets():
            assert description.strip()

    def test_all_presets_parse(self):
        for name in EXPECTED_PRESETS:
            cfg = load_scenario(name)
            assert cfg.name == name

    def test_dump_is_deep_copy(self):
        doc = preset_document("fig4")
        doc["parameters"]["Gamma"] = 1.0
        assert preset_document("fig4")["parameters"]["Gamma"] == 63.0

    def test_unknown_preset(self):
        with pytest.raises(ScenarioValidationError):
            preset_document("fig9")

    def test_anchor_embedded(self):
        for name in ("fig2a", "fig4", "fig6a", "fig6b"):
            doc = preset_document(name)
            assert doc["anchor"]["figure"]
            assert doc["anchor"]["targets"]

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(engineered_doc()))
        cfg = load_scenario(str(path))
        assert cfg.name == "unit"

    def test_load_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioValidationError):
            load_scenario(str(path))

    def test_load_missing_file(self):
        with pytest.raises(ScenarioValidationError):
            load_scenario("no-such-scenario")


class TestRunner:
    def test_engineered_run_outputs(self):
        result = run_scenario(parse_config(engineered_doc()))
        series = result.series
        assert set(series.columns) == {"P0", "P1"}
        # x = zeta_ref * t: P0 = cos^2 x starting from |e, 0>
        assert np.allclose(series.column("P0"), np.cos(series.times) ** 2, atol=1e-7)

    def test_regime_only_skips_evolution(self):
        result = run_scenario(load_scenario("regime-check-fig2a"))
        assert result.series is None
        assert "regime" in result.summary
        assert "final" not in result.summary

    def test_fig4_summary_contents(self):
        result = run_scenario(load_scenario("fig4"))
        s = result.summary
        assert s["anchor"]["figure"] == "4"
        assert s["final"]["F3"] == pytest.approx(0.92, abs=0.03)
        assert s["final"]["Q"] == pytest.approx(-0.96, abs=0.03)
        assert s["steady"]["detected_at"] is not None
        assert s["steady"]["null_space_trace_distance"] < 0.01
        assert s["gamma_eff"]["configured"] == [63.0]

    def test_fig6_recipe_rates_exposed(self):
        result = run_scenario(load_scenario("fig6a"))
        recipe = result.summary["gamma_eff"]["recipe"]
        # computed Gamma_k = r (zeta_k tau)^2 differ from the configured
        # figures by a factor close to max(k)+1 = 2
        assert len(recipe) == 2
        assert recipe[0] / 176.0 == pytest.approx(2.0, rel=0.02)

    def test_check_evaluation(self):
        result = run_scenario(load_scenario("fig4"))
        findings = evaluate_check(result)
        assert all(f["pass"] for f in findings)

    def test_check_miss_detected(self):
        doc = preset_document("fig4")
        doc["check"]["F3"]["target"] = 0.5
        doc["check"]["F3"]["tol"] = 0.01
        result = run_scenario(parse_config(doc))
        findings = {f["name"]: f for f in evaluate_check(result)}
        assert not findings["F3"]["pass"]


class TestSerialization:
    def test_csv_header_and_first_column(self):
        result = run_scenario(parse_config(engineered_doc()))
        csv = series_to_csv(result.series, result.config.time_column)
        lines = csv.strip().split("\n")
        assert lines[0] == "zeta1_t,P0,P1"
        assert len(lines) == 22

    def test_csv_deterministic(self):
        doc = engineered_doc()
        a = series_to_csv(run_scenario(parse_config(doc)).series, "zeta1_t")
        b = series_to_csv(run_scenario(parse_config(doc)).series, "zeta1_t")
        assert a == b

    def test_csv_17_digit_precision(self):
        result = run_scenario(parse_config(engineered_doc()))
        value = result.series.column("P0")[3]
        csv = series_to_csv(result.series, "zeta1_t")
        assert f"{value:.17g}" in csv

    def test_summary_json_deterministic_and_sorted(self):
        doc = preset_document("fig4")
        a = summary_to_json(run_scenario(parse_config(doc)).summary)
        b = summary_to_json(run_scenario(parse_config(doc)).summary)
        assert a == b
        parsed = json.loads(a)
        assert list(parsed) == sorted(parsed)


class TestSweep:
    def test_sweep_over_gamma(self):
        cfg = load_scenario("fig4")
        rows = sweep(cfg, "parameters.Gamma", [10.0, 63.0])
        assert len(rows) == 2
        assert rows[0]["value"] == 10.0
        assert rows[1]["F3"] > rows[0]["F3"]

    def test_bad_path_rejected(self):
        cfg = load_scenario("fig4")
        with pytest.raises(ScenarioValidationError):
            sweep(cfg, "parameters.nope", [1.0])


class TestCli:
    def test_presets_lists(self, capsys):
        assert cli_main(["presets"]) == 0
        out = capsys.readouterr().out
        for name in EXPECTED_PRESETS:
            assert name in out

    def test_presets_dump_round_trips(self, capsys):
        assert cli_main(["presets", "--dump", "fig4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert parse_config(doc).name == "fig4"

    def test_run_writes_outputs(self, tmp_path, capsys):
        code = cli_main(["run", "--scenario", "fig4", "--out", str(tmp_path), "--check"])
        assert code == 0
        assert (tmp_path / "fig4.csv").exists()
        summary = json.loads((tmp_path / "fig4.json").read_text())
        assert summary["name"] == "fig4"
        assert all(f["pass"] for f in summary["check"])

    def test_run_unknown_scenario_exits_2(self, capsys):
        assert cli_main(["run", "--scenario", "fig9"]) == 2

    def test_run_invalid_file_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(engineered_doc(model="bogus")))
        assert cli_main(["run", "--scenario", str(path)]) == 2

    def test_run_check_miss_exits_4(self, tmp_path, capsys):
        doc = preset_document("fig4")
        doc["check"]["F3"] = {"target": 0.5, "tol": 0.001}
        path = tmp_path / "doctored.json"
        path.write_text(json.dumps(doc))
        assert cli_main(["run", "--scenario", str(path), "--check"]) == 4
        # without --check the embedded targets are not enforced
        assert cli_main(["run", "--scenario", str(path)]) == 0

    def test_run_numerical_guard_exits_3(self, capsys):
        # fig4 pumps |3> hard; cutoff 4 leaves the pumped level inside the
        # top-two leakage guard
        assert cli_main(["run", "--scenario", "fig4", "--cutoff", "4"]) == 3

    def test_regime_threshold_controls_exit(self, capsys):
        assert cli_main(["regime", "--scenario", "fig2a", "--threshold", "5"]) == 0
        assert cli_main(["regime", "--scenario", "fig2a", "--threshold", "20"]) == 1

    def test_regime_rejects_dissipative_scenario(self, capsys):
        assert cli_main(["regime", "--scenario", "fig4"]) == 2

    def test_sweep_outputs_table(self, capsys):
        assert cli_main([
            "sweep", "--scenario", "fig4",
            "--param", "parameters.Gamma", "--values", "10,63",
        ]) == 0
        out = capsys.readouterr().out
        lines = out.strip().split("\n")
        assert lines[0].startswith("value,")
        assert len(lines) == 3

    def test_sweep_bad_values_exits_2(self, capsys):
        assert cli_main([
            "sweep", "--scenario", "fig4", "--param", "parameters.Gamma",
            "--values", "a,b",
        ]) == 2
