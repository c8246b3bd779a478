import json

import pytest

from djensemble.cli import main


def read_report(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class TestRunCommand:
    def test_single_function_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["run", "--function", "f3", "--mode", "paper", "--out", str(out)])
        assert code == 0
        report = read_report(out)
        assert report["schema"] == "djensemble-report/1"
        entry = report["results"][0]
        assert entry["distribution"]["01"] == pytest.approx(1.0)
        assert entry["classification"] == "balanced"
        assert entry["function_pair"] == ["f3", "f4"]
        assert "f3" in capsys.readouterr().out

    def test_all_functions_pattern_map(self, tmp_path):
        out = tmp_path / "report.json"
        assert main(["run", "--function", "all", "--mode", "paper", "--out", str(out)]) == 0
        report = read_report(out)
        patterns = {e["function"]: e["top_pattern"] for e in report["results"]}
        assert patterns == {
            "f1": "11", "f2": "11", "f3": "01", "f4": "01",
            "f5": "10", "f6": "10", "f7": "00", "f8": "00",
        }
        assert all(e["deterministic"] for e in report["results"])

    def test_exact_constant(self, tmp_path):
        out = tmp_path / "report.json"
        assert main(["run", "--function", "f1", "--mode", "exact", "--out", str(out)]) == 0
        entry = read_report(out)["results"][0]
        assert entry["distribution"]["11"] == pytest.approx(1.0)
        assert entry["classification"] == "constant"
        assert entry["ensemble_evolution_calls"] == 0

    def test_oracle_cross_check(self, tmp_path):
        out = tmp_path / "report.json"
        code = main([
            "run", "--function", "f3", "--mode", "exact",
            "--n-atoms-oracle", "3", "--out", str(out),
        ])
        assert code == 0
        oracle = read_report(out)["results"][0]["oracle"]
        assert oracle["comparable"]
        assert oracle["max_difference_vs_run"] < 1e-10

    def test_unknown_function_exits_2(self, capsys):
        assert main(["run", "--function", "f9"]) == 2
        assert "error" in capsys.readouterr().err

    def test_unknown_mode_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--function", "f1", "--mode", "bogus"])
        assert exc.value.code == 2

    def test_report_round_trips(self, tmp_path):
        out = tmp_path / "report.json"
        main(["run", "--function", "all", "--mode", "paper", "--shots", "50", "--out", str(out)])
        report = read_report(out)
        assert json.loads(json.dumps(report)) == report

    def test_zero_shot_run_consumes_no_randomness(self, monkeypatch):
        from djensemble import cli

        def poisoned(*args, **kwargs):
            raise AssertionError("sampling must not run for shots=0")

        monkeypatch.setattr(cli, "sample_shots", poisoned)
        assert main(["run", "--function", "all", "--mode", "paper"]) == 0


class TestVerifyCommand:
    def test_verify_passes(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        assert main(["verify", "--out", str(out)]) == 0
        report = read_report(out)
        assert report["all_passed"]
        names = {c["name"] for c in report["checks"]}
        assert "polarizer claim audit" in names
        audit = next(c for c in report["checks"] if c["name"] == "polarizer claim audit")
        assert audit["expected_inconsistent"] and audit["passed"]
        assert "not unitary" in audit["detail"]
        assert "PASS" in capsys.readouterr().out

    def test_failed_check_exits_1(self, monkeypatch, capsys):
        from djensemble import cli
        from djensemble.checks import CheckResult

        def broken():
            return [CheckResult("synthetic failure", False, 1.0, "forced by the test")]

        monkeypatch.setattr(cli, "run_all_checks", broken)
        assert main(["verify"]) == 1
        assert "FAIL" in capsys.readouterr().out


class TestReportRoundTrips:
    def test_every_command_report_round_trips(self, tmp_path):
        spec = tmp_path / "medium.json"
        spec.write_text(json.dumps({
            "length_m": 200e-6, "n_atoms": 100000, "coupling_rad_s": 2.91e8,
        }))
        invocations = [
            ["run", "--function", "f5", "--mode", "exact", "--shots", "20"],
            ["verify"],
            ["params", "--medium", str(spec)],
            ["sample", "--function", "f2", "--mode", "paper", "--shots", "30"],
            ["trace", "--function", "f8", "--mode", "paper"],
        ]
        for i, argv in enumerate(invocations):
            out = tmp_path / f"report{i}.json"
            assert main(argv + ["--out", str(out)]) in (0,)
            report = read_report(out)
            assert report["schema"] == "djensemble-report/1"
            assert json.loads(json.dumps(report)) == report


class TestParamsCommand:
    def test_cesium_preset(self, tmp_path):
        out = tmp_path / "params.json"
        assert main(["params", "--medium", "cs-cell", "--out", str(out)]) == 0
        feas = read_report(out)["feasibility"]
        assert abs(feas["detuning_over_coupling"] - 12.35) <= 0.05

    def test_rubidium_preset(self, tmp_path):
        out = tmp_path / "params.json"
        assert main(["params", "--medium", "rb-mot", "--out", str(out)]) == 0
        feas = read_report(out)["feasibility"]
        assert 9.0 <= feas["detuning_over_coupling"] <= 9.5

    def test_medium_file(self, tmp_path):
        spec = tmp_path / "medium.json"
        spec.write_text(json.dumps({
            "length_m": 200e-6, "n_atoms": 100000,
            "coupling_rad_s": 2.91e8, "relaxation_s": 1e-6,
        }))
        out = tmp_path / "params.json"
        assert main(["params", "--medium", str(spec), "--out", str(out)]) == 0
        assert abs(read_report(out)["feasibility"]["detuning_over_coupling"] - 12.35) <= 0.05

    def test_zero_length_spec_exits_2(self, tmp_path, capsys):
        spec = tmp_path / "medium.json"
        spec.write_text(json.dumps({
            "length_m": 0.0, "n_atoms": 100000, "coupling_rad_s": 2.91e8,
        }))
        assert main(["params", "--medium", str(spec)]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_medium_exits_2(self):
        assert main(["params", "--medium", "does-not-exist"]) == 2


class TestSampleCommand:
    def test_deterministic_function_counts(self, tmp_path):
        out = tmp_path / "sample.json"
        code = main([
            "sample", "--function", "f7", "--mode", "paper",
            "--shots", "200", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        entry = read_report(out)["results"][0]
        assert entry["coincidences"] == {"HD1+HD2": 200}
        assert entry["empirical_classification_rate"] == pytest.approx(1.0)

    def test_constant_function_clicks_vertical(self, tmp_path):
        out = tmp_path / "sample.json"
        main(["sample", "--function", "f1", "--mode", "paper",
              "--shots", "100", "--seed", "4", "--out", str(out)])
        entry = read_report(out)["results"][0]
        assert entry["coincidences"] == {"VD1+VD2": 100}

    def test_same_seed_is_bit_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["sample", "--function", "f3", "--mode", "exact", "--shots", "500", "--seed", "11"]
        main(args + ["--out", str(out_a)])
        main(args + ["--out", str(out_b)])
        a, b = read_report(out_a), read_report(out_b)
        assert a["results"] == b["results"]

    def test_zero_shots_rejected(self, capsys):
        assert main(["sample", "--function", "f3", "--shots", "0"]) == 2
        assert "shots" in capsys.readouterr().err


class TestTraceCommand:
    def test_trace_dumps_all_states(self, tmp_path):
        out = tmp_path / "trace.json"
        assert main(["trace", "--function", "f3", "--mode", "paper", "--out", str(out)]) == 0
        entry = read_report(out)["results"][0]
        names = [s["state"] for s in entry["states"]]
        assert names == ["psi0", "psi1", "psi1_prime", "psi1_double_prime", "psi2", "psi3"]
        for state in entry["states"]:
            assert len(state["amplitudes"]) == 8
            total = sum(re * re + im * im for re, im in state["amplitudes"])
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_constant_trace_omits_primes(self, tmp_path):
        out = tmp_path / "trace.json"
        main(["trace", "--function", "f1", "--mode", "exact", "--out", str(out)])
        names = [s["state"] for s in read_report(out)["results"][0]["states"]]
        assert names == ["psi0", "psi1", "psi2", "psi3"]
