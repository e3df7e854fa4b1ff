import io
import json
import math

import pytest

from meanscape.cli import cli_run, main


def run_ok(argv):
    result = cli_run(argv)
    assert result.status == "ok", result.diagnostics
    assert result.exit_code == 0
    return result


def payload(argv):
    return run_ok(argv).payload


class TestPointCommands:
    def test_eval(self):
        p = payload(["eval", "--mean", "(x+y)/2", "--at", "2,4"])
        assert p["value"] == 3.0

    def test_eval_builtin_name(self):
        p = payload(["eval", "--mean", "G", "--at", "1,4"])
        assert p["value"] == 2.0 and p["mean"] == "G"

    def test_star(self):
        p = payload(["star", "--m1", "G", "--m2", "H", "--at", "1,4"])
        assert p["value"] == pytest.approx(4.0 / 3.0, rel=1e-14)

    def test_inverse(self):
        p = payload(["inverse", "--mean", "G", "--at", "1,4"])
        assert p["value"] == pytest.approx(3.0)

    def test_symmetry(self):
        p = payload(["symmetry", "--m0", "G", "--m1", "A", "--at", "1,4"])
        assert p["value"] == pytest.approx(1.6, rel=1e-14)

    def test_sigma(self):
        p = payload(["sigma", "--m0", "A", "--m1", "G", "--at", "1,4"])
        assert p["value"] == pytest.approx(3.0, abs=1e-10)

    def test_sigma_expression_needs_monotone_flag(self):
        argv = ["sigma", "--m0", "(x+y)/2", "--m1", "G", "--at", "1,4"]
        result = cli_run(argv)
        assert result.exit_code == 1
        p = payload(argv + ["--assume-monotone"])
        assert p["value"] == pytest.approx(3.0, abs=1e-10)

    def test_normal(self):
        p = payload(["normal", "--weight", "1/t", "--at", "1,3"])
        assert p["value"] == pytest.approx(1.5)

    def test_m_arith(self):
        p = payload(["m-arith", "--mean", "G", "--at", "1,2"])
        assert p["value"] == pytest.approx(1.4567910310469069, abs=1e-13)
        assert p["guaranteed"] is True


class TestAnalysisCommands:
    def test_compare(self):
        p = payload(["compare", "--p1", "1", "--p2", "1/sqrt(t)",
                     "--window", "0.1,10"])
        assert p["relation"] == ">"

    def test_compare_default_second_weight(self):
        p = payload(["compare", "--p1", "1/t", "--window", "0.1,10"])
        assert p["relation"] == "<"

    def test_distance_and_via_phi_agree(self):
        base = ["--m1", "G", "--m2", "H", "--window", "0.1,10", "--grid", "64"]
        plain = payload(["distance"] + base)
        via = payload(["distance"] + base + ["--via-phi"])
        assert plain["via_phi"] is False and via["via_phi"] is True
        assert abs(plain["value"] - via["value"]) < 1e-6

    def test_dist_to_a(self):
        p = payload(["dist-to-a", "--mean", "G", "--window", "0.01,100"])
        assert 0.0 < p["value"] < 0.5
        assert p["sup_phi"] == pytest.approx(0.5 * math.log(1e4), rel=1e-9)

    def test_border(self):
        p = payload(["border", "--mean", "G"])
        assert p["trend"] == "growing"
        p = payload(["border", "--mean", "A", "--domain", "reals"])
        assert p["trend"] == "bounded"

    def test_gh_cert(self):
        p = payload(["gh-cert"])
        assert 0.149 <= p["value"] <= 0.152
        assert p["argmax_t"] == pytest.approx(2.89005, abs=1e-4)

    def test_verify(self):
        p = payload(["verify", "--mean", "min(x,y)", "--grid", "200"])
        assert p["axiom_iii_ok"] is False
        assert p["counterexamples"]

    def test_coincide(self):
        p = payload(["coincide", "--m0", "G", "--window", "0.1,10", "--grid", "50"])
        assert p["max_discrepancy"] < 1e-9

    def test_counterexample(self):
        p = payload(["counterexample"])
        assert p["d_estimate"] > 0.99
        assert p["compound_is_A"] is True


class TestCompoundCommand:
    def test_compound_value(self):
        p = payload(["compound", "--m1", "(x+y)/2", "--m2", "sqrt(x*y)",
                     "--at", "1,2"])
        assert p["value"] == pytest.approx(1.4567910310469069, abs=1e-12)
        assert p["converged"] is True

    def test_trace_rows(self):
        p = payload(["compound", "--m1", "A", "--m2", "G", "--at", "1,2", "--trace"])
        rows = p["trace"]
        assert rows[0] == {"n": 0, "x": 1.0, "y": 2.0, "gap": 1.0}
        assert rows[1]["x"] == 1.5
        assert rows[1]["gap"] == pytest.approx(0.08578643762690495, abs=1e-15)

    def test_trace_csv(self):
        result = run_ok(["compound", "--m1", "A", "--m2", "G", "--at", "1,2",
                         "--trace", "--format", "csv"])
        lines = result.rendered.strip().splitlines()
        assert lines[0] == "n,x,y,gap"
        first = lines[1].split(",")
        assert first == ["0", "1", "2", "1"]
        assert len(lines) == len(payload(
            ["compound", "--m1", "A", "--m2", "G", "--at", "1,2", "--trace"])["trace"]) + 1

    def test_csv_rejected_elsewhere(self):
        result = cli_run(["eval", "--mean", "A", "--at", "1,2", "--format", "csv"])
        assert result.exit_code == 1

    def test_non_convergence_is_exit_2(self):
        result = cli_run(["compound", "--m1", "A", "--m2", "G", "--at", "1,1000000",
                          "--max-iter", "2"])
        assert result.exit_code == 2
        assert result.status == "error"
        assert result.diagnostics

    def test_lost_bracket_is_exit_2(self):
        # x+y is not a mean, so the root leaves the bracket
        result = cli_run(["sigma", "--m0", "A", "--m1", "x+y", "--at", "1,4"])
        assert result.exit_code == 2
        assert any("sign change" in d for d in result.diagnostics)


class TestErrorHandling:
    def test_unknown_command(self):
        result = cli_run(["frobnicate"])
        assert result.exit_code == 1
        assert any("usage" in d for d in result.diagnostics)

    def test_no_command(self):
        result = cli_run([])
        assert result.exit_code == 1

    def test_parse_error_reports_position(self):
        result = cli_run(["eval", "--mean", "log(x", "--at", "1,2"])
        assert result.exit_code == 1
        assert any("position 6" in d for d in result.diagnostics)

    def test_domain_error_is_user_error(self):
        result = cli_run(["eval", "--mean", "G", "--at", "-1,2"])
        assert result.exit_code == 1

    def test_bad_at(self):
        result = cli_run(["eval", "--mean", "A", "--at", "1;2"])
        assert result.exit_code == 1

    def test_error_envelope_has_diagnostic(self):
        result = cli_run(["eval", "--mean", "log(", "--at", "1,2"])
        doc = json.loads(result.rendered)
        assert doc["status"] == "error"
        assert len(doc["diagnostics"]) >= 1


class TestOutputContract:
    def test_json_envelope_parses(self):
        result = run_ok(["gh-cert"])
        doc = json.loads(result.rendered)
        assert set(doc) == {"status", "payload", "diagnostics"}
        assert doc["payload"]["value"] == pytest.approx(0.150141553, abs=1e-9)

    def test_seventeen_digit_serialization(self):
        result = run_ok(["eval", "--mean", "2*x*y/(x+y)", "--at", "1,3"])
        doc = json.loads(result.rendered)
        assert doc["payload"]["value"] == 1.5
        # a value with a long mantissa survives the round trip exactly
        result = run_ok(["eval", "--mean", "sqrt(x*y)", "--at", "2,1"])
        doc = json.loads(result.rendered)
        assert doc["payload"]["value"] == math.sqrt(2.0)

    def test_determinism(self):
        argv = ["verify", "--mean", "sqrt(x*y)", "--window", "0.1,10",
                "--grid", "100", "--seed", "5"]
        assert cli_run(argv).rendered == cli_run(argv).rendered

    def test_seed_from_environment(self, monkeypatch):
        argv = ["coincide", "--m0", "A", "--grid", "10"]
        monkeypatch.setenv("MEANSCAPE_SEED", "123")
        assert cli_run(argv).payload["seed"] == 123
        # explicit flag wins over the environment
        assert cli_run(argv + ["--seed", "9"]).payload["seed"] == 9
        monkeypatch.setenv("MEANSCAPE_SEED", "not-an-int")
        assert cli_run(argv).exit_code == 1

    def test_stdin_expression(self, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("(x+y)/2"))
        p = payload(["eval", "--mean", "-", "--at", "2,4"])
        assert p["value"] == 3.0

    def test_out_file(self, tmp_path):
        target = tmp_path / "result.json"
        code = main(["gh-cert", "--out", str(target)])
        assert code == 0
        doc = json.loads(target.read_text())
        assert doc["status"] == "ok"

    def test_main_prints_to_stdout(self, capsys):
        code = main(["eval", "--mean", "A", "--at", "2,4"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["payload"]["value"] == 3.0
