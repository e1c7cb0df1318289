import json

import pytest

from l2mbqc import cli, mbqc


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_mod3_anf_listing(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "--fn", "mod3:0", "--n", "3")
        assert code == 0
        # all six degree <= 2 nonconstant monomials, no constant term
        assert "100 010 110 001 101 011" in out
        assert "anf_degree     2" in out

    def test_constant_bound(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "--fn", "const0", "--n", "2",
                               "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["nchvm_bound"] == 1.0

    def test_pairwise_and_fmax(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "--fn", "c2", "--n", "4",
                               "--format", "json")
        assert json.loads(out)["f_max"] == 0.25


class TestPfd:
    def test_or2_check_paper(self, capsys):
        code, out, _ = run_cli(capsys, "pfd", "--fn", "or", "--n", "2",
                               "--check-paper", "--format", "json")
        assert code == 0
        assert json.loads(out)["reference_verified"] is True

    def test_or3_published_formula_fails(self, capsys):
        code, out, _ = run_cli(capsys, "pfd", "--fn", "or", "--n", "3",
                               "--check-paper", "--format", "json")
        assert code == 1
        assert json.loads(out)["reference_verified"] is False

    def test_const0_empty_support(self, capsys):
        code, out, _ = run_cli(capsys, "pfd", "--fn", "const0", "--n", "3",
                               "--format", "json")
        assert code == 0
        assert json.loads(out)["support_size"] == 0

    def test_and3_certificate(self, capsys):
        code, out, _ = run_cli(capsys, "pfd", "--fn", "and", "--n", "3",
                               "--format", "json")
        payload = json.loads(out)
        assert payload["non_integer_angles"] == 7
        assert payload["all_odd_certificate"] is True

    def test_arity_cap(self, capsys):
        code, _, err = run_cli(capsys, "pfd", "--fn", "or", "--n", "7")
        assert code == 1 and "error" in err


class TestQsp:
    def test_reference_comparison(self, capsys):
        code, out, _ = run_cli(capsys, "qsp", "--p", "3", "--j", "0",
                               "--table2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["functionally_equivalent"] is True
        assert float(payload["worst_failure"]) < 1e-9

    def test_phase_report_identity(self, capsys):
        code, out, _ = run_cli(capsys, "qsp", "--p", "3", "--phi", "0",
                               "--format", "json")
        assert code == 0
        assert float(json.loads(out)["pr_output_0"]) == pytest.approx(1.0)

    def test_profile_synthesis(self, capsys):
        code, out, _ = run_cli(capsys, "qsp", "--profile", "0010",
                               "--format", "json")
        assert code == 0
        assert json.loads(out)["L"] == 13


class TestCompileSimulate:
    def test_mod3_pipe(self, capsys, tmp_path):
        path = tmp_path / "sched.json"
        code, out, _ = run_cli(capsys, "compile", "--protocol", "mod3",
                               "--n", "2", "--out", str(path))
        assert code == 0
        code, out, _ = run_cli(capsys, "simulate", "--schedule", str(path),
                               "--all", "--shots", "50", "--format", "json")
        assert code == 0

    def test_simulate_single_input(self, capsys, tmp_path):
        path = tmp_path / "sched.json"
        run_cli(capsys, "compile", "--protocol", "mod3", "--n", "2",
                "--out", str(path))
        code, out, _ = run_cli(capsys, "simulate", "--schedule", str(path),
                               "--x", "11", "--format", "json")
        assert code == 0
        assert json.loads(out)["y"] == 1  # weight 2 is not 0 mod 3

    def test_wrong_target_fails_verification(self, capsys, tmp_path):
        # the two-bit weight-mod-3 test rejects only the zero string, so AND
        # genuinely disagrees with it
        path = tmp_path / "sched.json"
        run_cli(capsys, "compile", "--protocol", "mod3", "--n", "2",
                "--out", str(path))
        code, _, _ = run_cli(capsys, "simulate", "--schedule", str(path),
                             "--all", "--shots", "20", "--fn", "and")
        assert code == 1

    def test_library_equivalence(self, capsys, tmp_path):
        # the CLI is a thin shell: emitted JSON equals the library's output
        path = tmp_path / "sched.json"
        run_cli(capsys, "compile", "--protocol", "mod3", "--n", "3",
                "--out", str(path))
        assert path.read_text() == mbqc.mod3_protocol(3).to_json() + "\n"


class TestTables:
    def test_table1_runs(self, capsys):
        code, out, _ = run_cli(capsys, "table1", "--n", "2", "--p", "3")
        assert code == 0
        assert "mod3-cluster" in out and "volume" in out

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["analyze", "--n", "3"])  # missing --fn
        assert exc.value.code == 2

    def test_unknown_command_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2
