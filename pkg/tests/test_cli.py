import json
import subprocess
import sys

import pytest

from fermat_pdde.cli import main
from fermat_pdde.errors import ProblemFileError
from fermat_pdde.problemfile import load_problem


def run_cli(*argv):
    return main(list(argv))


class TestVerifyCommand:
    def test_example4_passes(self, fixtures_dir, capsys):
        code = run_cli(
            "verify", str(fixtures_dir / "example4.json"),
            "--samples", "200", "--radius", "2", "--tol", "1e-8", "--seed", "42",
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "verdict: pass" in out

    def test_exit_codes_across_corpus(self, fixtures_dir):
        expected = {
            "example1.json": 0,
            "example2.json": 1,  # stored as inconsistent; must fail, not be hidden
            "example3.json": 0,
            "example4.json": 0,
            "example5.json": 0,
            "example6.json": 0,
            "example7.json": 0,
            "bad_poly.json": 1,
        }
        for name, code in expected.items():
            assert run_cli("verify", str(fixtures_dir / name)) == code, name

    def test_bad_poly_reports_large_residual(self, fixtures_dir, capsys):
        code = run_cli("verify", str(fixtures_dir / "bad_poly.json"))
        out = capsys.readouterr().out
        assert code == 1
        line = next(l for l in out.splitlines() if l.startswith("max_rel_residual"))
        assert float(line.split(":")[1]) > 0.1

    def test_missing_file(self, capsys):
        assert run_cli("verify", "no_such_file.json") == 2
        assert "error" in capsys.readouterr().err

    def test_malformed_json_reports_position(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 2, "kind": }')
        assert run_cli("verify", str(bad)) == 2
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_bad_expression_reports_field_and_position(self, tmp_path, capsys):
        bad = tmp_path / "bad_expr.json"
        bad.write_text(json.dumps({
            "n": 2, "kind": "fte", "m1": 2, "c": [[1, 0], [0, 0]],
            "f": "z1 + * z2", "phi": "1",
        }))
        assert run_cli("verify", str(bad)) == 2
        err = capsys.readouterr().err
        assert "'f'" in err and "position" in err

    def test_machine_format_after_subcommand(self, fixtures_dir, capsys):
        code = run_cli("verify", str(fixtures_dir / "example4.json"), "--format", "machine")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["report"]["verdict"] == "pass"

    def test_machine_format(self, fixtures_dir, capsys):
        code = run_cli("--format", "machine", "verify", str(fixtures_dir / "example4.json"))
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["report"]["verdict"] == "pass"
        assert doc["expected_status"] == "pass"

    def test_flags_override_file_policy(self, fixtures_dir, capsys):
        code = run_cli("--format", "machine", "verify", str(fixtures_dir / "example4.json"),
                       "--samples", "50", "--seed", "7")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["report"]["policy"]["samples"] == 50
        assert doc["report"]["policy"]["seed"] == 7


class TestConstructCommand:
    @pytest.mark.parametrize("theorem,c", [
        ("t1-i", "14,1,3,5"),
        ("t1-ii", "0,pi*i,pi*i"),
        ("t2-i", "2,3,2,4"),
        ("t2-ii", "pi*i,2*pi*i,-pi*i,2*pi*i"),
        ("cor1", "0.6,1.1,0.9"),
        ("cor2", "0.5,1.4,0.8"),
        ("equ1", "1,1"),
        ("equ2", "1,3"),
    ])
    def test_generated_parts_verify(self, theorem, c, capsys):
        code = run_cli("--format", "machine", "construct", "--theorem", theorem,
                       "--c", c, "--gen-seed", "11")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0, doc
        assert doc["report"]["verdict"] == "pass"

    def test_output_reparses_and_verifies(self, tmp_path, capsys):
        code = run_cli("--format", "machine", "construct", "--theorem", "t1-ii",
                       "--c", "0,pi*i,pi*i", "--g", "exp(z2+z3)", "--phi", "1")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        problem_file = tmp_path / "roundtrip.json"
        problem_file.write_text(json.dumps({
            "n": 3, "kind": "fte", "m1": 2,
            "c": [[0, 0], [0, 3.141592653589793], [0, 3.141592653589793]],
            "f": doc["f"],
            "phi": "1",
        }))
        assert run_cli("verify", str(problem_file)) == 0

    def test_explicit_example4_reproduced(self, capsys):
        code = run_cli("--format", "machine", "construct", "--theorem", "t1-ii",
                       "--c", "0,pi*i,pi*i", "--g", "exp(z2+z3)")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["report"]["max_rel_residual"] < 1e-10

    def test_tau_zero_rejected(self, capsys):
        code = run_cli("construct", "--theorem", "cor1", "--c", "1,1,-1", "--gen-seed", "3")
        assert code == 2
        assert "tau" in capsys.readouterr().err

    def test_dimension_mismatch(self, capsys):
        assert run_cli("construct", "--theorem", "t1-ii", "--c", "0,1", "--n", "3") == 2


class TestOrderCommand:
    def test_expression_target(self, capsys):
        code = run_cli("--format", "machine", "order", "exp(z1+z2)", "--n", "2")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert 0.85 <= doc["estimate"]["rho_hat"] <= 1.15

    def test_file_target(self, fixtures_dir, capsys):
        code = run_cli("--format", "machine", "order", str(fixtures_dir / "example1.json"))
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert 1.8 <= doc["estimate"]["rho_hat"] <= 2.2

    def test_expression_needs_n(self, capsys):
        assert run_cli("order", "z1^2") == 2

    def test_custom_radii(self, capsys):
        code = run_cli("--format", "machine", "order", "z1^3*z2", "--n", "2",
                       "--radii", "64,128,256,512,1024")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["estimate"]["rho_hat"] <= 0.2

    def test_estimation_failure_exits_one(self, capsys):
        # circles inside the wp pole guard: estimation must abort, not lie
        code = run_cli("order", "wp(z1)", "--n", "1", "--radii", "0.001,0.002")
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestFermatCommand:
    def test_cos_sin(self, capsys):
        code = run_cli("--format", "machine", "fermat", "--kind", "cos-sin",
                       "--h", "z1+z2^2", "--n", "2")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["m"] == 2
        assert doc["report"]["max_rel_residual"] < 1e-12

    def test_mobius(self, capsys):
        code = run_cli("--format", "machine", "fermat", "--kind", "mobius",
                       "--h", "z1*z2", "--n", "2")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["report"]["max_rel_residual"] < 1e-12

    def test_cubic(self, capsys):
        code = run_cli("--format", "machine", "fermat", "--kind", "cubic",
                       "--h", "z1", "--n", "1", "--samples", "150", "--radius", "1.2")
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["m"] == 3
        assert doc["report"]["max_rel_residual"] < 1e-7


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert run_cli("nonsense") == 2

    def test_no_arguments(self):
        assert run_cli() == 2

    def test_help_exits_zero(self):
        assert run_cli("--help") == 0

    def test_console_entry_point(self, fixtures_dir):
        proc = subprocess.run(
            [sys.executable, "-m", "fermat_pdde", "verify", str(fixtures_dir / "example4.json")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "verdict: pass" in proc.stdout


class TestProblemFileLoader:
    def test_loads_policy_and_status(self, fixtures_dir):
        lp = load_problem(fixtures_dir / "example2.json")
        assert lp.expected_status == "inconsistent"
        assert lp.policy.samples == 200
        assert lp.problem.kind == "fte"

    def test_bad_kind(self, tmp_path):
        f = tmp_path / "k.json"
        f.write_text(json.dumps({"n": 2, "kind": "weird", "m1": 2, "f": "z1"}))
        with pytest.raises(ProblemFileError):
            load_problem(f)

    def test_bad_complex_pair(self, tmp_path):
        f = tmp_path / "c.json"
        f.write_text(json.dumps({
            "n": 2, "kind": "fte", "m1": 2, "c": [[1, 0], [0]], "f": "z1", "phi": "1",
        }))
        with pytest.raises(ProblemFileError):
            load_problem(f)

    def test_unknown_policy_key(self, tmp_path):
        f = tmp_path / "p.json"
        f.write_text(json.dumps({
            "n": 2, "kind": "fte", "m1": 2, "c": [[1, 0], [0, 0]], "f": "z1", "phi": "1",
            "policy": {"points": 10},
        }))
        with pytest.raises(ProblemFileError):
            load_problem(f)

    def test_fg_operator_schema(self, tmp_path):
        f = tmp_path / "fg.json"
        f.write_text(json.dumps({
            "n": 2, "kind": "fg", "m1": 2, "m2": 1, "c": [[1, 0], [0, 0]],
            "f": "exp(z1)", "alpha": "1", "beta": "1+z2",
            "operator": [{"index": [1, 0], "coeff": "1"}, {"index": [0, 1], "coeff": "z1"}],
        }))
        lp = load_problem(f)
        assert lp.problem.operator is not None
        assert len(lp.problem.operator.coeffs) == 2

    def test_fg_exact_solution_verifies_end_to_end(self, tmp_path):
        f = tmp_path / "fg_exact.json"
        f.write_text(json.dumps({
            "n": 2, "kind": "fg", "m1": 1, "m2": 1, "c": [[1, 0], [0, 0]],
            "f": "z1^2", "alpha": "1", "beta": "4*z1+1",
            "operator": [{"index": [1, 0], "coeff": "1"}],
        }))
        assert run_cli("verify", str(f)) == 0

    def test_xc_sine_family_verifies_end_to_end(self, tmp_path):
        pi = 3.141592653589793
        f = tmp_path / "xc_sine.json"
        f.write_text(json.dumps({
            "n": 2, "kind": "xc", "m1": 2, "m2": 2, "c": [[pi, 0], [pi, 0]],
            "f": "sin(z1+z2)",
        }))
        assert run_cli("verify", str(f)) == 0
