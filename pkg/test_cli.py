import io
import json

import pytest

from conftest import FIX_C_INVALID, FIX_C_VALID, fixture_file
from main import EXIT_INPUT_ERROR, EXIT_PASS, EXIT_VIOLATIONS, format_report, run_command
from models import Report


def binds(values):
    argv = []
    for name, value in values.items():
        argv += ["--bind", f"{name}={value}"]
    return argv


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


class TestExitCodes:
    def test_check_algebra(self):
        code, out, _ = run("check-algebra", fixture_file("fix_a.3hl"))
        assert code == EXIT_PASS
        assert "PASS" in out

    def test_check_algebra_with_leibniz(self):
        code, out, _ = run("check-algebra", fixture_file("fix_b.3hl"), "--leibniz")
        assert code == EXIT_PASS
        assert out.count("PASS") == 2

    def test_failed_twist(self):
        code, _, err = run("twist", fixture_file("fix_a.genrep"))
        assert code == EXIT_VIOLATIONS
        assert "intertwine-rho" in err
        code, out, _ = run("twist", fixture_file("fix_a.genrep"), "--bind", "r2=0")
        assert code == EXIT_PASS
        assert "A = " in out

    def test_check_genrep(self):
        code, _, err = run("check-genrep", fixture_file("fix_c.genrep"))
        assert code == EXIT_INPUT_ERROR
        assert "--bind" in err
        assert run("check-genrep", fixture_file("fix_c.genrep"), *binds(FIX_C_VALID))[0] == EXIT_PASS
        code, out, _ = run("check-genrep", fixture_file("fix_c.genrep"), *binds(FIX_C_INVALID))
        assert code == EXIT_VIOLATIONS
        assert "FAIL" in out

    def test_nonzero_condition(self):
        assert run("check-genrep", fixture_file("fix_b.genrep"), "--bind", "a1=0")[0] == EXIT_INPUT_ERROR

    @pytest.mark.parametrize(
        "argv",
        [
            ["frobnicate", "x"],
            ["check-algebra"],
            ["cohomology", "file.genrep"],
            ["check-algebra", "missing.3hl"],
            ["check-algebra", "--bind", "x", "missing.3hl"],
        ],
    )
    def test_input_errors(self, argv):
        assert run(*argv)[0] == EXIT_INPUT_ERROR

    def test_non_utf8_file(self, tmp_path):
        path = tmp_path / "latin1.3hl"
        path.write_bytes(b"KIND algebra\n\xff\xfe\n")
        code, _, err = run("check-algebra", str(path))
        assert code == EXIT_INPUT_ERROR
        assert err.startswith("error:")

    def test_semidirect_needs_a_plain_representation(self):
        code, _, err = run("semidirect", fixture_file("fix_a.genrep"), "--bind", "r2=0")
        assert code == EXIT_INPUT_ERROR
        assert "nu" in err

    def test_gensemidirect(self):
        code, out, _ = run("gensemidirect", fixture_file("fix_c.genrep"), *binds(FIX_C_VALID))
        assert code == EXIT_PASS
        assert "[e2, e3, v1]" in out

    def test_check_extension(self):
        assert run("check-extension", fixture_file("fix_a.ext"))[0] == EXIT_PASS
        assert run("check-extension", fixture_file("fix_a.3hl"))[0] == EXIT_INPUT_ERROR


class TestCochainCommands:
    def test_d_apply(self):
        code, out, _ = run("d-apply", fixture_file("fix_abelian.cochain"))
        assert code == EXIT_PASS
        assert "cocycle:" in out

    def test_d_apply_ordinary_needs_algebra_labels(self):
        assert run("d-apply", fixture_file("fix_abelian.cochain"), "--flavor", "ordinary")[0] == EXIT_INPUT_ERROR

    def test_d_apply_incompatible_cochain(self, tmp_path):
        with open(fixture_file("fix_abelian.cochain"), encoding="utf-8") as handle:
            text = handle.read()
        path = tmp_path / "incompatible.cochain"
        path.write_text(text.replace("e1 v1 v2 : t, 0", "e1 v1 v2 : 0, t"), encoding="utf-8")
        code, _, err = run("d-apply", str(path))
        assert code == EXIT_VIOLATIONS
        assert "compatibility" in err

    def test_cohomology(self):
        code, out, _ = run("cohomology", fixture_file("fix_c.genrep"), "--degree", "2", "--json", *binds(FIX_C_VALID))
        assert code == EXIT_PASS
        document = json.loads(out)
        assert document["command"] == "cohomology"
        dims = document["dims"]
        assert dims["H"] == dims["Z"] - dims["B"] >= 0
        assert dims["degree"] == 2

    def test_unsupported_degree(self):
        code, _, err = run("cohomology", fixture_file("fix_c.genrep"), "--degree", "3", *binds(FIX_C_VALID))
        assert code == EXIT_INPUT_ERROR
        assert "degree" in err


class TestOutput:
    def test_json_document(self):
        code, out, _ = run("check-algebra", fixture_file("fix_a.3hl"), "--json")
        assert code == EXIT_PASS
        document = json.loads(out)
        assert document["status"] == "pass"
        assert document["dims"] == {"n": 3}
        assert document["bindings"] == {"lambda": "3"}
        assert document["findings"][0]["status"] == "pass"

    def test_json_on_precondition_failure(self):
        code, out, _ = run("twist", fixture_file("fix_a.genrep"), "--json")
        assert code == EXIT_VIOLATIONS
        document = json.loads(out)
        assert document["status"] == "fail"
        assert document["findings"][0]["violations"][0]["witness"] == ["e2", "e3", "v2"]

    def test_format_report_truncates(self):
        report = Report(subject="demo")
        for i in range(5):
            report.add("identity", [f"e{i + 1}"], ["1"], ["0"])
        text = format_report(report, limit=2)
        assert text.splitlines()[0] == "demo: FAIL (0 checks, 5 violations)"
        assert text.splitlines()[-1] == "  ... 3 more"

    def test_audit_paper(self):
        code, out, _ = run("audit-paper")
        assert code == EXIT_PASS
        assert "19 claims:" in out
        code, out, _ = run("audit-paper", "--json")
        document = json.loads(out)
        assert document["dims"]["claims"] == 19
        assert all(finding["matches_expectation"] for finding in document["findings"])
