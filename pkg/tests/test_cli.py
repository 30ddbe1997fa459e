import json
import subprocess
import sys

import pytest

from reflcheck.cli import main, parse_ids, UsageError
from reflcheck.ncrewrite import tilde_system
from reflcheck.suites import CaseResult, SuiteConfig, SuiteReport, emit_report, parse_report, run_suite


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def strip_times(report: dict) -> dict:
    return {**report, "cases": [{k: v for k, v in c.items() if k != "time_ms"} for c in report["cases"]]}


class TestExitCodes:
    def test_pass(self, capsys):
        code, out = run(["run", "pbw"], capsys)
        assert code == 0 and json.loads(out.out)["passed"]

    def test_unknown_suite(self, capsys):
        code, _ = run(["run", "nonsense"], capsys)
        assert code == 2

    def test_bad_config(self, capsys):
        assert run(["run", "pbw", "--jobs", "0"], capsys)[0] == 2
        assert run(["run", "relations45", "--ids", "0..3"], capsys)[0] == 2
        assert run(["run", "relations45", "--digits", "2"], capsys)[0] == 2

    def test_broken_rules(self, capsys, tmp_path):
        data = tilde_system().to_json()
        rule = next(r for r in data["rules"] if r["lhs"] == ["C0~", "B0~"])
        rule["rhs"] = [t for t in rule["rhs"] if t["word"] != ["A1~", "A0~"]]
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(data))
        code, out = run(["run", "diamond", "--rules", str(path)], capsys)
        assert code == 1
        assert not json.loads(out.out)["passed"]

    def test_pristine_rules_file(self, capsys, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(tilde_system().dumps())
        assert run(["run", "diamond", "--rules", str(path)], capsys)[0] == 0

    def test_missing_rules_file(self, capsys, tmp_path):
        assert run(["run", "diamond", "--rules", str(tmp_path / "none.json")], capsys)[0] == 2

    def test_eval_non_terminating(self, capsys):
        code, out = run(["eval", "3f2", "--params", "1/2,1,1,3,4"], capsys)
        assert code == 1 and "InvalidParameters" in out.out

    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "reflcheck.cli", "run", "nonsense"], capture_output=True, text=True)
        assert proc.returncode == 2


class TestDeterminism:
    def test_single_case(self, capsys):
        argv = ["run", "relations45", "--ids", "1", "--samples", "1", "--approx-samples", "0", "--seed", "7"]
        first = json.loads(run(argv, capsys)[1].out)
        second = json.loads(run(argv, capsys)[1].out)
        assert len(first["cases"]) == 1 and first["seed"] == 7
        assert strip_times(first) == strip_times(second)

    def test_seed_changes_samples(self, capsys):
        base = ["run", "relations45", "--ids", "3", "--samples", "2", "--approx-samples", "0"]
        a = json.loads(run(base + ["--seed", "1"], capsys)[1].out)
        b = json.loads(run(base + ["--seed", "2"], capsys)[1].out)
        assert [c["params"] for c in a["cases"]] != [c["params"] for c in b["cases"]]

    def test_jobs_do_not_change_report(self):
        cfg1 = SuiteConfig(seed=3, samples=2, approx_samples=0, ids=(4, 5))
        cfg2 = SuiteConfig(seed=3, samples=2, approx_samples=0, ids=(4, 5), jobs=2)
        r1, r2 = run_suite("relations45", cfg1), run_suite("relations45", cfg2)
        assert strip_times(r1.to_json()) == strip_times(r2.to_json())


class TestReports:
    def test_roundtrip(self):
        r = run_suite("pbw")
        back = parse_report(emit_report(r))
        assert back == r

    def test_empty(self):
        r = SuiteReport("empty")
        data = json.loads(emit_report(r))
        assert data["cases"] == [] and data["passed"] is True
        assert parse_report(emit_report(r)) == r

    def test_rationals_as_strings(self, capsys):
        code, out = run(["run", "qdet", "--triples", "1"], capsys)
        data = json.loads(out.out)
        spot = next(c for c in data["cases"] if "spot" in c["case_id"])
        assert spot["params"]["Q2"] == "11/16" and spot["params"]["delta"] == "3/16"

    def test_no_floats_in_exact_reports(self, capsys):
        _, out = run(["run", "relations45", "--ids", "1..3", "--samples", "3", "--approx-samples", "0"], capsys)

        def walk(node):
            if isinstance(node, dict):
                for v in node.values():
                    walk(v)
            elif isinstance(node, list):
                for v in node:
                    walk(v)
            else:
                assert not isinstance(node, float)

        walk(json.loads(out.out))

    def test_text_format(self, capsys):
        code, out = run(["run", "pbw", "--format", "text"], capsys)
        assert code == 0 and out.out.strip().endswith("7/7 passed")

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        run(["run", "pbw", "--format", "text", "--output", str(path)], capsys)
        assert parse_report(path.read_text()).suite == "pbw"

    def test_failure_text(self):
        r = SuiteReport("x", [CaseResult("c", {}, False, "1/2", 0)])
        assert "FAIL c" in emit_report(r, "text") and "residual=1/2" in emit_report(r, "text")


class TestCommands:
    def test_eval_exact(self, capsys):
        code, out = run(["eval", "3f2", "--params", "-2,1,1,2,2"], capsys)
        assert code == 0 and json.loads(out.out)["cases"][0]["residual_sample"] == "11/18"

    def test_eval_approx(self, capsys):
        code, out = run(["eval", "3f2", "--params", "1/3,-1/2,1,17/2,20", "--mode", "approx", "--digits", "30"], capsys)
        assert code == 0 and "+-" in json.loads(out.out)["cases"][0]["residual_sample"]

    def test_eval_bad_arity(self, capsys):
        assert run(["eval", "3f2", "--params", "1,2"], capsys)[0] == 2

    def test_verify_ladder(self, capsys):
        argv = ["verify", "ladder", "--which", "down-minus", "--a", "1", "--d", "2", "--e", "3", "--u", "3", "--x", "2"]
        code, out = run(argv, capsys)
        assert code == 0 and json.loads(out.out)["cases"][0]["residual_sample"] == "0"

    def test_verify_ladder_numeric_alias(self, capsys):
        argv = ["verify", "ladder", "--which", "3", "--a", "1", "--d", "2", "--e", "3", "--u", "3", "--x", "0"]
        assert run(argv, capsys)[0] == 0

    def test_verify_ladder_off_family(self, capsys):
        argv = ["verify", "ladder", "--which", "1", "--a", "1", "--d", "2", "--e", "3", "--u", "5/2", "--x", "0"]
        assert run(argv, capsys)[0] == 2

    def test_verify_hahn(self, capsys):
        for check in ("difference-eq", "ladder", "orthogonality"):
            argv = ["verify", "hahn", "--n", "2", "--alpha", "1", "--beta", "2", "--N", "5", "--check", check]
            assert run(argv, capsys)[0] == 0

    def test_verify_hahn_invalid(self, capsys):
        assert run(["verify", "hahn", "--n", "7", "--alpha", "1", "--beta", "2", "--N", "5"], capsys)[0] == 2

    def test_verify_relations(self, capsys):
        code, out = run(["verify", "relations", "--ids", "41..43", "--samples", "2"], capsys)
        assert code == 0 and len(json.loads(out.out)["cases"]) == 6

    def test_relation_table(self, capsys):
        code, out = run(["relation-table"], capsys)
        cases = json.loads(out.out)["cases"]
        assert code == 0 and len(cases) == 45 and cases[0]["params"]["id"] == 1


class TestParseIds:
    @pytest.mark.parametrize("text,ids", [("1..3", (1, 2, 3)), ("5", (5,)), ("1,4-6,10..11", (1, 4, 5, 6, 10, 11)), ("2,2", (2,))])
    def test_forms(self, text, ids):
        assert parse_ids(text) == ids

    @pytest.mark.parametrize("text", ["", "a..b", "0", "46", "1..50"])
    def test_rejected(self, text):
        with pytest.raises(UsageError):
            parse_ids(text)
