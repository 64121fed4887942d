import json
import subprocess
import sys

import pytest

from normwalk import restricted
from normwalk.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.fixture
def seqfile(tmp_path):
    def make(text, name="seqs.txt"):
        path = tmp_path / name
        path.write_bytes(text.encode())
        return str(path)
    return make


class TestMeasure:
    def test_normality(self, capsys, seqfile):
        code, out, _ = run(capsys, "measure", "-i", seqfile("1111\n"))
        assert code == 0
        (rec,) = records(out)
        assert rec["value_float"] == 2.25 and rec["N"] == 4
        assert rec["witness"] == {"k": 2, "pattern": "++", "code": 3, "M": 3}

    def test_restricted(self, capsys, seqfile):
        code, out, _ = run(capsys, "measure", "-i", seqfile("1111\n"), "--measure", "restricted", "--d", "2")
        assert code == 0
        assert records(out)[0]["value_float"] == 2.0

    @pytest.mark.parametrize("measure, extra, value", [("welldist", [], 4.0), ("correlation", ["--k", "2"], 3.0)])
    def test_other_measures(self, capsys, seqfile, measure, extra, value):
        code, out, _ = run(capsys, "measure", "-i", seqfile("++++\n"), "--format", "plus-minus", "--measure", measure, *extra)
        assert code == 0 and records(out)[0]["value_float"] == value

    def test_several_lines_crlf(self, capsys, seqfile):
        code, out, _ = run(capsys, "measure", "-i", seqfile("10\r\n\r\n1111\r\n"))
        assert code == 0
        assert [r["N"] for r in records(out)] == [2, 4]

    def test_malformed_line(self, capsys, seqfile):
        code, _, err = run(capsys, "measure", "-i", seqfile("1111\n1x1\n"))
        assert code == 2
        assert "line 2" in err

    def test_unaligned_needs_truncate(self, capsys, seqfile):
        path = seqfile("11110\n")
        assert run(capsys, "measure", "-i", path, "--measure", "restricted", "--d", "2")[0] == 3
        code, out, _ = run(capsys, "measure", "-i", path, "--measure", "restricted", "--d", "2", "--truncate")
        assert code == 0 and records(out)[0]["N"] == 4

    def test_missing_input(self, capsys, tmp_path):
        assert run(capsys, "measure", "-i", str(tmp_path / "nope.txt"))[0] == 4

    def test_output_file(self, capsys, seqfile, tmp_path):
        out_path = tmp_path / "out.jsonl"
        assert run(capsys, "measure", "-i", seqfile("1111\n"), "-o", str(out_path))[0] == 0
        assert records(out_path.read_text())[0]["value_num"] == 9


class TestSample:
    def test_deterministic_csv(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, out, _ = run(capsys, "sample", "--N", "256", "--samples", "10", "--seed", "4", "-o", str(path))
            assert code == 0
        assert a.read_text() == b.read_text()
        assert set(records(out)[0]["quantiles"]) == {"1%", "25%", "50%", "75%", "99%"}

    def test_threads_do_not_change_output(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "sample", "--N", "128", "--samples", "12", "--threads", "1", "-o", str(a))
        run(capsys, "sample", "--N", "128", "--samples", "12", "--threads", "4", "-o", str(b))
        assert a.read_text() == b.read_text()

    def test_env_seed_overrides(self, capsys, monkeypatch):
        monkeypatch.setenv("NORMWALK_SEED", "17")
        code, out, _ = run(capsys, "sample", "--N", "64", "--samples", "5", "--seed", "3")
        assert code == 0 and records(out)[0]["seed"] == 17
        monkeypatch.setenv("NORMWALK_SEED", "x")
        assert run(capsys, "sample", "--N", "64", "--samples", "5")[0] == 3

    def test_bad_kind_argument(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["sample", "--N", "64", "--kind", "bogus"])
        assert info.value.code == 2

    def test_unwritable_output(self, capsys, tmp_path):
        path = tmp_path / "missing" / "x.csv"
        assert run(capsys, "sample", "--N", "64", "--samples", "3", "-o", str(path))[0] == 4


class TestExitprob:
    def test_gaussian_t_zero(self, capsys):
        code, out, _ = run(capsys, "exitprob", "--method", "gaussian", "--d", "2", "--t", "0", "--steps", "128", "--samples", "200")
        assert code == 0 and records(out)[0]["estimate"] == 1.0

    def test_lattice(self, capsys):
        code, out, _ = run(capsys, "exitprob", "--method", "lattice", "--d", "2", "--t", "1", "--N", "512", "--samples", "50")
        rec = records(out)[0]
        assert code == 0 and rec["method"] == "lattice" and 0 <= rec["estimate"] <= 1

    def test_bad_d(self, capsys):
        assert run(capsys, "exitprob", "--d", "40", "--t", "1", "--samples", "200")[0] == 3


class TestVerify:
    def test_passes(self, capsys):
        code, out, err = run(capsys, "verify", "--scale", "0.05")
        assert code == 0
        summary = records(out)[0]
        assert summary["passed"] and len(summary["suites"]) == 7
        assert "FAIL" not in err

    def test_mutation_is_caught(self, capsys, monkeypatch):
        monkeypatch.setattr(restricted, "_inside_limit", lambda d, k: d - k + 1)
        code, out, err = run(capsys, "verify", "--scale", "0.1", "--suite", "event-equality", "--seed", "5")
        assert code == 1
        (suite,) = records(out)[0]["suites"]
        assert suite["failures"] > 0 and suite["seed"] == 5 and suite["first_failure"]
        assert "FAIL event-equality" in err

    def test_unknown_suite(self, capsys):
        with pytest.raises(ValueError):
            main(["verify", "--suite", "nope"])


class TestCompare:
    def test_same_seed_zero(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "sample", "--N", "128", "--samples", "20", "-o", str(a))
        run(capsys, "sample", "--N", "128", "--samples", "20", "-o", str(b))
        code, out, _ = run(capsys, "compare", str(a), str(b))
        rec = records(out)[0]
        assert code == 0 and rec["ks"] == 0 and not rec["reject"]

    def test_malformed(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("value\nabc\n")
        assert run(capsys, "compare", str(bad), str(bad))[0] == 2

    def test_missing(self, capsys, tmp_path):
        assert run(capsys, "compare", str(tmp_path / "a"), str(tmp_path / "b"))[0] == 4


class TestMinsearch:
    def test_range(self, capsys):
        code, out, _ = run(capsys, "minsearch", "--N", "2", "--n-max", "4")
        assert code == 0
        assert [(r["N"], r["value_float"]) for r in records(out)] == [(2, 0.5), (3, 0.5), (4, 0.75)]

    def test_out_of_range(self, capsys):
        assert run(capsys, "minsearch", "--N", "30")[0] == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "normwalk", "measure"], input="1111\n", capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value_float"] == 2.25
