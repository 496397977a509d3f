import csv
import io
import json

import pytest

from qcalc import __version__
from qcalc.cli import main
from qcalc.report import GridError, GridSpec


def run(capsys, *argv):
    """Exit code, stdout and stderr; argparse rejections surface as SystemExit."""
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    lines = [line for line in text.splitlines() if not line.startswith(("pass=", "#"))]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class TestEval:
    def test_gamma(self, capsys):
        code, out, _ = run(capsys, "eval", "gamma_q", "--t", "3", "--q", "0.5")
        assert code == 0 and float(out.splitlines()[0]) == pytest.approx(1.5)

    def test_k_integer(self, capsys):
        code, out, _ = run(capsys, "eval", "K", "--x", "0.7", "--t", "3", "--q", "0.5")
        assert code == 0 and float(out.splitlines()[0]) == pytest.approx(0.125)

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "eval", "gamma_q", "--t", "-1")
        assert code == 2 and "DomainError" in err

    def test_pole(self, capsys):
        code, _, err = run(capsys, "eval", "e_q", "--x", "2", "--q", "0.5")
        assert code == 2 and "PoleError" in err

    def test_exact_json(self, capsys):
        code, out, _ = run(capsys, "eval", "poch", "--a", "1/3", "--n", "3", "--q", "1/2", "--mode", "exact",
                           "--json")
        doc = json.loads(out)
        assert code == 0 and doc["value"] == "91/54" and doc["context"]["mode"] == "exact"

    def test_exact_jackson_polynomial(self, capsys):
        code, out, _ = run(capsys, "eval", "jackson", "--f", "x**2", "--a", "1", "--q", "1/2", "--mode", "exact")
        assert code == 0 and out.splitlines()[0] == "4/7"

    @pytest.mark.parametrize("extra, expected", [(["--n", "3"], 91 / 54), (["--b", "1", "--n", "2"], 10 / 9),
                                                 (["--t", "0.5"], None), ([], None)])
    def test_poch_forms(self, capsys, extra, expected):
        code, out, _ = run(capsys, "eval", "poch", "--a", "1/3", "--q", "0.5", *extra)
        assert code == 0
        if expected is not None:
            assert float(out.splitlines()[0]) == pytest.approx(expected)

    def test_poch_bad_combination(self, capsys):
        assert run(capsys, "eval", "poch", "--a", "1", "--n", "2", "--t", "0.5")[0] == 2

    def test_unknown_function(self, capsys):
        code, _, _ = run(capsys, "eval", "zeta", "--t", "2")
        assert code == 2

    @pytest.mark.parametrize("fn, extra", [("beta_q", ["--t", "0.6", "--s", "1.3"]),
                                           ("little_gamma", ["--t", "0.7", "--A", "2"]),
                                           ("little_beta", ["--t", "0.6", "--s", "1.3", "--A", "0.8"]),
                                           ("E_q", ["--x", "-1.5"]),
                                           ("improper", ["--f", "1/(1+x)**3", "--A", "1"])])
    def test_registry(self, capsys, fn, extra):
        code, out, _ = run(capsys, "eval", fn, "--q", "0.4", *extra)
        assert code == 0 and float(out.splitlines()[0])


class TestVerify:
    def test_exact_jacobi(self, capsys):
        code, _, err = run(capsys, "verify", "jacobi", "--x", "2/3", "--cap", "40", "--backend", "exact")
        assert code == 0 and "pass=1 fail=0 skip=0" in err

    def test_beta_grid(self, capsys, tmp_path):
        target = tmp_path / "beta.json"
        code, _, _ = run(capsys, "verify", "beta-reps", "--grid", "q=0.1,0.5,0.9; t=0.3,1,2; s=0.5,1.7",
                         "--out", str(target))
        doc = json.loads(target.read_text(encoding="utf-8"))
        assert code == 0 and doc["schema"] == 1 and doc["version"] == __version__
        assert doc["summary"] == {"pass": 18, "fail": 0, "skip": 0}
        assert len(doc["rows"]) == 18

    def test_pole_is_skip(self, capsys):
        code, out, _ = run(capsys, "verify", "ramanujan", "--a", "0.7", "--b", "0.7", "--x", "0.3")
        assert code == 0
        (row,) = table(out)
        assert row["status"] == "skip" and "PoleError" in row["reason"]

    def test_failure_exit(self, capsys):
        code, out, err = run(capsys, "verify", "ramanujan", "--q", "0.9", "--a", "2", "--b", "1.9", "--x", "0.9")
        assert code == 1 and "fail=1" in err
        assert "terms failed to decay" in table(out)[0]["warnings"]

    def test_summary_matches_rows(self, capsys, tmp_path):
        target = tmp_path / "mixed.csv"
        code, _, _ = run(capsys, "verify", "ramanujan", "--grid", "q=0.5; a=0.7,2; b=0.7; x=0.5",
                         "--out", str(target))
        rows = list(csv.DictReader(target.open(newline="", encoding="utf-8")))
        assert code == 0 and [r["status"] for r in rows] == ["skip", "pass"]

    def test_csv_quoting(self, capsys, tmp_path):
        target = tmp_path / "quoted.csv"
        run(capsys, "verify", "ramanujan", "--a", "0.7", "--b", "0.7", "--x", "0.3", "--out", str(target))
        raw = target.read_bytes()
        assert b"\r\n" in raw
        (row,) = csv.DictReader(io.StringIO(raw.decode("utf-8"), newline=""))
        assert row["reason"].startswith("PoleError")

    @pytest.mark.parametrize("argv", [["verify", "nosuch"], ["verify", "jacobi", "--grid", "q=0.5; x=1:2"],
                                      ["verify", "jacobi", "--x", "1", "--backend", "symbolic"]])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_exact_output_is_deterministic(self, capsys, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            run(capsys, "verify", "symmetric", "--a", "3", "--b", "1/3*q", "--c", "1/2*q^2", "--backend", "exact",
                "--out", str(path))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_translation_keywords(self, capsys):
        code, out, err = run(capsys, "verify", "translation", "--alpha", "0.5", "--beta", "2.2", "--A", "2")
        assert code == 0 and "pass=1" in err and table(out)[0]["alpha"] == "0.5"


class TestSweep:
    def test_k_not_constant(self, capsys):
        code, out, _ = run(capsys, "sweep", "K", "--grid", "q=0.5; x=0.1:10:7:log; t=0.5")
        values = [float(r["value"]) for r in table(out)]
        assert code == 0 and len(values) == 7
        assert max(values) - min(values) > 1e-12

    def test_k_not_constant_small_q(self, capsys):
        code, out, _ = run(capsys, "sweep", "K", "--grid", "q=0.1; x=0.1:10:7:log; t=0.5")
        values = [float(r["value"]) for r in table(out)]
        assert max(values) - min(values) > 1e-3

    def test_little_beta_correction(self, capsys):
        code, out, _ = run(capsys, "sweep", "little_beta", "--grid", "q=0.1; A=0.5,1,2; t=0.6; s=1.3")
        rows = table(out)
        raw = [float(r["value"]) for r in rows]
        corrected = [float(r["K_corrected"]) for r in rows]
        assert code == 0
        assert max(raw) - min(raw) > 1e-6
        assert max(corrected) - min(corrected) < 1e-9

    def test_empty_grid(self, capsys, tmp_path):
        target = tmp_path / "empty.csv"
        code, _, _ = run(capsys, "sweep", "K", "--grid", "", "--out", str(target))
        assert code == 0 and table(target.read_text(encoding="utf-8")) == []

    def test_parallel_order(self, capsys):
        grid = ["--grid", "q=0.2,0.7; x=0.3,1.1,2.9; t=0.4,1.6"]
        _, serial, _ = run(capsys, "sweep", "K", *grid)
        _, parallel, _ = run(capsys, "sweep", "K", *grid, "--jobs", "3")
        assert serial == parallel

    def test_domain_rows_skipped(self, capsys):
        code, out, _ = run(capsys, "sweep", "gamma_q", "--grid", "q=0.5; t=-1,2")
        assert code == 0 and [r["status"] for r in table(out)] == ["skip", "pass"]


class TestGridSpec:
    def test_cartesian(self):
        points = GridSpec.parse("q=0.1,0.5; t=1:3:3").points()
        assert len(points) == 6
        assert [p["q"] for p in points[:3]] == ["0.1"] * 3
        assert [float(p["t"]) for p in points[:3]] == [1.0, 2.0, 3.0]

    def test_log_range(self):
        values = [float(p["x"]) for p in GridSpec.parse("x=0.1:10:3:log").points()]
        assert values == pytest.approx([0.1, 1.0, 10.0])

    @pytest.mark.parametrize("text", ["q", "=0.5", "t=1:2", "t=1:2:-1", "t=1:2:3:cubic", "q=1; q=2"])
    def test_malformed(self, text):
        with pytest.raises(GridError):
            GridSpec.parse(text)

    @pytest.mark.parametrize("text", ["", "q=", "q=0.5; t=1:2:0"])
    def test_empty(self, text):
        assert GridSpec.parse(text).points() == []
