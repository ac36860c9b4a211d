import json

import pytest

from pk_levy.cli import EXIT_CONFIG, EXIT_MODEL, EXIT_NUMERIC, EXIT_OK, main, parse_grid
from pk_levy import ConfigError

MODELS = {
    "mixed": {
        "drift_c": 2,
        "sigma2": 1,
        "jumps": {"family": "compound_poisson", "params": {"rate": 1, "jump_dist": {"kind": "exponential", "theta": 1}}},
    },
    "bm": {"drift_c": 1, "sigma2": 2},
    "mm1": {
        "drift_c": 1,
        "jumps": {"family": "compound_poisson", "params": {"rate": 0.5, "jump_dist": {"kind": "exponential", "theta": 1}}},
    },
    "stable": {"mu": 1, "jumps": {"family": "stable_small_jumps", "params": {"scale": 1, "index": 1.5}}},
}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, data in MODELS.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(data))
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestInspect:
    def test_mixed(self, files, capsys):
        code, out, _ = run(capsys, "inspect", files["mixed"])
        assert code == EXIT_OK
        lines = dict(line.split("=", 1) for line in out.splitlines())
        assert lines["rho"] == "0.5"
        assert lines["lambda"] == "4.0"
        assert lines["mu"] == "1.0"
        assert lines["decomposable"] == "true"

    def test_stable_flags(self, files, capsys):
        _, out, _ = run(capsys, "inspect", files["stable"])
        assert "truncation_required=true" in out
        assert "rho=undefined" in out

    def test_stable_truncated(self, files, capsys):
        _, out, _ = run(capsys, "inspect", files["stable"], "--epsilon", "1")
        assert "decomposable=true" in out
        assert "epsilon=1.0" in out


class TestLst:
    def test_brownian_row(self, files, capsys):
        code, out, _ = run(capsys, "lst", files["bm"], "--alpha", "1")
        assert code == EXIT_OK
        assert out.splitlines() == ["alpha,pk_lst", "1.0,0.5"]

    def test_grid_file(self, files, tmp_path, capsys):
        p = tmp_path / "l.csv"
        assert run(capsys, "lst", files["mm1"], "--alpha", "lin:0:2:3", "-o", p)[0] == EXIT_OK
        rows = p.read_text().splitlines()
        assert rows[0] == "alpha,pk_lst"
        assert rows[1] == "0.0,1.0"
        assert len(rows) == 4


class TestSample:
    def test_stable_refused(self, files, tmp_path, capsys):
        code, _, err = run(capsys, "sample", files["stable"], "-n", 10, "--seed", 1, "-o", tmp_path / "s.csv")
        assert code == EXIT_MODEL
        assert "NotDecomposable" in err
        assert "--epsilon" in err

    def test_stable_with_epsilon(self, files, tmp_path, capsys):
        p = tmp_path / "s.csv"
        code, _, _ = run(capsys, "sample", files["stable"], "-n", 10, "--seed", 1, "--epsilon", 0.1, "-o", p)
        assert code == EXIT_OK
        assert json.loads(p.with_suffix(".meta").read_text())["epsilon"] == 0.1

    def test_deterministic_bytes(self, files, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert run(capsys, "sample", files["mixed"], "-n", 5000, "--seed", 3, "-o", p)[0] == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        assert a.with_suffix(".meta").read_bytes() == b.with_suffix(".meta").read_bytes()
        assert len(a.read_text().splitlines()) == 5001


class TestSimulate:
    def test_deterministic_bytes(self, files, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            code, _, _ = run(capsys, "simulate", files["mixed"], "--T", 2, "--h", 0.01, "--paths", 500, "--seed", 4, "-o", p)
            assert code == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        meta = json.loads(a.with_suffix(".meta").read_text())
        assert meta["scheme"] == "bridge"

    def test_stable_without_epsilon(self, files, tmp_path, capsys):
        code, _, _ = run(capsys, "simulate", files["stable"], "--T", 1, "--h", 0.1, "--paths", 5, "--seed", 0, "-o", tmp_path / "x.csv")
        assert code == EXIT_MODEL


class TestInvert:
    def test_mm1(self, files, capsys):
        code, out, _ = run(capsys, "invert", files["mm1"], "--x", "2")
        assert code == EXIT_OK
        header, row = out.splitlines()
        assert header == "x,cdf"
        assert float(row.split(",")[1]) == pytest.approx(0.8160602794142788, abs=1e-8)

    def test_unreachable_target(self, files, capsys):
        code, _, err = run(capsys, "invert", files["mixed"], "--x", "1", "--series-terms", 1, "--euler-terms", 1, "--target", 1e-14)
        assert code == EXIT_NUMERIC
        assert "InversionUnstable" in err


class TestConverse:
    def test_writes_model(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"p": 0.3, "lambda": 2.0, "density": {"family": "uniform", "params": {"upper": 2.0}}}))
        out = tmp_path / "m.json"
        assert run(capsys, "converse", spec, "-o", out)[0] == EXIT_OK
        code, text, _ = run(capsys, "inspect", out)
        assert code == EXIT_OK
        assert "rho=0.7" in text and "lambda=2.0" in text


class TestErrors:
    def test_missing_required(self, files, capsys):
        code, _, err = run(capsys, "sample", files["mixed"], "-n", 10)
        assert code == EXIT_CONFIG
        assert "required" in err

    def test_no_subcommand(self, capsys):
        assert run(capsys)[0] == EXIT_CONFIG

    def test_bad_schema(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"drift_c": 1, "jumps": {"family": "stable", "params": {}}}))
        assert run(capsys, "inspect", p)[0] == EXIT_CONFIG

    def test_unstable_model(self, tmp_path, capsys):
        p = tmp_path / "u.json"
        data = dict(MODELS["mm1"], drift_c=0.25)
        p.write_text(json.dumps(data))
        code, _, err = run(capsys, "inspect", p)
        assert code == EXIT_MODEL
        assert "UnstableModel" in err

    def test_nonpositive_epsilon(self, files, capsys):
        assert run(capsys, "inspect", files["stable"], "--epsilon", "0")[0] == EXIT_CONFIG

    def test_bad_grid(self):
        with pytest.raises(ConfigError):
            parse_grid("lin:0:1")


class TestValidate:
    def test_mixed_passes(self, files, capsys):
        code, out, _ = run(capsys, "validate", files["mixed"], "-n", 200_000, "--paths", 20_000, "--h", 0.01)
        assert code == EXIT_OK, out
        assert "FAIL" not in out

    def test_stable_truncation_fails(self, files, capsys):
        code, out, _ = run(capsys, "validate", files["stable"], "-n", 20_000, "--no-paths")
        assert code == EXIT_NUMERIC
        fails = [line for line in out.splitlines() if "FAIL" in line]
        assert len(fails) == 1 and "truncation" in fails[0]
