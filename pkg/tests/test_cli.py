import csv
import io
import json
import math

import pytest

from weighted_mt.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants_flat(capsys):
    code, out, err = run(capsys, "constants", "--alpha", "0", "--beta", "0")
    assert code == 0
    d = json.loads(out)
    assert d["a_sharp"] == pytest.approx(2 * math.pi)
    assert d["a_sharp_printed"] == pytest.approx(4 * math.pi)
    assert json.loads(err.strip().splitlines()[-1])["command"] == "constants"


def test_constants_formats(capsys):
    code, out, _ = run(capsys, "constants", "--alpha", "1", "--beta", "0", "--format", "csv")
    rows = dict(csv.reader(io.StringIO(out)))
    assert float(rows["a_sharp"]) == pytest.approx(2.82843, abs=1e-5)
    code, out, _ = run(capsys, "constants", "--alpha", "1", "--beta", "0", "--format", "text")
    assert "a_sharp" in out and code == 0


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["constants", "--beta", "0"], "--alpha"),
        (["constants", "--alpha", "-2", "--beta", "0"], "alpha"),
        (["moser-sweep", "--alpha", "0", "--beta", "0", "--n-min", "5", "--n-max", "2"], "--n-min"),
        (["extremal", "--alpha", "0", "--beta", "0", "--h", "-1"], "grid"),
        (["feasibility", "--alpha-min", "3", "--alpha-max", "1"], "degenerate"),
        (["verify", "--which", "lemma7", "--alpha", "0", "--beta", "0"], "--which"),
        (["dichotomy", "--alpha", "0", "--beta", "0", "--seq", "moser", "--n", "9:3"], "--n"),
        (["nonsense"], "invalid choice"),
    ],
)
def test_usage_errors_exit_2(capsys, argv, flag):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert flag in err


def test_moser_sweep_slope(capsys):
    code, out, err = run(capsys, "moser-sweep", "--alpha", "0", "--beta", "0", "--a-factor", "1.1",
                         "--n-min", "10", "--n-max", "40", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["fitted_slope"] == pytest.approx(0.1, rel=0.05)
    code, out, _ = run(capsys, "moser-sweep", "--alpha", "0", "--beta", "0")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["n", "mt_integral", "eq214_lower_bound", "energy", "status"]
    assert all(float(r["energy"]) == pytest.approx(1.0, abs=1e-14) for r in rows)


def test_moser_sweep_marks_overflow(capsys):
    code, out, _ = run(capsys, "moser-sweep", "--alpha", "0", "--beta", "0", "--a-factor", "20", "--n-min", "30",
                       "--n-max", "40")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[-1]["status"] == "overflow"


def test_extremal_writes_profile_and_trace(capsys, tmp_path):
    code, out, err = run(capsys, "extremal", "--alpha", "0", "--beta", "0", "--out", str(tmp_path), "--trace",
                         "--starts", "phi0")
    assert code == 0
    d = json.loads(out)
    assert d["exceeds_ceiling"] and d["ceiling_margin"] >= 0.07
    assert "exceeds the concentration ceiling" in err
    names = {p.name for p in tmp_path.iterdir()}
    assert {"extremal.json", "extremal_profile.txt", "extremal_trace.csv", "manifest.json"} <= names


def test_extremal_small_energy(capsys):
    code, out, _ = run(capsys, "extremal", "--alpha", "0", "--beta", "0", "--kappa", "0.1")
    assert code == 0 and json.loads(out)["exceeds_ceiling"] is False


def test_dichotomy_sequences(capsys, tmp_path):
    code, out, _ = run(capsys, "dichotomy", "--alpha", "0", "--beta", "0", "--seq", "moser", "--n", "5:40")
    assert json.loads(out)["verdict"] == "concentrating"
    code, out, _ = run(capsys, "dichotomy", "--alpha", "0", "--beta", "0", "--seq", "constant")
    assert json.loads(out)["verdict"] == "convergent"
    prof = tmp_path / "p.txt"
    prof.write_text("# weighted_mt profile coords=halfline S=3.0 alpha=0.0 beta=0.0 sigma=None\n0.0 0.0\n3.0 0.5\n")
    code, out, _ = run(capsys, "dichotomy", "--alpha", "0", "--beta", "0", "--seq", "file", "--file", str(prof),
                       "--format", "csv")
    assert code == 0 and out.startswith("m,delta,tail_energy,J")


def test_energy_above_one_exits_2(capsys, tmp_path):
    prof = tmp_path / "big.txt"
    prof.write_text("# weighted_mt profile coords=ball R=1.0 alpha=0.0 beta=0.0 sigma=None\n0.0 40.0\n1.0 0.0\n")
    code, _, err = run(capsys, "dichotomy", "--alpha", "0", "--beta", "0", "--seq", "file", "--file", str(prof))
    assert code == 2 and "energy" in err


def test_numeric_failure_exit_3(capsys, monkeypatch):
    # energy-bounded inputs cannot overflow, so force one from inside the library
    import weighted_mt.cli as cli
    from weighted_mt.errors import ExponentOverflowError

    def boom(*a, **k):
        raise ExponentOverflowError(1e4, "test")

    monkeypatch.setattr(cli, "build_constants", boom)
    code, _, err = run(capsys, "constants", "--alpha", "0", "--beta", "0")
    assert code == 3 and "overflow guard" in err


def test_verify_pass_and_violation(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--which", "lemma42", "--n", "1000", "--seed", "7", "--alpha", "0",
                       "--beta", "0", "--format", "text")
    assert code == 0 and "1000/1000" in out
    code, out, _ = run(capsys, "verify", "--which", "scaling", "--alpha", "0", "--beta", "0")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", "--which", "corollary24", "--alpha", "0", "--beta", "1", "--out",
                       str(tmp_path))
    d = json.loads(out)
    assert code == 1 and not d["passed"]
    replay = d["violations"][0]["profile_file"]
    assert replay and (tmp_path / replay.split("/")[-1]).read_text().startswith("# weighted_mt profile")


def test_verify_expected_divergence(capsys):
    code, out, _ = run(capsys, "verify", "--which", "theorem11", "--a-factor", "1.2", "--alpha", "0", "--beta", "0")
    d = json.loads(out)
    assert code == 0 and d["summary"]["mode"] == "expected-failure" and d["summary"]["divergence_observed"]


def test_feasibility(capsys):
    code, out, err = run(capsys, "feasibility")
    assert code == 0 and "no feasible point" in err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 26 * 30 and all(r["feasible"] == "False" for r in rows)
    assert min(float(r["sigma"]) for r in rows) > 0
    code, out, _ = run(capsys, "feasibility", "--alpha", "1", "--sigma", "1", "--format", "json")
    d = json.loads(out)
    assert d["rows"][0]["feasible"] is False and "bound" in d["rows"][0] and "gamma_phi0" in d["rows"][0]


def test_estimate_c0(capsys):
    code, out, _ = run(capsys, "estimate-c0", "--alpha", "0", "--beta", "0")
    d = json.loads(out)
    assert code == 0 and d["argmax"] == "phi0"


def test_outputs_are_deterministic(capsys, tmp_path):
    for k in (1, 2):
        run(capsys, "verify", "--which", "lemma41", "--n", "30", "--seed", "3", "--alpha", "0", "--beta", "0",
            "--out", str(tmp_path / str(k)))
        run(capsys, "dichotomy", "--alpha", "0", "--beta", "0", "--seq", "moser", "--out", str(tmp_path / str(k)))
    for name in ("verify.json", "dichotomy.json", "dichotomy.csv"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()
    m1 = json.loads((tmp_path / "1" / "manifest.json").read_text())
    m2 = json.loads((tmp_path / "2" / "manifest.json").read_text())
    m1.pop("wall_time_s"), m2.pop("wall_time_s")
    m1.pop("outputs"), m2.pop("outputs")
    assert m1 == m2


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nalpha = 0\nbeta = 0\nseq = moser\nn = 5:8\n")
    code, out, _ = run(capsys, "--config", str(cfg), "dichotomy")
    assert code == 0 and json.loads(out)["verdict"] == "inconclusive"
    code, out, _ = run(capsys, "--config", str(cfg), "dichotomy", "--n", "5:40")
    assert json.loads(out)["verdict"] == "concentrating"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "--config", str(cfg), "dichotomy")
    assert code == 2 and "colour" in err


def test_env_output_dir_and_figures(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("WEIGHTED_MT_OUT", str(tmp_path))
    code, _, _ = run(capsys, "moser-sweep", "--alpha", "0", "--beta", "0", "--n-max", "10", "--figures")
    assert code == 0
    assert (tmp_path / "moser_sweep.csv").exists() and (tmp_path / "moser_sweep.png").exists()
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert str(tmp_path / "moser_sweep.png") in man["outputs"]


def test_figures_need_output_dir(capsys, monkeypatch):
    monkeypatch.delenv("WEIGHTED_MT_OUT", raising=False)
    code, _, err = run(capsys, "feasibility", "--alpha", "1", "--sigma", "1", "--figures")
    assert code == 2 and "--figures" in err
