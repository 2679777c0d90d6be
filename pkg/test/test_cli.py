import pytest, json, os
import numpy as np, pandas as pd
from qspa_experiments import cli
from qspa_experiments.cli import main, parse_qubit
from qspa_experiments.io import RunConfig, DensityMatrixFile, resolve_config, load_config, \
    write_density_matrix, read_density_matrix
from qspa_experiments.util.qlin import projector, fidelity
from qspa_experiments.protocol import apply_chc
from qspa_experiments.nmr import dumps_sequence, qspa_pulse_sequence, hadamard_block, SpinSystem


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def read_json(path):
    with open(path) as fp:
        return json.load(fp)


def test_chc_forced_outcome(tmp_path, capsys):
    assert run(tmp_path, "chc", "--in1", "+z", "--in2", "-z", "--outcome", "0") == 0
    assert "condensed -z" in capsys.readouterr().out

    cond = read_json(tmp_path / "chc_condensation.json")
    assert cond["outcome"] == 0
    assert cond["probability"] == pytest.approx(0.5)
    assert cond["condensed_label"] == "-z"

    rho = read_density_matrix(tmp_path / "chc_joint.json").density_matrix()
    assert fidelity(rho, projector(apply_chc("+z", "-z"))) == pytest.approx(1)
    assert os.path.exists(tmp_path / "chc_joint_figure.json")


@pytest.mark.parametrize("in1, in2, outcome, expect", [
    ("-x", "+z", "1", "-x"),
    ("+x", "+z", "0", "-x"),
    ("0.6,0.8", "1,0", "0", None),
])
def test_chc_labels_and_amplitudes(tmp_path, in1, in2, outcome, expect):
    assert run(tmp_path, "chc", "--in1", in1, "--in2", in2, "--outcome", outcome) == 0
    assert read_json(tmp_path / "chc_condensation.json")["condensed_label"] == expect


@pytest.mark.parametrize("argv", [
    ["chc", "--in1", "0.999,0.1"],
    ["chc", "--in1", "+y"],
    ["chc", "--outcome", "2"],
    ["nmr-run", "--in2", "0.6,0.8j"],
    ["leakage", "--max-rounds", "9"],
    ["leakage", "--knows", "everything"],
    ["tomo", "--source", "does-not-exist.json"],
    ["tomo", "--noise", "-0.1"],
    ["frobnicate"],
    [],
])
def test_invalid_input_exits_1(tmp_path, argv):
    assert run(tmp_path, *argv) == 1


@pytest.mark.parametrize("argv", [
    ["chc", "--in1", "+x", "--in2", "-x", "--seed", "7"],
    ["truth-table"],
    ["nmr-run", "--in1", "0.8660254,0.5", "--in2", "0.9659258,0.2588190"],
    ["verify", "cnot"],
    ["verify", "qspa"],
    ["leakage", "--knows", "all", "--max-rounds", "2", "--format", "csv"],
    ["tomo", "--noise", "0.02", "--seed", "3"],
])
def test_runs_are_byte_deterministic(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(argv + ["--out", str(out)]) == 0
    assert sorted(os.listdir(a)) == sorted(os.listdir(b))
    assert os.listdir(a)
    for name in os.listdir(a):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_truth_table(tmp_path):
    assert run(tmp_path, "truth-table") == 0
    df = pd.read_csv(tmp_path / "truth_table_outcome0.csv", index_col=0)
    assert df.loc["+z", "-z"] == "-z"
    df = pd.read_csv(tmp_path / "truth_table_outcome1.csv", index_col=0)
    assert df.loc["+z", "+z"] == "-z"


def test_nmr_run(tmp_path, capsys):
    assert run(tmp_path, "nmr-run") == 0
    assert "fidelity to circuit-level output" in capsys.readouterr().out

    out = read_density_matrix(tmp_path / "nmr_output.json").density_matrix()
    bell = projector(apply_chc((1, 0), (0, 1)))
    assert fidelity(out, bell) >= 1 - 1e-6
    assert "[grad]_z: Iz1 + 2 Iz2\n" in (tmp_path / "nmr_replay.txt").read_text()


def test_nmr_run_custom_sequence(tmp_path):
    path = tmp_path / "qspa.txt"
    path.write_text(dumps_sequence(qspa_pulse_sequence(SpinSystem())))
    assert run(tmp_path / "file", "nmr-run", "--sequence", str(path)) == 0
    assert run(tmp_path / "builtin", "nmr-run") == 0
    a = read_density_matrix(tmp_path / "file" / "nmr_output.json").matrix()
    b = read_density_matrix(tmp_path / "builtin" / "nmr_output.json").matrix()
    assert np.allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("text", [
    "rot spins=3 axis=x angle=pi\n",
    "grad z\nrot spins=1 axis=x angle=pi/0\n",
])
def test_nmr_run_bad_sequence_file(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    assert run(tmp_path, "nmr-run", "--sequence", str(path)) == 1


@pytest.mark.parametrize("argv, freedoms", [
    (["verify", "cnot"], "global-only"),
    (["verify", "qspa"], "global-plus-z"),
    (["verify", "qspa", "--freedoms", "global-only"], "global-only"),
])
def test_verify(tmp_path, argv, freedoms):
    assert run(tmp_path, *argv) == 0
    report = read_json(tmp_path / f"verify_{argv[1]}.json")
    assert report["verdict"] is True
    assert report["freedoms"] == freedoms
    assert report["max_deviation"] < 1e-8


def test_verify_literal_mode_is_diagnostic(tmp_path):
    assert run(tmp_path, "verify", "qspa", "--mode", "paper-literal") == 0
    report = read_json(tmp_path / "verify_qspa.json")
    assert report["mode"] == "paper-literal"
    assert isinstance(report["verdict"], bool)


def test_verify_failure_exits_2(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "cnot_pulse_sequence", lambda sys: hadamard_block())
    assert run(tmp_path, "verify", "cnot") == 2
    assert read_json(tmp_path / "verify_cnot.json")["verdict"] is False


def test_leakage(tmp_path, capsys):
    assert run(tmp_path, "leakage", "--knows", "all", "--max-rounds", "2") == 0
    rows = read_json(tmp_path / "leakage_curve.json")
    assert [r["rounds"] for r in rows] == [1, 2]
    assert rows[0]["guess_probability"] == pytest.approx(0.75)

    assert run(tmp_path, "leakage", "--knows", "all", "--knows-outcomes", "--format", "csv") == 0
    df = pd.read_csv(tmp_path / "leakage_curve.csv")
    assert (df["guess_probability"] == 1.0).all()


def test_leakage_index_knowledge(tmp_path):
    assert run(tmp_path, "leakage", "--knows", "0", "--max-rounds", "1",
               "--method", "algebra") == 0
    rows = read_json(tmp_path / "leakage_curve.json")
    assert rows[0]["guess_probability"] == pytest.approx(0.25)


def test_tomo(tmp_path):
    assert run(tmp_path, "tomo") == 0
    summary = read_json(tmp_path / "tomo_summary.json")
    assert summary["fidelity"] == pytest.approx(1, abs=1e-9)
    assert summary["max_error"] <= 1e-9
    df = pd.read_csv(tmp_path / "tomo_records.csv")
    assert list(df.columns) == ["experiment_id"] + [f"obs_{i}" for i in range(1, 9)]
    assert len(df) == 9
    assert not os.path.exists(tmp_path / "tomo_records.json")


def test_tomo_from_file_with_noise(tmp_path):
    assert run(tmp_path, "chc", "--in1", "+x", "--in2", "+z", "--outcome", "0") == 0
    source = str(tmp_path / "chc_joint.json")
    assert run(tmp_path, "tomo", "--source", source, "--noise", "0.01", "--seed", "1",
               "--format", "csv") == 0
    summary = read_json(tmp_path / "tomo_summary.json")
    assert summary["fidelity"] >= 0.99
    assert summary["residual"] > 0
    assert len(pd.read_csv(tmp_path / "tomo_records.csv")) == 9


def test_density_matrix_file_round_trip(tmp_path):
    rho = projector(apply_chc((np.sqrt(3) / 2, 0.5), (0.6, 0.8j)))
    path = write_density_matrix(str(tmp_path / "rho.json"), rho, "test", "abc")
    text = (tmp_path / "rho.json").read_text()
    f = read_density_matrix(path)
    assert f.dumps() == text
    assert np.array_equal(f.matrix(), rho.data)
    assert f.metadata["source"] == "test"
    assert DensityMatrixFile.loads(text) == f


def test_density_matrix_file_validation():
    with pytest.raises(ValueError, match="missing"):
        DensityMatrixFile.loads('{"real": []}')
    bad = {"basis_labels": ["0", "1"], "real": [[1]], "imag": [[0]], "metadata": {}}
    with pytest.raises(ValueError):
        DensityMatrixFile.loads(json.dumps(bad))


def test_config_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# run settings\nseed = 5\nformat = csv  # tables\nJ12 = 200\n")
    assert load_config(str(path)) == {"seed": 5, "format": "csv", "J12": 200.0}

    cfg = resolve_config({"seed": None, "format": "json"}, str(path))
    assert cfg.seed == 5 and cfg.format == "json" and cfg.J12 == 200
    assert resolve_config().seed == 0
    assert cfg.config_hash() == resolve_config({"out": "elsewhere", "format": "json"},
                                               str(path)).config_hash()
    assert cfg.config_hash() != resolve_config({}, str(path)).config_hash()


def test_config_file_on_command_line(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("format = csv\n")
    assert run(tmp_path, "leakage", "--max-rounds", "1", "--config", str(path)) == 0
    assert os.path.exists(tmp_path / "leakage_curve.csv")


@pytest.mark.parametrize("text", ["seed = 1.5\n", "colour = blue\n", "seed\n", "J12 = 0\n"])
def test_config_errors(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    with pytest.raises(ValueError):
        resolve_config({}, str(path))
    assert run(tmp_path, "truth-table", "--config", str(path)) == 1


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(format="xml")
    with pytest.raises(ValueError):
        RunConfig(gammaC=np.inf)


@pytest.mark.parametrize("text, expect", [
    ("+x", (2 ** -0.5, 2 ** -0.5)),
    ("-z", (0, 1)),
    ("0.6,0.8", (0.6, 0.8)),
    ("0.6, -0.8j", (0.6, -0.8j)),
    ("0.6000001,0.8", (0.6, 0.8)),
])
def test_parse_qubit(text, expect):
    q = parse_qubit(text)
    assert np.allclose([q.a, q.b], expect, atol=1e-6)
