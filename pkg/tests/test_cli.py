import numpy as np
import pytest

from proxdec.bench import read_csv
from proxdec.cli import _floats, main
from proxdec.ldpc import load_alist

SMALL = ["--code", "gen:24,3,6,5", "--M", "12", "--N", "12"]


def test_snr_list_parsing():
    assert _floats("6:9:1") == (6.0, 7.0, 8.0, 9.0)
    assert _floats("1, 2.5,4:5:0.5") == (1.0, 2.5, 4.0, 4.5, 5.0)


def test_sweep(tmp_path, capsys):
    out = tmp_path / "ber.csv"
    assert main(["sweep", *SMALL, "--trials", "4", "--snr-db", "2,4", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 8
    assert (tmp_path / "ber.csv.meta.json").exists()
    assert "BER" in capsys.readouterr().out


def test_curve(tmp_path):
    out = tmp_path / "curve.csv"
    assert main(["curve", *SMALL, "--trials", "3", "--iters", "5", "--snr-db", "6",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    assert {r["detector"] for r in rows} == {"proximal", "tanh", "mmse"}
    assert len(rows) == 3 * 6


def test_pullin(tmp_path):
    assert main(["pullin", "--trials", "2", "--out", str(tmp_path / "traj")]) == 0
    files = sorted((tmp_path / "traj").iterdir())
    assert [f.name for f in files] == ["trajectory_000.csv", "trajectory_001.csv"]
    header = files[0].read_text().splitlines()[0]
    assert header == "iteration,x_1,x_2,x_3,x_4,x_5,x_6,x_7"


def test_gen_code(tmp_path):
    out = tmp_path / "c.alist"
    assert main(["gen-code", "--n", "24", "--out", str(out)]) == 0
    H = load_alist(out)
    assert (H.m, H.n) == (12, 24)
    assert np.all(H.dense.sum(axis=0) == 3)


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["sweep", "--code", "hamming", "--trials", "1", "--out", str(tmp_path / "x.csv")]) == 2
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["sweep", "--detectors", "ml", "--out", "x.csv"])
