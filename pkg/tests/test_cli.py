import json

import numpy as np
import pytest

from binweyl.cli import main
from binweyl.pipeline.imageio import load_pgm, save_pgm
from binweyl.pipeline.textures import synth_texture
from binweyl.transform import read_spectrum, weyl_fast


@pytest.fixture
def textures(tmp_path):
    paths = []
    for period in (2, 3):
        path = tmp_path / f"p{period}.pgm"
        assert main(["synth", "--period", str(period), "--size", "64", "--noise", "0.05", "--seed", "1", "--out", str(path)]) == 0
        paths.append(str(path))
    return paths


def test_transform_csv(tmp_path):
    src = tmp_path / "y.csv"
    src.write_text("1,2\n3,4\n")
    out = tmp_path / "w.csv"
    assert main(["transform", "--input", str(src), "--m", "2", "--out", str(out)]) == 0
    s = read_spectrum(out)
    np.testing.assert_allclose(s.coeffs, weyl_fast([1.0, 2.0, 3.0, 4.0]).coeffs, atol=1e-15)
    assert s[0, 0] == pytest.approx(15.0)
    naive = tmp_path / "n.bin"
    assert main(["transform", "--input", str(src), "--m", "2", "--naive", "--out", str(naive)]) == 0
    np.testing.assert_allclose(read_spectrum(naive).coeffs, s.coeffs, atol=1e-12)


def test_transform_pgm_patch(tmp_path, rng):
    px = rng.integers(0, 256, size=(4, 4)) / 255
    src = tmp_path / "patch.pgm"
    save_pgm(src, px)
    out = tmp_path / "w.csv"
    assert main(["transform", "--input", str(src), "--m", "4", "--out", str(out)]) == 0
    np.testing.assert_allclose(read_spectrum(out).coeffs, weyl_fast(px.T.reshape(-1)).coeffs, atol=1e-12)


def test_transform_errors(tmp_path, capsys):
    src = tmp_path / "y.csv"
    src.write_text("1,2,3\n")
    assert main(["transform", "--input", str(src), "--m", "2", "--out", str(tmp_path / "o.csv")]) == 2
    assert "error:" in capsys.readouterr().err
    src.write_text("1,2,oops,4\n")
    assert main(["transform", "--input", str(src), "--m", "2", "--out", str(tmp_path / "o.csv")]) == 3
    assert main(["transform", "--input", str(tmp_path / "missing.csv"), "--m", "2", "--out", "x"]) == 3
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    assert main(["transform", "--input", str(bad), "--m", "2", "--out", "x.csv"]) == 3
    with pytest.raises(SystemExit) as info:
        main(["transform", "--m", "2"])
    assert info.value.code == 2


def test_describe(tmp_path, textures):
    out = tmp_path / "d.csv"
    assert main(["describe", "--image", textures[0], "--n", "5", "--seed", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 6
    assert lines[0].split(",")[:3] == ["row", "col", "d0"] and len(lines[0].split(",")) == 26


def test_inspect_partition(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert main(["inspect-partition", "--m", "4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["n_classes"] == 36 and doc["n_retained"] == 24
    assert "retained=24" in capsys.readouterr().out
    assert main(["inspect-partition", "--m", "3", "--out", str(out)]) == 2


def test_inspect_partition_integrity(tmp_path, monkeypatch):
    import binweyl.cli as cli

    monkeypatch.setattr(cli, "REFERENCE_A_CLASSES_M4", [["0000"], ["0001"]])
    assert main(["inspect-partition", "--m", "4", "--out", str(tmp_path / "p.json")]) == 4


def test_cluster(tmp_path, textures, capsys):
    report = tmp_path / "c.json"
    args = ["cluster", "--images", *textures, "--n", "80", "--k", "2", "--seed", "0", "--report", str(report)]
    assert main(args) == 0
    doc = json.loads(report.read_text())
    assert doc["descriptor_length"] == 24 and doc["accuracy"] >= 0.95
    assert (tmp_path / "c_pca.csv").exists() and (tmp_path / "c_descriptors.csv").exists()
    assert "accuracy=" in capsys.readouterr().out
    args[args.index("--k") + 1] = "500"
    assert main(args) == 2


def test_classify(tmp_path, textures, capsys):
    report = tmp_path / "k.json"
    args = [
        "classify", "--images", *textures, "--train-per-class", "10", "--k-coeffs", "1",
        "--n", "60", "--seed", "0", "--sweep", "1,2,4", "--report", str(report),
    ]
    assert main(args) == 0
    doc = json.loads(report.read_text())
    assert doc["accuracy"] >= 0.99
    assert (tmp_path / "k_sweep.csv").read_text().startswith("K,accuracy\n")
    assert capsys.readouterr().out.count("K=") == 3
    args[args.index("--train-per-class") + 1] = "60"
    assert main(args) == 2


def test_bench(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["bench", "--m", "3", "--reps", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("method,m,reps") and len(lines) == 3
    assert "speedup=" in capsys.readouterr().err


def test_synth(tmp_path):
    out = tmp_path / "s.pgm"
    assert main(["synth", "--period", "4", "--size", "32", "--noise", "0", "--seed", "0", "--out", str(out)]) == 0
    np.testing.assert_allclose(load_pgm(out).pixels, synth_texture(4, size=32).pixels, atol=0.5 / 255)
    assert main(["synth", "--period", "0", "--size", "32", "--out", str(out)]) == 2
