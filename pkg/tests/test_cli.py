import json
import subprocess
import sys

import numpy as np
import pytest

from schain import format_hin
from schain.cli import main

from conftest import planted_hin


def write_dataset(directory, seed=0, n=18, k=2, constraints=""):
    hin, paths, labels = planted_hin(np.random.default_rng(seed), n, k, num_paths=2, num_attrs=1)
    directory.mkdir(parents=True, exist_ok=True)
    nodes, edges, attrs = format_hin(hin)
    (directory / "nodes.tsv").write_text(nodes)
    (directory / "edges.tsv").write_text(edges)
    for t, text in attrs.items():
        (directory / f"attrs.{t}.tsv").write_text(text)
    (directory / "metapaths.txt").write_text("\n".join(paths) + "\n")
    if constraints:
        (directory / "constraints.tsv").write_text(constraints)
    truth = "".join(f"a{i}\t{g}\n" for i, g in enumerate(labels))
    (directory / "truth.tsv").write_text(truth)
    return directory


@pytest.fixture
def data(tmp_path):
    return write_dataset(tmp_path / "data", constraints="ML\ta0\ta1\n")


def test_cluster_happy_path(data, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["cluster", str(data), "--k", "2", "--out", str(out)]) == 0
    result = json.loads((out / "result.json").read_text())
    assert len(result["clusters"]) == 2
    assert sorted(sum(result["clusters"], [])) == sorted(f"a{i}" for i in range(18))
    assert result["target_type"] == "A"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["k"] == 2 and manifest["inputs"]["constraints"].endswith("constraints.tsv")
    assert capsys.readouterr().out == ""


def test_cluster_from_config_and_manifest(data, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run settings\nk = 2\nseed = 4\ngamma = 0.1\n")
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["cluster", str(data), "--config", str(cfg), "--alpha", "0.3", "--out", str(out1)]) == 0
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["config"]["alpha"] == 0.3 and manifest["config"]["seed"] == 4
    assert main(["cluster", "--manifest", str(out1 / "manifest.json"), "--out", str(out2)]) == 0
    assert (out1 / "result.json").read_bytes() == (out2 / "result.json").read_bytes()


def test_missing_nodes_file(tmp_path, capsys):
    d = tmp_path / "empty"
    d.mkdir()
    assert main(["cluster", str(d), "--k", "2", "--out", str(tmp_path)]) == 3
    assert "nodes.tsv" in capsys.readouterr().err


def test_k_too_large(data, tmp_path, capsys):
    assert main(["cluster", str(data), "--k", "99", "--out", str(tmp_path / "o")]) == 3
    assert "TooFewObjects" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [[], ["cluster"], ["cluster", "DATA", "--k", "1"], ["cluster", "DATA"], ["bogus"], ["cluster", "DATA", "--k", "x"]],
)
def test_usage_errors(data, tmp_path, argv):
    argv = [str(data) if a == "DATA" else a for a in argv]
    if argv and argv[0] == "cluster":
        argv += ["--out", str(tmp_path / "o")]
    assert main(argv) == 2


def test_bad_config_key(data, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("k = 2\nbeta = 3\n")
    assert main(["cluster", str(data), "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_diagnose(data, tmp_path, capsys):
    assert main(["diagnose", str(data), "--labels", str(data / "truth.tsv")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert 0 <= report["graph_cohesiveness"] <= 1 and 0 <= report["graph_connectedness"] <= 1
    assert len(report["per_metapath"]) == 2
    assert report["theta"] == [0.5, 0.5]


def test_diagnose_theta_from_result(data, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["cluster", str(data), "--k", "2", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["diagnose", str(data), "--labels", str(data / "truth.tsv"), "--theta-from", str(out / "result.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    lam = json.loads((out / "result.json").read_text())["lambda"]
    np.testing.assert_allclose(report["theta"], lam, rtol=1e-10)


def test_diagnose_partial_labels(data, tmp_path, capsys):
    partial = tmp_path / "partial.tsv"
    partial.write_text("".join((data / "truth.tsv").read_text().splitlines(keepends=True)[:-1]))
    assert main(["diagnose", str(data), "--labels", str(partial)]) == 3
    assert "PartialLabeling" in capsys.readouterr().err


def test_diagnose_bad_theta(data):
    assert main(["diagnose", str(data), "--labels", str(data / "truth.tsv"), "--theta", "0.7,0.7"]) == 2
    assert main(["diagnose", str(data), "--labels", str(data / "truth.tsv"), "--theta", "1"]) == 2


def test_eval_nmi(tmp_path, capsys):
    a, b, c = tmp_path / "a.tsv", tmp_path / "b.tsv", tmp_path / "c.tsv"
    a.write_text("x1\t0\nx2\t0\nx3\t1\nx4\t1\n")
    b.write_text("x1\t0\nx2\t1\nx3\t0\nx4\t1\n")
    c.write_text("x1\t0\nx2\t1\n")
    assert main(["eval-nmi", str(a), str(a)]) == 0
    assert capsys.readouterr().out == "1.000000\n"
    assert main(["eval-nmi", str(a), str(b)]) == 0
    assert capsys.readouterr().out == "0.000000\n"
    assert main(["eval-nmi", str(a), str(c)]) == 3


def test_pathsim(data, tmp_path, capsys):
    assert main(["pathsim", str(data), "--metapath", "A-P-A"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(len(line.split("\t")) == 3 for line in lines)
    assert all(0 < float(line.split("\t")[2]) <= 1 for line in lines)
    assert main(["pathsim", str(data), "--metapath", "A-V"]) == 3
    assert main(["pathsim", str(data), "--metapath", "A-P-A", "--target", "Q"]) == 3


def test_module_entry_point(data, tmp_path):
    out = tmp_path / "o"
    proc = subprocess.run(
        [sys.executable, "-m", "schain", "cluster", str(data), "--k", "2", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout == ""
    assert (out / "result.json").exists()
