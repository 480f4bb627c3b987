import subprocess
import sys
from pathlib import Path

import pytest

from puremix.cli import main
from puremix.io import load_certificates, load_map
from puremix.spaces import tent

SPACES = Path(__file__).resolve().parent.parent / "demos" / "spaces"


@pytest.mark.parametrize("argv,code", [
    (["--map", "tent", "--expect", "exact"], 0),
    (["--map", "tent"], 1),
    (["--map", "tent", "--expect", "mixing", "--resolution", "1/8"], 0),
    (["--map", "identity", "--expect", "not-mixing"], 0),
    (["--map", "identity", "--expect", "not-exact"], 0),
    (["--map", "doubling", "--expect", "mixing", "--entropy", "markov"], 0),
    (["--map", "tent", "--expect", "exact", "--periodic-eps", "1/10"], 0),
    (["--map", "rotation2/5", "--expect", "not-mixing", "--periodic-eps", "1/20"], 0),
])
def test_certify_exit_codes(argv, code, capsys):
    assert main(["certify", "--no-timestamp"] + argv) == code
    out = capsys.readouterr().out
    assert out.startswith("# generated -\n")


def test_certify_writes_document(tmp_path):
    out = tmp_path / "tent.yaml"
    assert main(["certify", "--map", "tent", "--expect", "exact", "--out", str(out)]) == 0
    kinds = [c["kind"] for c in load_certificates(out.read_text())]
    assert kinds == ["mixing", "exactness", "pure_mixing"]


def test_build_bundle_is_deterministic(tmp_path, capsys):
    runs = []
    for name in ("a", "b"):
        out = tmp_path / name
        argv = ["build", "--space", str(SPACES / "interval.yaml"), "--stages", "2", "--out", str(out), "--no-timestamp"]
        assert main(argv) == 0
        runs.append(out)
    for f in ("f.map.yaml", "g.map.yaml", "h.map.yaml", "certificates.yaml"):
        assert (runs[0] / f).read_bytes() == (runs[1] / f).read_bytes()
    certs = load_certificates((runs[0] / "certificates.yaml").read_text())
    assert [c["kind"] for c in certs][-1] == "pure_mixing"
    assert all(c["ok"] for c in certs)
    h = str(runs[0] / "h.map.yaml")
    assert main(["certify", "--map", h, "--resolution", "1/4", "--no-timestamp"]) == 0


def test_build_circle_writes_factor(tmp_path):
    assert main(["build", "--space", "circle", "--stages", "1", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "phi.map.yaml").exists()
    h = load_map(tmp_path / "h_factored.map.yaml")
    assert len(h.domain.edges) == 1


def test_bad_spec_reports_position(capsys):
    code = main(["build", "--space", str(SPACES / "bad_length.yaml"), "--out", "unused"])
    assert code == 2
    assert "bad_length.yaml:4:37: edge length must be positive" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["certify", "--map", "no/such/map.yaml"]) == 2
    assert "error" in capsys.readouterr().err


def test_export_builtin(tmp_path):
    out = tmp_path / "tent.map.yaml"
    assert main(["export", "--builtin", "tent", "--out", str(out)]) == 0
    assert list(load_map(out).all_pieces()) == list(tent().all_pieces())


def test_export_build(tmp_path):
    assert main(["export", "--space", "theta", "--stages", "1", "--out", str(tmp_path)]) == 0
    assert {p.name for p in tmp_path.iterdir()} == {
        "f.map.yaml", "g.map.yaml", "h.map.yaml", "phi.map.yaml", "h_factored.map.yaml",
    }


def test_entropy_table(capsys):
    assert main(["entropy", "--space", "interval", "--stages", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[:3] == ["stage", "pieces", "log_lower"]
    assert len(lines) == 4 and lines[-1].startswith("non-decreasing: True")


def test_plot(tmp_path):
    assert main(["plot", "--space", "interval", "--stages", "1", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.glob("*.svg"))
    assert names == ["cobweb.svg", "entropy.svg", "map.svg", "mesh.svg"]


def test_module_entry_point():
    run = subprocess.run([sys.executable, "-m", "puremix", "--help"], capture_output=True, text=True)
    assert run.returncode == 0 and "certify" in run.stdout
