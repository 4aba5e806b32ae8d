import json
import math
from pathlib import Path

import pytest

from hypeig.cli import main


def test_decompose_preset(capsys):
    assert main(["decompose", "--surface", "bolza"]) == 0
    out = capsys.readouterr().out
    assert "2 cylinder pieces" in out
    assert "area" in out


def test_decompose_rejects_bad_graph(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "genus": 2,
        "curves": [{"length": 2.0, "twist": 0.0}] * 3,
        "pants": [[[0, 0], [1, 0]], [[0, 1], [1, 1], [2, 0], [2, 1]]],
    }))
    assert main(["decompose", "--surface", str(bad)]) == 2


def test_decompose_missing_file():
    assert main(["decompose", "--surface", "/nonexistent/surface.json"]) == 2


@pytest.mark.slow
def test_spectrum_writes_reports_and_figure(tmp_path):
    out = tmp_path / "run"
    rc = main(["spectrum", "--surface", "bolza", "--min", "3.7", "--max", "3.95",
               "--order", "20", "--step", "0.025", "--coarse", "0.05",
               "--out", str(out)])
    assert rc == 0
    cert = json.loads((out / "certificate.json").read_text())
    assert len(cert["enclosures"]) == 1
    enc = cert["enclosures"][0]
    assert abs(0.5 * (enc["lambda_lo"] + enc["lambda_hi"]) - 3.8388872588) < 1e-6
    csv = (out / "eigenvalues.csv").read_text().strip().splitlines()
    assert csv[0] == "lambda_lo,lambda_hi,multiplicity"
    assert len(csv) == 2
    assert (out / "scan.csv").exists()
    assert (out / "scan.png").stat().st_size > 0
    # round trip through the trace loader
    from hypeig.trace import load_eigenvalues
    entries = load_eigenvalues(out / "eigenvalues.csv")
    assert entries[0].multiplicity == int(csv[1].split(",")[2])


@pytest.mark.slow
def test_det_command_json_fields(tmp_path, bolza_eigs_low, capsys):
    eigs = tmp_path / "eigs.csv"
    with eigs.open("w") as f:
        f.write("lambda_lo,lambda_hi,multiplicity\n")
        for lam, mult in bolza_eigs_low:
            f.write(f"{lam},{lam},{mult}\n")
    rc = main(["det", "--surface", "bolza", "--eigs", str(eigs),
               "--eps", "0.12", "--out", str(tmp_path / "det.json")])
    assert rc == 0
    doc = json.loads((tmp_path / "det.json").read_text())
    assert set(doc["value"]) == {"value", "abs_error"}
    assert doc["error_breakdown"]["eigenvalue_tail"] >= 0
    # no bare floats at the top result level
    assert isinstance(doc["value"], dict)


def test_zeta_requires_eigs():
    assert main(["zeta", "--surface", "bolza", "--s", "2.0"]) == 2
