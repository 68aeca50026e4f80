import json

import pytest

from kndirac.benchmarks import apriori_path
from kndirac.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def spectrum(out):
    return [complex(float(a), float(b)) for a, b in
            (line.split() for line in out.splitlines() if not line.startswith("#"))]


def test_spec2_zero_coupling(capsys):
    code, out, _ = run(capsys, "spec2", "--kappa", "1.5", "--am", "0", "--aw", "0",
                       "--h", "0.05", "--shift", "2", "--nevp", "6")
    assert code == 0
    assert any(abs(z.real - 2) <= 0.05 for z in spectrum(out))


def test_spec2_exact_case(capsys):
    code, out, _ = run(capsys, "spec2", "--kappa", "1.5", "--am", "0.25", "--aw", "0.25",
                       "--h", "0.02", "--shift", "2.25")
    assert code == 0
    assert any(abs(z.real - 2.25) <= 0.01 for z in spectrum(out))
    assert "residual_certificate=" in out


def test_spec2_full_and_dump(capsys, tmp_path):
    prefix = str(tmp_path / "m_")
    code, out, _ = run(capsys, "spec2", "--kappa", "2.5", "--h", "0.2", "--full",
                       "--dump-matrices", prefix)
    assert code == 0
    assert len(spectrum(out)) == 4 * 15
    assert (tmp_path / "m_Q.txt").exists() and (tmp_path / "m_S.txt").exists()


@pytest.mark.parametrize("argv", [
    ["spec2", "--kappa", "0.4"],
    ["spec2", "--kappa", "1.5", "--h", "2"],
    ["spec2", "--kappa", "1.5", "--h", "0.0005", "--full"],
    ["spec2"],
    ["enclose", "--kappa", "1.5"],
    ["enclose", "--kappa", "1.5", "--targets", "n=0"],
    ["convergence", "--kappa", "3", "--hs", "0.1,0.05"],
    ["convergence", "--kappa", "0.5"],
    ["sweep", "--kappa", "1.5", "--grid", "0:1:2"],
    ["sweep", "--kappa", "0.2", "--grid", "0:1:2,0:1:2"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_enclose_with_apriori(capsys, tmp_path):
    out_path = tmp_path / "r.csv"
    code, _, _ = run(capsys, "enclose", "--kappa", "-3.5", "--am", "0.25", "--aw", "0.75",
                     "--h", "0.005", "--targets", "n=1",
                     "--apriori", str(apriori_path(-3.5, 0.25, 0.75)), "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("# schema:")
    row = dict(zip(lines[1].split(","), lines[2].split(",")))
    assert row["kind"] == "sharpened" and row["apriori_label"] == "analytic"
    assert float(row["lower"]) <= 3.30870 and float(row["upper"]) >= 3.30869


def test_enclose_without_apriori_is_basic(capsys):
    code, out, _ = run(capsys, "enclose", "--kappa", "1.5", "--am", "0.25", "--aw", "0.25",
                       "--h", "0.05", "--targets", "2.25", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    (row,) = doc["rows"]
    assert row["kind"] == "basic" and row["apriori_label"] == "none"
    assert row["lower"] <= 2.25 <= row["upper"]


def test_enclose_targets_file(capsys, tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("n=1  # first\nn=-1\n")
    code, out, _ = run(capsys, "enclose", "--kappa", "1.5", "--targets-file", str(f))
    assert code == 0
    assert len(out.splitlines()) == 4


def test_enclose_soft_and_global_failure(capsys):
    code, out, _ = run(capsys, "enclose", "--kappa", "1.5", "--targets", "n=1,n=900")
    assert code == 0 and "EmptySpectrum" in out
    code, out, _ = run(capsys, "enclose", "--kappa", "1.5", "--targets", "n=900")
    assert code == 3


def test_enclose_is_deterministic(capsys, tmp_path):
    args = ["enclose", "--kappa", "1.5", "--am", "0.1", "--aw", "0.3", "--h", "0.02",
            "--targets", "n=1,n=-1,3.1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_convergence_cli(capsys):
    code, out, _ = run(capsys, "convergence", "--kappa", "3", "--hs", "0.1,0.05,0.025")
    assert code == 0
    header, row = out.splitlines()[1:3]
    rec = dict(zip(header.split(","), row.split(",")))
    assert float(rec["slope"]) >= 0.8 and rec["predicted_conjectured"] == "1"


def test_sweep_cli(capsys):
    code, out, _ = run(capsys, "sweep", "--kappa", "1.5", "--grid", "0:0:1,0:0:1")
    assert code == 0
    header, row = out.splitlines()[1:3]
    rec = dict(zip(header.split(","), row.split(",")))
    assert float(rec["lower_p1"]) <= 2 <= float(rec["upper_p1"])
    assert rec["exact_p1"] == "2"


def test_verify_cli(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(capsys, "verify", "--out", str(a))[0] == 0
    assert run(capsys, "verify", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "verify", "--inject-quadrature-order", "1")
    assert code == 1
    assert "FAIL  oracle_equivalence" in out
