from pathlib import Path

import numpy as np
import pytest

from qpdno.archive import read_archive, stack_to_fields, write_archive
from qpdno.cli import main
from qpdno.config import load
from qpdno.mms import relative_error
from qpdno.study import (
    CSV_HEADER,
    build_setup,
    problem_for,
    read_csv,
    rows_to_csv,
    run_convergence_study,
)
from qpdno.hops import expand
from qpdno.summation import sum_expansion

from conftest import quiet

SMALL = Path(__file__).parent / "small.yaml"


def test_study_rows():
    cfg = load(SMALL)
    rows = run_convergence_study(cfg)
    assert len(rows) == 3 * 2 * 2 * 5
    tfe = [r.error_rel for r in rows if r.algorithm == "tfe" and r.summation == "taylor" and r.epsilon == 0.02]
    assert tfe[-1] < 1e-6 and tfe[-1] < tfe[0]
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)


def test_threads_do_not_change_results():
    cfg = load(SMALL)
    assert rows_to_csv(run_convergence_study(cfg)) == rows_to_csv(run_convergence_study(cfg, threads=3))


def test_archive_round_trip_exact(tmp_path):
    cfg = load(SMALL)
    setup = build_setup(cfg)
    prob, nu = problem_for(cfg, setup, 0.05)
    exp = quiet(expand, prob, "fe")
    path = write_archive(tmp_path / "fe.dat", exp, {"epsilon": "0.05"})
    stack, header = read_archive(path, setup.modes)
    assert header["algorithm"] == "fe" and header["epsilon"] == "0.05"
    np.testing.assert_array_equal(stack, exp.coefficient_stack())
    fields = stack_to_fields(stack, setup.lattice, setup.modes)
    for method in ("taylor", "pade"):
        a, _ = sum_expansion(exp, 0.05, method)
        b, _ = sum_expansion(np.stack([f.coeffs for f in fields]), 0.05, method)
        assert relative_error(nu, a) == relative_error(nu, a.with_coeffs(b))


def test_archive_rejects_malformed(tmp_path):
    cfg = load(SMALL)
    setup = build_setup(cfg)
    bad = tmp_path / "bad.dat"
    bad.write_text("# order: 1\n0 1 2 3\n")
    with pytest.raises(ValueError):
        read_archive(bad, setup.modes)


def test_cli_run_and_csv(tmp_path, capsys):
    assert main(["run", str(SMALL), "--out", str(tmp_path), "--override", "algorithms=[tfe]"]) == 0
    csv_path = Path(capsys.readouterr().out.strip())
    rows = read_csv(csv_path)
    assert {r.algorithm for r in rows} == {"tfe"}
    assert (tmp_path / "study.meta.json").exists()


def test_cli_dump(tmp_path, capsys):
    assert main(["dump", str(SMALL), "--algorithm", "tfe", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["tfe_eps0.02.dat", "tfe_eps0.05.dat"]


def test_cli_validate(tmp_path, capsys):
    assert main(["validate", str(SMALL)]) == 0
    assert "configuration ok" in capsys.readouterr().out
    assert main(["validate", str(SMALL), "--override", "order=99"]) == 2
    assert main(["run", str(SMALL), "--override", "algorithms=[bem]"]) == 2
    assert main(["validate", str(tmp_path / "missing.yaml")]) == 1


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "qpdno", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "qpdno" in out.stdout
