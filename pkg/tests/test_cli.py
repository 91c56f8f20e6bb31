import subprocess
import sys
from pathlib import Path

import pytest

from qftarray.cli import main

ROOT = Path(__file__).resolve().parents[1]


def test_run_exact(capsys):
    assert main(["run", "--exact", "--sll", "-20"]) == 0
    out = capsys.readouterr().out
    assert "exact (no sampling)" in out
    gamma = float(out.split("gamma")[1].split()[0])
    assert gamma < 1e-9


def test_run_writes_outputs(tmp_path, capsys):
    code = main(["run", "-T", "M*10", "-R", "2", "--seed", "3", "-o", str(tmp_path)])
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"pattern_estimated.csv", "pattern_reference.csv", "report.csv"}
    assert "delta" in capsys.readouterr().out


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("generator = dolph\nsll_db = -25\nn_samples = 256\nshots = M*4, M*8\nrepetitions = 2\n")
    assert main(["sweep", "--config", str(cfg), "-R", "1", "-T", "M*2,M*4,M*8"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("shots,")
    assert [int(l.split(",")[0]) for l in lines[1:]] == [512, 1024, 2048]


def test_search_cli(capsys):
    assert main(["search", "--target", "1000", "-R", "1", "-M", "256"]) == 0
    out = capsys.readouterr().out
    assert "T* = 20480" in out


def test_search_exhausted_cli(capsys):
    code = main(["search", "--target", "1e-9", "-R", "1", "-M", "256", "--search-start", "100", "--search-max", "150"])
    assert code == 0
    assert "search exhausted" in capsys.readouterr().out


def test_gen_excitations(tmp_path, capsys):
    assert main(["gen-excitations", "--sll", "-15"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "index,real,imag" and len(out) == 17
    assert abs(float(out[1].split(",")[1]) - 0.4129) < 1e-4
    path = tmp_path / "t.csv"
    assert main(["gen-excitations", "--generator", "taylor", "-N", "8", "--nbar", "2", "-o", str(path)]) == 0
    assert len(path.read_text().splitlines()) == 9
    # a generated file feeds straight back in
    assert main(["run", "--exact", "--excitations", str(path), "-M", "64"]) == 0


def test_dump_circuit(capsys):
    assert main(["dump-circuit", "-L", "10", "--counts"]) == 0
    assert capsys.readouterr().out.strip() == "L=10  H=10  CP=45  SWAP=5"
    assert main(["dump-circuit", "-N", "16", "-M", "8"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "H q3" and lines[-1] == "SWAP q1 q2"


@pytest.mark.parametrize(
    "argv,code,category",
    [
        (["run", "-M", "1000"], 2, "parameter"),
        (["run", "-N", "64", "-M", "32"], 2, "sizing"),
        (["run", "-T", "M*zz"], 3, "parse"),
        (["run", "--excitations", "/nonexistent/w.csv"], 5, "io"),
        (["gen-excitations", "--sll", "5"], 2, "parameter"),
    ],
)
def test_error_exit_codes(argv, code, category, capsys):
    assert main(argv) == code
    assert f"error[{category}]" in capsys.readouterr().err


def test_bad_excitation_file(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("0,1,0\n2,1,0\n")
    assert main(["run", "--exact", "--excitations", str(path)]) == 3
    assert "row 2" in capsys.readouterr().err


def test_zero_excitations(tmp_path, capsys):
    path = tmp_path / "zero.csv"
    path.write_text("0,0,0\n1,0,0\n")
    assert main(["run", "--exact", "--excitations", str(path)]) == 2
    assert "error[degenerate-input]" in capsys.readouterr().err


def test_console_script_and_module():
    out = subprocess.run([sys.executable, "-m", "qftarray.cli", "dump-circuit", "-L", "2"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines() == ["H q1", "CP(-π/2) q0 q1", "H q0", "SWAP q0 q1"]


@pytest.mark.parametrize("name", ["dc15_single.cfg", "dc15_sweep.cfg", "dc20_search.cfg", "flat_top_sweep.cfg",
                                  "cosecant_squared_sweep.cfg"])
def test_shipped_configs_parse(name):
    from qftarray.harness import load_config

    cfg = load_config(ROOT / "configs" / name)
    cfg.excitations()
