import pytest

from codedmm import read_matrix
from codedmm.cli import ExperimentConfig, main
from codedmm.errors import ValidationError
from codedmm.simulator import SWEEP_CSV_HEADER


def run_cli(*args):
    return main([str(a) for a in args])


def test_gen_matrix_deterministic(tmp_path):
    one, two = tmp_path / "one.cdm", tmp_path / "two.cdm"
    assert run_cli("gen-matrix", "--rows", 4, "--cols", 4, "--bound", 1,
                   "--seed", 9, "--out", one) == 0
    assert run_cli("gen-matrix", "--rows", 4, "--cols", 4, "--bound", 1,
                   "--seed", 9, "--out", two) == 0
    assert one.read_bytes() == two.read_bytes()
    M = read_matrix(one)
    assert set(M.flat) <= {0, 1}


def test_gen_matrix_signed(tmp_path):
    path = tmp_path / "s.cdm"
    assert run_cli("gen-matrix", "--rows", 30, "--cols", 30, "--bound", 3,
                   "--signed", "--seed", 1, "--out", path) == 0
    M = read_matrix(path)
    assert M.min() < 0 and M.min() >= -3 and M.max() <= 3


def test_run_exact_zero_error(capsys, tmp_path):
    out = tmp_path / "row.csv"
    code = run_cli("run", "--size", 8, "--bound", 5, "--mode", "exact",
                   "--seed", 3, "--out", out)
    assert code == 0
    stdout = capsys.readouterr().out
    assert "tau=4" in stdout
    assert "rel_error=0.0" in stdout
    assert "latency=1.0" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == SWEEP_CSV_HEADER
    assert lines[1].startswith("p1,2,2,2,1,10,4,0,0,3,1000.0,0.0,0.0,")


def test_run_unit_circle_zero_error(capsys):
    assert run_cli("run", "--size", 16, "--bound", 50, "--mode", "float",
                   "--points", "unit", "--seed", 4) == 0
    assert "rel_error=0.0" in capsys.readouterr().out


def test_run_subset_override(capsys):
    args = ["run", "--size", 8, "--bound", 5, "--mode", "exact", "--seed", 5]
    assert run_cli(*args) == 0
    base = capsys.readouterr().out
    assert run_cli(*args, "--use-workers", "6,3,9,0") == 0
    picked = capsys.readouterr().out
    assert base.split("rel_error=")[1] == picked.split("rel_error=")[1]


def test_run_validation_exit_code(capsys):
    assert run_cli("run", "--p", 4, "--p-prime", 3) == 2
    assert "divide" in capsys.readouterr().err
    assert run_cli("run", "--workers", 3) == 2
    assert run_cli("run", "--mode", "exact", "--points", "unit") == 2


def test_run_decode_failure_exit_code(capsys):
    # Collapse scale: strict decoding hits the bound check.
    assert run_cli("run", "--size", 40, "--bound", 2_000_000,
                   "--mode", "float", "--points", "real") == 3
    assert "bound" in capsys.readouterr().err


def test_run_io_error_exit_code(capsys):
    assert run_cli("run", "--a-file", "/nonexistent/a.cdm",
                   "--b-file", "/nonexistent/b.cdm") == 4


def test_sweep_stragglers_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    args = ["sweep-stragglers", "--size", 8, "--bound", 5, "--seed", 1,
            "--straggler-counts", "0,2,7", "--out", out]
    assert run_cli(*args) == 0
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == SWEEP_CSV_HEADER
    assert len(lines) == 1 + 2 * 3  # two schemes, three S values, one trial
    lat = {}
    for line in lines[1:]:
        cells = dict(zip(SWEEP_CSV_HEADER.split(","), line.split(",")))
        lat[(cells["scheme"], int(cells["S"]))] = float(cells["latency_ms"])
        assert cells["rel_error"] == "0.0"
    assert lat[("p1", 0)] == lat[("p1", 2)] == 1000.0
    assert lat[("p1", 7)] == 2000.0
    assert lat[("p2", 2)] == 2000.0
    # reruns are byte-identical
    rerun = tmp_path / "sweep2.csv"
    assert run_cli(*args[:-1], rerun) == 0
    assert rerun.read_text() == text


def test_sweep_error_csv(tmp_path):
    out = tmp_path / "err.csv"
    assert run_cli("sweep-error", "--size", 8, "--bounds", "0,5", "--trials", 2,
                   "--seed", 2, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "bound,s,rel_error"
    assert len(lines) == 1 + 2 * 2
    assert lines[1].startswith("0,2,exact")
    for line in lines[3:]:
        bound, s, err = line.split(",")
        assert bound == "5" and float(err) == 0.0


def test_sweep_error_s_override(tmp_path):
    out = tmp_path / "err2.csv"
    assert run_cli("sweep-error", "--size", 8, "--bounds", "5", "--s-values",
                   "2^20", "--out", out) == 0
    assert out.read_text().splitlines()[1].split(",")[1] == str(2**20)


def test_sweep_error_needs_bounds():
    assert run_cli("sweep-error", "--size", 8, "--bounds", "") == 2


def test_plan_dump_stdout(capsys):
    assert run_cli("plan-dump", "--m", 2, "--n", 2, "--p", 4, "--p-prime", 2) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "side,block_row,block_col,z_exp,s_exp"
    assert "A,2,0,1,0" in lines
    assert "C,1,1,7,0" in lines


def test_experiment_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig(mode="exact", point_kind="unit")
    with pytest.raises(ValidationError):
        ExperimentConfig(a_file="only-a.cdm")
    with pytest.raises(ValidationError):
        ExperimentConfig(p=4, p_prime=3)
    cfg = ExperimentConfig(mode="exact")
    assert cfg.point_kind == "integer"
    assert cfg.scalar == "exact"
    assert ExperimentConfig(point_kind="unit").scalar == "complex"


def test_experiment_config_auto_base():
    cfg = ExperimentConfig(size=8, bound=5, seed=0)
    A, B = cfg.load_matrices()
    params = cfg.scheme_params(A, B)
    assert params.s >= 2 * params.L
    assert params.s & (params.s - 1) == 0  # power of two
