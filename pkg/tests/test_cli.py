import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from chadc.cli import main, parse_sizes
from chadc.errors import UserError

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("CHADC_UPDATE_GOLDEN") == "1"


@pytest.fixture(autouse=True)
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as e:
        code = e.code
    out, err = capsys.readouterr()
    return code, out, err


def golden(name, text):
    path = GOLDEN / name
    if UPDATE:
        path.parent.mkdir(exist_ok=True)
        path.write_text(text)
    assert text == path.read_text()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


MUL = "tests/corpus/mul.chad"


def test_grad_example(capsys):
    code, out, _ = run(capsys, "grad", MUL, "--mode", "monadic", "--point", '{"x":3,"y":2}',
                       "--seed", "1")
    assert code == 0
    assert json.loads(out) == {"x": 2.0, "y": 3.0}
    golden("grad_mul.json", out)


@pytest.mark.parametrize("mode", ["naive-dense", "naive-treemap", "monadic", "naive-ho",
                                  "defunctionalise", "closure-chad"])
def test_grad_modes_agree(capsys, mode):
    code, out, _ = run(capsys, "grad", "tests/corpus/case_pair.chad", "--mode", mode,
                       "--point", "[1.5, 0.5]")
    assert code == 0
    golden("grad_case_pair.json", out)


def test_grad_structured_inputs(capsys, tmp_path):
    code, out, _ = run(capsys, "grad", "tests/corpus/arr_dot.chad",
                       "--point", '{"xs": [1, 2, 3], "ys": [4, 5, 6]}')
    assert code == 0
    assert json.loads(out) == {"xs": [4.0, 5.0, 6.0], "ys": [1.0, 2.0, 3.0]}
    swap = write(tmp_path, "swap.chad", "(program (args (x Real) (y Real)) (pair y (op mul x y)))")
    code, out, _ = run(capsys, "grad", swap, "--point", "[1, 2]", "--seed", "[10, 20]")
    assert code == 0
    golden("grad_pair_swap.json", out)


def test_check_and_run(capsys):
    code, out, _ = run(capsys, "check", "tests/corpus/arr_dot.chad")
    assert code == 0
    golden("check_arr_dot.json", out)
    code, out, _ = run(capsys, "run", MUL, "--point", '{"x":3,"y":2}')
    assert code == 0
    assert json.loads(out) == {"value": 6.0, "cost": 5}


def test_transform_print_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "transform", MUL, "--print")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    golden("transform_mul.txt", outs[0])
    r = subprocess.run([sys.executable, "-m", "chadc.cli", "transform", MUL, "--print"],
                       capture_output=True, text=True, cwd=ROOT)
    assert r.stdout == outs[0]


def test_transform_summary(capsys):
    code, out, _ = run(capsys, "transform", "tests/corpus/ho_tn.chad", "--mode", "defunctionalise")
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "defunctionalise" and data["derivative_size"] > data["source_size"]


def test_compare_oracle(capsys):
    code, out, _ = run(capsys, "compare-oracle", "tests/corpus/poly.chad",
                       "tests/corpus/ho_choose.chad", "--mode", "defunctionalise", "--points", "3")
    assert code == 0
    data = json.loads(out)
    assert len(data) == 2
    assert all(r["max_rel_err_forward"] <= 1e-10 and r["max_rel_err_fd"] <= 1e-5 for r in data)


def test_type_error_exits_1(capsys, tmp_path):
    bad = write(tmp_path, "bad.chad", "(program (args (x Real)) (fst x))")
    code, out, err = run(capsys, "check", bad)
    assert code == 1 and out == "" and "fst of non-product" in err


def test_parse_error_exits_1(capsys, tmp_path):
    bad = write(tmp_path, "bad.chad", "(program (args (x Real)) (op add x")
    code, _, err = run(capsys, "check", bad)
    assert code == 1 and "1:" in err


@pytest.mark.parametrize("argv", [
    ["grad", MUL, "--frobnicate"],
    ["grad", MUL, "--mode", "fastest"],
    ["frob"],
    ["check", "no/such/file.chad"],
    ["grad", MUL],
    ["grad", MUL, "--point", "{not json"],
    ["grad", MUL, "--point", '{"x": 1}'],
    ["bench", "--family", "t_magic", "--sizes", "9..3"],
    ["bench", "--family", "t_magic", "--sizes", "1..1"],
])
def test_user_errors_exit_1(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 1 and out == ""


def test_runtime_error_exits_2(capsys, tmp_path):
    p = write(tmp_path, "log.chad", "(program (args (x Real)) (op log x))")
    code, out, err = run(capsys, "run", p, "--point", "[-1]")
    assert code == 2 and "PartialOp" in err and out == ""


def test_naive_mode_rejects_arrays(capsys):
    code, _, err = run(capsys, "grad", "tests/corpus/arr_sum.chad", "--mode", "naive-dense",
                       "--point", "[[1, 2]]")
    assert code == 1 and "arrays" in err


def test_bench_failure_exits_3(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "bench", "--family", "t_magic", "--mode", "naive-treemap",
                       "--sizes", "64..4096", "--out", str(out_path))
    assert code == 3
    data = json.loads(out)
    assert data["pass"] is False
    assert data["rows"][-1]["adjusted_ratio"] > data["rows"][0]["adjusted_ratio"]
    assert json.loads(out_path.read_text()) == data
    assert out_path.with_suffix(".png").exists()


def test_bench_report_golden(capsys):
    code, out, _ = run(capsys, "bench", "--family", "deep-let", "--sizes", "64..512")
    assert code == 0
    golden("bench_deep_let.json", out)


def test_parse_sizes():
    assert parse_sizes("64..1024") == [64, 128, 256, 512, 1024]
    assert parse_sizes("100..300") == [128, 256]
    assert parse_sizes("5,3,9") == [3, 5, 9]
    with pytest.raises(UserError):
        parse_sizes("x")


def test_console_script():
    r = subprocess.run(["chadc", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("chadc ")
