import math
import os

import numpy as np
import pytest

from crolab.cli import load_config, main
from crolab.experiment import load_records, load_summary


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# bench list

def test_bench_list(capsys):
    code, out, _ = run_cli(capsys, "bench", "list")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "id,name,dim,lower,upper,category,fe_limit"
    assert len(lines) == 24
    by_id = {line.split(",")[0]: line for line in lines[1:]}
    assert by_id["f3"].endswith(",I,250000")
    assert by_id["f16"].endswith(",III,1250")
    f17 = by_id["f17"].split(",")
    assert f17[3] == "-5.0;0.0" and f17[4] == "10.0;15.0"


# ---------------------------------------------------------------------------
# run

def test_run_writes_reports_and_prints_summary(tmp_path, capsys):
    out_dir = str(tmp_path / "out")
    code, out, _ = run_cli(capsys, "run", "--function", "f16",
                           "--distribution", "gaussian", "--runs", "3",
                           "--seed", "5", "--fe-limit", "600",
                           "--out-dir", out_dir)
    assert code == 0
    records = load_records(os.path.join(out_dir, "runs.csv"))
    assert len(records) == 3
    assert all(600 <= r.fe_used <= 601 for r in records)
    rows = load_summary(os.path.join(out_dir, "summary.csv"))
    assert len(rows) == 1 and rows[0].rank == 1
    assert "function,variant,mean,std,best,rank" in out
    assert "f16,gaussian," in out


def test_run_resumes_from_journal(tmp_path, capsys):
    out_dir = str(tmp_path / "out")
    args = ("run", "--function", "f16", "--distribution", "cauchy",
            "--runs", "3", "--seed", "5", "--fe-limit", "600",
            "--out-dir", out_dir)
    assert run_cli(capsys, *args)[0] == 0
    first = load_records(os.path.join(out_dir, "runs.csv"))
    assert run_cli(capsys, *args)[0] == 0
    second = load_records(os.path.join(out_dir, "runs.csv"))
    assert first == second  # nothing re-ran, journal untouched


def test_run_unknown_distribution_is_usage_error(tmp_path, capsys):
    code, _, err = run_cli(capsys, "run", "--function", "f1",
                           "--distribution", "levy",
                           "--out-dir", str(tmp_path / "x"))
    assert code == 2
    assert "levy" in err


def test_run_missing_function_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "run", "--distribution", "gaussian")
    assert code == 2


def test_run_uses_table_fe_limit_when_omitted(tmp_path, capsys):
    out_dir = str(tmp_path / "out")
    code, _, _ = run_cli(capsys, "run", "--function", "f16",
                         "--distribution", "gaussian", "--runs", "1",
                         "--seed", "1", "--out-dir", out_dir)
    assert code == 0
    records = load_records(os.path.join(out_dir, "runs.csv"))
    assert 1_250 <= records[0].fe_used <= 1_251


def test_run_trace_emits_convergence_csv(tmp_path, capsys):
    out_dir = str(tmp_path / "out")
    code, _, _ = run_cli(capsys, "run", "--function", "f16",
                         "--distribution", "gaussian", "--runs", "2",
                         "--seed", "5", "--fe-limit", "600",
                         "--out-dir", out_dir, "--trace-stride", "100")
    assert code == 0
    trace_path = os.path.join(out_dir, "trace_f16_gaussian_r001.csv")
    with open(trace_path) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "fe_used,best_value"
    fes = [int(line.split(",")[0]) for line in lines[1:]]
    assert fes[0] == 100 and fes == sorted(fes)


# ---------------------------------------------------------------------------
# suite

def test_suite_subset(tmp_path, capsys):
    out_dir = str(tmp_path / "suite")
    code, out, _ = run_cli(capsys, "suite", "--functions", "f16,f18",
                           "--distributions", "gaussian,rayleigh",
                           "--runs", "2", "--seed", "3",
                           "--out-dir", out_dir)
    assert code == 0
    records = load_records(os.path.join(out_dir, "runs.csv"))
    assert len(records) == 2 * 2 * 2
    rows = load_summary(os.path.join(out_dir, "summary.csv"))
    assert len(rows) == 4
    with open(os.path.join(out_dir, "categories.csv")) as fh:
        cat_lines = fh.read().splitlines()
    assert cat_lines[0] == "category,variant,avg_rank"
    assert len(cat_lines) == 3  # one category, two variants
    assert "category,variant,avg_rank" in out


def test_suite_function_range_syntax(tmp_path, capsys):
    out_dir = str(tmp_path / "suite")
    code, _, _ = run_cli(capsys, "suite", "--functions", "f16..f18",
                         "--distributions", "gaussian", "--runs", "1",
                         "--seed", "3", "--out-dir", out_dir)
    assert code == 0
    records = load_records(os.path.join(out_dir, "runs.csv"))
    assert sorted({r.function for r in records}) == ["f16", "f17", "f18"]


def test_suite_bad_function_token(tmp_path, capsys):
    code, _, err = run_cli(capsys, "suite", "--functions", "f1,banana",
                           "--out-dir", str(tmp_path / "x"))
    assert code == 2


# ---------------------------------------------------------------------------
# sample

def test_sample_deterministic(tmp_path, capsys):
    code, out1, _ = run_cli(capsys, "sample", "--distribution", "gaussian",
                            "--scale", "1.0", "-n", "5", "--seed", "42")
    assert code == 0
    code, out2, _ = run_cli(capsys, "sample", "--distribution", "gaussian",
                            "--scale", "1.0", "-n", "5", "--seed", "42")
    assert out1 == out2
    assert len(out1.strip().splitlines()) == 5


def test_sample_rejects_bad_input(capsys, tmp_path):
    assert run_cli(capsys, "sample", "--distribution", "levy",
                   "--scale", "1.0", "-n", "5")[0] == 2
    assert run_cli(capsys, "sample", "--distribution", "gaussian",
                   "--scale", "-1.0", "-n", "5")[0] == 2
    assert run_cli(capsys, "sample", "--distribution", "gaussian",
                   "--scale", "1.0", "-n", "0")[0] == 2


def test_sample_cauchy_median_bound(tmp_path, capsys):
    out_file = str(tmp_path / "v.txt")
    code, _, _ = run_cli(capsys, "sample", "--distribution", "cauchy",
                         "--scale", "1.0", "-n", "100000", "--seed", "6",
                         "--out", out_file)
    assert code == 0
    values = np.loadtxt(out_file)
    assert -0.02 <= np.median(values) <= 0.02


def test_sample_modified_rayleigh_mean_bound(tmp_path, capsys):
    out_file = str(tmp_path / "v.txt")
    code, _, _ = run_cli(capsys, "sample", "--distribution", "rayleigh",
                         "--scale", "1.0", "-n", "100000", "--seed", "6",
                         "--out", out_file)
    assert code == 0
    values = np.loadtxt(out_file)
    assert -0.02 <= values.mean() <= 0.02


# ---------------------------------------------------------------------------
# pdf

def test_pdf_gaussian_table(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "pdf", "--distribution", "gaussian",
                           "--scale", "1.0", "--x-min", "-5", "--x-max", "5",
                           "--steps", "201")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,pdf"
    xs, ys = zip(*((float(a), float(b)) for a, b in
                   (line.split(",") for line in lines[1:])))
    assert len(xs) == 201
    peak_idx = max(range(len(ys)), key=ys.__getitem__)
    assert xs[peak_idx] == 0.0
    assert ys[peak_idx] == pytest.approx(0.39894, abs=1e-5)
    # symmetric table (up to grid rounding)
    assert np.allclose(ys, ys[::-1], rtol=1e-12, atol=0.0)
    # trapezoid mass close to one
    assert np.trapezoid(ys, xs) == pytest.approx(1.0, abs=1e-3)


def test_pdf_modified_rayleigh_center_value(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "pdf", "--distribution", "rayleigh",
                           "--scale", "1.0", "--x-min", "-5", "--x-max", "5",
                           "--steps", "201")
    assert code == 0
    table = dict(line.split(",") for line in out.strip().splitlines()[1:])
    assert float(table["0.0"]) == pytest.approx(math.exp(-0.5), abs=1e-9)


def test_pdf_usage_errors(capsys):
    assert run_cli(capsys, "pdf", "--distribution", "gaussian", "--scale", "1",
                   "--x-min", "0", "--x-max", "1", "--steps", "1")[0] == 2
    assert run_cli(capsys, "pdf", "--distribution", "gaussian", "--scale", "1",
                   "--x-min", "2", "--x-max", "1")[0] == 2
    assert run_cli(capsys, "pdf", "--distribution", "rayleigh", "--scale", "1",
                   "--location", "0.5", "--x-min", "0", "--x-max", "1")[0] == 2


def test_pdf_location_shifts_gaussian(capsys):
    code, out, _ = run_cli(capsys, "pdf", "--distribution", "gaussian",
                           "--scale", "1.0", "--location", "2.0",
                           "--x-min", "-5", "--x-max", "5", "--steps", "101")
    assert code == 0
    table = {float(a): float(b) for a, b in
             (line.split(",") for line in out.strip().splitlines()[1:])}
    assert table[2.0] == max(table.values())


# ---------------------------------------------------------------------------
# config files

def test_config_roundtrip(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# experiment configuration\n"
        "function = f16\n"
        "distribution = gaussian\n"
        "runs = 2\n"
        "seed = 11\n"
        "fe_limit = 600   # small budget for testing\n"
        f"out_dir = {tmp_path / 'out'}\n"
    )
    code, _, _ = run_cli(capsys, "run", "--config", str(cfg))
    assert code == 0
    records = load_records(str(tmp_path / "out" / "runs.csv"))
    assert len(records) == 2


def test_config_unknown_key_is_hard_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("function = f16\ndistro = gaussian\n")
    code, _, err = run_cli(capsys, "run", "--config", str(cfg))
    assert code == 2
    assert "distro" in err


def test_config_bad_value(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("runs = soon\n")
    with pytest.raises(ValueError):
        load_config(str(cfg))


def test_flag_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    out_a = tmp_path / "a"
    cfg.write_text("function = f16\ndistribution = gaussian\n"
                   "runs = 1\nseed = 11\nfe_limit = 600\n"
                   f"out_dir = {out_a}\n")
    code, _, _ = run_cli(capsys, "run", "--config", str(cfg),
                         "--distribution", "cauchy")
    assert code == 0
    records = load_records(str(out_a / "runs.csv"))
    assert records[0].variant == "cauchy"
