"""End-to-end command-line tests, driven in-process through main()."""

from pathlib import Path

import numpy as np
import pytest

from blocknet.cli import main
from blocknet.engine import read_lane_file, write_lane_file

DATA = Path(__file__).parent / "data"


# --- dump-network ---------------------------------------------------------------

def test_dump_network_stdout_matches_golden(capsys):
    assert main(["dump-network", "--network", "oddeven", "--order", "2"]) == 0
    assert capsys.readouterr().out == (DATA / "fig2.net").read_text()


def test_dump_network_to_file(tmp_path, capsys):
    out = tmp_path / "net.txt"
    assert main(["dump-network", "--network", "bitonic", "--order", "3", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("width=8 stages=6")


def test_dump_network_from_file_roundtrip(tmp_path, capsys):
    assert main(["dump-network", "--network-file", str(DATA / "fig2.net")]) == 0
    assert capsys.readouterr().out == (DATA / "fig2.net").read_text()


# --- verify -----------------------------------------------------------------------

def test_verify_good_network_exits_zero(capsys):
    code = main(["verify", "--network", "oddeven", "--order", "2",
                 "--samples", "300", "--budget", "20000"])
    out = capsys.readouterr().out
    assert code == 0
    assert "pass" in out.lower()


def test_verify_naive_swap_prints_witness(capsys):
    code = main(["verify", "--network", "bitonic", "--order", "2",
                 "--comparator", "naive-swap", "--samples", "300"])
    out = capsys.readouterr().out
    assert code == 1
    assert "counterexample found" in out
    assert "BlockFrame" in out


def test_verify_broken_network_file_fails(capsys):
    code = main(["verify", "--network-file", str(DATA / "broken.net"),
                 "--samples", "200", "--budget", "5000"])
    assert code == 1
    assert "fail" in capsys.readouterr().out.lower()


def test_verify_missing_network_file_is_usage_error(capsys):
    assert main(["verify", "--network-file", "/nonexistent/net.txt"]) == 2


def test_verify_malformed_network_file(tmp_path, capsys):
    bad = tmp_path / "bad.net"
    bad.write_text("width=banana stages=1\n0:1:A\n")
    assert main(["verify", "--network-file", str(bad)]) == 2


def test_verify_csv_report(tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = main(["verify", "--network", "bitonic", "--order", "1",
                 "--samples", "100", "--budget", "5000", "--csv", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "case_id,verdict,clause,witness"
    assert all(",pass," in line for line in lines[1:])
    assert len(lines) == 4  # three suites, one pass row each


# --- sort --------------------------------------------------------------------------

def test_sort_text_file(tmp_path, capsys, rng):
    src = tmp_path / "keys.txt"
    keys = rng.integers(-500, 500, 400)
    write_lane_file(src, keys)
    assert main(["sort", str(src), "--lanes", "4"]) == 0
    out_path = capsys.readouterr().out.strip()
    assert out_path == f"{src}.sorted"
    np.testing.assert_array_equal(read_lane_file(out_path, "txt"), np.sort(keys))


def test_sort_binary_file_with_explicit_out(tmp_path, capsys, rng):
    src = tmp_path / "keys.bin"
    dst = tmp_path / "sorted.bin"
    keys = rng.integers(0, 10**9, 1000)
    write_lane_file(src, keys)
    assert main(["sort", str(src), "--out", str(dst), "--lanes", "8",
                 "--network", "oddeven", "--inner", "mergesort"]) == 0
    np.testing.assert_array_equal(read_lane_file(dst), np.sort(keys))


def test_sort_empty_file(tmp_path, capsys):
    src = tmp_path / "empty.txt"
    write_lane_file(src, [])
    assert main(["sort", str(src)]) == 0
    assert read_lane_file(f"{src}.sorted", "txt").size == 0


def test_sort_distributed_lanes(tmp_path, capsys, rng):
    paths, parts = [], []
    for i in range(4):
        part = rng.integers(0, 10**6, 250)
        p = tmp_path / f"lane{i}.bin"
        write_lane_file(p, part)
        paths.append(str(p))
        parts.append(part)
    assert main(["sort", *paths, "--distributed", "--workers", "2"]) == 0
    printed = capsys.readouterr().out.strip().splitlines()
    assert printed == [f"{p}.sorted" for p in paths]
    got = np.concatenate([read_lane_file(p) for p in printed])
    np.testing.assert_array_equal(got, np.sort(np.concatenate(parts)))


def test_sort_distributed_text_lanes_stay_text(tmp_path, capsys, rng):
    # the ".sorted" suffix must not flip text lanes to the binary format
    paths, parts = [], []
    for i in range(4):
        part = rng.integers(-500, 500, 100)
        p = tmp_path / f"lane{i}.txt"
        p.write_text("".join(f"{k}\n" for k in part))
        paths.append(str(p))
        parts.append(part)
    assert main(["sort", *paths, "--distributed", "--inner", "builtin"]) == 0
    capsys.readouterr()
    outs = [f"{p}.sorted" for p in paths]
    merged = []
    for p in outs:
        text = Path(p).read_text()          # independent reader: plain int lines
        merged.extend(int(line) for line in text.splitlines())
    assert merged == sorted(np.concatenate(parts).tolist())


def test_sort_distributed_float_text_lanes(tmp_path, capsys, rng):
    # would raise KeyDomainError if outputs were (wrongly) written as binary
    paths, parts = [], []
    for i in range(2):
        part = np.round(rng.normal(size=50), 3)
        p = tmp_path / f"lane{i}.txt"
        p.write_text("".join(f"{k}\n" for k in part))
        paths.append(str(p))
        parts.append(part)
    assert main(["sort", *paths, "--distributed", "--inner", "builtin"]) == 0
    capsys.readouterr()
    got = np.concatenate([read_lane_file(f"{p}.sorted", "txt") for p in paths])
    np.testing.assert_allclose(got, np.sort(np.concatenate(parts)))


def test_sort_distributed_format_override(tmp_path, capsys, rng):
    # text payload in ".dat" files: --format applies to both reads and writes
    paths, parts = [], []
    for i in range(2):
        part = rng.integers(0, 100, 30)
        p = tmp_path / f"lane{i}.dat"
        p.write_text("".join(f"{k}\n" for k in part))
        paths.append(str(p))
        parts.append(part)
    assert main(["sort", *paths, "--distributed", "--inner", "builtin",
                 "--format", "txt"]) == 0
    capsys.readouterr()
    got = np.concatenate([read_lane_file(f"{p}.sorted", "txt") for p in paths])
    np.testing.assert_array_equal(got, np.sort(np.concatenate(parts)))


def test_sort_distributed_single_lane_equals_plain_sort(tmp_path, capsys, rng):
    src = tmp_path / "only.bin"
    keys = rng.integers(0, 1000, 123)
    write_lane_file(src, keys)
    assert main(["sort", str(src), "--distributed"]) == 0
    np.testing.assert_array_equal(read_lane_file(f"{src}.sorted"), np.sort(keys))


def test_sort_distributed_rejects_three_lanes(tmp_path, capsys):
    paths = []
    for i in range(3):
        p = tmp_path / f"l{i}.bin"
        write_lane_file(p, [i])
        paths.append(str(p))
    assert main(["sort", *paths, "--distributed"]) == 2


def test_sort_multiple_inputs_without_distributed(tmp_path, capsys):
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    write_lane_file(a, [1])
    write_lane_file(b, [2])
    assert main(["sort", str(a), str(b)]) == 2


def test_sort_malformed_keys(tmp_path, capsys):
    src = tmp_path / "bad.txt"
    src.write_text("1\ntwo\n")
    assert main(["sort", str(src)]) == 2


def test_sort_missing_file(capsys):
    assert main(["sort", "/nonexistent/keys.bin"]) == 2


# --- bench ----------------------------------------------------------------------------

def test_bench_small_grid(tmp_path, capsys):
    csv_path = tmp_path / "bench.csv"
    code = main([
        "bench", "--algorithms", "sequential", "hybrid-bitonic", "psrs",
        "--sizes", "2000", "--lanes", "4", "--workers", "1", "2",
        "--reps", "2", "--seed", "7", "--csv", str(csv_path),
    ])
    captured = capsys.readouterr()
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "algorithm,n,lanes,workers,repetition,local_sort_ns,merge_ns,total_ns,keys_exchanged"
    # sequential collapses the lane/worker grid to a single point
    rows = [line.split(",") for line in lines[1:]]
    assert sum(1 for r in rows if r[0] == "sequential") == 2
    assert sum(1 for r in rows if r[0] == "hybrid-bitonic") == 2 * 2
    assert "speedup" in captured.out
    assert "sequential" in captured.out


def test_bench_rejects_bad_lane_count(capsys):
    code = main(["bench", "--algorithms", "hybrid-bitonic",
                 "--sizes", "100", "--lanes", "3", "--workers", "1", "--reps", "1"])
    assert code == 2


def test_bench_distributed_mode(tmp_path, capsys):
    code = main(["bench", "--algorithms", "hybrid-oddeven", "--sizes", "1024",
                 "--lanes", "4", "--workers", "1", "--reps", "1", "--distributed"])
    assert code == 0
    assert "speedup" in capsys.readouterr().out


# --- kernel-bench ------------------------------------------------------------------------

def test_kernel_bench(tmp_path, capsys):
    csv_path = tmp_path / "kernels.csv"
    code = main(["kernel-bench", "--sizes", "4096", "--reps", "2", "--csv", str(csv_path)])
    captured = capsys.readouterr()
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "backend,n,repetition,merge_ns"
    assert "active kernel backend:" in captured.err


def test_kernel_bench_stdout(capsys):
    assert main(["kernel-bench", "--sizes", "1024", "--reps", "1"]) == 0
    assert capsys.readouterr().out.startswith("backend,n,repetition,merge_ns")
