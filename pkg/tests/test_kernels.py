"""Backend parity for the merge/overlap kernels.

Every available backend is checked against slow, obviously-correct oracles
written here, never against the other backend alone.
"""

import os
import subprocess
import sys
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blocknet import kernels

BACKENDS = sorted(kernels.available_backends().items())


def merge_oracle(a, b):
    """Two-pointer merge; ties take from the first operand."""
    out, i, j = [], 0, 0
    a, b = list(a), list(b)
    while i < len(a) and j < len(b):
        if a[i] <= b[j]:
            out.append(a[i]); i += 1
        else:
            out.append(b[j]); j += 1
    return out + a[i:] + b[j:]


def overlap_oracle(a, b):
    return sum((Counter(list(a)) & Counter(list(b))).values())


def test_numpy_backend_always_available():
    assert "numpy" in kernels.available_backends()
    assert kernels.backend_name() in kernels.available_backends()


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_merge_against_oracle(name, backend, rng):
    for _ in range(50):
        a = np.sort(rng.integers(-100, 100, rng.integers(0, 40)))
        b = np.sort(rng.integers(-100, 100, rng.integers(0, 40)))
        got = backend.merge(a, b)
        assert got.dtype == np.int64
        assert got.tolist() == merge_oracle(a, b)


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_merge_float_path(name, backend, rng):
    a = np.sort(rng.normal(size=31))
    b = np.sort(rng.normal(size=17))
    got = backend.merge(a, b)
    assert got.dtype == np.float64
    np.testing.assert_array_equal(got, np.sort(np.concatenate([a, b]), kind="stable"))


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_merge_edge_cases(name, backend):
    empty = np.empty(0, dtype=np.int64)
    one = np.array([7], dtype=np.int64)
    assert backend.merge(empty, empty).tolist() == []
    assert backend.merge(empty, one).tolist() == [7]
    assert backend.merge(one, empty).tolist() == [7]
    big = np.array([np.iinfo(np.int64).min, np.iinfo(np.int64).max], dtype=np.int64)
    assert backend.merge(big, one).tolist() == [big[0], 7, big[1]]


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_merge_accepts_readonly_input(name, backend):
    a = np.array([1, 3], dtype=np.int64)
    a.flags.writeable = False
    assert backend.merge(a, np.array([2], dtype=np.int64)).tolist() == [1, 2, 3]


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_overlap_against_oracle(name, backend, rng):
    for _ in range(50):
        a = np.sort(rng.integers(0, 15, rng.integers(0, 30)))
        b = np.sort(rng.integers(0, 15, rng.integers(0, 30)))
        assert backend.overlap(a, b) == overlap_oracle(a, b)


@given(
    a=st.lists(st.integers(-20, 20), max_size=25).map(sorted),
    b=st.lists(st.integers(-20, 20), max_size=25).map(sorted),
)
def test_dispatched_kernels_match_oracles(a, b):
    xa = np.asarray(a, dtype=np.int64)
    xb = np.asarray(b, dtype=np.int64)
    assert kernels.merge(xa, xb).tolist() == merge_oracle(a, b)
    assert kernels.overlap(xa, xb) == overlap_oracle(a, b)


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("BLOCKNET_KERNELS", None)
    else:
        env["BLOCKNET_KERNELS"] = env_value
    return subprocess.run(
        [sys.executable, "-c", "import blocknet.kernels as k; print(k.backend_name())"],
        capture_output=True, text=True, env=env,
    )


def test_env_forces_numpy_backend():
    proc = _backend_in_subprocess("numpy")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "numpy"


@pytest.mark.skipif("native" not in kernels.available_backends(),
                    reason="native kernel not built")
def test_env_forces_native_backend():
    proc = _backend_in_subprocess("native")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "native"


def test_env_rejects_unknown_backend():
    proc = _backend_in_subprocess("fortran")
    assert proc.returncode != 0
    assert "BLOCKNET_KERNELS" in proc.stderr
