from __future__ import annotations

import subprocess
import sys
from itertools import product

import numpy as np
import pytest

from kcomp import multifunc, numtheory
from kcomp._kernels import BACKENDS, KIND_CODES, backend_name, get_backend, numpy_kernels
from kcomp.multifunc import CoprimalityConstraint as CC
from kcomp.suites import _divisor_csr


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("KCOMP_BACKEND", "numpy")
    assert get_backend() is numpy_kernels
    assert backend_name(get_backend()) == "numpy"
    monkeypatch.setenv("KCOMP_BACKEND", "numba")
    assert backend_name(get_backend()) == "numba"
    with pytest.raises(ValueError):
        get_backend("fortran")


def test_env_flag_reaches_subprocess():
    code = "from kcomp._kernels import backend_name; print(backend_name())"
    out = subprocess.run(
        [sys.executable, "-c", code], env={"KCOMP_BACKEND": "numpy", "PATH": ""}, capture_output=True, text=True
    )
    assert out.stdout.strip() == "numpy"


@pytest.mark.parametrize("kind,k,param", [("all", 3, 0), ("split", 4, 2), ("twise", 4, 2), ("twise", 5, 3)])
def test_brute_backends_agree(kind, k, param):
    spf = numtheory.smallest_prime_factors(400)
    ns = [60, 97, 120] if k < 5 else [40, 47]
    a = [get_backend("numba").brute_count(n, k, KIND_CODES[kind], param, spf) for n in ns]
    b = [get_backend("numpy").brute_count(n, k, KIND_CODES[kind], param, spf) for n in ns]
    assert a == b


@pytest.mark.parametrize("c", [CC.split(3, 1), CC.twise(3, 2), CC.split(4, 2), CC.twise(4, 3)])
def test_divisor_sums_backends_agree(c):
    limit = 14 if c.k == 3 else 8
    tuples = np.array(list(product(range(1, limit + 1), repeat=c.k)), dtype=np.int64)
    max_exp = multifunc.max_exponent(limit)
    table = multifunc.local_table(c, max_exp)
    spf = numtheory.smallest_prime_factors(limit)
    ptr, val = _divisor_csr(limit)
    res = [get_backend(b).divisor_sums(tuples, c.k, table, max_exp + 1, spf, ptr, val) for b in BACKENDS]
    ind = [get_backend(b).indicators(tuples, c.k, KIND_CODES[c.kind], c.param) for b in BACKENDS]
    assert np.array_equal(res[0], res[1])
    assert np.array_equal(ind[0], ind[1])
    assert np.array_equal(res[0], ind[0])


def test_indicators_match_python():
    tuples = np.array(list(product(range(1, 13), repeat=3)), dtype=np.int64)
    for c in (CC.split(3, 2), CC.twise(3, 2), CC.twise(3, 3)):
        fn = multifunc.theta if c.kind == "split" else multifunc.rho
        expect = [fn(3, c.param, tuple(int(v) for v in row)) for row in tuples]
        for b in BACKENDS:
            assert get_backend(b).indicators(tuples, 3, KIND_CODES[c.kind], c.param).tolist() == expect


def test_reciprocal_sum_backends_agree():
    c = CC.twise(3, 2)
    table = multifunc.local_table(c, 4)
    spf = numtheory.smallest_prime_factors(20)
    for delta in (1, 2, 6):
        a = get_backend("numba").reciprocal_sum(3, 20, delta, table, 5, spf)
        b = get_backend("numpy").reciprocal_sum(3, 20, delta, table, 5, spf)
        assert a == pytest.approx(b, rel=1e-13, abs=1e-15)


def test_log_factor_sum_backends_agree():
    primes = numtheory.prime_array(200_000)[100:]
    q = np.array([-3.0, 3.0], dtype=np.float64)  # 3x - 3
    a = get_backend("numba").log_factor_sum(primes, q, 3)
    b = get_backend("numpy").log_factor_sum(primes, q, 3)
    assert a[0] == pytest.approx(b[0], rel=1e-12)
    assert a[1:] == pytest.approx(b[1:], rel=1e-15)
    expect = sum(np.log1p(-(3.0 * p - 3.0) / float(p) ** 3) for p in primes.tolist())
    assert a[0] == pytest.approx(expect, rel=1e-10)
