"""The numba and numpy kernel backends must agree exactly."""

import numpy as np
import pytest

from multact_lab._backend import backend_name, load_kernels

knp = load_kernels("numpy")
try:
    knb = load_kernels("numba")
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")


def test_active_backend_is_known():
    assert backend_name() in ("numba", "numpy")


def test_spf_sieve_agree():
    for limit in (2, 3, 100, 10000):
        assert np.array_equal(knp.spf_sieve(limit), knb.spf_sieve(limit))


def test_omega_agree():
    spf = knp.spf_sieve(20000)
    assert np.array_equal(knp.omega_from_spf(spf), knb.omega_from_spf(spf))


def test_tables_agree():
    spf = knp.spf_sieve(5000)
    vals = np.zeros(5001, dtype=np.int64)
    rng = np.random.default_rng(0)
    primes = np.flatnonzero(spf == np.arange(5001))
    primes = primes[primes >= 2]
    vals[primes] = rng.integers(-3, 4, size=len(primes))
    assert np.array_equal(
        knp.additive_table(spf, vals), knb.additive_table(spf, vals)
    )
    cvals = np.zeros(5001, dtype=np.complex128)
    cvals[primes] = np.exp(2j * np.pi * rng.random(len(primes)))
    a = knp.mult_table(spf, cvals)
    b = knb.mult_table(spf, cvals)
    assert np.allclose(a, b, atol=1e-12)


def test_progression_sieve_agree():
    spf = knp.spf_sieve(1000)
    primes = np.flatnonzero(spf == np.arange(1001))
    primes = primes[primes >= 2].astype(np.int64)
    for Q, b, N in ((1, 0, 500), (12, 1, 400), (1296, 1, 300), (6, -2, 100)):
        def normalize(res):
            sn, sp, se, rem = res
            order = np.lexsort((np.asarray(sp), np.asarray(sn)))
            merged = {}
            for i in order:
                key = (int(np.asarray(sn)[i]), int(np.asarray(sp)[i]))
                merged[key] = merged.get(key, 0) + int(np.asarray(se)[i])
            return merged, [int(r) for r in rem]

        m1, r1 = normalize(knp.progression_sieve(Q, b, N, primes))
        m2, r2 = normalize(knb.progression_sieve(Q, b, N, primes))
        assert m1 == m2
        assert r1 == r2


def test_joint_counts_agree():
    rng = np.random.default_rng(5)
    N = 60
    T = 3
    alpha = np.array([1, 0, 1], dtype=np.int64)
    beta = np.array([0, 1, 2], dtype=np.int64)
    woff = np.array([1, 1, 3], dtype=np.int64)
    wlen = np.array([N, N, 3 * N - 2], dtype=np.int64)
    row_off = np.array([0, 1, 2, 3], dtype=np.int64)
    row_acc = np.array([0, 0, 1], dtype=np.int64)
    wmax = int(wlen.max())
    tab = rng.integers(-5, 6, size=(3, wmax)).astype(np.int16)
    const = np.array([1, 0], dtype=np.int64)
    dims = np.array([4, 3], dtype=np.int64)
    for fc in (0, 1, 3):
        for grid in ((1, 0, 1, 0), (3, 1, 2, 0)):
            c1 = np.zeros(12, dtype=np.int64)
            c2 = np.zeros(12, dtype=np.int64)
            e1 = knp.joint_counts_grid(
                N, alpha, beta, woff, wlen, row_off, row_acc, tab, const, dims,
                fc, *grid, c1
            )
            e2 = knb.joint_counts_grid(
                N, alpha, beta, woff, wlen, row_off, row_acc, tab, const, dims,
                fc, *grid, c2
            )
            assert int(e1) == int(e2)
            assert np.array_equal(c1, c2)


def test_box_norm_powers_agree():
    rng = np.random.default_rng(9)
    for N in (8, 33, 100):
        a = np.exp(2j * np.pi * rng.random(N))
        assert knp.u1_pow(a) == pytest.approx(knb.u1_pow(a), abs=1e-12)
        assert knp.u2_pow(a) == pytest.approx(knb.u2_pow(a), abs=1e-12)
        assert knp.u3_pow(a) == pytest.approx(knb.u3_pow(a), abs=1e-12)


def test_indicator_triple_max_agree():
    rng = np.random.default_rng(2)
    M = 211
    pre = rng.random((12, M)) < 0.4
    base = rng.random(M) < 0.5
    pairs = np.array(
        [[i, j, (i + j) % 12] for i in range(12) for j in range(12)],
        dtype=np.int64,
    )
    v1 = knp.indicator_triple_max(pre, pairs, base)
    v2 = knb.indicator_triple_max(pre, pairs, base)
    assert v1 == pytest.approx(v2, abs=1e-15)
