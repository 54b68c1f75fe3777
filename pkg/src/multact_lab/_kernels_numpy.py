"""Pure-numpy implementations of the hot kernels.

This is the fallback backend selected by ``MULTACT_BACKEND=numpy`` (or when
numba is not importable).  Every function here is the contract of record:

``spf_sieve(limit)``
    ``uint32`` array of length ``limit+1``; entry ``n`` is the smallest prime
    factor of ``n`` for ``n >= 2``, and ``spf[p] == p`` for primes.  Entries
    0 and 1 are 0.

``omega_from_spf(spf)``
    ``uint8`` array; entry ``n`` is the number of prime factors of ``n``
    counted with multiplicity (0 for n <= 1).

``additive_table(spf, prime_vals)`` / ``mult_table(spf, prime_vals)``
    Completely additive / multiplicative extension of the per-prime values
    (``prime_vals`` is indexed by integer; only prime slots are read).

``progression_sieve(Q, b, N, primes)``
    Trial division of ``Q*(i+1) + b`` for ``i = 0..N-1`` by the given primes.
    Returns flat slot arrays ``(n_index, prime, exponent)`` -- possibly with
    repeated ``(n_index, prime)`` pairs that the caller must merge -- plus the
    unfactored remainders.  All inputs must fit comfortably in int64.

``joint_counts_grid(...)``
    Scan the square (m, n) in [1,N]^2, optionally restricted to a congruence
    grid and an order filter, accumulate per-slot generator exponents from
    per-term lookup tables, and histogram the mixed-radix joint class.
    Returns the number of scanned points whose table window was violated.

``u1_pow / u2_pow / u3_pow``
    The box-norm powers ||a||^{2^s} on Z_N, computed from the inductive
    definition (no Fourier shortcut).

``indicator_triple_max(pre, pairs, base)``
    Max over index triples of the mean of four AND-ed indicator rows.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def spf_sieve(limit):
    spf = np.zeros(limit + 1, dtype=np.uint32)
    i = 2
    while i * i <= limit:
        if spf[i] == 0:
            sl = spf[i * i :: i]
            sl[sl == 0] = i
        i += 1
    idx = np.arange(limit + 1, dtype=np.uint32)
    unset = spf == 0
    unset[:2] = False
    spf[unset] = idx[unset]
    return spf


def _primes_from_spf(spf):
    idx = np.arange(spf.shape[0], dtype=np.uint32)
    mask = spf == idx
    mask[:2] = False
    return np.flatnonzero(mask).astype(np.int64)


def omega_from_spf(spf):
    limit = spf.shape[0] - 1
    om = np.zeros(limit + 1, dtype=np.uint8)
    # one increment per prime power q = p^k dividing n
    for p in _primes_from_spf(spf):
        q = int(p)
        while q <= limit:
            om[q::q] += 1
            q *= int(p)
    return om


def additive_table(spf, prime_vals):
    limit = spf.shape[0] - 1
    out = np.zeros(limit + 1, dtype=np.int64)
    for p in _primes_from_spf(spf):
        v = prime_vals[p]
        q = int(p)
        while q <= limit:
            out[q::q] += v
            q *= int(p)
    return out


def mult_table(spf, prime_vals):
    limit = spf.shape[0] - 1
    out = np.ones(limit + 1, dtype=np.complex128)
    out[0] = 0.0
    for p in _primes_from_spf(spf):
        v = prime_vals[p]
        q = int(p)
        while q <= limit:
            out[q::q] *= v
            q *= int(p)
    return out


def progression_sieve(Q, b, N, primes):
    Q = int(Q)
    b = int(b)
    N = int(N)
    vals = Q * np.arange(1, N + 1, dtype=np.int64) + b
    rem = vals.copy()
    ns, ps, es = [], [], []

    for p in primes:
        p = int(p)
        if Q % p == 0:
            if b % p != 0:
                continue
            hits = np.arange(N, dtype=np.int64)
        else:
            r = ((-b) % p) * pow(Q % p, -1, p) % p
            start = r if r >= 1 else p
            hits = np.arange(start - 1, N, p, dtype=np.int64)
        if hits.size == 0:
            continue
        hits = hits[rem[hits] % p == 0]
        while hits.size:
            rem[hits] //= p
            ns.append(hits)
            ps.append(np.full(hits.shape[0], p, dtype=np.int64))
            es.append(np.ones(hits.shape[0], dtype=np.int32))
            hits = hits[rem[hits] % p == 0]

    if ns:
        slot_n = np.concatenate(ns)
        slot_p = np.concatenate(ps)
        slot_e = np.concatenate(es)
    else:
        slot_n = np.empty(0, dtype=np.int64)
        slot_p = np.empty(0, dtype=np.int64)
        slot_e = np.empty(0, dtype=np.int32)
    return slot_n, slot_p, slot_e, rem


_CHUNK = 512  # fixed row-chunk size keeps accumulation order deterministic


def joint_counts_grid(
    N,
    alpha,
    beta,
    woff,
    wlen,
    row_off,
    row_acc,
    tab,
    const_acc,
    dims,
    filter_code,
    ga1,
    gb1,
    ga2,
    gb2,
    counts,
):
    T = alpha.shape[0]
    A = dims.shape[0]
    tab64 = tab.astype(np.int64)
    ns = np.arange(1, N + 1, dtype=np.int64)
    col_ok = np.ones(N, dtype=bool)
    if ga2 > 1:
        col_ok &= ns % ga2 == gb2
    excluded = 0
    radix = np.ones(A, dtype=np.int64)
    for a in range(A - 2, -1, -1):
        radix[a] = radix[a + 1] * dims[a + 1]

    for lo in range(1, N + 1, _CHUNK):
        ms = np.arange(lo, min(lo + _CHUNK, N + 1), dtype=np.int64)
        if ga1 > 1:
            ms = ms[ms % ga1 == gb1]
        if ms.size == 0:
            continue
        sel = np.broadcast_to(col_ok, (ms.size, N)).copy()
        if filter_code == 1:
            sel &= ms[:, None] > ns[None, :]
        elif filter_code == 2:
            sel &= ms[:, None] < ns[None, :]
        elif filter_code == 3:
            sel &= ms[:, None] != ns[None, :]
        valid = sel.copy()
        acc = np.empty((A, ms.size, N), dtype=np.int64)
        acc[:] = np.asarray(const_acc, dtype=np.int64)[:, None, None]
        for t in range(T):
            w = alpha[t] * ms[:, None] + beta[t] * ns[None, :] - woff[t]
            in_win = (w >= 0) & (w < wlen[t])
            valid &= in_win
            w[~in_win] = 0
            for r in range(row_off[t], row_off[t + 1]):
                acc[row_acc[r]] += tab64[r][w]
        jid = np.zeros((ms.size, N), dtype=np.int64)
        for a in range(A):
            jid += (acc[a] % dims[a]) * radix[a]
        good = sel & valid
        if good.any():
            counts += np.bincount(jid[good], minlength=counts.shape[0])
        excluded += int((sel & ~valid).sum())
    return excluded


def u1_pow(a):
    m = np.mean(a)
    return float(m.real * m.real + m.imag * m.imag)


def u2_pow(a):
    N = a.shape[0]
    total = 0.0
    for h in range(N):
        c = np.mean(a * np.conj(np.roll(a, -h)))
        total += float(c.real * c.real + c.imag * c.imag)
    return total / N


def u3_pow(a):
    N = a.shape[0]
    total = 0.0
    for h in range(N):
        total += u2_pow(a * np.conj(np.roll(a, -h)))
    return total / N


def indicator_triple_max(pre, pairs, base):
    M = base.shape[0]
    best = 0.0
    for r in range(pairs.shape[0]):
        i, j, k = int(pairs[r, 0]), int(pairs[r, 1]), int(pairs[r, 2])
        v = float(np.sum(base & pre[i] & pre[j] & pre[k])) / M
        if v > best:
            best = v
    return best
