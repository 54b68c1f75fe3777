"""Numba implementations of the hot kernels.

Signatures and results match ``_kernels_numpy`` exactly; see that module for
the contract of each function.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND = "numba"


@njit(cache=True)
def spf_sieve(limit):
    spf = np.zeros(limit + 1, dtype=np.uint32)
    i = 2
    while i * i <= limit:
        if spf[i] == 0:
            for j in range(i * i, limit + 1, i):
                if spf[j] == 0:
                    spf[j] = i
        i += 1
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
    return spf


@njit(cache=True)
def omega_from_spf(spf):
    n = spf.shape[0]
    om = np.zeros(n, dtype=np.uint8)
    # n // spf[n] < n, so increasing order sees solved subproblems
    for i in range(2, n):
        om[i] = om[i // spf[i]] + 1
    return om


@njit(cache=True)
def additive_table(spf, prime_vals):
    n = spf.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(2, n):
        p = spf[i]
        out[i] = out[i // p] + prime_vals[p]
    return out


@njit(cache=True)
def mult_table(spf, prime_vals):
    n = spf.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    if n > 1:
        out[1] = 1.0 + 0.0j
    for i in range(2, n):
        p = spf[i]
        out[i] = out[i // p] * prime_vals[p]
    return out


@njit(cache=True)
def _modinv(a, p):
    # extended euclid; p prime, 0 < a < p
    t, new_t = 0, 1
    r, new_r = p, a
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


@njit(cache=True)
def progression_sieve(Q, b, N, primes):
    vals = np.empty(N, dtype=np.int64)
    for i in range(N):
        vals[i] = Q * (i + 1) + b
    rem = vals.copy()

    bound = 0
    for k in range(primes.shape[0]):
        p = primes[k]
        bound += N // p + 1
        if Q % p == 0 and b % p == 0:
            bound += N
    slot_n = np.empty(bound, dtype=np.int64)
    slot_p = np.empty(bound, dtype=np.int64)
    slot_e = np.empty(bound, dtype=np.int32)
    cnt = 0

    for k in range(primes.shape[0]):
        p = primes[k]
        if Q % p == 0:
            if b % p != 0:
                continue
            # p divides every term; divide out per element
            for i in range(N):
                e = 0
                while rem[i] % p == 0:
                    rem[i] //= p
                    e += 1
                if e > 0:
                    slot_n[cnt] = i
                    slot_p[cnt] = p
                    slot_e[cnt] = e
                    cnt += 1
            continue
        r = ((-b) % p) * _modinv(Q % p, p) % p
        start = r if r >= 1 else p  # first index value i+1 in the class
        i = start - 1
        while i < N:
            e = 0
            while rem[i] % p == 0:
                rem[i] //= p
                e += 1
            if e > 0:
                slot_n[cnt] = i
                slot_p[cnt] = p
                slot_e[cnt] = e
                cnt += 1
            i += p
    return slot_n[:cnt], slot_p[:cnt], slot_e[:cnt], rem


@njit(cache=True)
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
    acc = np.empty(A, dtype=np.int64)
    excluded = 0
    for m in range(1, N + 1):
        if ga1 > 1 and m % ga1 != gb1:
            continue
        for n in range(1, N + 1):
            if ga2 > 1 and n % ga2 != gb2:
                continue
            if filter_code == 1 and not m > n:
                continue
            if filter_code == 2 and not m < n:
                continue
            if filter_code == 3 and m == n:
                continue
            for a in range(A):
                acc[a] = const_acc[a]
            ok = True
            for t in range(T):
                w = alpha[t] * m + beta[t] * n - woff[t]
                if w < 0 or w >= wlen[t]:
                    ok = False
                    break
                for r in range(row_off[t], row_off[t + 1]):
                    acc[row_acc[r]] += tab[r, w]
            if not ok:
                excluded += 1
                continue
            jid = 0
            for a in range(A):
                jid = jid * dims[a] + acc[a] % dims[a]
            counts[jid] += 1
    return excluded


@njit(cache=True)
def u1_pow(a):
    N = a.shape[0]
    s = 0.0j
    for n in range(N):
        s += a[n]
    s /= N
    return s.real * s.real + s.imag * s.imag


@njit(cache=True)
def u2_pow(a):
    N = a.shape[0]
    total = 0.0
    for h in range(N):
        s = 0.0j
        for n in range(N):
            nh = n + h
            if nh >= N:
                nh -= N
            s += a[n] * np.conj(a[nh])
        s /= N
        total += s.real * s.real + s.imag * s.imag
    return total / N


@njit(cache=True)
def u3_pow(a):
    N = a.shape[0]
    b = np.empty(N, dtype=np.complex128)
    total = 0.0
    for h in range(N):
        for n in range(N):
            nh = n + h
            if nh >= N:
                nh -= N
            b[n] = a[n] * np.conj(a[nh])
        total += u2_pow(b)
    return total / N


@njit(cache=True)
def indicator_triple_max(pre, pairs, base):
    """Max over rows (i,j,k) of ``pairs`` of mean(base & pre[i] & pre[j] & pre[k])."""
    M = base.shape[0]
    best = 0.0
    for r in range(pairs.shape[0]):
        i, j, k = pairs[r, 0], pairs[r, 1], pairs[r, 2]
        c = 0
        for x in range(M):
            if base[x] and pre[i, x] and pre[j, x] and pre[k, x]:
                c += 1
        v = c / M
        if v > best:
            best = v
    return best
