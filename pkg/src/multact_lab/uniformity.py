"""Gowers box norms on Z_N, mixed orbit seminorms, and related diagnostics.

``gowers_norm`` computes the inductive definition directly (the cyclic
convolution identity lives separately in ``gowers_u2_fft`` so the two routes
stay independent checks of one another).  The mixed seminorm of an observable
averages the 2^s-th powers of the box norms of its orbit sequences over the
state space; it is reported per N, never as a limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels
from .actions import DilationAction, Observable, PermutationAction
from .errors import CostGuardError, DegenerateRangeError, MultactError, UnsupportedActionError
from .numtheory import SieveContext, default_context

_K = kernels()

#: work-unit guard for the direct recursion (roughly N^s elementary products)
RECURSION_WORK_GUARD = 10**9
#: orders above 3 recurse without a fast path; cap their length
HIGH_ORDER_LENGTH_CAP = 128


def _as_sequence(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 1 or a.shape[0] < 1:
        raise MultactError("need a nonempty 1-d complex sequence")
    return a


def _u_pow_recursive(a: np.ndarray, s: int) -> float:
    """||a||_{U^s}^{2^s} from the inductive definition."""
    if s == 1:
        return _K.u1_pow(a)
    if s == 2:
        return _K.u2_pow(a)
    if s == 3:
        return _K.u3_pow(a)
    N = a.shape[0]
    total = 0.0
    for h in range(N):
        total += _u_pow_recursive(a * np.conj(np.roll(a, -h)), s - 1)
    return total / N


def _u2_pow_fft(a: np.ndarray) -> float:
    ahat = np.fft.fft(a) / a.shape[0]
    return float(np.sum(np.abs(ahat) ** 4))


def _u_pow_fft(a: np.ndarray, s: int) -> float:
    """Box-norm power with the order-2 base case accelerated by FFT."""
    if s == 1:
        return _K.u1_pow(a)
    if s == 2:
        return _u2_pow_fft(a)
    N = a.shape[0]
    total = 0.0
    for h in range(N):
        total += _u_pow_fft(a * np.conj(np.roll(a, -h)), s - 1)
    return total / N


def gowers_norm(a, s: int, method: str = "recursive") -> float:
    """The order-s Gowers box norm of a sequence on Z_N.

    ``method="recursive"`` evaluates the inductive definition directly and is
    guarded by a work estimate of N^s elementary operations (orders above 3
    also cap N at the high-order length limit).  ``method="fft"`` replaces
    the order-2 base case by the convolution identity and is available for
    s <= 3.
    """
    a = _as_sequence(a)
    if s < 1:
        raise MultactError(f"order must be >= 1, got {s}")
    N = a.shape[0]
    if method == "recursive":
        if N**s > RECURSION_WORK_GUARD:
            raise CostGuardError(
                f"direct recursion needs ~N^s = {N**s} work units; "
                "use method='fft' (s <= 3) or a shorter sequence"
            )
        if s >= 4 and N > HIGH_ORDER_LENGTH_CAP:
            raise CostGuardError(
                f"order {s} recursion capped at N <= {HIGH_ORDER_LENGTH_CAP}"
            )
        p = _u_pow_recursive(a, s)
    elif method == "fft":
        if s > 3:
            raise CostGuardError("the FFT path covers s <= 3 only")
        p = _u_pow_fft(a, s)
    else:
        raise MultactError(f"unknown method {method!r}")
    return max(p, 0.0) ** (1.0 / 2**s)


def gowers_u2_fft(a) -> float:
    """Order-2 box norm via the convolution identity sum |a-hat|^4.

    Independent route against ``gowers_norm(a, 2)``.
    """
    a = _as_sequence(a)
    return _u2_pow_fft(a) ** 0.25


def _auto_method(N: int, s: int) -> str:
    if s <= 3 and N**s > 10**7:
        return "fft"
    return "recursive"


# ---------------------------------------------------------------------------
# mixed orbit seminorms


def orbit_matrix(
    action, F: Observable, N: int, ctx: Optional[SieveContext] = None
) -> np.ndarray:
    """Matrix whose row x is the orbit sequence (F at the transform of n of x).

    Needs a finite-space action whose transforms are enumerable per state.
    """
    ctx = ctx or default_context()
    if isinstance(action, PermutationAction):
        M = action.space.size
        out = np.empty((M, N), dtype=np.complex128)
        from .averages import _pids_progression, _unravel

        pid = _pids_progression(action, 1, 0, N, ctx)
        for jid in np.unique(pid):
            perm = action.perm_for_exponents(_unravel(int(jid), action.orders))
            cols = pid == jid
            out[:, cols] = F.values[perm][:, None]
        return out
    if isinstance(action, DilationAction):
        M = action.modulus
        n = np.arange(1, N + 1, dtype=np.int64)
        from .averages import _modpow_vec

        mult = _modpow_vec(n % M, action.power, M)
        x = np.arange(M, dtype=np.int64)
        return F.values[(mult[None, :] * x[:, None]) % M]
    raise UnsupportedActionError(
        f"orbit sequences need a finite-space action, not {type(action).__name__}"
    )


def mixed_seminorm(
    action,
    F: Observable,
    s: int,
    N: int,
    method: str = "auto",
    ctx: Optional[SieveContext] = None,
) -> float:
    """Per-N mixed seminorm: state-averaged box-norm powers of orbit sequences.

    Returns ( mean_x ||orbit_x||_{U^s(Z_N)}^{2^s} )^(1/2^s).  The limit
    superior over N is not computable; callers ladder over N and report each
    rung.
    """
    if method == "auto":
        method = _auto_method(N, s)
    orbits = orbit_matrix(action, F, N, ctx)
    total = 0.0
    for x in range(orbits.shape[0]):
        total += gowers_norm(orbits[x], s, method=method) ** (2**s)
    p = total / orbits.shape[0]
    return max(p, 0.0) ** (1.0 / 2**s)


# ---------------------------------------------------------------------------
# inverse-theorem diagnostics


@dataclass
class InverseDiagnosticRow:
    N: int
    max_progression_norm: float
    argmax_progression: tuple[int, int]
    seminorms: dict[int, float]


def inverse_diagnostic(
    action: PermutationAction,
    F: Observable,
    qr_grid: Sequence[tuple[int, int]],
    N_ladder: Sequence[int],
    s_max: int = 2,
    ctx: Optional[SieveContext] = None,
) -> list[InverseDiagnosticRow]:
    """Juxtapose progression-mean norms and mixed seminorms per ladder rung.

    The two columns vanish together for finitely generated actions; the table
    lets that equivalence be inspected or thresholded empirically.
    """
    if not isinstance(action, PermutationAction):
        raise UnsupportedActionError("inverse diagnostics need a permutation action")
    from .averages import single_average

    ctx = ctx or default_context()
    rows = []
    for N in N_ladder:
        best = -1.0
        arg = (0, 0)
        for q, r in qr_grid:
            norm = single_average(action, F, q, r, N, ctx=ctx).value.norm()
            if norm > best:
                best = norm
                arg = (q, r)
        semis = {
            s: mixed_seminorm(action, F, s, N, ctx=ctx)
            for s in range(1, s_max + 1)
        }
        rows.append(InverseDiagnosticRow(N, best, arg, semis))
    return rows


# ---------------------------------------------------------------------------
# two-dimensional orthogonality-criterion correlation


def katai_correlation(
    A: np.ndarray, primes: tuple[int, int, int, int]
) -> complex:
    """Scaled self-correlation of a 2-d array along two prime directions.

    For (p, q, p', q') with p/q != p'/q', averages
    A[p m, q n] * conj(A[p' m, q' n]) over the largest index box where all
    four scaled indices stay in range.  Small correlations for all prime
    pairs force small bilinear averages; this is the computable face of the
    orthogonality criterion.
    """
    p, q, p2, q2 = primes
    if p * q2 == p2 * q:
        raise MultactError(f"need p/q != p'/q', got {primes}")
    A = np.asarray(A)
    if A.ndim != 2:
        raise MultactError("need a 2-d array")
    N1, N2 = A.shape
    m_max = min(N1 // p, N1 // p2)
    n_max = min(N2 // q, N2 // q2)
    if m_max < 1 or n_max < 1:
        raise DegenerateRangeError(
            f"no valid sub-box for primes {primes} in shape {A.shape}"
        )
    m = np.arange(1, m_max + 1)
    n = np.arange(1, n_max + 1)
    lhs = A[np.ix_(p * m - 1, q * n - 1)]
    rhs = A[np.ix_(p2 * m - 1, q2 * n - 1)]
    return complex(np.mean(lhs * np.conj(rhs)))
