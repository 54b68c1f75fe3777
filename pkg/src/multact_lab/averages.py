"""Ergodic-average engines over [N] and [N]^2 grids.

Single progressions, multilinear averages along linear forms, pairs of
rational form products, recurrence profiles against the power benchmark,
the structured/uniform projection estimator, concentration statistics,
correlations, additive-exponent product averages, and the digit experiment.

Grid points whose iterate is undefined, nonpositive, or outside the
configured restriction are excluded and counted.  All scans are chunked over
rows in a fixed order, so results are deterministic; no limit is ever
extrapolated, every report carries the finite ranges that produced it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ._backend import kernels
from .actions import (
    Action,
    AdditiveSequence,
    DilationAction,
    FiniteSpace,
    FourierObservable,
    FourierRotation,
    Observable,
    PermutationAction,
    TableSequence,
    omega_sequence,
)
from .errors import (
    AllPointsExcludedError,
    CostGuardError,
    MultactError,
    SpaceMismatchError,
    UnsupportedActionError,
    ZeroMeasureError,
)
from .folner import FolnerElement, PhaseRestriction, folner_block, sample_folner_block
from .linforms import FULL_GRID, Grid2D, LinearForm, RationalFormProduct, independent
from .numtheory import SieveContext, default_context, progression_factorize

_K = kernels()

_JOINT_GUARD = 2 * 10**6
_TABLE_GUARD = 5 * 10**6
_ROW_CHUNK = 512  # fixed chunk size keeps reduction order deterministic

_FILTER_CODES = {None: 0, "m>n": 1, "m<n": 2, "m!=n": 3}


def as_form_product(R) -> RationalFormProduct:
    """Accept a LinearForm or a RationalFormProduct."""
    if isinstance(R, LinearForm):
        return RationalFormProduct(1, [(R, 1)], allow_negative=True)
    return R


@dataclass
class AverageReport:
    """An averaged value plus the bookkeeping of what was averaged.

    ``contributing + excluded == total`` scanned points; ``normalization``
    records whether the sum was divided by the total scan size or by the
    contributing count.
    """

    value: Union[Observable, FourierObservable, complex]
    total: int
    contributing: int
    excluded: int
    normalization: str

    def value_norm(self) -> float:
        if isinstance(self.value, (Observable, FourierObservable)):
            return self.value.norm()
        return abs(self.value)

    def value_mean(self) -> complex:
        if isinstance(self.value, (Observable, FourierObservable)):
            return self.value.mean()
        return complex(self.value)


# ---------------------------------------------------------------------------
# shared machinery for permutation-action slots


def _pids_progression(
    action: PermutationAction, Q: int, b: int, N: int, ctx
) -> np.ndarray:
    """Mixed-radix class of the transform at Q*n + b, for n = 1..N."""
    pid = np.zeros(N, dtype=np.int64)
    for seq, d in zip(action.sequences, action.orders):
        vals = seq.values_progression(Q, b, N, ctx) % d
        pid = pid * d + vals
    return pid


def _unravel(jid: int, dims: Sequence[int]) -> list[int]:
    out = []
    for d in reversed(dims):
        out.append(jid % d)
        jid //= d
    return list(reversed(out))


class _Slot:
    """One transported observable: action, observable, iterate form product."""

    def __init__(self, action: PermutationAction, F: Observable, R):
        self.action = action
        self.F = F
        self.R = as_form_product(R)

    @property
    def dims(self) -> list[int]:
        return list(self.action.orders)


def _build_tables(slots: Sequence[_Slot], grid: Grid2D, N: int, ctx):
    """Per-term lookup tables for the joint-class kernel.

    Grid substitution (m, n) -> (a1 m + b1, a2 n + b2) is folded into each
    term: the table is indexed by the reduced combination u with the term
    value g*u + c, and the valid index window enforces positivity.
    """
    alphas, betas, woffs, wlens = [], [], [], []
    row_acc: list[int] = []
    rows: list[np.ndarray] = []
    row_off = [0]
    const_acc: list[int] = []
    dims: list[int] = []
    acc_base = 0
    for slot in slots:
        seqs = slot.action.sequences
        G = len(seqs)
        dims.extend(slot.action.orders)
        cnum, cden = slot.R.c.numerator, slot.R.c.denominator
        for g_i, seq in enumerate(seqs):
            cv = seq.value(cnum) - (seq.value(cden) if cden > 1 else 0)
            const_acc.append(cv)
        for form, k in slot.R.factors:
            ae = form.alpha * grid.a1
            be = form.beta * grid.a2
            ce = form.alpha * grid.b1 + form.beta * grid.b2
            g = math.gcd(ae, be)
            at, bt = ae // g, be // g
            corners = [
                at * m + bt * n for m in (1, N) for n in (1, N)
            ]
            u_min, u_max = min(corners), max(corners)
            u_pos = -((1 - ce) // -g)  # ceil((1 - ce) / g)
            lo = max(u_min, u_pos)
            hi = u_max
            W = max(hi - lo + 1, 0)
            if W > _TABLE_GUARD:
                raise CostGuardError(
                    f"term table of size {W} exceeds the {_TABLE_GUARD} guard"
                )
            if W > 0:
                avals = _additive_values(seqs, g, ce + g * (lo - 1), W, ctx)
            else:
                avals = [np.zeros(0, dtype=np.int64) for _ in seqs]
            alphas.append(at)
            betas.append(bt)
            woffs.append(lo)
            wlens.append(W)
            for g_i in range(G):
                contrib = k * avals[g_i]
                if W > 0 and np.abs(contrib).max(initial=0) > 32000:
                    raise CostGuardError("exponent contribution overflows int16")
                rows.append(contrib.astype(np.int16))
                row_acc.append(acc_base + g_i)
            row_off.append(row_off[-1] + G)
        acc_base += G
    D = 1
    for d in dims:
        D *= d
        if D > _JOINT_GUARD:
            raise CostGuardError(
                f"joint class count exceeds {_JOINT_GUARD}; "
                "reduce the generator orders or the slot count"
            )
    wmax = max(wlens, default=1)
    tab = np.zeros((len(rows), max(wmax, 1)), dtype=np.int16)
    for i, r in enumerate(rows):
        tab[i, : len(r)] = r
    return {
        "alpha": np.array(alphas, dtype=np.int64),
        "beta": np.array(betas, dtype=np.int64),
        "woff": np.array(woffs, dtype=np.int64),
        "wlen": np.array(wlens, dtype=np.int64),
        "row_off": np.array(row_off, dtype=np.int64),
        "row_acc": np.array(row_acc, dtype=np.int64),
        "tab": tab,
        "const_acc": np.array(const_acc, dtype=np.int64),
        "dims": np.array(dims, dtype=np.int64),
        "D": D,
    }


def _additive_values(seqs, Q, b, W, ctx):
    """Additive values along one progression for several sequences.

    Sequences that would each re-factor the progression share one
    factorization pass.
    """
    out = []
    pf = None
    for s in seqs:
        generic = isinstance(s, TableSequence) and s.default != 0
        if generic and Q * W + b < 2**62:
            if pf is None:
                pf = progression_factorize(Q, b, W, ctx=ctx)
            out.append(pf.additive_eval(s.prime_value))
        else:
            out.append(s.values_progression(Q, b, W, ctx))
    return out


def _run_joint_counts(tables, N, filter_code, grid_indicator: Grid2D):
    counts = np.zeros(tables["D"], dtype=np.int64)
    excluded = _K.joint_counts_grid(
        N,
        tables["alpha"],
        tables["beta"],
        tables["woff"],
        tables["wlen"],
        tables["row_off"],
        tables["row_acc"],
        tables["tab"],
        tables["const_acc"],
        tables["dims"],
        filter_code,
        grid_indicator.a1,
        grid_indicator.b1 % grid_indicator.a1,
        grid_indicator.a2,
        grid_indicator.b2 % grid_indicator.a2,
        counts,
    )
    return counts, int(excluded)


def _decode_value(slots, tables, counts) -> np.ndarray:
    """Weighted sum of the transported products over realized joint classes."""
    M = slots[0].action.space.size
    dims = [int(d) for d in tables["dims"]]
    acc = np.zeros(M, dtype=np.complex128)
    for jid in np.flatnonzero(counts):
        resid = _unravel(int(jid), dims)
        vec = np.ones(M, dtype=np.complex128)
        pos = 0
        for slot in slots:
            G = len(slot.action.orders)
            perm = slot.action.perm_for_exponents(resid[pos : pos + G])
            vec *= slot.F.values[perm]
            pos += G
        acc += counts[jid] * vec
    return acc


def _jid_field(tables, N, filter_code, grid_indicator: Grid2D):
    """Per-point joint class over [1,N]^2; -1 marks excluded points.

    Chunked numpy scan used where per-point classes (not just counts) are
    needed, e.g. to average recurrence profiles over several moduli.
    """
    alphas, betas = tables["alpha"], tables["beta"]
    woffs, wlens = tables["woff"], tables["wlen"]
    row_off, row_acc = tables["row_off"], tables["row_acc"]
    tab64 = tables["tab"].astype(np.int64)
    const = tables["const_acc"]
    dims = tables["dims"]
    A = len(dims)
    radix = np.ones(A, dtype=np.int64)
    for a in range(A - 2, -1, -1):
        radix[a] = radix[a + 1] * dims[a + 1]
    ns = np.arange(1, N + 1, dtype=np.int64)
    col_ok = ns % grid_indicator.a2 == grid_indicator.b2 % grid_indicator.a2
    out = np.full((N, N), -1, dtype=np.int64)
    for lo in range(1, N + 1, _ROW_CHUNK):
        ms = np.arange(lo, min(lo + _ROW_CHUNK, N + 1), dtype=np.int64)
        sel = np.broadcast_to(col_ok, (ms.size, N)).copy()
        sel &= (ms % grid_indicator.a1 == grid_indicator.b1 % grid_indicator.a1)[
            :, None
        ]
        if filter_code == 1:
            sel &= ms[:, None] > ns[None, :]
        elif filter_code == 2:
            sel &= ms[:, None] < ns[None, :]
        elif filter_code == 3:
            sel &= ms[:, None] != ns[None, :]
        valid = sel.copy()
        acc = np.empty((A, ms.size, N), dtype=np.int64)
        acc[:] = const[:, None, None]
        for t in range(len(alphas)):
            w = alphas[t] * ms[:, None] + betas[t] * ns[None, :] - woffs[t]
            in_win = (w >= 0) & (w < wlens[t])
            valid &= in_win
            w[~in_win] = 0
            for r in range(row_off[t], row_off[t + 1]):
                acc[row_acc[r]] += tab64[r][w]
        jid = np.zeros((ms.size, N), dtype=np.int64)
        for a in range(A):
            jid += (acc[a] % dims[a]) * radix[a]
        jid[~(sel & valid)] = -1
        out[lo - 1 : lo - 1 + ms.size, :] = jid
    return out


def _require_shared_space(slots):
    space = slots[0].action.space
    for s in slots:
        if s.action.space != space:
            raise SpaceMismatchError("slot actions live on different spaces")
        if s.F.space != space:
            raise SpaceMismatchError("observable does not live on the action space")
    return space


# ---------------------------------------------------------------------------
# single progressions


def single_average(
    action: Action,
    F,
    a: int,
    b: int,
    N: int,
    restriction: Optional[PhaseRestriction] = None,
    ctx: Optional[SieveContext] = None,
) -> AverageReport:
    """Mean of the transported observable along the progression a*n + b.

    With a restriction, only member indices contribute and the mean is over
    the contributing count.
    """
    ctx = ctx or default_context()
    mask = restriction.contains_range(N) if restriction is not None else None
    if isinstance(action, PermutationAction):
        pid = _pids_progression(action, a, b, N, ctx)
        if mask is not None:
            pid = pid[mask]
        if len(pid) == 0:
            raise AllPointsExcludedError("restriction removed every index")
        D = 1
        for d in action.orders:
            D *= d
        counts = np.bincount(pid, minlength=D)
        M = action.space.size
        acc = np.zeros(M, dtype=np.complex128)
        for jid in np.flatnonzero(counts):
            perm = action.perm_for_exponents(_unravel(int(jid), action.orders))
            acc += counts[jid] * F.values[perm]
        value = Observable(action.space, acc / len(pid))
        contributing = len(pid)
        return AverageReport(value, N, contributing, N - contributing, "contributing")
    if isinstance(action, FourierRotation):
        s = action.scalars_progression(a, b, N, ctx)
        if mask is not None:
            s = s[mask]
        if len(s) == 0:
            raise AllPointsExcludedError("restriction removed every index")
        coeffs = {k: v * complex(np.mean(s ** k)) for k, v in F.coeffs.items()}
        value = FourierObservable(coeffs)
        return AverageReport(value, N, len(s), N - len(s), "contributing")
    if isinstance(action, DilationAction):
        M = action.modulus
        vals = a * np.arange(1, N + 1, dtype=np.int64) + b
        mult = _modpow_vec(vals % M, action.power, M)
        ok = mult != 0
        if mask is not None:
            ok &= mask
        mult = mult[ok]
        if len(mult) == 0:
            raise AllPointsExcludedError("no invertible progression values")
        counts = np.bincount(mult, minlength=M)
        x = np.arange(M, dtype=np.int64)
        acc = np.zeros(M, dtype=np.complex128)
        for u in np.flatnonzero(counts):
            acc += counts[u] * F.values[(u * x) % M]
        value = Observable(action.space, acc / len(mult))
        return AverageReport(value, N, len(mult), N - len(mult), "contributing")
    raise UnsupportedActionError(f"single_average: {type(action).__name__}")


def _modpow_vec(base: np.ndarray, e: int, M: int) -> np.ndarray:
    out = np.ones_like(base)
    b = base % M
    k = e
    while k:
        if k & 1:
            out = (out * b) % M
        b = (b * b) % M
        k >>= 1
    return out


# ---------------------------------------------------------------------------
# grid averages


def multilinear_average(
    actions: Sequence[PermutationAction],
    Fs: Sequence[Observable],
    forms: Sequence[LinearForm],
    N: int,
    grid: Grid2D = FULL_GRID,
    ctx: Optional[SieveContext] = None,
) -> AverageReport:
    """Mean over (m, n) in [N]^2 of the product of transported observables.

    The grid acts as an indicator: points outside the coset are excluded.
    The sum is normalized by N^2 (the full scan), matching the double-average
    convention.  Pairwise dependent forms are allowed but flagged.
    """
    if not (len(actions) == len(Fs) == len(forms)):
        raise MultactError("actions, observables and forms must align")
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            if not independent(forms[i], forms[j]):
                warnings.warn(
                    f"forms {forms[i]} and {forms[j]} are dependent; "
                    "the product-of-means heuristic will not apply",
                    stacklevel=2,
                )
    for a in actions:
        if not isinstance(a, PermutationAction):
            raise UnsupportedActionError(
                "multilinear averages need permutation actions"
            )
    ctx = ctx or default_context()
    slots = [_Slot(a, F, L) for a, F, L in zip(actions, Fs, forms)]
    space = _require_shared_space(slots)
    tables = _build_tables(slots, FULL_GRID, N, ctx)
    counts, excluded = _run_joint_counts(tables, N, 0, grid)
    contributing = int(counts.sum())
    if contributing == 0:
        raise AllPointsExcludedError("no grid point produced a valid iterate")
    acc = _decode_value(slots, tables, counts)
    value = Observable(space, acc / (N * N))
    return AverageReport(value, N * N, contributing, N * N - contributing, "total")


def rational_pair_average(
    action1: PermutationAction,
    action2: PermutationAction,
    F1: Observable,
    F2: Observable,
    R1,
    R2,
    N: int,
    grid: Grid2D = FULL_GRID,
    domain: Optional[str] = None,
    ctx: Optional[SieveContext] = None,
) -> AverageReport:
    """Mean of the two-slot product at rational iterates R1, R2.

    ``domain`` optionally restricts the scan ("m>n", "m<n", "m!=n"); points
    with undefined, zero, or nonpositive iterates are excluded.  The mean is
    over the contributing points.
    """
    if domain not in _FILTER_CODES:
        raise MultactError(f"unknown domain filter {domain!r}")
    for a in (action1, action2):
        if not isinstance(a, PermutationAction):
            raise UnsupportedActionError(
                "rational pair averages need permutation actions"
            )
    ctx = ctx or default_context()
    slots = [_Slot(action1, F1, R1), _Slot(action2, F2, R2)]
    space = _require_shared_space(slots)
    tables = _build_tables(slots, FULL_GRID, N, ctx)
    counts, excluded = _run_joint_counts(
        tables, N, _FILTER_CODES[domain], grid
    )
    contributing = int(counts.sum())
    if contributing == 0:
        raise AllPointsExcludedError("every grid point was excluded")
    acc = _decode_value(slots, tables, counts)
    value = Observable(space, acc / contributing)
    return AverageReport(
        value, N * N, contributing, N * N - contributing, "contributing"
    )


# ---------------------------------------------------------------------------
# recurrence profiles


@dataclass
class RecurrenceProfile:
    """Per-point intersection measures against the power benchmark.

    ``measures`` holds the (possibly modulus-averaged) measure at each
    scanned point, with NaN at excluded points.  ``good_density`` is the
    fraction of all scanned points meeting the threshold; a finite scan can
    only report this empirical density, never certify a lower density.
    """

    measures: np.ndarray
    mu_A: float
    ell: int
    epsilon: float
    threshold: float
    good_density: float
    mean_measure: float
    max_measure: float
    contributing: int
    excluded: int
    moduli: list[int] = field(default_factory=list)

    @property
    def benchmark(self) -> float:
        return self.threshold


def recurrence_profile(
    actions: Sequence[Action],
    A: Observable,
    Rs: Sequence,
    N: int,
    epsilon: float,
    grid: Grid2D = FULL_GRID,
    q_trick: Optional[dict] = None,
    benchmark: Optional[float] = None,
    domain: Optional[str] = None,
    ctx: Optional[SieveContext] = None,
) -> RecurrenceProfile:
    """Intersection measures mu(A and preimages at R_j(m, n)) over the grid.

    The grid substitutes into the iterate arguments: the measure at (m, n)
    uses R_j(a1 m + b1, a2 n + b2).  With ``q_trick = {"K": K, "samples": s}``
    the profile is averaged over block moduli Q at level K (all of them when
    the block is small, else seeded samples), each with the grid
    (Q m + b1, Q n + b2).  The good set is measured against
    ``benchmark - epsilon`` (default mu(A)^(ell+1) - epsilon).
    """
    if not A.is_indicator:
        raise MultactError("recurrence profiles need an indicator observable")
    mu_A = A.mean().real
    if mu_A == 0:
        raise ZeroMeasureError("the base set has measure zero")
    ell = len(Rs)
    if len(actions) != ell:
        raise MultactError("one action per iterate")
    base = benchmark if benchmark is not None else mu_A ** (ell + 1)
    threshold = base - epsilon

    if q_trick is not None:
        K = int(q_trick["K"])
        samples = q_trick.get("samples", "all")
        if samples == "all":
            Qs = [e.value for e in folner_block(K)]
        else:
            Qs = [
                e.value
                for e in sample_folner_block(K, int(samples), int(q_trick.get("seed", 0)))
            ]
        grids = [Grid2D(Q, grid.b1, Q, grid.b2) for Q in Qs]
    else:
        Qs = []
        grids = [grid]

    filter_code = _FILTER_CODES[domain]
    total = N * N
    acc = np.zeros((N, N), dtype=np.float64)
    seen = np.zeros((N, N), dtype=np.int64)
    for g in grids:
        meas = _measure_field(actions, A, Rs, N, g, filter_code, ctx)
        valid = ~np.isnan(meas)
        acc[valid] += meas[valid]
        seen += valid
    with np.errstate(invalid="ignore"):
        measures = np.where(seen == len(grids), acc / max(len(grids), 1), np.nan)
    valid = ~np.isnan(measures)
    contributing = int(valid.sum())
    excluded = total - contributing
    if contributing == 0:
        raise AllPointsExcludedError("every grid point was excluded")
    good = int((measures[valid] >= threshold).sum())
    return RecurrenceProfile(
        measures=measures,
        mu_A=mu_A,
        ell=ell,
        epsilon=epsilon,
        threshold=threshold,
        good_density=good / total,
        mean_measure=float(measures[valid].mean()),
        max_measure=float(measures[valid].max()),
        contributing=contributing,
        excluded=excluded,
        moduli=Qs,
    )


def _measure_field(actions, A, Rs, N, grid, filter_code, ctx):
    """Measure of the (ell+1)-fold intersection at every grid point."""
    if all(isinstance(a, PermutationAction) for a in actions):
        return _measure_field_perm(actions, A, Rs, N, grid, filter_code, ctx)
    if all(isinstance(a, DilationAction) for a in actions):
        return _measure_field_dilation(actions, A, Rs, N, grid, filter_code)
    raise UnsupportedActionError(
        "recurrence profiles need permutation or dilation actions"
    )


def _measure_field_perm(actions, A, Rs, N, grid, filter_code, ctx):
    ctx = ctx or default_context()
    slots = [_Slot(a, A, R) for a, R in zip(actions, Rs)]
    _require_shared_space(slots)
    tables = _build_tables(slots, grid, N, ctx)
    jid = _jid_field(tables, N, filter_code, FULL_GRID)
    dims = [int(d) for d in tables["dims"]]
    present = np.unique(jid[jid >= 0])
    meas_of = np.full(tables["D"], np.nan)
    base = A.values.real
    for j in present:
        resid = _unravel(int(j), dims)
        inter = base.copy()
        pos = 0
        for slot in slots:
            G = len(slot.action.orders)
            perm = slot.action.perm_for_exponents(resid[pos : pos + G])
            inter = inter * base[perm]
            pos += G
        meas_of[j] = inter.mean()
    out = np.full((N, N), np.nan)
    ok = jid >= 0
    out[ok] = meas_of[jid[ok]]
    return out


_DILATION_POINT_GUARD = 400


def _measure_field_dilation(actions, A, Rs, N, grid, filter_code):
    if N > _DILATION_POINT_GUARD:
        raise CostGuardError(
            f"dilation recurrence scans point by point; N <= "
            f"{_DILATION_POINT_GUARD} required"
        )
    M = actions[0].modulus
    for a in actions:
        if a.modulus != M:
            raise SpaceMismatchError("dilations must share the modulus")
    Rs = [as_form_product(R) for R in Rs]
    base = A.values.real.astype(bool)
    pre_cache: dict[tuple, np.ndarray] = {}
    x = np.arange(M, dtype=np.int64)
    out = np.full((N, N), np.nan)
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            if filter_code == 1 and not m > n:
                continue
            if filter_code == 2 and not m < n:
                continue
            if filter_code == 3 and m == n:
                continue
            mm = grid.a1 * m + grid.b1
            nn = grid.a2 * n + grid.b2
            key = []
            ok = True
            for action, R in zip(actions, Rs):
                v = R.evaluate(mm, nn)
                if v is None or v <= 0:
                    ok = False
                    break
                num, den = v.numerator, v.denominator
                if num % M == 0 or den % M == 0:
                    ok = False
                    break
                u = (
                    pow(num, action.power, M)
                    * pow(pow(den, action.power, M), M - 2, M)
                    % M
                )
                key.append(u)
            if not ok:
                continue
            key_t = tuple(key)
            meas = pre_cache.get(key_t)
            if meas is None:
                inter = base.copy()
                for u in key_t:
                    inter = inter & base[(u * x) % M]
                meas = float(inter.mean())
                pre_cache[key_t] = meas
            out[m - 1, n - 1] = meas
    return out


# ---------------------------------------------------------------------------
# structured / uniform projection estimator


@dataclass
class ProjectionReport:
    """Estimated split F = structured + remainder, with diagnostics.

    ``structured`` averages the transports along Q n + 1 over block moduli Q;
    ``remainder`` is the difference.  ``remainder_progression_norms`` maps
    small (q, r) to the norm of the averaged transport of the remainder, the
    operational test of uniformity.
    """

    structured: Observable
    remainder: Observable
    moduli: list[int]
    N: int
    remainder_progression_norms: dict[tuple[int, int], float]

    @property
    def max_remainder_progression_norm(self) -> float:
        return max(self.remainder_progression_norms.values(), default=0.0)


def pretentious_projection(
    action: PermutationAction,
    F: Observable,
    K: int,
    N: int,
    samples: Union[int, str] = "all",
    seed: int = 0,
    diag_grid: Optional[Sequence[tuple[int, int]]] = None,
    diag_N: Optional[int] = None,
    ctx: Optional[SieveContext] = None,
) -> ProjectionReport:
    """Estimate the structured component of F under a finitely generated action.

    The estimator averages E_n (transport at Q n + 1 of F) over level-K block
    moduli Q; the split is exactly mean-preserving by linearity.
    """
    if not isinstance(action, PermutationAction):
        raise UnsupportedActionError("the estimator needs a permutation action")
    ctx = ctx or default_context()
    if samples == "all":
        Qs = [e.value for e in folner_block(K)]
    else:
        Qs = [e.value for e in sample_folner_block(K, int(samples), seed)]
    acc = np.zeros(action.space.size, dtype=np.complex128)
    for Q in Qs:
        rep = single_average(action, F, Q, 1, N, ctx=ctx)
        acc += rep.value.values
    structured = Observable(action.space, acc / len(Qs))
    remainder = F - structured
    if diag_grid is None:
        diag_grid = [(q, r) for q in range(1, 5) for r in range(1, 5)]
    diag_N = diag_N or max(N // 10, 1000)
    norms = {}
    for q, r in diag_grid:
        rep = single_average(action, remainder, q, r, diag_N, ctx=ctx)
        norms[(q, r)] = rep.value.norm()
    return ProjectionReport(structured, remainder, Qs, N, norms)


# ---------------------------------------------------------------------------
# concentration statistics


def concentration_statistic(
    action: Action,
    F,
    Q: Union[int, FolnerElement],
    b: int,
    N: int,
    reference: Union[str, Observable, FourierObservable] = "T_b",
    restriction: Optional[PhaseRestriction] = None,
    ctx: Optional[SieveContext] = None,
) -> float:
    """Mean deviation of the transport along Q n + b from a reference.

    ``reference``: ``"T_b"`` compares with the transport at b (requires
    b >= 1); ``"running-average"`` compares with the mean transport over the
    same (restricted) index set; an explicit observable is used as is.  With a
    restriction, both the scan and the running average use only member
    indices.
    """
    if isinstance(Q, FolnerElement):
        Q = Q.value
    Q = int(Q)
    ctx = ctx or default_context()
    if isinstance(reference, str) and reference == "T_b" and b < 1:
        raise MultactError("reference T_b needs b >= 1; use the running average")
    mask = restriction.contains_range(N) if restriction is not None else None

    if isinstance(action, PermutationAction):
        pid = _pids_progression(action, Q, b, N, ctx)
        if mask is not None:
            pid = pid[mask]
        if len(pid) == 0:
            raise AllPointsExcludedError("restriction removed every index")
        D = 1
        for d in action.orders:
            D *= d
        counts = np.bincount(pid, minlength=D)
        present = np.flatnonzero(counts)
        transported = {}
        for jid in present:
            perm = action.perm_for_exponents(_unravel(int(jid), action.orders))
            transported[int(jid)] = F.values[perm]
        if isinstance(reference, Observable):
            ref = reference.values
        elif reference == "T_b":
            ref = action.apply(b, F).values
        elif reference == "running-average":
            acc = np.zeros(action.space.size, dtype=np.complex128)
            for jid in present:
                acc += counts[jid] * transported[int(jid)]
            ref = acc / len(pid)
        else:
            raise MultactError(f"unknown reference {reference!r}")
        total = 0.0
        for jid in present:
            diff = transported[int(jid)] - ref
            total += counts[jid] * math.sqrt(float(np.mean(np.abs(diff) ** 2)))
        return total / len(pid)

    if isinstance(action, FourierRotation):
        s = action.scalars_progression(Q, b, N, ctx)
        if mask is not None:
            s = s[mask]
        if len(s) == 0:
            raise AllPointsExcludedError("restriction removed every index")
        ks = sorted(F.coeffs)
        powers = {k: s**k for k in ks}
        if isinstance(reference, FourierObservable):
            ref = {k: reference.coeffs.get(k, 0.0) for k in ks}
        elif reference == "T_b":
            sb = action.scalar(b)
            ref = {k: F.coeffs[k] * sb**k for k in ks}
        elif reference == "running-average":
            ref = {k: F.coeffs[k] * complex(np.mean(powers[k])) for k in ks}
        else:
            raise MultactError(f"unknown reference {reference!r}")
        dev_sq = np.zeros(len(s), dtype=np.float64)
        for k in ks:
            dev_sq += np.abs(F.coeffs[k] * powers[k] - ref[k]) ** 2
        return float(np.mean(np.sqrt(dev_sq)))

    raise UnsupportedActionError(f"concentration_statistic: {type(action).__name__}")


# ---------------------------------------------------------------------------
# correlations


def correlation(action: Action, F, r, s) -> complex:
    """Inner product of the transports of F at r and s."""
    Tr = action.apply(r, F)
    Ts = action.apply(s, F)
    return Tr.inner(Ts)


def correlation_gram(action: Action, F, rationals: Sequence) -> np.ndarray:
    """Hermitian Gram matrix of transports; positive semidefinite."""
    k = len(rationals)
    G = np.zeros((k, k), dtype=np.complex128)
    transported = [action.apply(r, F) for r in rationals]
    for i in range(k):
        for j in range(k):
            G[i, j] = transported[i].inner(transported[j])
    return G


# ---------------------------------------------------------------------------
# additive-exponent product averages and the digit experiment


def omega_product_average(
    space: FiniteSpace,
    base_perms: Sequence[np.ndarray],
    Fs: Sequence[Observable],
    forms: Sequence[LinearForm],
    N: int,
    addseqs: Optional[Sequence[AdditiveSequence]] = None,
    ctx: Optional[SieveContext] = None,
) -> AverageReport:
    """Mean of prod_j F_j composed with S_j^(a_j(L_j(m, n))) over [N]^2.

    Defaults every additive sequence to the prime-divisor count.
    """
    if addseqs is None:
        addseqs = [omega_sequence() for _ in base_perms]
    if not (len(base_perms) == len(addseqs) == len(Fs) == len(forms)):
        raise MultactError("generators, sequences, observables, forms must align")
    actions = [
        PermutationAction(space, [(p, s)]) for p, s in zip(base_perms, addseqs)
    ]
    return multilinear_average(actions, Fs, forms, N, ctx=ctx)


def digit_streams(bases: Sequence[int], length: int, seed: int) -> dict[int, np.ndarray]:
    """Independent uniform digit streams, one per base, from a fixed seed.

    Each stream is seeded by (seed, base) only, so requesting bases together
    or separately yields identical digits.
    """
    out = {}
    for b in sorted(set(int(x) for x in bases)):
        rng = np.random.default_rng([seed, b])
        out[b] = rng.integers(0, b, size=length, dtype=np.int64)
    return out


def digit_density(
    bases: Sequence[int],
    targets: Sequence[int],
    forms: Sequence[LinearForm],
    N: int,
    seed: int = 0,
    streams: Optional[dict[int, np.ndarray]] = None,
    addseqs: Optional[Sequence[AdditiveSequence]] = None,
    ctx: Optional[SieveContext] = None,
) -> float:
    """Frequency of simultaneous digit hits at additive-sequence positions.

    For each j the event is: the a_j(L_j(m, n))-th digit of the base-b_j
    stream equals c_j.  Streams model a generic point; they are deterministic
    given the seed.  The empty form list has frequency 1.
    """
    if not (len(bases) == len(targets) == len(forms)):
        raise MultactError("bases, targets and forms must align")
    for b, c in zip(bases, targets):
        if not 0 <= c < b:
            raise MultactError(f"target digit {c} outside [0, {b})")
    if not forms:
        return 1.0
    ctx = ctx or default_context()
    if addseqs is None:
        addseqs = [omega_sequence() for _ in forms]
    ok_fields = []
    for L, b, c, seq in zip(forms, bases, targets, addseqs):
        if not L.nonnegative:
            raise MultactError("digit experiment forms must be nonnegative")
        lo = L(1, 1)
        hi = L(N, N)
        W = hi - lo + 1
        avals = seq.values_progression(1, lo - 1, W, ctx)  # a(lo..hi)
        if streams is None:
            length = int(avals.max(initial=0)) + 1
            stream = digit_streams([b], length, seed)[b]
        else:
            stream = streams[b]
            if len(stream) <= avals.max(initial=0):
                raise MultactError(f"stream for base {b} too short")
        ok = stream[avals] == c
        ms = np.arange(1, N + 1, dtype=np.int64)
        field_idx = L.alpha * ms[:, None] + L.beta * ms[None, :] - lo
        ok_fields.append(ok[field_idx])
    hit = ok_fields[0]
    for f in ok_fields[1:]:
        hit = hit & f
    return float(hit.mean())


# ---------------------------------------------------------------------------
# double-progression deviation transfer


def double_form_deviation(
    deviations: np.ndarray, l1: int, l2: int, N: int
) -> tuple[float, float, float]:
    """Transfer of a one-parameter deviation bound to the form l1*m + l2*n.

    Given per-index deviations d(v) for v = 1..(l1+l2)*N, returns
    (lhs, bound, slack) where lhs is the double mean of d(l1 m + l2 n) over
    [N]^2, bound is 4*(l1+l2) times the single mean over [N], and slack is
    max(lhs - bound, 0) -- reported, not hidden.
    """
    if l1 < 0 or l2 < 0 or l1 + l2 == 0:
        raise MultactError("need nonnegative l1, l2, not both zero")
    need = (l1 + l2) * N
    if len(deviations) < need + 1:
        raise MultactError(f"need deviations up to index {need}")
    eps = float(np.mean(deviations[1 : N + 1]))
    c1 = np.zeros(need + 1)
    c2 = np.zeros(need + 1)
    if l1:
        c1[l1 * np.arange(1, N + 1)] = 1.0
    else:
        c1[0] = N
    if l2:
        c2[l2 * np.arange(1, N + 1)] = 1.0
    else:
        c2[0] = N
    cc = np.convolve(c1, c2)[: need + 1]
    lhs = float(np.dot(cc, deviations[: need + 1]) / (N * N))
    bound = 4.0 * (l1 + l2) * eps
    return lhs, bound, max(lhs - bound, 0.0)
