"""Highly divisible index sets and dilation-invariant windows.

The level-K block consists of products prod p^{a_p} over the block primes
with K < a_p <= 2K; the companion modulus is prod p^{2K} and the admissible
residues mod it are those not divisible by any p^K.  Phase windows pick out
the integers n (or rational values R(m, n)) whose unit-circle image n^i stays
delta-close to 1.

The level-2 block uses primes {2, 3}: with a single prime the divisibility
structure degenerates, so the smallest block is floored at {2, 3} while every
level K >= 3 uses exactly the primes up to K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EnumerationTooLargeError,
    MultactError,
    UndefinedEvaluationError,
)
from .linforms import LinearForm, RationalFormProduct
from .numtheory import primes_up_to

ENUMERATION_GUARD = 10**6


def block_primes(K: int) -> list[int]:
    """Primes of the level-K block: all p <= max(K, 3)."""
    if K < 2:
        raise MultactError(f"block level must be >= 2, got {K}")
    return [int(p) for p in primes_up_to(max(K, 3))]


@dataclass(frozen=True)
class FolnerElement:
    """A block element prod p^{a_p} carrying its exponent vector."""

    value: int
    exponents: tuple[tuple[int, int], ...]

    def exponent_of(self, p: int) -> int:
        for q, a in self.exponents:
            if q == p:
                return a
        return 0


def _element(K: int, exps: Sequence[int], primes: Sequence[int]) -> FolnerElement:
    value = 1
    pairs = []
    for p, a in zip(primes, exps):
        if not K < a <= 2 * K:
            raise MultactError(f"exponent {a} of {p} outside ({K}, {2 * K}]")
        value *= p**a
        pairs.append((p, a))
    return FolnerElement(value, tuple(pairs))


def folner_block(K: int) -> list[FolnerElement]:
    """Full enumeration of the level-K block, exponent-lexicographic order.

    Raises
    ------
    EnumerationTooLargeError
        when (K+1)**#primes exceeds the guard; use ``sample_folner_block``.
    """
    primes = block_primes(K)
    if (K + 1) ** len(primes) > ENUMERATION_GUARD:
        raise EnumerationTooLargeError(
            f"level-{K} block is too large to enumerate; "
            "use sample_folner_block(K, count, seed)"
        )
    out = []
    exps = [K + 1] * len(primes)
    while True:
        out.append(_element(K, exps, primes))
        j = len(primes) - 1
        while j >= 0:
            exps[j] += 1
            if exps[j] <= 2 * K:
                break
            exps[j] = K + 1
            j -= 1
        if j < 0:
            break
    return out


def sample_folner_block(K: int, count: int, seed: int) -> list[FolnerElement]:
    """Seeded uniform samples over exponent vectors of the level-K block."""
    primes = block_primes(K)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        exps = [int(rng.integers(K + 1, 2 * K + 1)) for _ in primes]
        out.append(_element(K, exps, primes))
    return out


def block_modulus(K: int) -> int:
    """prod p^{2K} over the block primes."""
    out = 1
    for p in block_primes(K):
        out *= p ** (2 * K)
    return out


def block_min_divisor(K: int) -> int:
    """prod p^{K+1}; every block element is a multiple of this."""
    out = 1
    for p in block_primes(K):
        out *= p ** (K + 1)
    return out


def admissible_residue(a: int, K: int) -> bool:
    """True when p^K divides a for no block prime p.  Requires 1 <= a <= modulus."""
    Q = block_modulus(K)
    if not 1 <= a <= Q:
        raise MultactError(f"residue {a} outside [1, {Q}]")
    return all(a % p**K != 0 for p in block_primes(K))


def admissible_pair_for_forms(
    a: int, b: int, K: int, forms: Sequence[LinearForm]
) -> bool:
    """True when every L(a, b) avoids all p^K (0 counts as divisible)."""
    if not forms:
        raise MultactError("need at least one form")
    Q = block_modulus(K)
    if not (1 <= a <= Q and 1 <= b <= Q):
        raise MultactError(f"pair ({a}, {b}) outside [1, {Q}]^2")
    pK = [p**K for p in block_primes(K)]
    for L in forms:
        v = L(a, b)
        if v == 0 or any(v % q == 0 for q in pK):
            return False
    return True


def admissible_count_exhaustive(K: int) -> int:
    """|{a <= modulus : admissible}| by direct enumeration (guarded)."""
    Q = block_modulus(K)
    if Q > 10**7:
        raise EnumerationTooLargeError(f"modulus {Q} too large to enumerate")
    a = np.arange(1, Q + 1, dtype=np.int64)
    keep = np.ones(Q, dtype=bool)
    for p in block_primes(K):
        keep &= a % p**K != 0
    return int(keep.sum())


def admissible_density_closed_form(K: int) -> Fraction:
    """prod (1 - p^{-K}) over the block primes."""
    out = Fraction(1)
    for p in block_primes(K):
        out *= 1 - Fraction(1, p**K)
    return out


def admissible_pair_density_exhaustive(
    K: int, forms: Sequence[LinearForm]
) -> Fraction:
    """Exact density of form-admissible pairs on the full residue torus."""
    Q = block_modulus(K)
    if Q * Q > 4 * 10**6:
        raise EnumerationTooLargeError(f"torus size {Q}^2 too large to enumerate")
    a = np.arange(1, Q + 1, dtype=np.int64)
    A, B = np.meshgrid(a, a, indexing="ij")
    keep = np.ones((Q, Q), dtype=bool)
    pK = [p**K for p in block_primes(K)]
    for L in forms:
        V = L.alpha * A + L.beta * B
        keep &= V != 0
        for q in pK:
            keep &= V % q != 0
    return Fraction(int(keep.sum()), Q * Q)


# ---------------------------------------------------------------------------
# phase windows


@dataclass(frozen=True)
class PhaseRestriction:
    """Membership in {n : |n^i - 1| <= delta}, or the R(m, n) analogue.

    |x^i - 1| = 2 |sin(log(x) / 2)| for x > 0, so membership is a window on
    log(x) modulo 2*pi.  With ``ratio`` set (a degree-0 form product), pair
    membership tests the value R(m, n) instead of a single integer.
    """

    delta: float
    ratio: Optional[RationalFormProduct] = None

    def __post_init__(self):
        if self.delta <= 0:
            raise MultactError(f"delta must be positive, got {self.delta}")
        if self.ratio is not None and self.ratio.degree != 0:
            raise MultactError(
                f"ratio must have degree 0, got degree {self.ratio.degree}"
            )

    def contains(self, n: int) -> bool:
        """Single-integer membership (fully vectorized variant below)."""
        if n < 1:
            raise MultactError(f"need n >= 1, got {n}")
        return 2.0 * abs(math.sin(math.log(n) / 2.0)) <= self.delta

    def contains_range(self, N: int) -> np.ndarray:
        """Boolean mask over n = 1..N."""
        n = np.arange(1, N + 1, dtype=np.float64)
        return 2.0 * np.abs(np.sin(np.log(n) / 2.0)) <= self.delta

    def empirical_density(self, N: int) -> float:
        return float(self.contains_range(N).mean())

    def contains_pair(self, m: int, n: int) -> bool:
        """Membership of (m, n) through the ratio value."""
        if self.ratio is None:
            raise MultactError("pair membership needs a ratio")
        v = self.ratio.evaluate(m, n)
        if v is None:
            raise UndefinedEvaluationError(
                f"ratio undefined at ({m}, {n}): a negative-exponent factor vanishes"
            )
        if v <= 0:
            raise MultactError(f"ratio must be positive at ({m}, {n}), got {v}")
        x = math.log(v.numerator) - math.log(v.denominator)
        return 2.0 * abs(math.sin(x / 2.0)) <= self.delta

    def pair_density(self, N: int) -> float:
        """Empirical density of member pairs on [1, N]^2 (undefined pairs skipped).

        Vectorized through log-space; pairs where any factor vanishes are
        skipped, matching the pointwise membership domain.
        """
        if self.ratio is None:
            raise MultactError("pair density needs a ratio")
        m = np.arange(1, N + 1, dtype=np.float64)
        logval = math.log(self.ratio.c)
        ok = np.ones((N, N), dtype=bool)
        acc = np.full((N, N), logval)
        for form, k in self.ratio.factors:
            v = form.alpha * m[:, None] + form.beta * m[None, :]
            ok &= v > 0
            with np.errstate(divide="ignore", invalid="ignore"):
                acc += k * np.log(np.where(v > 0, v, 1.0))
        count = int(ok.sum())
        if count == 0:
            return 0.0
        member = 2.0 * np.abs(np.sin(acc / 2.0)) <= self.delta
        return float((member & ok).sum()) / count


# ---------------------------------------------------------------------------
# dilation-invariant families


def interval_product_set(K: int, lo: int, hi: int) -> list[int]:
    """{prod p^{a_p} : lo <= a_p <= hi} over the block primes, sorted."""
    if lo < 1 or hi < lo:
        raise MultactError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    primes = block_primes(K)
    if (hi - lo + 1) ** len(primes) > ENUMERATION_GUARD:
        raise EnumerationTooLargeError("exponent window too large to enumerate")
    out = [1]
    for p in primes:
        out = [v * p**a for v in out for a in range(lo, hi + 1)]
    return sorted(out)


def folner_sequence(kind: str, index: int) -> list[int]:
    """The index-th set of a dilation-invariant family.

    ``"interval-products"`` uses the exponent window [1, K+1] (width grows
    with the index); ``"divisor-blocks"`` returns the level-K block values.
    """
    if kind == "interval-products":
        return interval_product_set(index, 1, index + 1)
    if kind == "divisor-blocks":
        return sorted(e.value for e in folner_block(index))
    raise MultactError(f"unknown sequence kind {kind!r}")


def dilation_invariance_ratio(values: Sequence[int], x: int) -> Fraction:
    """|S intersect x*S| / |S| for a finite set of positive integers."""
    s = set(values)
    inter = sum(1 for v in values if v % x == 0 and v // x in s)
    return Fraction(inter, len(s))
