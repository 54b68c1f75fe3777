"""Completely multiplicative functions with unit-disk prime values.

A :class:`MultiplicativeFunction` is determined by its values on primes and
evaluated on integers through factorization (with vectorized fast paths for
ranges and arithmetic progressions), and on positive rationals m/n when the
prime values dividing n are unimodular.  The module also provides the
pretentious distance, target-deviation prime sums, progression means, and a
heuristic classifier against character-times-scaling targets.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ._backend import kernels
from .errors import MultactError, NonUnimodularDivisorError
from .numtheory import (
    DirichletCharacter,
    SieveContext,
    default_context,
    dirichlet_characters,
    factorize,
    primes_up_to,
    progression_factorize,
)

_K = kernels()

_UNIT_TOL = 1e-9


def _e(x: float) -> complex:
    return cmath.exp(2j * cmath.pi * x)


class MultiplicativeFunction:
    """Base class.  Subclasses define values on primes; everything else follows."""

    kind = "abstract"

    # -- values on primes ---------------------------------------------------

    def prime_value(self, p: int) -> complex:
        raise NotImplementedError

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        """Vectorized ``prime_value`` over an int64 array of primes."""
        return np.array([self.prime_value(int(p)) for p in primes], dtype=complex)

    @property
    def is_unimodular(self) -> bool:
        """True when |f(p)| = 1 for every prime."""
        raise NotImplementedError

    @property
    def finitely_generated(self) -> bool:
        """True when {f(p) : p prime} is a finite set."""
        raise NotImplementedError

    def prime_value_set(self) -> Optional[frozenset]:
        """The finite set of prime values, or None when infinite."""
        return None

    # -- evaluation ---------------------------------------------------------

    def __call__(self, n: int) -> complex:
        """f(n) as the product of prime values along the factorization."""
        n = int(n)
        if n < 1:
            raise MultactError(f"multiplicative functions take n >= 1, got {n}")
        out = 1.0 + 0.0j
        for p, e in factorize(n).factors:
            out *= self.prime_value(p) ** e
        return out

    def at_rational(self, m: int, n: int) -> complex:
        """f(m/n) = f(m) * conj(f(n)); n's prime values must be unimodular."""
        for p, _ in factorize(n).factors:
            if abs(abs(self.prime_value(p)) - 1.0) > _UNIT_TOL:
                raise NonUnimodularDivisorError(
                    f"|f({p})| < 1; cannot divide by {n}"
                )
        return self(m) * self(n).conjugate()

    def eval_range(self, N: int, ctx: Optional[SieveContext] = None) -> np.ndarray:
        """complex128 array v with v[n] = f(n) for 1 <= n <= N (v[0] = 0)."""
        ctx = ctx or default_context()
        table = ctx.ensure(N)
        pv = np.zeros(N + 1, dtype=np.complex128)
        pr = primes_up_to(N, ctx)
        pv[pr] = self.prime_values(pr)
        return _K.mult_table(table.spf[: N + 1], pv)

    def eval_progression(
        self, Q: int, b: int, N: int, ctx: Optional[SieveContext] = None
    ) -> np.ndarray:
        """complex128 array of f(Q*n + b) for n = 1..N."""
        pf = progression_factorize(Q, b, N, ctx=ctx)
        return pf.multiplicative_eval(self.prime_value)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_dict(d: dict) -> "MultiplicativeFunction":
        return _from_dict(d)


class Liouville(MultiplicativeFunction):
    """f(p) = -1 for every prime: the parity of the prime-divisor count."""

    kind = "liouville"

    def prime_value(self, p: int) -> complex:
        return -1.0 + 0.0j

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        return np.full(len(primes), -1.0 + 0.0j)

    is_unimodular = True
    finitely_generated = True

    def prime_value_set(self):
        return frozenset({-1.0 + 0.0j})

    def __call__(self, n: int) -> complex:
        return complex(-1.0 if factorize(n).omega & 1 else 1.0)

    def eval_range(self, N, ctx=None):
        ctx = ctx or default_context()
        lam = ctx.ensure(N).liouville_table()
        out = lam[: N + 1].astype(np.complex128)
        out[0] = 0.0
        return out

    def eval_progression(self, Q, b, N, ctx=None):
        ctx = ctx or default_context()
        if Q * N + b <= ctx.auto_limit:
            table = ctx.ensure(Q * N + b)
            idx = Q * np.arange(1, N + 1, dtype=np.int64) + b
            return table.liouville_table()[idx].astype(np.complex128)
        om = progression_factorize(Q, b, N, ctx=ctx).omega_array()
        return (1 - 2 * (om & 1)).astype(np.complex128)

    def to_dict(self):
        return {"kind": self.kind}


class CharacterFunction(MultiplicativeFunction):
    """A Dirichlet character used as a completely multiplicative function."""

    kind = "dirichlet-character"

    def __init__(self, modulus: int, index: int):
        chars = dirichlet_characters(modulus)
        if not 0 <= index < len(chars):
            raise MultactError(
                f"character index {index} out of range for modulus {modulus}"
            )
        self.character = chars[index]
        self.modulus = modulus
        self.index = index

    def prime_value(self, p):
        return self.character(p)

    def prime_values(self, primes):
        return self.character.values[np.asarray(primes) % self.modulus]

    @property
    def is_unimodular(self):
        # zero at primes dividing the modulus (none when q = 1)
        return self.modulus == 1

    finitely_generated = True

    def prime_value_set(self):
        return frozenset(complex(v) for v in self.character.values)

    def __call__(self, n):
        if n < 1:
            raise MultactError(f"need n >= 1, got {n}")
        return self.character(n)

    def eval_range(self, N, ctx=None):
        out = self.character.values[np.arange(N + 1) % self.modulus].copy()
        out[0] = 0.0
        return out

    def eval_progression(self, Q, b, N, ctx=None):
        idx = (Q * np.arange(1, N + 1, dtype=object) + b) if Q * N + b >= 2**63 else (
            Q * np.arange(1, N + 1, dtype=np.int64) + b
        )
        res = np.asarray(idx) % self.modulus
        return self.character.values[res.astype(np.int64)]

    def to_dict(self):
        return {"kind": self.kind, "modulus": self.modulus, "index": self.index}


class ModifiedCharacterFunction(MultiplicativeFunction):
    """Character values off the modulus primes, value 1 on them.

    Unimodular everywhere, agreeing with the underlying character at all
    primes not dividing the modulus.
    """

    kind = "modified-dirichlet-character"

    def __init__(self, modulus: int, index: int):
        base = CharacterFunction(modulus, index)
        self.character = base.character
        self.modulus = modulus
        self.index = index
        self._strip = [p for p, _ in factorize(modulus).factors]

    def prime_value(self, p):
        if self.modulus % p == 0:
            return 1.0 + 0.0j
        return self.character(p)

    def prime_values(self, primes):
        primes = np.asarray(primes)
        out = self.character.values[primes % self.modulus].copy()
        for p in self._strip:
            out[primes == p] = 1.0
        return out

    is_unimodular = True
    finitely_generated = True

    def prime_value_set(self):
        vals = {complex(v) for v in self.character.values if abs(v) > 0.5}
        vals.add(1.0 + 0.0j)
        return frozenset(vals)

    def _stripped_residue(self, n: int) -> int:
        for p in self._strip:
            while n % p == 0:
                n //= p
        return n % self.modulus

    def __call__(self, n):
        if n < 1:
            raise MultactError(f"need n >= 1, got {n}")
        return self.character(self._stripped_residue(int(n)))

    def stripped_residues(self, values: np.ndarray) -> np.ndarray:
        """Vectorized modulus-prime stripping followed by reduction mod q."""
        v = values.copy()
        for p in self._strip:
            while True:
                mask = v % p == 0
                if not mask.any():
                    break
                v[mask] //= p
        return (v % self.modulus).astype(np.int64)

    def eval_range(self, N, ctx=None):
        v = np.arange(N + 1, dtype=np.int64)
        v[0] = 1
        out = self.character.values[self.stripped_residues(v)].copy()
        out[0] = 0.0
        return out

    def eval_progression(self, Q, b, N, ctx=None):
        if Q * N + b < 2**63:
            v = Q * np.arange(1, N + 1, dtype=np.int64) + b
            return self.character.values[self.stripped_residues(v)]
        vals = [Q * n + b for n in range(1, N + 1)]
        return np.array([self(v) for v in vals], dtype=complex)

    def to_dict(self):
        return {"kind": self.kind, "modulus": self.modulus, "index": self.index}


class Archimedean(MultiplicativeFunction):
    """f(n) = n**(i*t): the continuous scaling character."""

    kind = "archimedean"

    def __init__(self, t: float):
        self.t = float(t)

    def prime_value(self, p):
        return cmath.exp(1j * self.t * math.log(p))

    def prime_values(self, primes):
        return np.exp(1j * self.t * np.log(np.asarray(primes, dtype=np.float64)))

    is_unimodular = True

    @property
    def finitely_generated(self):
        return self.t == 0.0

    def prime_value_set(self):
        return frozenset({1.0 + 0.0j}) if self.t == 0.0 else None

    def __call__(self, n):
        if n < 1:
            raise MultactError(f"need n >= 1, got {n}")
        return cmath.exp(1j * self.t * math.log(n))

    def eval_range(self, N, ctx=None):
        n = np.arange(N + 1, dtype=np.float64)
        n[0] = 1.0
        out = np.exp(1j * self.t * np.log(n))
        out[0] = 0.0
        return out

    def eval_progression(self, Q, b, N, ctx=None):
        v = Q * np.arange(1, N + 1, dtype=np.float64) + b
        return np.exp(1j * self.t * np.log(v))

    def to_dict(self):
        return {"kind": self.kind, "t": self.t}


class PrimeTableFunction(MultiplicativeFunction):
    """Explicit prime values from a finite table, a default elsewhere."""

    kind = "prime-table"

    def __init__(self, values: dict[int, complex], default: complex = 1.0):
        self.table = {int(p): complex(v) for p, v in values.items()}
        self.default = complex(default)
        for p, v in list(self.table.items()) + [(0, self.default)]:
            if abs(v) > 1.0 + _UNIT_TOL:
                raise MultactError(f"prime value {v} leaves the unit disk")

    def prime_value(self, p):
        return self.table.get(int(p), self.default)

    def prime_values(self, primes):
        out = np.full(len(primes), self.default, dtype=complex)
        for i, p in enumerate(np.asarray(primes)):
            v = self.table.get(int(p))
            if v is not None:
                out[i] = v
        return out

    @property
    def is_unimodular(self):
        vals = list(self.table.values()) + [self.default]
        return all(abs(abs(v) - 1.0) <= _UNIT_TOL for v in vals)

    finitely_generated = True

    def prime_value_set(self):
        return frozenset(list(self.table.values()) + [self.default])

    def to_dict(self):
        return {
            "kind": self.kind,
            "values": {str(p): [v.real, v.imag] for p, v in self.table.items()},
            "default": [self.default.real, self.default.imag],
        }


class OscillatoryLogLog(MultiplicativeFunction):
    """f(p) = e(1 / log log p) for p >= 3; f(2) = 1 keeps the value defined."""

    kind = "oscillatory-loglog"

    def prime_value(self, p):
        if p == 2:
            return 1.0 + 0.0j
        return _e(1.0 / math.log(math.log(p)))

    def prime_values(self, primes):
        primes = np.asarray(primes, dtype=np.float64)
        out = np.exp(2j * np.pi / np.log(np.log(np.maximum(primes, 3.0))))
        out[primes == 2.0] = 1.0
        return out

    is_unimodular = True
    finitely_generated = False

    def to_dict(self):
        return {"kind": self.kind}


class PowerFunction(MultiplicativeFunction):
    """f = base**k on primes; negative k requires a unimodular base."""

    kind = "power"

    def __init__(self, base: MultiplicativeFunction, k: int):
        self.base = base
        self.k = int(k)
        if self.k < 0 and not base.is_unimodular:
            raise MultactError("negative powers need a unimodular base")

    def prime_value(self, p):
        v = self.base.prime_value(p)
        if self.k < 0:
            return v.conjugate() ** (-self.k)
        return v**self.k

    def prime_values(self, primes):
        v = self.base.prime_values(primes)
        if self.k < 0:
            return np.conj(v) ** (-self.k)
        return v**self.k

    @property
    def is_unimodular(self):
        return self.k == 0 or self.base.is_unimodular

    @property
    def finitely_generated(self):
        return self.k == 0 or self.base.finitely_generated

    def prime_value_set(self):
        if self.k == 0:
            return frozenset({1.0 + 0.0j})
        s = self.base.prime_value_set()
        if s is None:
            return None
        if self.k < 0:
            return frozenset(v.conjugate() ** (-self.k) for v in s)
        return frozenset(v**self.k for v in s)

    def __call__(self, n):
        v = self.base(n)
        if self.k < 0:
            return v.conjugate() ** (-self.k)
        return v**self.k

    def eval_range(self, N, ctx=None):
        v = self.base.eval_range(N, ctx)
        out = np.conj(v) ** (-self.k) if self.k < 0 else v**self.k
        out[0] = 0.0
        return out

    def eval_progression(self, Q, b, N, ctx=None):
        v = self.base.eval_progression(Q, b, N, ctx)
        return np.conj(v) ** (-self.k) if self.k < 0 else v**self.k

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict(), "k": self.k}


class ProductFunction(MultiplicativeFunction):
    """Pointwise product of several multiplicative functions."""

    kind = "product"

    def __init__(self, parts: Sequence[MultiplicativeFunction]):
        if not parts:
            raise MultactError("product of zero functions; use PrimeTableFunction")
        self.parts = list(parts)

    def prime_value(self, p):
        out = 1.0 + 0.0j
        for f in self.parts:
            out *= f.prime_value(p)
        return out

    def prime_values(self, primes):
        out = np.ones(len(primes), dtype=complex)
        for f in self.parts:
            out *= f.prime_values(primes)
        return out

    @property
    def is_unimodular(self):
        return all(f.is_unimodular for f in self.parts)

    @property
    def finitely_generated(self):
        return all(f.finitely_generated for f in self.parts)

    def prime_value_set(self):
        sets = [f.prime_value_set() for f in self.parts]
        if any(s is None for s in sets):
            return None
        out = {1.0 + 0.0j}
        for s in sets:
            out = {a * b for a in out for b in s}
        return frozenset(out)

    def __call__(self, n):
        out = 1.0 + 0.0j
        for f in self.parts:
            out *= f(n)
        return out

    def eval_range(self, N, ctx=None):
        out = self.parts[0].eval_range(N, ctx)
        for f in self.parts[1:]:
            out = out * f.eval_range(N, ctx)
        return out

    def eval_progression(self, Q, b, N, ctx=None):
        out = self.parts[0].eval_progression(Q, b, N, ctx)
        for f in self.parts[1:]:
            out = out * f.eval_progression(Q, b, N, ctx)
        return out

    def to_dict(self):
        return {"kind": self.kind, "parts": [f.to_dict() for f in self.parts]}


def _from_dict(d: dict) -> MultiplicativeFunction:
    kind = d.get("kind")
    if kind == "liouville":
        return Liouville()
    if kind == "dirichlet-character":
        return CharacterFunction(d["modulus"], d["index"])
    if kind == "modified-dirichlet-character":
        return ModifiedCharacterFunction(d["modulus"], d["index"])
    if kind == "archimedean":
        return Archimedean(d["t"])
    if kind == "prime-table":
        vals = {int(p): complex(v[0], v[1]) for p, v in d.get("values", {}).items()}
        dv = d.get("default", [1.0, 0.0])
        return PrimeTableFunction(vals, complex(dv[0], dv[1]))
    if kind == "oscillatory-loglog":
        return OscillatoryLogLog()
    if kind == "power":
        return PowerFunction(_from_dict(d["base"]), d["k"])
    if kind == "product":
        return ProductFunction([_from_dict(p) for p in d["parts"]])
    raise MultactError(f"unknown multiplicative function kind {kind!r}")


# ---------------------------------------------------------------------------
# pretentious distance and diagnostics


@dataclass(frozen=True)
class PretentiousTarget:
    """A comparison target chi * n**(i*t) built from a character and a scaling."""

    chi: DirichletCharacter
    t: float

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        primes = np.asarray(primes, dtype=np.int64)
        vals = self.chi.values[primes % self.chi.modulus]
        if self.t != 0.0:
            vals = vals * np.exp(1j * self.t * np.log(primes.astype(np.float64)))
        return vals


class MeanReport(NamedTuple):
    """A mean together with the number of samples it averaged."""

    value: complex
    count: int


def pretentious_distance_sq(
    f: MultiplicativeFunction,
    g: MultiplicativeFunction,
    P: int,
    ctx: Optional[SieveContext] = None,
) -> float:
    """sum_{p <= P} (1 - Re(f(p) * conj(g(p)))) / p, nondecreasing in P."""
    if P < 2:
        raise MultactError(f"need P >= 2, got {P}")
    pr = primes_up_to(P, ctx)
    fv = f.prime_values(pr)
    gv = g.prime_values(pr)
    terms = (1.0 - np.real(fv * np.conj(gv))) / pr
    return float(np.sum(terms))


def distance_sq_to_target(
    f: MultiplicativeFunction,
    target: PretentiousTarget,
    P: int,
    ctx: Optional[SieveContext] = None,
) -> float:
    """Pretentious distance squared from f to chi * n**(i*t)."""
    if P < 2:
        raise MultactError(f"need P >= 2, got {P}")
    pr = primes_up_to(P, ctx)
    fv = f.prime_values(pr)
    gv = target.prime_values(pr)
    terms = (1.0 - np.real(fv * np.conj(gv))) / pr
    return float(np.sum(terms))


def pretentious_tail_sum(
    f: MultiplicativeFunction,
    target: PretentiousTarget,
    K: int,
    N: int,
    ctx: Optional[SieveContext] = None,
) -> complex:
    """sum over K < p <= N of (f(p) * conj(chi(p)) * p**(-i t) - 1) / p."""
    if K < 2 or N <= K:
        raise MultactError(f"need 2 <= K < N, got K={K}, N={N}")
    pr = primes_up_to(N, ctx)
    pr = pr[pr > K]
    if len(pr) == 0:
        return 0.0 + 0.0j
    fv = f.prime_values(pr)
    cv = np.conj(target.chi.values[pr % target.chi.modulus])
    tv = np.exp(-1j * target.t * np.log(pr.astype(np.float64)))
    return complex(np.sum((fv * cv * tv - 1.0) / pr))


def progression_mean(
    f: MultiplicativeFunction,
    a: int,
    b: int,
    N: int,
    ctx: Optional[SieveContext] = None,
) -> MeanReport:
    """Mean of f(a*n + b) over n = 1..N."""
    vals = f.eval_progression(a, b, N, ctx)
    return MeanReport(complex(np.mean(vals)), int(N))


def restricted_mean(
    f: MultiplicativeFunction,
    a: int,
    b: int,
    N: int,
    restriction,
    ctx: Optional[SieveContext] = None,
) -> MeanReport:
    """Mean of f(a*n + b) over the n in [N] kept by the restriction.

    ``restriction`` is a phase-window membership object (see
    :mod:`multact_lab.folner`) applied to the index n.
    """
    from .errors import EmptyRestrictionError

    mask = restriction.contains_range(N)
    count = int(mask.sum())
    if count == 0:
        raise EmptyRestrictionError(
            f"no indices of [1, {N}] satisfy the restriction"
        )
    vals = f.eval_progression(a, b, N, ctx)
    return MeanReport(complex(np.mean(vals[mask])), count)


@dataclass
class ClassifyReport:
    """Ranked distances from f to the supplied targets.  Heuristic only."""

    best: Optional[tuple[PretentiousTarget, float]]
    candidates: list[tuple[PretentiousTarget, float]]


def classify(
    f: MultiplicativeFunction,
    P: int,
    moduli: Sequence[int],
    t_grid: Sequence[float],
    threshold: Optional[float] = None,
    ctx: Optional[SieveContext] = None,
) -> ClassifyReport:
    """Distance-squared of f to every chi * n**(i*t) on the candidate grid.

    Reports the minimizer (or None if a threshold is given and nothing beats
    it).  This is a finite-P diagnostic; it never claims a limit behavior.
    """
    if P < 100:
        raise MultactError(f"need P >= 100 for a meaningful scan, got {P}")
    pr = primes_up_to(P, ctx)
    fv = f.prime_values(pr)
    logp = np.log(pr.astype(np.float64))
    scored: list[tuple[PretentiousTarget, float]] = []
    for q in moduli:
        for chi in dirichlet_characters(q):
            cv = np.conj(chi.values[pr % q])
            base = fv * cv
            for t in t_grid:
                tv = np.exp(-1j * float(t) * logp) if t else 1.0
                d2 = float(np.sum((1.0 - np.real(base * tv)) / pr))
                scored.append((PretentiousTarget(chi, float(t)), d2))
    scored.sort(key=lambda td: td[1])
    best = scored[0] if scored else None
    if best is not None and threshold is not None and best[1] > threshold:
        best = None
    return ClassifyReport(best, scored)
