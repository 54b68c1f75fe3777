"""Finite simulators of multiplicative measure-preserving actions.

Three realizations:

* :class:`PermutationAction` -- commuting permutation generators S_1..S_G of a
  finite uniform space, composed through completely additive exponents:
  the transform at n is S_1^{a_1(n)} ... S_G^{a_G(n)}.
* :class:`DilationAction` -- x -> n^k x on Z_M with M prime, so every n
  coprime to M acts invertibly.
* :class:`FourierRotation` -- exact rotation bookkeeping on finitely many
  Fourier coefficients, for unimodular multiplicative functions whose
  rotation closure is the full circle.

All actions extend to positive rationals via the transform at m/n being the
transform at m composed with the inverse transform at n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    InvalidPartitionError,
    MultactError,
    NonInvertibleArgumentError,
    NoncommutingGeneratorsError,
    SpaceMismatchError,
    UnsupportedActionError,
)
from .multfn import MultiplicativeFunction
from .numtheory import SieveContext, factorize, is_prime, progression_factorize

Rational = Union[int, tuple, Fraction]


def as_pair(r: Rational) -> tuple[int, int]:
    """Normalize a rational argument to a positive (numerator, denominator)."""
    if isinstance(r, Fraction):
        num, den = r.numerator, r.denominator
    elif isinstance(r, tuple):
        num, den = r
    else:
        num, den = int(r), 1
    if num < 1 or den < 1:
        raise MultactError(f"arguments must be positive rationals, got {num}/{den}")
    return int(num), int(den)


@dataclass(frozen=True)
class FiniteSpace:
    """A finite set with the uniform probability measure."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise MultactError(f"space size must be >= 1, got {self.size}")


class Observable:
    """A complex function on a finite space with the L2(uniform) geometry."""

    def __init__(self, space: FiniteSpace, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (space.size,):
            raise SpaceMismatchError(
                f"need {space.size} values, got shape {values.shape}"
            )
        self.space = space
        self.values = values

    @classmethod
    def indicator(cls, space: FiniteSpace, mask) -> "Observable":
        mask = np.asarray(mask, dtype=bool)
        return cls(space, mask.astype(np.complex128))

    @classmethod
    def constant(cls, space: FiniteSpace, c) -> "Observable":
        return cls(space, np.full(space.size, complex(c)))

    @property
    def is_indicator(self) -> bool:
        v = self.values
        return bool(np.all((v == 0) | (v == 1)))

    def mean(self) -> complex:
        return complex(self.values.mean())

    def inner(self, other: "Observable") -> complex:
        self._check(other)
        return complex(np.mean(self.values * np.conj(other.values)))

    def norm(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.values) ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def conj(self) -> "Observable":
        return Observable(self.space, np.conj(self.values))

    def _check(self, other):
        if not isinstance(other, Observable) or other.space != self.space:
            raise SpaceMismatchError("observables live on different spaces")

    def __add__(self, other):
        self._check(other)
        return Observable(self.space, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return Observable(self.space, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, Observable):
            self._check(other)
            return Observable(self.space, self.values * other.values)
        return Observable(self.space, self.values * complex(other))

    __rmul__ = __mul__


class FourierObservable:
    """A finite combination of orthonormal circle characters e_k."""

    def __init__(self, coeffs: dict[int, complex]):
        self.coeffs = {int(k): complex(v) for k, v in coeffs.items() if v != 0}

    @classmethod
    def basis(cls, k: int) -> "FourierObservable":
        return cls({k: 1.0})

    def mean(self) -> complex:
        return self.coeffs.get(0, 0.0 + 0.0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self.coeffs.values()))

    def inner(self, other: "FourierObservable") -> complex:
        return sum(
            v * other.coeffs.get(k, 0).conjugate() for k, v in self.coeffs.items()
        )

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return FourierObservable(out)

    def __sub__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) - v
        return FourierObservable(out)

    def __mul__(self, other):
        return FourierObservable({k: v * complex(other) for k, v in self.coeffs.items()})

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# completely additive sequences


class AdditiveSequence:
    """a(mn) = a(m) + a(n); defined by integer values on primes."""

    def prime_value(self, p: int) -> int:
        raise NotImplementedError

    def value(self, n: int) -> int:
        n = int(n)
        if n < 1:
            raise MultactError(f"additive sequences take n >= 1, got {n}")
        return sum(e * self.prime_value(p) for p, e in factorize(n).factors)

    def value_rational(self, num: int, den: int) -> int:
        return self.value(num) - self.value(den)

    def values_progression(
        self, Q: int, b: int, N: int, ctx: Optional[SieveContext] = None
    ) -> np.ndarray:
        """int64 array of a(Q*n + b) for n = 1..N."""
        pf = progression_factorize(Q, b, N, ctx=ctx)
        return pf.additive_eval(self.prime_value)

    def value_set(self) -> Optional[frozenset]:
        """Finite set of prime values, or None when unknown/infinite."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


class TableSequence(AdditiveSequence):
    """Explicit prime values from a finite table, a default elsewhere."""

    def __init__(self, prime_map: Optional[dict[int, int]] = None, default: int = 0):
        self.prime_map = {int(p): int(v) for p, v in (prime_map or {}).items()}
        self.default = int(default)

    def prime_value(self, p):
        return self.prime_map.get(int(p), self.default)

    def value_set(self):
        return frozenset(list(self.prime_map.values()) + [self.default])

    def _listed_corrections(self, vals: np.ndarray, relative_to: int) -> np.ndarray:
        out = np.zeros(len(vals), dtype=np.int64)
        for p, a in self.prime_map.items():
            if a == relative_to:
                continue
            v = vals.copy()
            while True:
                mask = v % p == 0
                if not mask.any():
                    break
                out[mask] += a - relative_to
                v[mask] //= p
        return out

    def values_progression(self, Q, b, N, ctx=None):
        from .numtheory import default_context

        ctx = ctx or default_context()
        maxv = Q * N + b
        if maxv >= 2**62:
            return super().values_progression(Q, b, N, ctx)
        vals = Q * np.arange(1, N + 1, dtype=np.int64) + b
        if self.default == 0:
            # only the listed primes contribute
            return self._listed_corrections(vals, 0)
        if maxv <= ctx.auto_limit:
            table = ctx.ensure(maxv)
            om = table.omega_table()[vals].astype(np.int64)
            return self.default * om + self._listed_corrections(vals, self.default)
        return super().values_progression(Q, b, N, ctx)

    def to_dict(self):
        return {
            "values": {str(p): v for p, v in self.prime_map.items()},
            "default": self.default,
        }


def omega_sequence() -> TableSequence:
    """The prime-divisor count with multiplicity, as an additive sequence."""
    return TableSequence({}, default=1)


_DLOG_ORDER_MAX = 360
_DLOG_TOL = 1e-9


def _root_order(values) -> int:
    """Smallest d <= the guard with every value on the d-th roots of unity."""
    for d in range(1, _DLOG_ORDER_MAX + 1):
        ok = True
        for v in values:
            if abs(v**d - 1.0) > 1e-7:
                ok = False
                break
        if ok:
            return d
    raise MultactError(
        "prime values are not all low-order roots of unity; "
        "cannot build a cyclic rotation"
    )


def _dlog_indices(values: np.ndarray, order: int) -> np.ndarray:
    """Map unit-circle values to exponent indices on the order-d root grid."""
    ang = np.angle(values) / (2 * np.pi)
    idx = np.rint(ang * order).astype(np.int64) % order
    check = np.exp(2j * np.pi * idx / order)
    if np.max(np.abs(check - values), initial=0.0) > 1e-6:
        raise MultactError("value off the root-of-unity grid; cannot take dlog")
    return idx


class DlogSequence(AdditiveSequence):
    """Discrete logarithm of a finite-range unimodular multiplicative function."""

    def __init__(self, function: MultiplicativeFunction, order: Optional[int] = None):
        if not function.is_unimodular:
            raise MultactError("dlog needs a unimodular function")
        vset = function.prime_value_set()
        if vset is None:
            raise MultactError("dlog needs a finite prime value set")
        self.function = function
        self.order = order if order is not None else _root_order(vset)

    def prime_value(self, p):
        return int(
            _dlog_indices(np.array([self.function.prime_value(p)]), self.order)[0]
        )

    def value(self, n):
        return int(_dlog_indices(np.array([self.function(n)]), self.order)[0])

    def value_set(self):
        vset = self.function.prime_value_set()
        return frozenset(
            int(i) for i in _dlog_indices(np.array(sorted(vset, key=lambda z: (z.real, z.imag))), self.order)
        )

    def values_progression(self, Q, b, N, ctx=None):
        vals = self.function.eval_progression(Q, b, N, ctx)
        return _dlog_indices(vals, self.order)

    def to_dict(self):
        return {"dlog-of": self.function.to_dict(), "order": self.order}


# ---------------------------------------------------------------------------
# permutation actions


def _perm_order(perm: np.ndarray) -> int:
    seen = np.zeros(len(perm), dtype=bool)
    order = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = int(perm[x])
            length += 1
        order = math.lcm(order, length)
    return order


def _validate_perm(perm, M: int) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (M,) or not np.array_equal(np.sort(perm), np.arange(M)):
        raise MultactError(f"not a permutation of 0..{M - 1}")
    return perm


class PermutationAction:
    """Commuting permutation generators with additive exponent sequences.

    The transform at n sends x to S_1^{a_1(n)} ... S_G^{a_G(n)} applied to x;
    by complete additivity the family satisfies the multiplicative
    composition law, with the identity at n = 1.
    """

    kind = "permutation"

    def __init__(
        self,
        space: FiniteSpace,
        generators: Sequence[tuple[np.ndarray, AdditiveSequence]],
    ):
        self.space = space
        M = space.size
        perms = [_validate_perm(p, M) for p, _ in generators]
        self.sequences = [s for _, s in generators]
        for i in range(len(perms)):
            for j in range(i + 1, len(perms)):
                if not np.array_equal(perms[i][perms[j]], perms[j][perms[i]]):
                    raise NoncommutingGeneratorsError(
                        f"generators {i} and {j} do not commute"
                    )
        self.perms = perms
        self.orders = [_perm_order(p) for p in perms]
        # power tables: _powers[i][e] applies S_i e times
        self._powers = []
        for p, d in zip(perms, self.orders):
            rows = [np.arange(M, dtype=np.int64)]
            for _ in range(d - 1):
                rows.append(p[rows[-1]])
            self._powers.append(rows)
        self._perm_cache: dict[tuple, np.ndarray] = {}

    @property
    def n_generators(self) -> int:
        return len(self.perms)

    def perm_for_exponents(self, exps: Sequence[int]) -> np.ndarray:
        key = tuple(int(e) % d for e, d in zip(exps, self.orders))
        hit = self._perm_cache.get(key)
        if hit is not None:
            return hit
        out = np.arange(self.space.size, dtype=np.int64)
        for rows, e in zip(self._powers, key):
            out = rows[e][out]
        self._perm_cache[key] = out
        return out

    def exponents_of(self, r: Rational) -> tuple[int, ...]:
        num, den = as_pair(r)
        return tuple(
            s.value(num) - (s.value(den) if den > 1 else 0) for s in self.sequences
        )

    def transform(self, r: Rational) -> np.ndarray:
        """The index map of the transform at r (an M-permutation)."""
        return self.perm_for_exponents(self.exponents_of(r))

    def apply(self, r: Rational, F: Observable) -> Observable:
        """The composition F after the transform at r."""
        if F.space != self.space:
            raise SpaceMismatchError("observable lives on a different space")
        return Observable(self.space, F.values[self.transform(r)])

    def preimage(self, r: Rational, A: Observable) -> Observable:
        """Indicator of the preimage of the set A under the transform at r."""
        if not A.is_indicator:
            raise MultactError("preimage needs an indicator observable")
        return self.apply(r, A)

    # -- machinery for the averaging engines --------------------------------

    def joint_dims(self) -> list[int]:
        return list(self.orders)

    def prime_transform_exponents(self, bound: int = 1000) -> set[tuple[int, ...]]:
        """Exponent tuples realized by the transforms at primes.

        Scans primes up to ``bound``; table-backed sequences also contribute
        their default tuple, which is realized by every unlisted prime.
        """
        from .numtheory import primes_up_to

        tuples = set()
        for p in primes_up_to(bound):
            tuples.add(tuple(s.prime_value(int(p)) for s in self.sequences))
        if all(isinstance(s, TableSequence) for s in self.sequences):
            tuples.add(tuple(s.default for s in self.sequences))
        return tuples

    def invariant_orbits(self) -> list[np.ndarray]:
        """Orbits of the group generated by the prime transforms."""
        gens = [
            self.perm_for_exponents(t) for t in self.prime_transform_exponents()
        ]
        M = self.space.size
        label = np.full(M, -1, dtype=np.int64)
        orbits = []
        for start in range(M):
            if label[start] >= 0:
                continue
            stack = [start]
            label[start] = len(orbits)
            members = [start]
            while stack:
                x = stack.pop()
                for g in gens:
                    y = int(g[x])
                    if label[y] < 0:
                        label[y] = len(orbits)
                        members.append(y)
                        stack.append(y)
            orbits.append(np.array(sorted(members), dtype=np.int64))
        # forward closure suffices: every permutation's inverse is one of its
        # powers, so the generated semigroup is already the group
        return orbits

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "size": self.space.size,
            "generators": [
                {"permutation": p.tolist(), "additive": s.to_dict()}
                for p, s in zip(self.perms, self.sequences)
            ],
        }


def invariant_expectation(action: PermutationAction, F: Observable) -> Observable:
    """Projection onto the functions fixed by every transform of the action.

    Averages F over the orbits of the group generated by the prime
    transforms; the result is invariant and the projection is mean-preserving
    and idempotent.
    """
    if not isinstance(action, PermutationAction):
        raise UnsupportedActionError(
            "invariant expectation needs a permutation action"
        )
    out = np.empty_like(F.values)
    for orbit in action.invariant_orbits():
        out[orbit] = F.values[orbit].mean()
    return Observable(action.space, out)


def conditional_expectation(F: Observable, partition: Sequence) -> Observable:
    """Cell-wise averages over a partition of the space.

    The partition is a sequence of index arrays covering 0..M-1 exactly once.
    The result is idempotent and mean-preserving.
    """
    M = F.space.size
    seen = np.zeros(M, dtype=np.int64)
    out = np.empty_like(F.values)
    for cell in partition:
        cell = np.asarray(cell, dtype=np.int64)
        if len(cell) == 0:
            raise InvalidPartitionError("empty cell")
        seen[cell] += 1
        out[cell] = F.values[cell].mean()
    if not np.all(seen == 1):
        raise InvalidPartitionError("cells must cover the space exactly once")
    return Observable(F.space, out)


def cyclic_shift_action(d: int, sequence: AdditiveSequence) -> PermutationAction:
    """The +1 shift on Z_d driven by one additive sequence."""
    space = FiniteSpace(d)
    perm = (np.arange(d, dtype=np.int64) + 1) % d
    return PermutationAction(space, [(perm, sequence)])


def rotation_action(f: MultiplicativeFunction) -> PermutationAction:
    """The rotation by a finite-range unimodular multiplicative function.

    The range closure is the cyclic group of d-th roots of unity; the action
    becomes the +1 shift on Z_d composed a(n) times, where a is the discrete
    logarithm of f.  State x stands for the root of unity e(x / d).
    """
    seq = DlogSequence(f)
    return cyclic_shift_action(seq.order, seq)


def character_observable(action: PermutationAction, j: int = 1) -> Observable:
    """The coordinate character e(j x / d) on a cyclic-shift state space."""
    d = action.space.size
    x = np.arange(d)
    return Observable(action.space, np.exp(2j * np.pi * j * x / d))


# ---------------------------------------------------------------------------
# dilations


class DilationAction:
    """x -> n^k x mod M on Z_M with M prime."""

    kind = "dilation"

    def __init__(self, modulus: int, power: int = 1):
        if not is_prime(modulus):
            raise MultactError(f"modulus {modulus} must be prime")
        if power < 1:
            raise MultactError(f"power must be >= 1, got {power}")
        self.space = FiniteSpace(modulus)
        self.modulus = modulus
        self.power = power

    def multiplier(self, r: Rational) -> int:
        num, den = as_pair(r)
        M = self.modulus
        if num % M == 0 or den % M == 0:
            raise NonInvertibleArgumentError(
                f"{num}/{den} shares a factor with the modulus {M}"
            )
        u = pow(num, self.power, M) * pow(pow(den, self.power, M), M - 2, M) % M
        return u

    def transform(self, r: Rational) -> np.ndarray:
        u = self.multiplier(r)
        return (u * np.arange(self.modulus, dtype=np.int64)) % self.modulus

    def apply(self, r: Rational, F: Observable) -> Observable:
        if F.space != self.space:
            raise SpaceMismatchError("observable lives on a different space")
        return Observable(self.space, F.values[self.transform(r)])

    def preimage(self, r: Rational, A: Observable) -> Observable:
        if not A.is_indicator:
            raise MultactError("preimage needs an indicator observable")
        return self.apply(r, A)

    def interval_indicator(self, lo: float, hi: float) -> Observable:
        """Indicator of {x : lo <= x/M < hi} -- a discretized circle arc."""
        x = np.arange(self.modulus)
        mask = (x >= lo * self.modulus) & (x < hi * self.modulus)
        return Observable.indicator(self.space, mask)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "modulus": self.modulus, "power": self.power}


# ---------------------------------------------------------------------------
# exact Fourier rotations


class FourierRotation:
    """Rotation by a unimodular f, tracked exactly on Fourier coefficients.

    The transform at r scales the k-th coefficient by f(r)^k; observables are
    finite combinations of the circle characters.  Indicator sets are outside
    this model; use it for the exact scalar experiments.
    """

    kind = "fourier-rotation"

    def __init__(self, function: MultiplicativeFunction):
        if not function.is_unimodular:
            raise MultactError("Fourier rotations need a unimodular function")
        self.function = function

    def scalar(self, r: Rational) -> complex:
        num, den = as_pair(r)
        return self.function.at_rational(num, den)

    def apply(self, r: Rational, F: FourierObservable) -> FourierObservable:
        s = self.scalar(r)
        return FourierObservable({k: v * s**k for k, v in F.coeffs.items()})

    def scalars_progression(
        self, Q: int, b: int, N: int, ctx: Optional[SieveContext] = None
    ) -> np.ndarray:
        return self.function.eval_progression(Q, b, N, ctx)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "function": self.function.to_dict()}


Action = Union[PermutationAction, DilationAction, FourierRotation]


def build_action(d: dict) -> Action:
    """Construct an action from its config dictionary."""
    kind = d.get("kind")
    if kind == "permutation":
        M = int(d["size"])
        gens = []
        for g in d["generators"]:
            spec = g["permutation"]
            if isinstance(spec, dict) and "cycle" in spec:
                perm = (np.arange(M, dtype=np.int64) + 1) % M
                if int(spec["cycle"]) != M:
                    raise MultactError("cycle length must match the space size")
            elif isinstance(spec, dict) and "product-of-cycles" in spec:
                perm = np.arange(M, dtype=np.int64)
                for cyc in spec["product-of-cycles"]:
                    for i, x in enumerate(cyc):
                        perm[x] = cyc[(i + 1) % len(cyc)]
            else:
                perm = np.asarray(spec, dtype=np.int64)
            add = g["additive"]
            if "dlog-of" in add:
                seq: AdditiveSequence = DlogSequence(
                    MultiplicativeFunction.from_dict(add["dlog-of"]),
                    add.get("order"),
                )
            else:
                seq = TableSequence(
                    {int(p): int(v) for p, v in add.get("values", {}).items()},
                    add.get("default", 0),
                )
            gens.append((perm, seq))
        return PermutationAction(FiniteSpace(M), gens)
    if kind == "rotation":
        return rotation_action(MultiplicativeFunction.from_dict(d["function"]))
    if kind == "dilation":
        return DilationAction(int(d["modulus"]), int(d.get("power", 1)))
    if kind == "fourier-rotation":
        return FourierRotation(MultiplicativeFunction.from_dict(d["function"]))
    raise MultactError(f"unknown action kind {kind!r}")
