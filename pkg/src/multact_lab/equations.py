"""Homogeneous quadratics a x^2 + b y^2 = d xy + e xz + f yz with a + b = d.

Provides the two-parameter solution families (each coordinate a product of
two linear forms), the shift that makes all coefficients nonnegative, the
reduction to four linear forms whose independence pattern drives the
recurrence machinery, and exhaustive monochromatic-solution search under a
coloring.

Every family is verified symbolically at construction: substituting the
coordinate polynomials into the equation must yield the zero polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from .errors import EquationHypothesisError, InvalidShiftError, MultactError
from .linforms import LinearForm, independent

# bivariate integer polynomials as {(i, j): coeff} for m^i n^j


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict[tuple[int, int], int] = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: c for k, c in out.items() if c != 0}


def _poly_add(p: dict, q: dict, scale: int = 1) -> dict:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0) + scale * c
    return {k: c for k, c in out.items() if c != 0}


def _poly_of_form(alpha: int, beta: int) -> dict:
    out = {}
    if alpha:
        out[(1, 0)] = alpha
    if beta:
        out[(0, 1)] = beta
    return out


@dataclass(frozen=True)
class QuadEquation:
    """Coefficients of a x^2 + b y^2 = d xy + e xz + f yz with a + b = d."""

    a: int
    b: int
    d: int
    e: int
    f: int

    def __post_init__(self):
        if self.a < 1 or self.e < 1:
            raise MultactError(f"need a >= 1 and e >= 1, got a={self.a}, e={self.e}")
        if self.a + self.b != self.d:
            raise EquationHypothesisError(
                f"a + b must equal d, got {self.a} + {self.b} != {self.d}"
            )

    def residual(self, x: int, y: int, z: int) -> int:
        return (
            self.a * x * x
            + self.b * y * y
            - self.d * x * y
            - self.e * x * z
            - self.f * y * z
        )

    @property
    def is_degenerate(self) -> bool:
        """The family collapses to (x-y)(x-z) = 0 when a=d=e=-f and b=0."""
        return self.b == 0 and self.a == self.d == self.e == -self.f


@dataclass(frozen=True)
class SolutionFamily:
    """x, y, z as products of two integer linear forms in (m, n)."""

    equation: QuadEquation
    x: tuple[tuple[int, int], tuple[int, int]]
    y: tuple[tuple[int, int], tuple[int, int]]
    z: tuple[tuple[int, int], tuple[int, int]]

    def coordinate_value(self, coord, m: int, n: int) -> int:
        (a1, b1), (a2, b2) = coord
        return (a1 * m + b1 * n) * (a2 * m + b2 * n)

    def value(self, m: int, n: int, k: int = 1) -> tuple[int, int, int]:
        return (
            k * self.coordinate_value(self.x, m, n),
            k * self.coordinate_value(self.y, m, n),
            k * self.coordinate_value(self.z, m, n),
        )

    def _poly(self, coord) -> dict:
        (a1, b1), (a2, b2) = coord
        return _poly_mul(_poly_of_form(a1, b1), _poly_of_form(a2, b2))

    def residual_poly(self) -> dict:
        eq = self.equation
        px, py, pz = self._poly(self.x), self._poly(self.y), self._poly(self.z)
        out = _poly_mul(px, px)
        out = {k: eq.a * c for k, c in out.items()}
        out = _poly_add(out, _poly_mul(py, py), eq.b)
        out = _poly_add(out, _poly_mul(px, py), -eq.d)
        out = _poly_add(out, _poly_mul(px, pz), -eq.e)
        out = _poly_add(out, _poly_mul(py, pz), -eq.f)
        return out

    def verify(self) -> None:
        res = self.residual_poly()
        if res:
            raise MultactError(f"family does not satisfy the equation: {res}")

    @property
    def all_coefficients_nonnegative(self) -> bool:
        return all(
            c >= 0 for coord in (self.x, self.y, self.z) for pair in coord for c in pair
        )


def solution_family(eq: QuadEquation) -> SolutionFamily:
    """The base family x = m(em+fn), y = n(em+fn), z = (m-n)(am-bn)."""
    fam = SolutionFamily(
        eq,
        x=((1, 0), (eq.e, eq.f)),
        y=((0, 1), (eq.e, eq.f)),
        z=((1, -1), (eq.a, -eq.b)),
    )
    fam.verify()
    return fam


def shifted_family(eq: QuadEquation, l: int) -> SolutionFamily:
    """The base family after m -> m + l*n; all coefficients nonnegative.

    Requires l >= 1 with l*e + f > 0 and l*a - b >= 0.
    """
    if l < 1 or l * eq.e + eq.f <= 0 or l * eq.a - eq.b < 0:
        raise InvalidShiftError(
            f"need l >= 1, l*e+f > 0 and l*a-b >= 0; got l={l} for {eq}"
        )
    fam = SolutionFamily(
        eq,
        x=((1, l), (eq.e, l * eq.e + eq.f)),
        y=((0, 1), (eq.e, l * eq.e + eq.f)),
        z=((1, l - 1), (eq.a, l * eq.a - eq.b)),
    )
    fam.verify()
    if not fam.all_coefficients_nonnegative:
        raise InvalidShiftError(f"shift l={l} leaves a negative coefficient")
    return fam


@dataclass(frozen=True)
class RecurrenceForms:
    """The four forms reduced from a shifted family, plus assumption flags.

    The recurrence engine needs L1..L4 and L3-L4 nonnegative and the pairs
    (L3, L4), (L1, L3-L4), (L2, L3-L4) independent; ``degenerate`` marks the
    collapsed coefficient pattern where distinct solutions cannot exist.
    """

    L1: LinearForm
    L2: LinearForm
    L3: LinearForm
    L4: LinearForm
    nonnegative: bool
    independent_pairs: tuple[bool, bool, bool]
    degenerate: bool

    @property
    def all_assumptions_hold(self) -> bool:
        return self.nonnegative and all(self.independent_pairs)


def to_recurrence_forms(eq: QuadEquation, l: int) -> RecurrenceForms:
    """Forms L1 = am+(la-b)n, L2 = em+(le+f)n, L3 = m+ln, L4 = n."""
    shifted_family(eq, l)  # validates the shift
    L1 = LinearForm(eq.a, l * eq.a - eq.b)
    L2 = LinearForm(eq.e, l * eq.e + eq.f)
    L3 = LinearForm(1, l)
    L4 = LinearForm(0, 1)
    diff = LinearForm(L3.alpha - L4.alpha, L3.beta - L4.beta)
    nonneg = all(F.nonnegative for F in (L1, L2, L3, L4, diff))
    pairs = (
        independent(L3, L4),
        independent(L1, diff),
        independent(L2, diff),
    )
    return RecurrenceForms(L1, L2, L3, L4, nonneg, pairs, eq.is_degenerate)


@dataclass(frozen=True)
class MonochromaticTriple:
    k: int
    m: int
    n: int
    x: int
    y: int
    z: int
    color: Hashable


def monochromatic_search(
    coloring: Callable[[int], Hashable],
    eq: QuadEquation,
    N: int,
    k_max: int,
    m_max: int,
    n_max: int,
    require_distinct: bool = False,
) -> list[MonochromaticTriple]:
    """All same-colored solution triples within [1, N] from the dilated family.

    Enumerates (k, m, n) in ascending lexicographic order over the base
    family; keeps triples whose coordinates all land in [1, N], share a
    color, and are not all equal (or pairwise distinct when requested).
    """
    if N < 1:
        raise MultactError(f"need N >= 1, got {N}")
    fam = solution_family(eq)
    out = []
    for k in range(1, k_max + 1):
        for m in range(1, m_max + 1):
            for n in range(1, n_max + 1):
                x, y, z = fam.value(m, n, k)
                if not (1 <= x <= N and 1 <= y <= N and 1 <= z <= N):
                    continue
                if x == y == z:
                    continue
                if require_distinct and (x == y or x == z or y == z):
                    continue
                c = coloring(x)
                if coloring(y) == c and coloring(z) == c:
                    assert eq.residual(x, y, z) == 0
                    out.append(MonochromaticTriple(k, m, n, x, y, z, c))
    return out


def equation_for(
    a: int, b: int, e: int, f: int
) -> QuadEquation:
    """Convenience constructor with d filled in from the standing relation."""
    return QuadEquation(a, b, a + b, e, f)


def random_admissible_equations(
    count: int, seed: int, bound: int = 6
) -> list[QuadEquation]:
    """Seeded sample of equations with valid coefficient patterns."""
    import random as _random

    rng = _random.Random(seed)
    out: list[QuadEquation] = []
    while len(out) < count:
        a = rng.randint(1, bound)
        b = rng.randint(-bound, bound)
        e = rng.randint(1, bound)
        f = rng.randint(-bound, bound)
        out.append(equation_for(a, b, e, f))
    return out
