"""Linear forms in two variables and products c * prod L_j^{k_j}.

Forms are stored primitive (content folded into the leading rational
constant) and pairwise independent, so degree, simple zeros, and power-form
structure are decidable by inspection.  Evaluation is exact rational, with
``Fraction(0)`` for a vanishing positive-exponent factor and ``None`` when a
negative-exponent factor vanishes.

By default coefficients must be nonnegative (values are then positive on
N x N); ``allow_negative=True`` admits forms like m - n whose sign is managed
by the caller's domain filters.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DegenerateSubstitutionError,
    EmptyAfterExclusionError,
    MultactError,
    SingularMatrixError,
    TrivialFormError,
)


@dataclass(frozen=True, order=True)
class LinearForm:
    """alpha*m + beta*n with integer coefficients, not both zero."""

    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha == 0 and self.beta == 0:
            raise TrivialFormError("the zero form is not a linear form")

    def __call__(self, m: int, n: int) -> int:
        return self.alpha * m + self.beta * n

    @property
    def content(self) -> int:
        return math.gcd(self.alpha, self.beta)

    @property
    def is_primitive(self) -> bool:
        return self.content == 1 and (self.alpha > 0 or (self.alpha == 0 and self.beta > 0))

    def primitive(self) -> tuple[int, "LinearForm"]:
        """(scale, form) with scale*form == self, form primitive, scale sign-carrying."""
        g = self.content
        a, b = self.alpha // g, self.beta // g
        if a < 0 or (a == 0 and b < 0):
            return -g, LinearForm(-a, -b)
        return g, LinearForm(a, b)

    @property
    def nonnegative(self) -> bool:
        return self.alpha >= 0 and self.beta >= 0

    def __str__(self) -> str:
        def term(c, v):
            if c == 0:
                return ""
            if c == 1:
                return v
            if c == -1:
                return f"-{v}"
            return f"{c}{v}"

        a = term(self.alpha, "m")
        b = term(self.beta, "n")
        if a and b:
            return f"{a}+{b}" if self.beta > 0 else f"{a}{b}"
        return a or b


def independent(L1: LinearForm, L2: LinearForm) -> bool:
    """True when the two forms are not proportional."""
    return L1.alpha * L2.beta != L2.alpha * L1.beta


class RationalFormProduct:
    """c * prod_j L_j^{k_j} in canonical factored shape.

    Canonical means: primitive pairwise-independent forms sorted
    lexicographically, content and signs folded into the positive rational
    constant, zero exponents dropped.
    """

    def __init__(
        self,
        c,
        factors: Sequence[tuple[LinearForm, int]],
        allow_negative: bool = False,
    ):
        c = Fraction(c)
        merged: dict[LinearForm, int] = {}
        for form, k in factors:
            k = int(k)
            if k == 0:
                continue
            scale, prim = form.primitive()
            c *= Fraction(scale) ** k
            merged[prim] = merged.get(prim, 0) + k
        if c <= 0:
            raise MultactError(
                f"constant must stay a positive rational, got {c}"
            )
        self.c = c
        self.factors = tuple(
            sorted(((f, k) for f, k in merged.items() if k != 0))
        )
        self.allow_negative = bool(allow_negative)
        if not allow_negative:
            for f, _ in self.factors:
                if not f.nonnegative:
                    raise MultactError(
                        f"form {f} has a negative coefficient; pass "
                        "allow_negative=True or substitute it away"
                    )

    # -- structure ----------------------------------------------------------

    @property
    def degree(self) -> int:
        """Sum of the factor exponents."""
        return sum(k for _, k in self.factors)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalFormProduct)
            and self.c == other.c
            and self.factors == other.factors
        )

    def __hash__(self) -> int:
        return hash((self.c, self.factors))

    def __repr__(self) -> str:
        return f"RationalFormProduct({self.to_text()!r})"

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, m: int, n: int) -> Optional[Fraction]:
        """Exact value at (m, n).

        Returns ``Fraction(0)`` when a positive-exponent factor vanishes (and
        no negative-exponent one does) and ``None`` when any negative-exponent
        factor vanishes (the value is undefined there).
        """
        num = Fraction(1)
        zero_seen = False
        for form, k in self.factors:
            v = form(m, n)
            if v == 0:
                if k < 0:
                    return None
                zero_seen = True
            else:
                num *= Fraction(v) ** k
        if zero_seen:
            return Fraction(0)
        return self.c * num

    def is_simple_zero(self, m0: int, n0: int) -> bool:
        """True when some exponent-1 factor vanishes at (m0, n0)."""
        return any(k == 1 and form(m0, n0) == 0 for form, k in self.factors)

    def power_order(
        self, excluded: Optional[tuple[LinearForm, LinearForm]] = None
    ) -> int:
        """gcd of exponents after dropping factors proportional to ``excluded``.

        The value r means the remaining product is an exact r-th power of a
        smaller rational form product (r = 1: no power structure).
        """
        drop: list[LinearForm] = []
        if excluded is not None:
            for form in excluded:
                _, prim = form.primitive()
                drop.append(prim)
        ks = [
            k
            for form, k in self.factors
            if not any(not independent(form, d) for d in drop)
        ]
        if not ks:
            raise EmptyAfterExclusionError(
                "every factor was excluded; power order is undefined"
            )
        return math.gcd(*ks)

    def substitute(
        self,
        m_map: tuple[int, int, int] = (1, 0, 0),
        n_map: tuple[int, int, int] = (0, 1, 0),
    ) -> "RationalFormProduct":
        """Apply m -> u*m + v*n, n -> u'*m + v'*n (pure linear; shifts are
        handled at the averaging layer, so the constant parts must be 0)."""
        u, v, w = m_map
        u2, v2, w2 = n_map
        if w != 0 or w2 != 0:
            raise DegenerateSubstitutionError(
                "affine constants are not supported; use grids for shifts"
            )
        new_factors = []
        for form, k in self.factors:
            na = form.alpha * u + form.beta * u2
            nb = form.alpha * v + form.beta * v2
            if na == 0 and nb == 0:
                raise DegenerateSubstitutionError(
                    f"substitution collapses factor {form} to zero"
                )
            new_factors.append((LinearForm(na, nb), k))
        return RationalFormProduct(
            self.c, new_factors, allow_negative=self.allow_negative
        )

    # -- text round-trip -----------------------------------------------------

    def to_text(self) -> str:
        parts = [str(self.c)]
        for form, k in self.factors:
            s = f"({form})"
            if k != 1:
                s += f"^{k}"
            parts.append(s)
        return " * ".join(parts)

    @classmethod
    def parse(cls, text: str, allow_negative: bool = False) -> "RationalFormProduct":
        return parse_rational_form(text, allow_negative=allow_negative)


_TOKEN = re.compile(r"\s*(\d+|[mn()^*/+-])")


def _tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        mobj = _TOKEN.match(text, pos)
        if not mobj:
            raise MultactError(f"cannot tokenize {text!r} at position {pos}")
        out.append(mobj.group(1))
        pos = mobj.end()
    return out


def _parse_linear(tokens: list[str], i: int) -> tuple[LinearForm, int]:
    """Parse 'a m + b n' style content up to a closing paren."""
    alpha = beta = 0
    sign = 1
    coef: Optional[int] = None
    while i < len(tokens) and tokens[i] != ")":
        t = tokens[i]
        if t == "+":
            sign, coef = 1, None
        elif t == "-":
            sign, coef = -1, None
        elif t.isdigit():
            coef = int(t)
        elif t in ("m", "n"):
            c = sign * (coef if coef is not None else 1)
            if t == "m":
                alpha += c
            else:
                beta += c
            sign, coef = 1, None
        else:
            raise MultactError(f"unexpected token {t!r} in linear form")
        i += 1
    return LinearForm(alpha, beta), i


def parse_rational_form(text: str, allow_negative: bool = False) -> RationalFormProduct:
    """Parse the factored syntax ``c * (a m + b n)^k * ...``.

    The constant is an optional exact rational ("3", "3/2"); factors are
    parenthesized linear forms or bare ``m`` / ``n``, each with an optional
    integer exponent ``^k`` (possibly negative).
    """
    tokens = _tokenize(text)
    c = Fraction(1)
    factors: list[tuple[LinearForm, int]] = []
    i = 0

    def parse_exponent(i: int) -> tuple[int, int]:
        if i < len(tokens) and tokens[i] == "^":
            i += 1
            sign = 1
            if i < len(tokens) and tokens[i] == "-":
                sign = -1
                i += 1
            if i >= len(tokens) or not tokens[i].isdigit():
                raise MultactError("exponent must be an integer")
            return sign * int(tokens[i]), i + 1
        return 1, i

    first = True
    while i < len(tokens):
        t = tokens[i]
        if t == "*":
            i += 1
            continue
        if t.isdigit() and first:
            num = int(t)
            i += 1
            if i < len(tokens) and tokens[i] == "/":
                if i + 1 >= len(tokens) or not tokens[i + 1].isdigit():
                    raise MultactError("malformed rational constant")
                c = Fraction(num, int(tokens[i + 1]))
                i += 2
            else:
                c = Fraction(num)
            first = False
            continue
        first = False
        if t == "(":
            form, i = _parse_linear(tokens, i + 1)
            if i >= len(tokens) or tokens[i] != ")":
                raise MultactError("unbalanced parenthesis")
            i += 1
            k, i = parse_exponent(i)
            factors.append((form, k))
        elif t in ("m", "n"):
            form = LinearForm(1, 0) if t == "m" else LinearForm(0, 1)
            k, i = parse_exponent(i + 1)
            factors.append((form, k))
        else:
            raise MultactError(f"unexpected token {t!r}")
    return RationalFormProduct(c, factors, allow_negative=allow_negative)


# ---------------------------------------------------------------------------
# grids and the lattice indicator identity


@dataclass(frozen=True)
class Grid2D:
    """The coset {(a1*m + b1, a2*n + b2)} of a product lattice."""

    a1: int
    b1: int
    a2: int
    b2: int

    def __post_init__(self):
        if self.a1 < 1 or self.a2 < 1:
            raise MultactError("grid steps must be positive")

    def contains(self, m: int, n: int) -> bool:
        return m % self.a1 == self.b1 % self.a1 and n % self.a2 == self.b2 % self.a2


FULL_GRID = Grid2D(1, 0, 1, 0)

_LATTICE_DET_GUARD = 4096


def lattice_indicator_identity(A, m: int, n: int) -> tuple[int, complex]:
    """Membership of (m, n) in A * Z^2, twice.

    Returns the direct test (is ``A^-1 (m, n)`` integral?) together with the
    dual-side exponential average over the finite residue group
    ``{q in ([0,1) cap Q)^2 : q A in Z^2}``; the two agree up to rounding.
    """
    (a, b), (c, d) = (int(A[0][0]), int(A[0][1])), (int(A[1][0]), int(A[1][1]))
    det = a * d - b * c
    if det == 0:
        raise SingularMatrixError("matrix must be invertible over Q")
    if abs(det) > _LATTICE_DET_GUARD:
        raise MultactError(
            f"|det| = {abs(det)} exceeds the {_LATTICE_DET_GUARD} residue guard"
        )
    # direct test: adj(A) (m, n)^T = det * x with x integral
    x1 = d * m - b * n
    x2 = -c * m + a * n
    indicator = 1 if x1 % det == 0 and x2 % det == 0 else 0

    # residue group generated by the rows of A^{-1} mod 1
    group = set()
    for k1 in range(abs(det)):
        for k2 in range(abs(det)):
            q1 = Fraction(k1 * d - k2 * c, det) % 1
            q2 = Fraction(-k1 * b + k2 * a, det) % 1
            group.add((q1, q2))
    if len(group) != abs(det):
        raise MultactError("residue enumeration failed")
    total = 0.0 + 0.0j
    for q1, q2 in group:
        phase = (m * q1 + n * q2) % 1
        total += cmath.exp(2j * cmath.pi * float(phase))
    return indicator, total / len(group)
