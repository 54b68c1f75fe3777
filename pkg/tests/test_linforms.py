import math
from fractions import Fraction

import numpy as np
import pytest

from multact_lab.errors import (
    DegenerateSubstitutionError,
    EmptyAfterExclusionError,
    MultactError,
    SingularMatrixError,
    TrivialFormError,
)
from multact_lab.linforms import (
    FULL_GRID,
    Grid2D,
    LinearForm,
    RationalFormProduct,
    independent,
    lattice_indicator_identity,
    parse_rational_form,
)

M = LinearForm(1, 0)
N_ = LinearForm(0, 1)
MpN = LinearForm(1, 1)
Mp2N = LinearForm(1, 2)


class TestLinearForm:
    def test_trivial_rejected(self):
        with pytest.raises(TrivialFormError):
            LinearForm(0, 0)

    def test_independent(self):
        assert independent(M, N_)
        assert not independent(MpN, LinearForm(2, 2))
        assert independent(MpN, Mp2N)

    def test_primitive(self):
        scale, prim = LinearForm(4, 6).primitive()
        assert (scale, prim) == (2, LinearForm(2, 3))
        scale, prim = LinearForm(-2, 2).primitive()
        assert (scale, prim) == (-2, LinearForm(1, -1))


class TestRationalFormProduct:
    def test_eval_basic(self):
        R = RationalFormProduct(1, [(MpN, 1), (Mp2N, 1), (M, -1), (N_, -1)])
        assert R.evaluate(1, 1) == Fraction(6)

    def test_eval_simple_zero_and_boundary(self):
        R1 = RationalFormProduct(1, [(M, 1), (MpN, -1)])
        assert R1.evaluate(1, 0) == Fraction(1)
        R2 = RationalFormProduct(1, [(N_, 1), (MpN, -1)])
        assert R2.evaluate(1, 0) == Fraction(0)

    def test_undefined_when_negative_factor_vanishes(self):
        R = RationalFormProduct(
            1, [(LinearForm(1, -1), -1), (MpN, 1)], allow_negative=True
        )
        assert R.evaluate(2, 2) is None

    def test_zero_loses_to_undefined(self):
        R = RationalFormProduct(
            1,
            [(LinearForm(1, -1), -1), (LinearForm(2, -2) if False else LinearForm(1, -2), 1)],
            allow_negative=True,
        )
        # at (2, 1): m-2n = 0 (zero factor), m-n = 1 (fine) -> Zero
        assert R.evaluate(2, 1) == Fraction(0)
        # at (2, 2): m-n vanishes with negative exponent -> Undefined
        assert R.evaluate(2, 2) is None

    def test_degree(self):
        assert RationalFormProduct(1, [(MpN, 1), (N_, -1)]).degree == 0
        assert RationalFormProduct(1, [(M, 1), (Mp2N, 1), (MpN, -2)]).degree == 0
        assert RationalFormProduct(2, [(M, 2), (N_, 1)]).degree == 3

    def test_simple_zero(self):
        R = RationalFormProduct(1, [(M, 1), (Mp2N, 1), (MpN, -2)])
        assert R.is_simple_zero(0, 1)  # the exponent-1 factor m vanishes
        assert not R.is_simple_zero(1, 1)
        R2 = RationalFormProduct(1, [(M, 2), (N_, 1)])
        assert not R2.is_simple_zero(0, 1)  # m vanishes but with exponent 2

    def test_canonicalization(self):
        # content folds into the constant; proportional factors merge
        R = RationalFormProduct(1, [(LinearForm(2, 2), 2), (MpN, 1)])
        assert R.c == Fraction(4)
        assert R.factors == ((MpN, 3),)
        # idempotent
        R2 = RationalFormProduct(R.c, R.factors)
        assert R2 == R

    def test_nonnegative_enforced_by_default(self):
        with pytest.raises(MultactError):
            RationalFormProduct(1, [(LinearForm(1, -1), 1)])
        RationalFormProduct(1, [(LinearForm(1, -1), 1)], allow_negative=True)

    def test_positive_constant_required(self):
        with pytest.raises(MultactError):
            RationalFormProduct(-2, [(MpN, 1)])

    def test_power_order(self):
        R = RationalFormProduct(1, [(MpN, 2), (Mp2N, 2)])
        assert R.power_order() == 2
        R2 = RationalFormProduct(1, [(M, 1), (Mp2N, 1), (MpN, -2)])
        assert R2.power_order(excluded=(N_, MpN)) == 1
        R3 = RationalFormProduct(1, [(MpN, 3), (Mp2N, 6)])
        assert R3.power_order() == math.gcd(3, 6) == 3
        with pytest.raises(EmptyAfterExclusionError):
            RationalFormProduct(1, [(MpN, 2)]).power_order(excluded=(MpN, N_))

    def test_substitute_negative_form_normalized(self):
        R = RationalFormProduct(
            1, [(LinearForm(1, -1), 1)], allow_negative=True
        )
        S = R.substitute(m_map=(1, 1, 0), n_map=(0, 1, 0))  # m -> m + n
        assert S.factors == ((M, 1),)

    def test_substitute_swap(self):
        R = RationalFormProduct(1, [(MpN, 1), (N_, -1)])
        S = R.substitute(m_map=(0, 1, 0), n_map=(1, 0, 0))
        assert S.factors == ((M, -1), (MpN, 1))

    def test_substitute_commutes_with_eval(self):
        rng = np.random.default_rng(5)
        R = RationalFormProduct(Fraction(3, 2), [(MpN, 2), (Mp2N, -1), (M, 1)])
        for _ in range(1000):
            u, v = int(rng.integers(1, 4)), int(rng.integers(0, 4))
            u2, v2 = int(rng.integers(0, 4)), int(rng.integers(1, 4))
            try:
                S = R.substitute((u, v, 0), (u2, v2, 0))
            except DegenerateSubstitutionError:
                continue
            m, n = int(rng.integers(1, 50)), int(rng.integers(1, 50))
            assert S.evaluate(m, n) == R.evaluate(u * m + v * n, u2 * m + v2 * n)

    def test_substitute_degree_invariant_when_invertible(self):
        R = RationalFormProduct(1, [(MpN, 2), (Mp2N, -1)])
        S = R.substitute((1, 1, 0), (0, 1, 0))
        assert S.degree == R.degree

    def test_substitute_rejects_affine(self):
        R = RationalFormProduct(1, [(MpN, 1)])
        with pytest.raises(DegenerateSubstitutionError):
            R.substitute((1, 0, 1), (0, 1, 0))

    def test_substitute_rejects_collapse(self):
        R = RationalFormProduct(
            1, [(LinearForm(1, -1), 1)], allow_negative=True
        )
        with pytest.raises(DegenerateSubstitutionError):
            R.substitute((1, 1, 0), (1, 1, 0))

    def test_power_order_of_true_power(self):
        # value check: R = c * (root)^r pointwise
        root = RationalFormProduct(1, [(MpN, 1), (Mp2N, 2)])
        R = RationalFormProduct(1, [(MpN, 3), (Mp2N, 6)])
        r = R.power_order()
        for m in range(1, 8):
            for n in range(1, 8):
                assert R.evaluate(m, n) == root.evaluate(m, n) ** r


class TestParser:
    CASES = [
        "1 * (m)",
        "3/2 * (m+n) * (m+2n)^-1",
        "2 * (m+n)^3 * (m+2n)^6",
        "1 * (m) * (m+2n) * (m+n)^-2",
        "5 * (n)^2",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_roundtrip(self, text):
        R = parse_rational_form(text)
        assert parse_rational_form(R.to_text()) == R

    def test_parse_forms(self):
        R = parse_rational_form("(2m+3n)^2 * m^-1")
        assert R.factors == ((LinearForm(1, 0), -1), (LinearForm(2, 3), 2))
        assert R.c == 1

    def test_parse_constant(self):
        assert parse_rational_form("7/3 * (m+n)").c == Fraction(7, 3)

    def test_parse_negative_coefficient(self):
        R = parse_rational_form("(m-n)", allow_negative=True)
        assert R.factors == ((LinearForm(1, -1), 1),)

    def test_parse_garbage(self):
        with pytest.raises(MultactError):
            parse_rational_form("m + *")


class TestLattice:
    def test_identity_matrix(self):
        for mn in [(0, 0), (3, -2), (17, 5)]:
            ind, s = lattice_indicator_identity([[1, 0], [0, 1]], *mn)
            assert ind == 1
            assert s == pytest.approx(1.0)

    def test_diagonal(self):
        ind, s = lattice_indicator_identity([[2, 0], [0, 3]], 2, 3)
        assert ind == 1 and s == pytest.approx(1.0, abs=1e-12)
        ind, s = lattice_indicator_identity([[2, 0], [0, 3]], 1, 3)
        assert ind == 0 and abs(s) < 1e-12

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrixError):
            lattice_indicator_identity([[2, 4], [1, 2]], 1, 1)

    def test_random_agreement(self):
        rng = np.random.default_rng(19)
        done = 0
        while done < 1000:
            A = rng.integers(-4, 5, size=(2, 2))
            if A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0] == 0:
                continue
            if abs(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]) > 12:
                continue
            m, n = int(rng.integers(-50, 51)), int(rng.integers(-50, 51))
            ind, s = lattice_indicator_identity(A.tolist(), m, n)
            assert abs(s - ind) < 1e-12
            done += 1


class TestGrid:
    def test_membership(self):
        g = Grid2D(3, 1, 2, 0)
        assert g.contains(4, 2)
        assert not g.contains(5, 2)
        assert not g.contains(4, 3)
        assert FULL_GRID.contains(1, 1)

    def test_invalid(self):
        with pytest.raises(MultactError):
            Grid2D(0, 0, 1, 0)
