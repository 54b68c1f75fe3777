import pytest

from multact_lab import equations as eqs
from multact_lab.errors import (
    EquationHypothesisError,
    InvalidShiftError,
    MultactError,
)
from multact_lab.linforms import LinearForm
from multact_lab.numtheory import omega


def xz_equation():
    # x^2 - y^2 = x z
    return eqs.QuadEquation(a=1, b=-1, d=0, e=1, f=0)


class TestQuadEquation:
    def test_hypothesis_enforced(self):
        with pytest.raises(EquationHypothesisError):
            eqs.QuadEquation(a=1, b=1, d=3, e=1, f=0)
        with pytest.raises(MultactError):
            eqs.QuadEquation(a=0, b=1, d=1, e=1, f=0)

    def test_degenerate_flag(self):
        assert eqs.QuadEquation(a=2, b=0, d=2, e=2, f=-2).is_degenerate
        assert not xz_equation().is_degenerate


class TestSolutionFamily:
    def test_xz_parametrization(self):
        fam = eqs.solution_family(xz_equation())
        assert fam.x == ((1, 0), (1, 0))  # m^2
        assert fam.y == ((0, 1), (1, 0))  # mn
        assert fam.z == ((1, -1), (1, 1))  # (m-n)(m+n)

    def test_numeric_point(self):
        fam = eqs.solution_family(xz_equation())
        x, y, z = fam.value(5, 2)
        assert (x, y, z) == (25, 10, 21)
        assert 625 - 100 == 525 == 25 * 21

    def test_symbolic_zero_random(self):
        for eq in eqs.random_admissible_equations(20, seed=23):
            fam = eqs.solution_family(eq)
            fam.verify()
            assert fam.residual_poly() == {}

    def test_dilation_invariance(self):
        fam = eqs.solution_family(xz_equation())
        for k in (1, 2, 7):
            x, y, z = fam.value(4, 1, k)
            assert fam.equation.residual(x, y, z) == 0


class TestShiftedFamily:
    def test_xz_shift_one(self):
        fam = eqs.shifted_family(xz_equation(), 1)
        assert fam.x == ((1, 1), (1, 1))  # (m+n)^2
        assert fam.y == ((0, 1), (1, 1))  # n(m+n)
        # z = m(m+2n): from x^2 - y^2 = (m+n)^2 * m * (m+2n) = x*z
        assert fam.z == ((1, 0), (1, 2))
        fam.verify()
        assert fam.all_coefficients_nonnegative

    def test_invalid_shift_rejected(self):
        # a=1, b=3 needs l*a - b >= 0, so l < 3 fails
        eq = eqs.QuadEquation(a=1, b=3, d=4, e=1, f=0)
        with pytest.raises(InvalidShiftError):
            eqs.shifted_family(eq, 2)
        eqs.shifted_family(eq, 3)

    def test_random_shifts_nonnegative(self):
        count = 0
        for eq in eqs.random_admissible_equations(60, seed=77):
            for l in range(1, 12):
                if l * eq.e + eq.f > 0 and l * eq.a - eq.b >= 0:
                    fam = eqs.shifted_family(eq, l)
                    assert fam.all_coefficients_nonnegative
                    count += 1
                    break
        assert count >= 20


class TestRecurrenceForms:
    def test_xz_l2(self):
        rf = eqs.to_recurrence_forms(xz_equation(), 2)
        assert rf.L1 == LinearForm(1, 3)
        assert rf.L2 == LinearForm(1, 2)
        assert rf.L3 == LinearForm(1, 2)
        assert rf.L4 == LinearForm(0, 1)
        assert rf.nonnegative
        assert rf.independent_pairs == (True, True, True)
        assert rf.all_assumptions_hold
        assert not rf.degenerate

    def test_degenerate_flagged(self):
        eq = eqs.QuadEquation(a=1, b=0, d=1, e=1, f=-1)
        rf = eqs.to_recurrence_forms(eq, 2)
        assert rf.degenerate

    def test_dependent_pair_reported(self):
        # a=e and b=f make L1 and L2 proportional but that is allowed;
        # force a failure of (L2, L3-L4) instead: L2 = m + (l-1)n needs e=1,
        # le+f = l-1, i.e. f = -1
        eq = eqs.QuadEquation(a=2, b=3, d=5, e=1, f=-1)
        rf = eqs.to_recurrence_forms(eq, 4)
        assert rf.L2 == LinearForm(1, 3)
        assert rf.independent_pairs[2] is False
        assert not rf.all_assumptions_hold


class TestSearch:
    def test_first_triple_one_color(self):
        hits = eqs.monochromatic_search(
            lambda n: 0, xz_equation(), N=100, k_max=3, m_max=10, n_max=10
        )
        first = hits[0]
        assert (first.k, first.m, first.n) == (1, 2, 1)
        assert (first.x, first.y, first.z) == (4, 2, 3)

    def test_liouville_coloring(self):
        hits = eqs.monochromatic_search(
            lambda n: omega(n) & 1,
            xz_equation(),
            N=10**4,
            k_max=8,
            m_max=40,
            n_max=40,
        )
        assert len(hits) > 0
        for h in hits:
            assert h.x * h.x - h.y * h.y == h.x * h.z
            assert (omega(h.x) & 1) == (omega(h.y) & 1) == (omega(h.z) & 1)
            assert not (h.x == h.y == h.z)

    def test_empty_range(self):
        hits = eqs.monochromatic_search(
            lambda n: 0, xz_equation(), N=1, k_max=1, m_max=1, n_max=1
        )
        assert hits == []

    def test_distinct_filter(self):
        all_hits = eqs.monochromatic_search(
            lambda n: 0, xz_equation(), N=400, k_max=4, m_max=20, n_max=20
        )
        distinct = eqs.monochromatic_search(
            lambda n: 0,
            xz_equation(),
            N=400,
            k_max=4,
            m_max=20,
            n_max=20,
            require_distinct=True,
        )
        assert len(distinct) <= len(all_hits)
        for h in distinct:
            assert len({h.x, h.y, h.z}) == 3
