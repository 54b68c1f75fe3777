import itertools

import numpy as np
import pytest

from multact_lab import multfn as mf
from multact_lab import uniformity as un
from multact_lab.actions import (
    DilationAction,
    FourierRotation,
    Observable,
    character_observable,
    rotation_action,
)
from multact_lab.errors import (
    CostGuardError,
    DegenerateRangeError,
    MultactError,
    UnsupportedActionError,
)
from multact_lab.numtheory import build_factor_table


def u_pow_expanded(a, s):
    """Fully expanded 2^s-fold sum oracle (no recursion, no FFT)."""
    a = np.asarray(a, dtype=complex)
    N = len(a)
    total = 0.0 + 0.0j
    eps_list = list(itertools.product((0, 1), repeat=s))
    for hs in itertools.product(range(N), repeat=s):
        n = np.arange(N)
        prod = np.ones(N, dtype=complex)
        for eps in eps_list:
            shift = sum(e * h for e, h in zip(eps, hs))
            vals = a[(n + shift) % N]
            if sum(eps) % 2:
                vals = np.conj(vals)
            prod = prod * vals
        total += prod.mean()
    return (total / N**s).real


def random_unimodular(rng, N):
    return np.exp(2j * np.pi * rng.random(N))


class TestGowersNorm:
    def test_constant_one(self):
        for N in (1, 5, 32):
            a = np.ones(N)
            for s in (1, 2, 3):
                assert un.gowers_norm(a, s) == pytest.approx(1.0)

    def test_character_has_full_u2(self):
        N = 16
        for xi in (1, 3, 7):
            a = np.exp(2j * np.pi * xi * np.arange(N) / N)
            assert un.gowers_norm(a, 2) == pytest.approx(1.0, abs=1e-9)
            assert abs(np.mean(a)) < 1e-12  # but no U^1 mass

    def test_random_pm1_u2_small(self):
        rng = np.random.default_rng(0)
        a = rng.choice([-1.0, 1.0], size=256)
        assert un.gowers_norm(a, 2) <= 0.35

    def test_delta_sequence(self):
        a = np.zeros(4)
        a[0] = 1.0
        # hand value via the convolution identity: 4 * (1/4)^4 = 1/64
        assert un.gowers_u2_fft(a) == pytest.approx((1 / 64) ** 0.25)
        assert un.gowers_norm(a, 2) == pytest.approx((1 / 64) ** 0.25)

    def test_fft_matches_recursive_100_sequences(self):
        rng = np.random.default_rng(42)
        sizes = [16, 32, 64, 128, 256, 512, 1024]
        for i in range(100):
            N = sizes[i % len(sizes)]
            a = random_unimodular(rng, N)
            assert abs(un.gowers_u2_fft(a) - un.gowers_norm(a, 2)) < 1e-9

    @pytest.mark.parametrize("N", [4, 8, 16, 32])
    def test_u3_matches_expanded_sum(self, N):
        rng = np.random.default_rng(N)
        a = random_unimodular(rng, N)
        direct = max(u_pow_expanded(a, 3), 0.0) ** (1 / 8)
        assert abs(un.gowers_norm(a, 3) - direct) < 1e-9

    def test_u2_matches_expanded_sum(self):
        rng = np.random.default_rng(7)
        a = random_unimodular(rng, 24)
        direct = max(u_pow_expanded(a, 2), 0.0) ** 0.25
        assert abs(un.gowers_norm(a, 2) - direct) < 1e-9

    def test_triangle_inequality(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            N = int(rng.integers(8, 64))
            a = random_unimodular(rng, N)
            b = random_unimodular(rng, N)
            for s in (1, 2, 3):
                na = un.gowers_norm(a, s)
                nb = un.gowers_norm(b, s)
                nab = un.gowers_norm(a + b, s)
                assert nab <= na + nb + 1e-9

    def test_monotone_in_s(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            N = int(rng.integers(8, 48))
            a = random_unimodular(rng, N)
            n1 = un.gowers_norm(a, 1)
            n2 = un.gowers_norm(a, 2)
            n3 = un.gowers_norm(a, 3)
            assert n1 <= n2 + 1e-9
            assert n2 <= n3 + 1e-9

    def test_fft_u3_matches_recursive(self):
        rng = np.random.default_rng(9)
        a = random_unimodular(rng, 30)
        assert abs(
            un.gowers_norm(a, 3, method="fft") - un.gowers_norm(a, 3)
        ) < 1e-9

    def test_cost_guards(self):
        a = np.ones(2048)
        with pytest.raises(CostGuardError):
            un.gowers_norm(a, 3)  # 2048^3 > guard
        with pytest.raises(CostGuardError):
            un.gowers_norm(np.ones(256), 4)  # high order caps N
        with pytest.raises(CostGuardError):
            un.gowers_norm(np.ones(16), 4, method="fft")
        with pytest.raises(MultactError):
            un.gowers_norm(np.ones(4), 0)

    def test_u4_small(self):
        assert un.gowers_norm(np.ones(8), 4) == pytest.approx(1.0)


class TestMixedSeminorm:
    def test_constant(self):
        a = rotation_action(mf.Liouville())
        for c in (1.0, 0.5, 0.3j):
            F = Observable(a.space, np.full(2, c))
            for s in (1, 2):
                got = un.mixed_seminorm(a, F, s, 200)
                assert got == pytest.approx(abs(c), abs=1e-9)

    def test_monotone_in_s(self):
        a = rotation_action(mf.ModifiedCharacterFunction(3, 1))
        rng = np.random.default_rng(2)
        F = Observable(a.space, rng.standard_normal(2))
        for N in (64, 256):
            vals = [un.mixed_seminorm(a, F, s, N) for s in (1, 2, 3)]
            assert vals[0] <= vals[1] + 1e-9
            assert vals[1] <= vals[2] + 1e-9

    def test_bounded_by_sup(self):
        a = rotation_action(mf.Liouville())
        F = Observable(a.space, [0.9, -0.7])
        for s in (1, 2):
            assert un.mixed_seminorm(a, F, s, 300) <= F.sup_norm() + 1e-9

    def test_liouville_orbit_is_parity_sequence(self):
        a = rotation_action(mf.Liouville())
        F = character_observable(a)
        N = 512
        lam = build_factor_table(N).liouville_table()[1 : N + 1].astype(float)
        expect = un.gowers_norm(lam, 2)
        got = un.mixed_seminorm(a, F, 2, N)
        assert got == pytest.approx(expect, abs=1e-9)

    def test_liouville_ladder_decreasing(self):
        a = rotation_action(mf.Liouville())
        F = character_observable(a)
        v3 = un.mixed_seminorm(a, F, 2, 10**3)
        v4 = un.mixed_seminorm(a, F, 2, 10**4)
        assert v4 < v3
        assert v4 <= 0.2

    def test_dilation_orbits(self):
        act = DilationAction(31)
        F = Observable(act.space, np.exp(2j * np.pi * np.arange(31) / 31))
        got = un.mixed_seminorm(act, F, 2, 60)
        orb = un.orbit_matrix(act, F, 60)
        expect = (
            np.mean([un.gowers_norm(orb[x], 2) ** 4 for x in range(31)]) ** 0.25
        )
        assert got == pytest.approx(expect, abs=1e-12)

    def test_fourier_unsupported(self):
        rot = FourierRotation(mf.Archimedean(1.0))
        F = Observable(rotation_action(mf.Liouville()).space, [1, -1])
        with pytest.raises(UnsupportedActionError):
            un.mixed_seminorm(rot, F, 2, 100)


class TestInverseDiagnostic:
    QR = [(q, r) for q in range(1, 4) for r in range(1, 4)]

    def test_constant_one(self):
        a = rotation_action(mf.Liouville())
        F = Observable.constant(a.space, 1.0)
        rows = un.inverse_diagnostic(a, F, self.QR, [100, 200], s_max=2)
        for row in rows:
            assert row.max_progression_norm == pytest.approx(1.0)
            assert row.seminorms[1] == pytest.approx(1.0)
            assert row.seminorms[2] == pytest.approx(1.0)

    def test_liouville_both_columns_small(self):
        a = rotation_action(mf.Liouville())
        F = character_observable(a)
        rows = un.inverse_diagnostic(a, F, self.QR, [2000, 8000], s_max=2)
        for row in rows:
            assert row.max_progression_norm <= 0.2
            assert row.seminorms[2] <= 0.35
        assert rows[1].seminorms[2] < rows[0].seminorms[2]

    def test_chitilde_both_columns_large(self):
        a = rotation_action(mf.ModifiedCharacterFunction(3, 1))
        F = character_observable(a)
        qr = self.QR + [(3, 1)]
        rows = un.inverse_diagnostic(a, F, qr, [512, 2048], s_max=2)
        for row in rows:
            # the progression 3n+1 transports F to itself exactly
            assert row.max_progression_norm >= 0.999
            assert row.seminorms[2] >= 0.5


class TestKatai:
    def test_constant_array(self):
        A = np.ones((60, 60))
        assert un.katai_correlation(A, (2, 3, 5, 7)) == pytest.approx(1.0)

    def test_liouville_product_exact_one(self):
        N = 400
        lam = build_factor_table(N).liouville_table()[1 : N + 1].astype(float)
        A = np.outer(lam, lam)
        # lam(2m)lam(3n)lam(5m)lam(7n) = lam(210) lam(m)^2 lam(n)^2 = +1
        got = un.katai_correlation(A, (2, 3, 5, 7))
        assert got == pytest.approx(1.0)

    def test_exponential_row_array(self):
        N = 240
        m = np.arange(1, N + 1)
        A = np.exp(2j * np.pi * m[:, None] / N) * np.ones((1, N))
        got = un.katai_correlation(A, (2, 3, 5, 7))
        # geometric-series oracle on the same sub-box
        m_max, n_max = N // 5, N // 7
        phases = np.exp(2j * np.pi * (2 - 5) * np.arange(1, m_max + 1) / N)
        expect = phases.mean()
        assert got == pytest.approx(expect, abs=1e-12)

    def test_equal_ratio_rejected(self):
        with pytest.raises(MultactError):
            un.katai_correlation(np.ones((10, 10)), (2, 3, 4, 6))

    def test_degenerate_range(self):
        with pytest.raises(DegenerateRangeError):
            un.katai_correlation(np.ones((3, 3)), (2, 3, 5, 7))
