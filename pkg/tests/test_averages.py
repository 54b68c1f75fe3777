import math

import numpy as np
import pytest

from multact_lab import averages as av
from multact_lab import multfn as mf
from multact_lab.actions import (
    DilationAction,
    FiniteSpace,
    FourierObservable,
    FourierRotation,
    Observable,
    PermutationAction,
    TableSequence,
    character_observable,
    omega_sequence,
    rotation_action,
)
from multact_lab.errors import (
    AllPointsExcludedError,
    MultactError,
    UnsupportedActionError,
    ZeroMeasureError,
)
from multact_lab.folner import PhaseRestriction, folner_block
from multact_lab.linforms import FULL_GRID, Grid2D, LinearForm, parse_rational_form

M_ = LinearForm(1, 0)
N_ = LinearForm(0, 1)
MpN = LinearForm(1, 1)
Mp2N = LinearForm(1, 2)


def liouville_rotation():
    return rotation_action(mf.Liouville())


def chitilde3_rotation():
    return rotation_action(mf.ModifiedCharacterFunction(3, 1))


def direct_multilinear(actions, Fs, forms, N, grid=FULL_GRID):
    """Independent per-point oracle for the grid engine."""
    space = actions[0].space
    acc = np.zeros(space.size, dtype=complex)
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            if not grid.contains(m, n):
                continue
            vec = np.ones(space.size, dtype=complex)
            for a, F, L in zip(actions, Fs, forms):
                vec = vec * a.apply(L(m, n), F).values
            acc += vec
    return acc / (N * N)


def direct_rational_pair(a1, a2, F1, F2, R1, R2, N, domain=None):
    space = a1.space
    acc = np.zeros(space.size, dtype=complex)
    cnt = 0
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            if domain == "m>n" and not m > n:
                continue
            v1 = R1.evaluate(m, n)
            v2 = R2.evaluate(m, n)
            if v1 is None or v2 is None or v1 <= 0 or v2 <= 0:
                continue
            vec = a1.apply((v1.numerator, v1.denominator), F1).values
            vec = vec * a2.apply((v2.numerator, v2.denominator), F2).values
            acc += vec
            cnt += 1
    return acc / cnt, cnt


class TestSingleAverage:
    def test_trivial_action(self):
        space = FiniteSpace(4)
        a = PermutationAction(space, [(np.arange(4), omega_sequence())])
        F = Observable(space, [1, 2, 3, 4])
        for aa, bb in ((1, 0), (3, 2)):
            rep = av.single_average(a, F, aa, bb, 50)
            assert np.allclose(rep.value.values, F.values)

    def test_liouville_mean_small(self):
        a = liouville_rotation()
        F = character_observable(a)
        rep = av.single_average(a, F, 1, 0, 10**6)
        assert rep.value.norm() <= 0.01

    def test_chitilde_progression_exact(self):
        a = chitilde3_rotation()
        F = character_observable(a)
        rep = av.single_average(a, F, 3, 1, 2000)
        assert np.array_equal(rep.value.values, F.values)

    def test_matches_direct_loop(self):
        a = chitilde3_rotation()
        F = Observable(a.space, [0.4 + 0.1j, -0.9])
        N = 200
        rep = av.single_average(a, F, 2, 3, N)
        acc = np.zeros(2, dtype=complex)
        for n in range(1, N + 1):
            acc += a.apply(2 * n + 3, F).values
        assert np.allclose(rep.value.values, acc / N, atol=1e-12)

    def test_cesaro_equals_orbit_mean(self):
        a = liouville_rotation()
        F = character_observable(a)
        N = 500
        rep = av.single_average(a, F, 1, 0, N)
        acc = np.zeros(2, dtype=complex)
        for n in range(1, N + 1):
            acc += a.apply(n, F).values
        assert np.allclose(rep.value.values, acc / N, atol=1e-12)

    def test_fourier_single_average(self):
        rot = FourierRotation(mf.Archimedean(1.0))
        F = FourierObservable({1: 1.0})
        N = 300
        rep = av.single_average(rot, F, 2, 1, N)
        n = np.arange(1, N + 1, dtype=np.float64)
        expect = np.exp(1j * np.log(2 * n + 1)).mean()
        assert rep.value.coeffs[1] == pytest.approx(expect)

    def test_dilation_single_average(self):
        a = DilationAction(11)
        F = Observable(a.space, np.arange(11) * 1.0)
        N = 40
        rep = av.single_average(a, F, 1, 0, N)
        acc = np.zeros(11, dtype=complex)
        cnt = 0
        for n in range(1, N + 1):
            if n % 11 == 0:
                continue
            acc += a.apply(n, F).values
            cnt += 1
        assert rep.contributing == cnt
        assert np.allclose(rep.value.values, acc / cnt, atol=1e-12)

    def test_restriction(self):
        a = liouville_rotation()
        F = character_observable(a)
        rep = av.single_average(a, F, 1, 0, 5000, restriction=PhaseRestriction(0.3))
        assert 0 < rep.contributing < 5000
        assert rep.contributing + rep.excluded == 5000


class TestMultilinear:
    def test_all_ones(self):
        a = liouville_rotation()
        one = Observable(a.space, np.ones(2))
        rep = av.multilinear_average([a] * 3, [one] * 3, [M_, N_, MpN], 50)
        assert np.allclose(rep.value.values, 1.0)
        assert rep.excluded == 0

    def test_matches_direct_oracle(self):
        a = liouville_rotation()
        b = chitilde3_rotation()
        F = Observable(a.space, [0.5, -0.25 + 0.5j])
        G = character_observable(b)
        N = 36
        rep = av.multilinear_average([a, b], [F, G], [MpN, Mp2N], N)
        oracle = direct_multilinear([a, b], [F, G], [MpN, Mp2N], N)
        assert np.allclose(rep.value.values, oracle, atol=1e-12)

    def test_grid_indicator(self):
        a = liouville_rotation()
        F = character_observable(a)
        N = 30
        grid = Grid2D(3, 1, 2, 0)
        rep = av.multilinear_average([a, a], [F, F], [M_, Mp2N], N, grid=grid)
        oracle = direct_multilinear([a, a], [F, F], [M_, Mp2N], N, grid=grid)
        assert np.allclose(rep.value.values, oracle, atol=1e-12)
        inside = sum(
            1
            for m in range(1, N + 1)
            for n in range(1, N + 1)
            if grid.contains(m, n)
        )
        assert rep.contributing == inside

    def test_single_form_consistency(self):
        a = chitilde3_rotation()
        F = Observable(a.space, [1.0, 0.3j])
        N = 60
        rep2 = av.multilinear_average([a], [F], [M_], N)
        rep1 = av.single_average(a, F, 1, 0, N)
        assert np.allclose(rep2.value.values, rep1.value.values, atol=1e-12)

    def test_liouville_four_forms(self):
        a = liouville_rotation()
        F = character_observable(a)
        N = 300
        rep = av.multilinear_average(
            [a] * 4, [F] * 4, [M_, N_, MpN, Mp2N], N
        )
        oracle = direct_multilinear([a] * 4, [F] * 4, [M_, N_, MpN, Mp2N], 40)
        small = av.multilinear_average([a] * 4, [F] * 4, [M_, N_, MpN, Mp2N], 40)
        assert np.allclose(small.value.values, oracle, atol=1e-12)
        assert abs(rep.value.mean()) <= 0.2

    def test_dependent_forms_warn(self):
        a = liouville_rotation()
        F = character_observable(a)
        with pytest.warns(UserWarning):
            av.multilinear_average(
                [a, a], [F, F], [MpN, LinearForm(2, 2)], 20
            )

    def test_norm_bounded_by_sup_product(self):
        a = chitilde3_rotation()
        rng = np.random.default_rng(1)
        F = Observable(a.space, rng.random(2) * 0.8)
        G = Observable(a.space, rng.random(2) * 0.6)
        rep = av.multilinear_average([a, a], [F, G], [M_, MpN], 50)
        assert rep.value.norm() <= F.sup_norm() * G.sup_norm() + 1e-12


class TestRationalPair:
    def test_constant_iterates(self):
        a = liouville_rotation()
        F = character_observable(a)
        G = Observable(a.space, [0.5, 0.5])
        one = parse_rational_form("1")
        rep = av.rational_pair_average(a, a, F, G, one, one, 25)
        assert np.allclose(rep.value.values, (F * G).values)

    def test_excluded_count_m_gt_n(self):
        a = liouville_rotation()
        F = character_observable(a)
        R1 = parse_rational_form("(m) * (n)^-1")
        N = 40
        rep = av.rational_pair_average(a, a, F, F, R1, R1, N, domain="m>n")
        assert rep.excluded == N * (N + 1) // 2
        assert rep.contributing == N * (N - 1) // 2

    def test_matches_direct_oracle(self):
        a = liouville_rotation()
        F = Observable(a.space, [0.9, -0.4])
        G = Observable(a.space, [0.2, 1.0])
        R1 = parse_rational_form("(m) * (n)^-1")
        R2 = parse_rational_form(
            "(m-n) * (m+n) * (m)^-1 * (n)^-1", allow_negative=True
        )
        N = 36
        rep = av.rational_pair_average(a, a, F, G, R1, R2, N, domain="m>n")
        oracle, cnt = direct_rational_pair(a, a, F, G, R1, R2, N, domain="m>n")
        assert rep.contributing == cnt
        assert np.allclose(rep.value.values, oracle, atol=1e-12)

    def test_m2mn_cauchy_gap_small_scale(self):
        a = liouville_rotation()
        F = character_observable(a)
        R1 = parse_rational_form("(m) * (n)^-1")
        R2 = parse_rational_form(
            "(m-n) * (m+n) * (m)^-1 * (n)^-1", allow_negative=True
        )
        reps = {
            N: av.rational_pair_average(a, a, F, F, R1, R2, N, domain="m>n")
            for N in (500, 1000)
        }
        gap = (reps[1000].value - reps[500].value).norm()
        assert gap <= 0.05

    def test_all_excluded(self):
        a = liouville_rotation()
        F = character_observable(a)
        R = parse_rational_form("(m-n)", allow_negative=True)
        with pytest.raises(AllPointsExcludedError):
            av.rational_pair_average(a, a, F, F, R, R, 10, domain="m<n")


class TestRecurrenceProfile:
    def test_whole_space(self):
        a = liouville_rotation()
        A = Observable.indicator(a.space, [True, True])
        prof = av.recurrence_profile([a] * 2, A, [M_, MpN], 20, epsilon=0.05)
        assert prof.good_density == 1.0
        assert prof.max_measure == 1.0

    def test_zero_measure_rejected(self):
        a = liouville_rotation()
        A = Observable.indicator(a.space, [False, False])
        with pytest.raises(ZeroMeasureError):
            av.recurrence_profile([a], A, [M_], 10, epsilon=0.05)

    def test_matches_direct_loop(self):
        a = liouville_rotation()
        A = Observable.indicator(a.space, [True, False])  # {+1}
        forms = [M_, N_, MpN, Mp2N]
        N = 30
        prof = av.recurrence_profile([a] * 4, A, forms, N, epsilon=0.05)
        base = A.values.real
        for m in (1, 7, 23):
            for n in (2, 9, 30):
                inter = base.copy()
                for L in forms:
                    inter = inter * base[a.transform(L(m, n))]
                assert prof.measures[m - 1, n - 1] == pytest.approx(inter.mean())
        # every measure is a count over the space, inside [0, mu(A)]
        mu_A = A.mean().real
        M = a.space.size
        flat = prof.measures[~np.isnan(prof.measures)]
        assert bool(np.all((flat >= 0) & (flat <= mu_A + 1e-15)))
        assert bool(np.all(np.abs(flat * M - np.round(flat * M)) < 1e-12))

    def test_grid_substitution(self):
        a = liouville_rotation()
        A = Observable.indicator(a.space, [True, False])
        N = 25
        grid = Grid2D(7, 1, 7, 0)
        prof = av.recurrence_profile([a] * 2, A, [M_, N_], N, 0.05, grid=grid)
        base = A.values.real
        for m in (3, 11):
            for n in (5, 20):
                inter = base.copy()
                inter = inter * base[a.transform(M_(7 * m + 1, 7 * n))]
                inter = inter * base[a.transform(N_(7 * m + 1, 7 * n))]
                assert prof.measures[m - 1, n - 1] == pytest.approx(inter.mean())

    def test_q_trick_average(self):
        a = liouville_rotation()
        A = Observable.indicator(a.space, [True, False])
        N = 40
        prof = av.recurrence_profile(
            [a] * 2,
            A,
            [M_, N_],
            N,
            epsilon=0.05,
            grid=Grid2D(1, 1, 1, 0),
            q_trick={"K": 2, "samples": "all"},
        )
        Qs = [e.value for e in folner_block(2)]
        assert prof.moduli == Qs
        base = A.values.real
        m, n = 13, 29
        vals = []
        for Q in Qs:
            inter = base.copy()
            inter = inter * base[a.transform(Q * m + 1)]
            inter = inter * base[a.transform(Q * n)]
            vals.append(inter.mean())
        assert prof.measures[m - 1, n - 1] == pytest.approx(np.mean(vals))

    def test_dilation_counterexample_small(self):
        M = 1009
        a = DilationAction(M)
        A = a.interval_indicator(1 / 3, 2 / 3)
        prof = av.recurrence_profile(
            [a] * 3, A, [M_, N_, MpN], 30, epsilon=0.05
        )
        assert prof.max_measure <= 100 / M
        # independent spot check
        base = A.values.real.astype(bool)
        x = np.arange(M)
        m, n = 4, 9
        inter = base & base[(4 * x) % M] & base[(9 * x) % M] & base[(13 * x) % M]
        assert prof.measures[3, 8] == pytest.approx(inter.mean())

    def test_fourier_unsupported(self):
        rot = FourierRotation(mf.Archimedean(1.0))
        A = Observable.indicator(FiniteSpace(2), [True, False])
        with pytest.raises(UnsupportedActionError):
            av.recurrence_profile([rot], A, [M_], 10, epsilon=0.05)


class TestPretentiousProjection:
    def test_chitilde_fully_structured(self):
        a = chitilde3_rotation()
        F = character_observable(a)
        rep = av.pretentious_projection(a, F, K=3, N=2000)
        assert rep.remainder.norm() <= 1e-12
        assert np.allclose(rep.structured.values, F.values)

    def test_constant_observable(self):
        a = liouville_rotation()
        F = Observable.constant(a.space, 0.7)
        rep = av.pretentious_projection(a, F, K=2, N=500)
        assert np.allclose(rep.structured.values, F.values)
        assert rep.remainder.norm() <= 1e-12

    def test_liouville_mostly_uniform(self):
        a = liouville_rotation()
        F = character_observable(a)
        rep = av.pretentious_projection(a, F, K=3, N=20000)
        assert rep.structured.norm() <= 0.05
        assert rep.max_remainder_progression_norm <= 0.2

    def test_mean_preserved(self):
        a = liouville_rotation()
        F = Observable(a.space, [0.8, 0.1 + 0.2j])
        rep = av.pretentious_projection(a, F, K=2, N=300)
        total = rep.structured.mean() + rep.remainder.mean()
        assert total == pytest.approx(F.mean(), abs=1e-12)


class TestConcentration:
    def test_chitilde_exact_zero(self):
        a = chitilde3_rotation()
        F = character_observable(a)
        for Q in (e.value for e in folner_block(3)):
            stat = av.concentration_statistic(a, F, Q, 1, 5000, reference="T_b")
            assert stat == 0.0

    def test_matches_direct_loop(self):
        a = liouville_rotation()
        F = Observable(a.space, [1.0, -0.5 + 0.25j])
        Q, b, N = 12, 5, 400
        stat = av.concentration_statistic(a, F, Q, b, N, reference="T_b")
        ref = a.apply(b, F).values
        acc = 0.0
        for n in range(1, N + 1):
            diff = a.apply(Q * n + b, F).values - ref
            acc += math.sqrt(np.mean(np.abs(diff) ** 2))
        assert stat == pytest.approx(acc / N, abs=1e-12)

    def test_liouville_no_concentration(self):
        a = liouville_rotation()
        F = character_observable(a)
        stat = av.concentration_statistic(a, F, 1296, 1, 20000, reference="T_b")
        assert 0.8 <= stat <= 2.0

    def test_fourier_matches_direct(self):
        rot = FourierRotation(mf.Archimedean(1.0))
        F = FourierObservable({1: 1.0})
        Q, b, N = 720, 1, 3000
        stat = av.concentration_statistic(
            rot, F, Q, b, N, reference="running-average"
        )
        n = np.arange(1, N + 1, dtype=np.float64)
        s = np.exp(1j * np.log(Q * n + b))
        oracle = np.abs(s - s.mean()).mean()
        assert stat == pytest.approx(oracle, abs=1e-12)

    def test_fourier_restricted(self):
        rot = FourierRotation(mf.Archimedean(1.0))
        F = FourierObservable({1: 1.0})
        stat_unres = av.concentration_statistic(
            rot, F, 720, 1, 10**4, reference="running-average"
        )
        stat_res = av.concentration_statistic(
            rot,
            F,
            720,
            1,
            10**4,
            reference="running-average",
            restriction=PhaseRestriction(0.05),
        )
        assert stat_unres >= 0.3
        assert stat_res <= 0.1

    def test_negative_b_needs_running_average(self):
        a = liouville_rotation()
        F = character_observable(a)
        with pytest.raises(MultactError):
            av.concentration_statistic(a, F, 6, -1, 100, reference="T_b")


class TestCorrelation:
    def test_diagonal_is_norm_squared(self):
        a = liouville_rotation()
        F = Observable(a.space, [0.3, 0.4j])
        for r in (1, 3, (5, 2)):
            c = av.correlation(a, F, r, r)
            assert c == pytest.approx(F.norm() ** 2)

    def test_hermitian(self):
        a = chitilde3_rotation()
        F = Observable(a.space, [0.9, 0.1 + 0.7j])
        c_rs = av.correlation(a, F, (3, 2), 5)
        c_sr = av.correlation(a, F, 5, (3, 2))
        assert c_rs == pytest.approx(np.conj(c_sr))

    def test_gram_psd(self):
        rng = np.random.default_rng(11)
        a = liouville_rotation()
        rationals = [1, 2, 3, (1, 2), (3, 2)]
        for _ in range(20):
            F = Observable(a.space, rng.standard_normal(2) + 1j * rng.standard_normal(2))
            G = av.correlation_gram(a, F, rationals)
            assert np.allclose(G, G.conj().T, atol=1e-12)
            eig = np.linalg.eigvalsh(G)
            assert eig.min() >= -1e-9

    def test_trivial_action(self):
        space = FiniteSpace(3)
        a = PermutationAction(space, [(np.arange(3), omega_sequence())])
        F = Observable(space, [1, 2, 3])
        assert av.correlation(a, F, 5, 7) == pytest.approx(F.norm() ** 2)


class TestOmegaProduct:
    def test_constants(self):
        space = FiniteSpace(12)
        perm = (np.arange(12) + 1) % 12
        F = Observable.constant(space, 0.5)
        rep = av.omega_product_average(space, [perm, perm], [F, F], [MpN, Mp2N], 30)
        assert np.allclose(rep.value.values, 0.25)

    def test_engine_matches_direct(self):
        # crossed shifts on Z3 x Z4 embedded in Z12
        space = FiniteSpace(12)
        x = np.arange(12)
        s3 = (x + 4) % 12  # +1 on the Z3 coordinate
        s4 = (x + 3) % 12  # +1 on the Z4 coordinate
        F1 = Observable(space, np.exp(2j * np.pi * (x % 3) / 3))
        F2 = Observable(space, np.exp(2j * np.pi * (x % 4) / 4))
        N = 30
        rep = av.omega_product_average(space, [s3, s4], [F1, F2], [MpN, Mp2N], N)
        a3 = PermutationAction(space, [(s3, omega_sequence())])
        a4 = PermutationAction(space, [(s4, omega_sequence())])
        oracle = direct_multilinear([a3, a4], [F1, F2], [MpN, Mp2N], N)
        assert np.allclose(rep.value.values, oracle, atol=1e-12)

    def test_liouville_reduction(self):
        # a single Z2 shift with Omega exponent reproduces the parity means
        space = FiniteSpace(2)
        perm = np.array([1, 0])
        F = Observable(space, [1.0, -1.0])
        N = 80
        rep = av.omega_product_average(space, [perm], [F], [MpN], N)
        from multact_lab.numtheory import build_factor_table

        lam = build_factor_table(2 * N).liouville_table()
        m = np.arange(1, N + 1)
        expect = lam[(m[:, None] + m[None, :])].mean()
        assert rep.value.values[0] == pytest.approx(expect, abs=1e-12)


class TestDigits:
    def test_all_zero_stream(self):
        streams = {2: np.zeros(64, dtype=np.int64)}
        freq = av.digit_density([2], [0], [MpN], 40, streams=streams)
        assert freq == 1.0

    def test_empty_forms(self):
        assert av.digit_density([], [], [], 100) == 1.0

    def test_matches_direct(self):
        from multact_lab.numtheory import build_factor_table

        N = 60
        streams = av.digit_streams([2, 3], 32, seed=5)
        freq = av.digit_density(
            [2, 3], [1, 2], [MpN, Mp2N], N, streams=streams
        )
        om = build_factor_table(4 * N).omega_table().astype(np.int64)
        m = np.arange(1, N + 1)
        ok1 = streams[2][om[m[:, None] + m[None, :]]] == 1
        ok2 = streams[3][om[m[:, None] + 2 * m[None, :]]] == 2
        assert freq == pytest.approx((ok1 & ok2).mean())

    def test_target_range_validated(self):
        with pytest.raises(MultactError):
            av.digit_density([2], [2], [MpN], 10)


class TestDoubleFormDeviation:
    def test_exact_concentration_instance(self):
        # deviations identically zero transfer to zero
        devs = np.zeros(1000)
        lhs, bound, slack = av.double_form_deviation(devs, 1, 2, 300)
        assert lhs == 0.0 and bound == 0.0 and slack == 0.0

    def test_random_instance_reports_slack(self):
        rng = np.random.default_rng(3)
        N = 400
        devs = rng.random((1 + 3 * N)) * 0.1
        lhs, bound, slack = av.double_form_deviation(devs, 1, 2, N)
        direct = np.mean(
            [
                devs[m + 2 * n]
                for m in range(1, N + 1)
                for n in range(1, N + 1)
            ]
        )
        assert lhs == pytest.approx(direct, abs=1e-12)
        assert slack >= 0.0

    def test_concentration_transfer(self):
        # a slowly varying sequence keeps the double mean under the bound
        N = 300
        v = np.cos(np.log(np.arange(1, 3 * N + 2)))
        vN = v[N]
        devs = np.abs(v - vN)
        lhs, bound, slack = av.double_form_deviation(devs, 1, 2, N)
        assert lhs <= bound + slack + 1e-12
