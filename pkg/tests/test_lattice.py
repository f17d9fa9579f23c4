import math

import numpy as np
import pytest

from bohl import lattice as L
from bohl import oracles
from bohl.errors import (
    ConsistencyError,
    DependentSolutionsError,
    DiagonalDegenerateError,
    HypothesisError,
    InvalidInputError,
    PositivityError,
)

# constant potential c: growth ratio r = (2 + c + sqrt(c (c + 4))) / 2
R2 = (4.0 + math.sqrt(12.0)) / 2.0  # 3.7320508075688772
G2 = 1.0 / math.sqrt(12.0)  # 0.28867513459481287
G1 = 1.0 / math.sqrt(5.0)  # 0.4472135954999579


def const(c, lo=0, hi=40):
    return L.LatticePotential.constant(c, lo, hi)


def random_potential(rng, size=60, lo=0.5, hi=5.0, n_lo=0):
    return L.LatticePotential(L.LatticeWindow(n_lo, n_lo + size - 1), rng.uniform(lo, hi, size))


# --- windows and potentials -------------------------------------------------


class TestContainers:
    def test_window_minimum_length(self):
        with pytest.raises(InvalidInputError):
            L.LatticeWindow(0, 1)
        w = L.LatticeWindow(-3, -1)
        assert w.size == 3
        assert list(w.indices) == [-3, -2, -1]
        assert -2 in w and 0 not in w

    def test_potential_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError):
            L.LatticePotential(L.LatticeWindow(0, 3), [1.0, np.nan, 1.0, 1.0])

    def test_potential_length_must_match(self):
        with pytest.raises(InvalidInputError):
            L.LatticePotential(L.LatticeWindow(0, 3), [1.0, 1.0, 1.0])

    def test_potential_is_read_only(self):
        V = const(1.0, 0, 5)
        with pytest.raises(ValueError):
            V.values[0] = 3.0

    def test_indexing_by_lattice_index(self):
        V = L.LatticePotential.from_function(lambda n: n**2, 3, 8)
        assert V[5] == 25.0


# --- recurrence -------------------------------------------------------------


class TestSolveThreeTerm:
    def test_free_linear(self):
        u = L.solve_three_term(const(0.0, 0, 10), 0.0, 1.0)
        np.testing.assert_array_equal(u.values, np.arange(11))
        assert u.verified

    def test_constant_two_growth(self):
        u = L.solve_three_term(const(2.0, 0, 5), 1.0, R2)
        assert u.values[2] == pytest.approx(13.92820323027551, rel=1e-12)
        assert u.values[2] == pytest.approx(R2**2, rel=1e-12)

    def test_symmetric_partner(self):
        u = L.solve_three_term(const(-4.0, 0, 10), 0.0, -1.0)
        n = np.arange(11)
        np.testing.assert_allclose(u.values, (-1.0) ** n * n, atol=1e-12)

    def test_complex_seeds(self):
        u = L.solve_three_term(const(1.0, 0, 10), 1.0 + 1j, 2.0 - 1j)
        assert np.iscomplexobj(u.values)
        assert oracles.recurrence_residual(const(1.0, 0, 10), u) < 1e-12

    def test_overflow_is_reported(self):
        with pytest.raises(InvalidInputError, match="overflow"):
            L.solve_three_term(const(10.0, 0, 400), 1.0, 12.0)


class TestWronskian:
    def test_free_pair(self):
        V = const(0.0, 0, 10)
        one = L.solve_three_term(V, 1.0, 1.0)
        lin = L.solve_three_term(V, 0.0, 1.0)
        assert L.wronskian_discrete(one, lin) == pytest.approx(1.0)

    def test_exponential_pair(self):
        n = np.arange(0, 11)
        w = L.LatticeWindow(0, 10)
        down = L.LatticeSolution(w, R2 ** (-n))
        up = L.LatticeSolution(w, R2**n)
        assert L.wronskian_discrete(down, up) == pytest.approx(R2 - 1 / R2, rel=1e-12)
        assert R2 - 1 / R2 == pytest.approx(3.4641016151377544)

    def test_constant_for_random_pair(self):
        rng = np.random.default_rng(7)
        V = random_potential(rng, size=10, lo=0.1, hi=3.0)
        a = L.solve_three_term(V, 1.0, 0.3)
        b = L.solve_three_term(V, -0.2, 1.5)
        W = L.wronskian_sequence(a, b)
        # cancellation error scales with the size of the two products, not with W
        terms = np.abs(a.values[:-1] * b.values[1:]) + np.abs(a.values[1:] * b.values[:-1])
        assert np.max(np.abs(W - W[0])) <= 1e-10 * np.max(terms)
        assert L.wronskian_discrete(a, b) == W[0]

    def test_non_solutions_detected(self):
        w = L.LatticeWindow(0, 5)
        a = L.LatticeSolution(w, np.arange(6.0))
        b = L.LatticeSolution(w, np.arange(6.0) ** 2)
        with pytest.raises(ConsistencyError):
            L.wronskian_discrete(a, b)


# --- positive basis and Green matrix ----------------------------------------


class TestPositiveBasis:
    def test_ratios_constant_two(self):
        plus, minus = L.positive_basis(const(2.0, 0, 40))
        mid = slice(15, 25)
        np.testing.assert_allclose((minus.values[1:] / minus.values[:-1])[mid], 1 / R2, rtol=1e-10)
        np.testing.assert_allclose((plus.values[1:] / plus.values[:-1])[mid], R2, rtol=1e-10)
        assert 1 / R2 == pytest.approx(0.2679491924311227)

    @pytest.mark.parametrize("c", [0.1, 1.0, 3.0, 8.0])
    def test_normalization(self, c):
        plus, minus = L.positive_basis(const(c, 0, 30))
        assert L.wronskian_discrete(minus, plus) == pytest.approx(1.0, abs=1e-10)

    def test_decaying_potential(self):
        V = L.LatticePotential.from_function(lambda n: 1 + 1 / n**2, 1, 60)
        plus, minus = L.positive_basis(V)
        assert np.all(plus.values > 0) and np.all(minus.values > 0)
        assert oracles.recurrence_residual(V, plus) < 1e-10
        assert oracles.recurrence_residual(V, minus) < 1e-10

    def test_rejects_minus_two(self):
        with pytest.raises(HypothesisError):
            L.positive_basis(const(-2.0, 0, 10))

    def test_sign_change_reported(self):
        # -Delta - 1.5 oscillates with period about 2 pi / acos(0.25)
        with pytest.raises(PositivityError):
            L.positive_basis(const(-1.5, 0, 20))


class TestGreenMatrix:
    def test_constant_two_diagonal(self):
        G = L.positive_green_matrix(const(2.0, 0, 60))
        np.testing.assert_allclose(G.diagonal[25:35], G2, rtol=1e-12)
        assert G2 == pytest.approx(0.2886751345948129)

    def test_matches_free_inversion_formula(self):
        V = L.LatticePotential.constant(0.0, 1, 3)
        G = L.positive_green_matrix(V)
        N = 3
        for m in range(1, 4):
            for n in range(1, 4):
                assert G(m, n) == pytest.approx(min(m, n) * (N + 1 - max(m, n)) / (N + 1))
        assert G(1, 1) == pytest.approx(0.75)

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        G = L.positive_green_matrix(random_potential(rng, 30))
        np.testing.assert_array_equal(G.entries, G.entries.T)

    def test_diagonal_branch(self):
        plus, minus = L.positive_basis(const(1.0, 0, 10))
        G = L.build_green_matrix(minus, plus)
        np.testing.assert_allclose(G.diagonal, minus.values * plus.values, rtol=1e-14)

    def test_inverts_operator(self):
        rng = np.random.default_rng(2)
        V = random_potential(rng, 40)
        G = L.positive_green_matrix(V)
        A = oracles.tridiagonal_matrix(V)
        np.testing.assert_allclose(A @ G.entries, np.eye(40), atol=1e-12)

    def test_dependent_solutions(self):
        plus, _ = L.positive_basis(const(1.0, 0, 10))
        twice = L.LatticeSolution(plus.window, 2 * plus.values)
        with pytest.raises(DependentSolutionsError):
            L.build_green_matrix(plus, twice)


class TestDiagonal:
    def test_constant_two(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 60)))
        assert z.positive
        np.testing.assert_allclose(z.z[25:35], 12 ** -0.25, rtol=1e-12)
        assert 12 ** -0.25 == pytest.approx(0.5372850, abs=1e-7)

    def test_constant_one(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(1.0, 0, 60)))
        np.testing.assert_allclose(z.z[25:35] ** 2, G1, rtol=1e-12)

    def test_zero_entry(self):
        w = L.LatticeWindow(0, 2)
        G = L.GreenMatrix(w, np.diag([1.0, 0.0, 1.0]))
        with pytest.raises(DiagonalDegenerateError):
            L.diagonal_sequence(G)

    def test_negative_entry_not_positive(self):
        w = L.LatticeWindow(0, 2)
        z = L.diagonal_sequence(L.GreenMatrix(w, np.diag([1.0, -4.0, 1.0])))
        assert not z.positive
        assert z.z[1] == pytest.approx(2j)


class TestSFactor:
    def test_constant_two(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 60)))
        S = L.s_factor(z)
        np.testing.assert_allclose(S.values[25:35], R2, rtol=1e-12)

    def test_large_z(self):
        z = L.DiagonalSequence(L.LatticeWindow(0, 2), np.full(3, 10.0), True)
        S = L.s_factor(z)
        assert S[1] == pytest.approx((1 + math.sqrt(40001)) / 200, rel=1e-14)
        assert S[1] == pytest.approx(1.0050125, abs=1e-7)

    def test_identity_on_random(self):
        rng = np.random.default_rng(3)
        z = L.DiagonalSequence(L.LatticeWindow(0, 19), rng.uniform(0.05, 3.0, 20), True)
        S = L.s_factor(z).values
        lhs = S - 1 / S
        rhs = 1 / (z.z[1:] * z.z[:-1])
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)
        assert np.all(S > 1)


class TestReconstruction:
    def test_constant_ratios(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 60)))
        B = L.bohl_reconstruct(z, 0)
        mid = slice(20, 40)
        np.testing.assert_allclose((B.plus.values[1:] / B.plus.values[:-1])[mid], R2, rtol=1e-10)
        np.testing.assert_allclose((B.minus.values[1:] / B.minus.values[:-1])[mid], 1 / R2, rtol=1e-10)

    def test_anchor_value(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 20)))
        B = L.bohl_reconstruct(z, 7)
        assert B.plus.values[7] == z.z[7] == B.minus.values[7]
        assert B.anchor == 7

    def test_anchor_outside(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 20)))
        with pytest.raises(InvalidInputError):
            L.bohl_reconstruct(z, 21)

    def test_random_recurrence(self):
        rng = np.random.default_rng(4)
        V = random_potential(rng, 50)
        z = L.diagonal_sequence(oracles.green_by_inversion(V))
        B = L.bohl_reconstruct(z, 25)
        assert oracles.recurrence_residual(V, B.plus) < 1e-9
        assert oracles.recurrence_residual(V, B.minus) < 1e-9
        assert L.wronskian_discrete(B.minus, B.plus) == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(B.plus.values * B.minus.values, z.z**2, rtol=1e-12)


class TestPotentialRecovery:
    @pytest.mark.parametrize("c", [1.0, 2.0])
    def test_constant(self, c):
        z = L.diagonal_sequence(L.positive_green_matrix(const(c, 0, 60)))
        Vz = L.potential_from_diagonal(z)
        assert Vz.window == L.LatticeWindow(1, 59)
        np.testing.assert_allclose(Vz.values[20:40], c, atol=1e-12)

    def test_constant_one_by_hand(self):
        z2 = G1
        assert 0.5 * 2 * math.sqrt(1 + 4 * z2 * z2) / z2 == pytest.approx(3.0)

    def test_oracle_roundtrip(self):
        rng = np.random.default_rng(5)
        V = random_potential(rng, 60, 0.5, 3.0)
        z = L.diagonal_sequence(oracles.green_by_inversion(V))
        Vz = L.potential_from_diagonal(z)
        assert np.max(np.abs(Vz.values - V.values[1:-1])) < 1e-8

    def test_requires_positive(self):
        z = L.DiagonalSequence(L.LatticeWindow(0, 5), np.full(6, 1j), False)
        with pytest.raises(HypothesisError):
            L.potential_from_diagonal(z)


class TestGtoV:
    @pytest.mark.parametrize("c,g", [(2.0, G2), (1.0, G1)])
    def test_closed_form(self, c, g):
        V = const(c, 0, 60)
        r = L.gtov_residual(L.positive_green_matrix(V), V)
        assert np.max(np.abs(r[20:40])) < 1e-12
        assert 0.5 * 2 * math.sqrt(1 + 4 * g * g) == pytest.approx((c + 2) * g, abs=1e-12)

    def test_closed_form_values(self):
        assert math.sqrt(1 + 4 * G2**2) == pytest.approx(1.1547005, abs=1e-7)
        assert math.sqrt(1 + 4 * G1**2) == pytest.approx(1.3416408, abs=1e-7)

    def test_oracle(self):
        rng = np.random.default_rng(6)
        V = random_potential(rng, 60)
        assert np.max(np.abs(L.gtov_residual(oracles.green_by_inversion(V), V))) < 1e-8


class TestSymmetry:
    def test_free_case(self):
        V = const(0.0, 0, 10)
        u = L.solve_three_term(V, 0.0, 1.0)
        Vt, ut = L.symmetry_map(V, u)
        np.testing.assert_array_equal(Vt.values, -4.0)
        np.testing.assert_array_equal(ut.values, (-1.0) ** np.arange(11) * np.arange(11))
        assert oracles.recurrence_residual(Vt, ut) == 0.0

    def test_involution_exact_on_dyadic(self):
        rng = np.random.default_rng(8)
        V = L.LatticePotential(L.LatticeWindow(-3, 12), rng.integers(-40, 40, 16) / 8.0)
        u = L.solve_three_term(V, 0.375, -1.125)
        V2, u2 = L.symmetry_map(*L.symmetry_map(V, u))
        np.testing.assert_array_equal(V2.values, V.values)
        np.testing.assert_array_equal(u2.values, u.values)

    def test_involution_rounding(self):
        rng = np.random.default_rng(8)
        V = L.LatticePotential(L.LatticeWindow(-3, 12), rng.normal(size=16))
        u = L.solve_three_term(V, 0.3, -1.1)
        V2, u2 = L.symmetry_map(*L.symmetry_map(V, u))
        # -4 - (-4 - V) can only lose the last bits of 4 + |V|
        assert np.all(np.abs(V2.values - V.values) <= 2 * np.spacing(4.0 + np.abs(V.values)))
        np.testing.assert_array_equal(u2.values, u.values)

    def test_wronskian_sign_flip(self):
        V = L.LatticePotential(L.LatticeWindow(1, 10), np.linspace(-1, 2, 10))
        a, b = L.solve_three_term(V, 1.0, 0.0), L.solve_three_term(V, 0.0, 1.0)
        Vt, at = L.symmetry_map(V, a)
        _, bt = L.symmetry_map(V, b)
        assert L.wronskian_discrete(at, bt) == pytest.approx(-L.wronskian_discrete(a, b))


# --- Agmon ------------------------------------------------------------------

K_A_C1 = math.sqrt(1 + (2 / 3) ** 2) + 2 / 3  # 1.8685170918213299


class TestAgmon:
    @pytest.mark.parametrize(
        "C,expected",
        [(2.0, 1.2807764064044151), (1.0, 1.8685170918213299), (100.0, 1.0001960976547482)],
    )
    def test_constant(self, C, expected):
        assert L.agmon_constant(C) == pytest.approx(expected, rel=1e-14)
        assert L.agmon_constant(C) < math.sqrt(1 + 4 / C**2)

    def test_rounded_constants(self):
        assert L.agmon_constant(2.0) == pytest.approx(1.2807764, abs=1e-7)
        assert L.agmon_constant(1.0) == pytest.approx(1.8685171, abs=1e-7)
        assert L.agmon_constant(100.0) == pytest.approx(1.0001961, abs=1e-7)

    @pytest.mark.parametrize("C", [0.0, -1.0])
    def test_bad_cutoff(self, C):
        with pytest.raises(InvalidInputError):
            L.agmon_constant(C)

    def test_bounds_constant_two(self):
        V = const(2.0, 0, 60)
        rep = L.agmon_bound_report(V, L.positive_green_matrix(V), 1.0)
        assert rep.K_A == pytest.approx(K_A_C1)
        assert rep.all_ok
        mid = [c for c in rep.checks if 25 <= c.n <= 35]
        for c in mid:
            assert c.g_lower == pytest.approx(0.25)
            assert c.g == pytest.approx(G2)
            assert c.g_upper == pytest.approx(0.46712927295533247)
            assert c.s == pytest.approx(R2)
            assert c.s_upper == pytest.approx((4 + math.sqrt(20)) / 2)
            assert c.s_lower == pytest.approx((4 + math.sqrt(20)) / 2 / K_A_C1)
            assert c.s_lower == pytest.approx(2.267074781408983, rel=1e-12)

    def test_lower_bound_strict(self):
        rng = np.random.default_rng(9)
        V = random_potential(rng, 40, 1.0, 4.0)
        rep = L.agmon_bound_report(V, L.positive_green_matrix(V), 0.5)
        assert all(c.g > c.g_lower for c in rep.checks)

    def test_hypothesis(self):
        V = const(1.0, 0, 20)
        with pytest.raises(HypothesisError):
            L.agmon_bound_report(V, L.positive_green_matrix(V), 1.0)

    def test_distance_a(self):
        V = const(2.0, 0, 20)
        d = L.agmon_distance(V, 3, 8, "a", C=1.0)
        assert d == pytest.approx(5 * math.log(4 / K_A_C1), rel=1e-14)
        assert d == pytest.approx(3.805746219347369, rel=1e-12)

    @pytest.mark.parametrize("c", [1.0, 2.0, 5.0])
    def test_distance_b_matches_decay(self, c):
        V = const(c, 0, 20)
        r = (2 + c + math.sqrt(c * (c + 4))) / 2
        assert L.agmon_distance(V, 4, 5, "b") == pytest.approx(math.log(r), abs=1e-9)
        assert L.agmon_distance(V, 4, 14, "b") == pytest.approx(10 * math.log(r), abs=1e-9)

    def test_distance_b_value(self):
        assert L.agmon_distance(const(2.0), 0, 1, "b") == pytest.approx(1.3169578969248166, rel=1e-12)

    @pytest.mark.parametrize("variant", ["a", "b"])
    def test_empty_sum(self, variant):
        assert L.agmon_distance(const(2.0), 5, 5, variant, C=1.0) == 0.0

    def test_distance_needs_order(self):
        with pytest.raises(InvalidInputError):
            L.agmon_distance(const(2.0), 6, 5, "b")

    def test_distance_a_needs_cutoff(self):
        with pytest.raises(InvalidInputError):
            L.agmon_distance(const(2.0), 0, 5, "a")

    def test_summability_warning(self):
        V = L.LatticePotential.from_function(lambda n: 2 + np.sin(n), 0, 60)
        with pytest.warns(RuntimeWarning):
            L.agmon_distance(V, 0, 60, "b")


# --- discrete Darboux -------------------------------------------------------


class TestDiscreteDarboux:
    def test_q_constant(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 60)))
        Q = L.darboux_discrete_q(z)
        np.testing.assert_allclose(Q[20:40], 1 - R2, rtol=1e-12)
        assert 1 - R2 == pytest.approx(-2.7320508, abs=1e-7)

    def test_annihilation(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 40)))
        Q = L.darboux_discrete_q(z)
        phi = L.bohl_reconstruct(z, 20).plus.values
        r = np.abs(phi[1:] - phi[:-1] + Q * phi[:-1]) / np.abs(phi[1:])
        assert np.max(r) < 1e-10

    def test_phi_plus_maps_to_zero(self):
        V = const(2.0, 0, 30)
        z = L.diagonal_sequence(L.positive_green_matrix(V))
        phi = L.bohl_reconstruct(z, 15).plus.values
        out = L.darboux_discrete_apply(z, phi)
        assert np.max(np.abs(out) / np.abs(phi[1:-1])) < 1e-10

    def test_unit_row(self):
        V = const(2.0, 0, 20)
        z = L.diagonal_sequence(L.positive_green_matrix(V))
        e = np.zeros(21)
        e[10] = 1.0
        out = L.darboux_discrete_apply(z, e)
        # out[k] sits at lattice index k + 1
        np.testing.assert_allclose(out[8:11], [-1.0, 4.0, -1.0], atol=1e-12)
        assert np.max(np.abs(np.delete(out, [8, 9, 10]))) < 1e-12

    def test_random(self):
        rng = np.random.default_rng(10)
        V = random_potential(rng, 40)
        z = L.diagonal_sequence(oracles.green_by_inversion(V))
        f = rng.normal(size=40) + 1j * rng.normal(size=40)
        diff = L.darboux_discrete_apply(z, f) - oracles.apply_operator(V, f)
        assert np.max(np.abs(diff)) < 1e-9

    def test_length_mismatch(self):
        z = L.diagonal_sequence(L.positive_green_matrix(const(2.0, 0, 10)))
        with pytest.raises(InvalidInputError):
            L.darboux_discrete_apply(z, np.ones(5))
