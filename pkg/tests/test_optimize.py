"""Extremal LP search: builders, both solve routes, oracle agreement, and
the sweep table."""

from fractions import Fraction

import pytest

import oracles
from maxdecouple import (
    JointBernoulli,
    MarginalVector,
    build_exchangeable_lp,
    build_full_lp,
    conjecture_sweep,
    conjectured_extremal,
    expand_exchangeable,
    is_pairwise_independent,
    min_ratio,
    prob_hit,
    prob_hit_independent,
    product,
    solve,
)
from maxdecouple.optimize import EXCHANGEABLE_LIMIT, FULL_VARIABLE_LIMIT, MODES


class TestBuilders:
    def test_full_lp_shapes_equality_mode(self):
        lp = build_full_lp(3, 0.5)
        prob = lp.problem
        assert prob.c.shape == (8,)
        assert prob.c[0] == 0.0 and prob.c[1:].sum() == 7.0
        assert prob.a_eq.shape == (1 + 3 + 3, 8)  # mass + marginals + pairs
        assert prob.a_ub is None

    def test_full_lp_shapes_negcov_mode(self):
        lp = build_full_lp(3, 0.5, "negative_covariance")
        assert lp.problem.a_eq.shape == (4, 8)
        assert lp.problem.a_ub.shape == (3, 8)

    def test_full_lp_rejects_large_n(self):
        with pytest.raises(ValueError):
            build_full_lp(FULL_VARIABLE_LIMIT + 1, 0.5)

    def test_exchangeable_lp_rows(self):
        lp = build_exchangeable_lp(4, Fraction(1, 3))
        prob = lp.problem
        assert len(prob.objective) == 5
        assert prob.eq[1][1] == Fraction(4, 3)  # first falling moment
        assert prob.eq[2][1] == Fraction(4, 3)  # second falling moment at 1/(n-1)
        assert prob.ub == ()

    def test_exchangeable_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            build_exchangeable_lp(1, 0.5)
        with pytest.raises(ValueError):
            build_exchangeable_lp(EXCHANGEABLE_LIMIT + 1, 0.5)
        with pytest.raises(ValueError):
            build_exchangeable_lp(4, 1.5)
        with pytest.raises(ValueError):
            build_exchangeable_lp(4, 0.5, "bogus")


class TestSolveKnownInstances:
    def test_full_two_variables_unique_point(self):
        solution = solve(build_full_lp(2, 0.5))
        assert solution.status == "optimal"
        assert solution.objective == pytest.approx(0.75, abs=1e-9)
        for mask in range(4):
            assert solution.witness_atoms[mask] == pytest.approx(0.25, abs=1e-8)

    def test_full_boundary_marginal_forces_ones(self):
        solution = solve(build_full_lp(2, 1.0))
        assert solution.objective == pytest.approx(1.0, abs=1e-9)
        assert solution.witness_atoms[3] == pytest.approx(1.0, abs=1e-8)

    def test_exchangeable_two_variables_forced_weights(self):
        solution = solve(build_exchangeable_lp(2, Fraction(1, 2)))
        assert solution.weights_exact == (
            Fraction(1, 4),
            Fraction(1, 2),
            Fraction(1, 4),
        )
        assert solution.objective_exact == Fraction(3, 4)

    def test_exchangeable_three_matches_construction(self):
        solution = solve(build_exchangeable_lp(3, Fraction(1, 2)))
        assert solution.status == "optimal"
        assert solution.objective_exact == Fraction(3, 4)
        assert solution.weights_exact == (
            Fraction(1, 4),
            Fraction(0),
            Fraction(3, 4),
            Fraction(0),
        )

    def test_zero_marginal_gives_empty_family(self):
        solution = solve(build_exchangeable_lp(5, 0))
        assert solution.objective_exact == 0
        assert solution.weights_exact[0] == 1

    def test_product_joint_always_feasible(self):
        for n in (2, 3, 5):
            for p in (Fraction(1, 10), Fraction(3, 10), Fraction(1, n - 1), Fraction(1, 2)):
                for mode in MODES:
                    assert solve(build_exchangeable_lp(n, p, mode)).status == "optimal"
                    assert solve(build_full_lp(n, p, mode)).status == "optimal"

    def test_product_pmf_satisfies_equality_constraints_up_to_cap(self):
        # The independent law meets every equality-mode constraint to 1e-12,
        # which is what rules out infeasible statuses at any p in [0, 1].
        from maxdecouple import marginals, second_moments

        for n in (2, 6, 10, FULL_VARIABLE_LIMIT):
            for p in (0.1, 0.3, 1.0 / (n - 1), 0.5):
                joint = product(MarginalVector((p,) * n))
                marg = marginals(joint).p
                assert max(abs(x - p) for x in marg) <= 1e-12
                m = second_moments(joint).m
                worst = max(
                    abs(m[i][j] - p * p)
                    for i in range(n)
                    for j in range(i + 1, n)
                )
                assert worst <= 1e-12


class TestOracleAgreement:
    def test_exact_optimum_matches_vertex_enumeration(self):
        for n in (3, 4, 5, 6, 8):
            for p in (Fraction(1, n - 1), Fraction(3, 10), Fraction(1, 2)):
                for mode, equality in (
                    ("pairwise_equality", True),
                    ("negative_covariance", False),
                ):
                    expected = oracles.oracle_lp_vertex_minimum(n, p, equality)
                    got = solve(build_exchangeable_lp(n, p, mode)).objective_exact
                    assert got == expected, (n, p, mode)

    def test_reduction_soundness(self):
        for n in (3, 4, 5):
            for p in (Fraction(1, n - 1), Fraction(3, 10)):
                for mode in MODES:
                    full = solve(build_full_lp(n, p, mode))
                    exch = solve(build_exchangeable_lp(n, p, mode))
                    assert abs(full.objective - exch.objective) <= 1e-8

    def test_negcov_never_above_equality(self):
        for n in (3, 4, 6, 9):
            for p in (Fraction(1, n - 1), Fraction(2, 5)):
                eq = solve(build_exchangeable_lp(n, p))
                relaxed = solve(build_exchangeable_lp(n, p, "negative_covariance"))
                assert relaxed.objective_exact <= eq.objective_exact


class TestWitnessRoundTrip:
    def test_expand_exchangeable_recovers_extremal(self):
        j = expand_exchangeable(3, [0.25, 0.0, 0.75, 0.0])
        expected = conjectured_extremal(3)
        assert j.masks == expected.masks
        for (_, got), (_, want) in zip(j.atoms, expected.atoms):
            assert got == pytest.approx(want, abs=1e-15)

    def test_round_trip_objective_and_independence(self):
        for n in (3, 4, 5, 8):
            solution = solve(build_exchangeable_lp(n, Fraction(1, n - 1)))
            witness = expand_exchangeable(n, solution.weights_exact)
            assert prob_hit(witness) == pytest.approx(solution.objective, abs=1e-9)
            assert is_pairwise_independent(witness, 1e-12)

    def test_class_totals_survive_float_conversion(self):
        weights = [Fraction(1, 7), Fraction(2, 7), Fraction(4, 7), Fraction(0)]
        j = expand_exchangeable(3, weights)
        totals = oracles.oracle_exchangeable_weights(3, dict(j.atoms))
        for got, want in zip(totals, weights):
            assert got == pytest.approx(float(want), abs=1e-15)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            expand_exchangeable(17, [0.0] * 18)
        with pytest.raises(ValueError):
            expand_exchangeable(3, [1.0])


class TestMinRatioAndSweep:
    def test_ratio_three_is_six_sevenths(self):
        ratio, solution = min_ratio(3)
        assert ratio == pytest.approx(6 / 7, abs=1e-12)
        assert solution.objective_exact == Fraction(3, 4)

    def test_ratio_sandwich(self):
        for n in (3, 4, 5, 7):
            ratio, solution = min_ratio(n)
            p = 1.0 / (n - 1)
            mtilde = prob_hit_independent(MarginalVector((p,) * n))
            construction = (0.5 + 0.5 / (n - 1)) / mtilde
            s = n * p
            pz = (s * s / (s + s * s)) / mtilde
            assert ratio >= max(pz, 0.5) - 1e-9
            assert ratio <= construction + 1e-12

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            min_ratio(2)

    def test_sweep_rows(self):
        rows = conjecture_sweep(3, 12)
        assert [row["n"] for row in rows] == list(range(3, 13))
        previous_inf = float("inf")
        for row in rows:
            assert row["status"] == "optimal"
            assert row["lp_ratio"] >= 0.5 - 1e-9
            assert row["gap"] >= -1e-9
            assert row["running_inf"] <= previous_inf
            previous_inf = row["running_inf"]
        assert rows[0]["construction_ratio"] == pytest.approx(6 / 7, abs=1e-12)

    def test_sweep_objective_equals_paley_zygmund_floor(self):
        # At p = 1/(n-1) the moment constraints pin E[Z] = E[Z(Z-1)], so the
        # second-moment lower bound coincides with the candidate family and
        # the LP optimum lands exactly on n/(2(n-1)).
        for n in (3, 4, 10, 40):
            _, solution = min_ratio(n)
            assert solution.objective_exact == Fraction(n, 2 * (n - 1))

    def test_sweep_validates_range(self):
        with pytest.raises(ValueError):
            conjecture_sweep(2, 5)
        with pytest.raises(ValueError):
            conjecture_sweep(5, 4)


class TestNegativeCovarianceMode:
    def test_negcov_optimum_against_oracle_small(self):
        # Spot value: n=3, p=1/2 relaxed optimum drops below the equality one.
        eq = solve(build_exchangeable_lp(3, Fraction(1, 2)))
        relaxed = solve(build_exchangeable_lp(3, Fraction(1, 2), "negative_covariance"))
        expected = oracles.oracle_lp_vertex_minimum(3, Fraction(1, 2), False)
        assert relaxed.objective_exact == expected
        assert relaxed.objective_exact <= eq.objective_exact

    def test_full_witness_respects_covariance_cap(self):
        solution = solve(build_full_lp(4, 0.3, "negative_covariance"))
        joint = JointBernoulli(4, solution.witness_atoms)
        # witness satisfies constraints within solver tolerance only
        assert prob_hit(joint) == pytest.approx(solution.objective, abs=1e-7)
