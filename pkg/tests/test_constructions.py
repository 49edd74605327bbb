"""Family builders: exact values, validation, and independence guarantees."""

import numpy as np
import pytest

import oracles
from maxdecouple import (
    CONJECTURED_LOWER_CONSTANT,
    FamilySpec,
    MarginalVector,
    affine_hash,
    comonotone,
    conjectured_extremal,
    is_pairwise_independent,
    marginals,
    one_hot_uniform,
    prob_hit,
    prob_hit_independent,
    product,
    second_moments,
    xor_parity,
)


class TestOneHotUniform:
    def test_pair_atoms(self):
        assert dict(one_hot_uniform(2).atoms) == {0b01: 0.5, 0b10: 0.5}

    def test_hit_probability_exactly_one(self):
        for n in range(1, 25):
            assert prob_hit(one_hot_uniform(n)) == 1.0

    def test_ten_variables_independent_version(self):
        j = one_hot_uniform(10)
        mtilde = prob_hit_independent(marginals(j))
        assert mtilde == pytest.approx(1 - 0.9**10, abs=1e-12)
        assert mtilde == pytest.approx(0.6513216, abs=1e-7)

    def test_marginals_near_uniform(self):
        p = marginals(one_hot_uniform(7)).p
        assert all(abs(x - 1 / 7) < 1e-15 for x in p)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            one_hot_uniform(0)


class TestConjecturedExtremal:
    def test_three_variables_exact_table(self):
        j = conjectured_extremal(3)
        assert dict(j.atoms) == {0: 0.25, 3: 0.25, 5: 0.25, 6: 0.25}

    def test_ratio_three(self):
        j = conjectured_extremal(3)
        ratio = prob_hit(j) / prob_hit_independent(marginals(j))
        assert ratio == pytest.approx(6 / 7, abs=1e-15)
        assert ratio >= 0.5

    def test_pairwise_independent_up_to_24(self):
        for n in range(3, 25):
            assert is_pairwise_independent(conjectured_extremal(n), 1e-12)

    def test_marginals_up_to_24(self):
        for n in range(3, 25):
            p = marginals(conjectured_extremal(n)).p
            assert max(abs(x - 1 / (n - 1)) for x in p) <= 1e-12

    def test_pair_moment_matches_oracle(self):
        j = conjectured_extremal(4)
        m = oracles.oracle_second_moments(4, dict(j.atoms))
        for i in range(4):
            for k in range(4):
                if i != k:
                    assert m[i][k] == pytest.approx(1 / 9, abs=1e-15)

    def test_large_n_ratio_approaches_conjectured_constant(self):
        j = conjectured_extremal(300)
        ratio = prob_hit(j) / prob_hit_independent(marginals(j))
        assert abs(ratio - CONJECTURED_LOWER_CONSTANT) < 2e-3
        assert ratio > CONJECTURED_LOWER_CONSTANT  # decreases toward the limit

    def test_degenerate_two_permitted(self):
        j = conjectured_extremal(2)
        assert dict(j.atoms) == {0b11: 1.0}

    def test_rejects_below_two(self):
        with pytest.raises(ValueError):
            conjectured_extremal(1)


class TestComonotone:
    def test_three_variables(self):
        assert dict(comonotone(3, 0.1).atoms) == {0: 0.9, 0b111: 0.1}

    def test_hit_probability_is_eps(self):
        for eps in (0.0, 1e-6, 0.3, 1.0):
            assert prob_hit(comonotone(5, eps)) == eps

    def test_ratio_approaches_n(self):
        for n in (2, 5, 8):
            j = comonotone(n, 1e-7)
            ratio = prob_hit_independent(marginals(j)) / prob_hit(j)
            assert ratio == pytest.approx(n, abs=1e-3)

    def test_rejects_eps_out_of_range(self):
        with pytest.raises(ValueError):
            comonotone(3, -0.1)
        with pytest.raises(ValueError):
            comonotone(3, 1.1)


class TestAffineHash:
    def test_q3_m1_exact_values(self):
        j = affine_hash(3, 3, 1)
        assert all(
            prob * 9 == pytest.approx(round(prob * 9), abs=1e-12)
            for _, prob in j.atoms
        )
        assert marginals(j).p == pytest.approx((1 / 3,) * 3, abs=1e-15)
        m = second_moments(j).m
        for i in range(3):
            for k in range(3):
                if i != k:
                    assert m[i][k] == pytest.approx(1 / 9, abs=1e-15)

    def test_empty_threshold_is_zero_point_mass(self):
        assert dict(affine_hash(3, 3, 0).atoms) == {0: 1.0}

    def test_full_threshold_is_ones_point_mass(self):
        assert dict(affine_hash(3, 3, 3).atoms) == {0b111: 1.0}

    def test_pairwise_independent_across_primes(self):
        for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
            for m in {0, 1, q // 2, q - 1, q}:
                j = affine_hash(min(q, 6), q, m)
                assert is_pairwise_independent(j, 1e-12), (q, m)

    def test_rejects_composite_q(self):
        with pytest.raises(ValueError):
            affine_hash(3, 9, 2)

    def test_rejects_n_above_q(self):
        with pytest.raises(ValueError):
            affine_hash(4, 3, 1)

    def test_rejects_m_out_of_range(self):
        with pytest.raises(ValueError):
            affine_hash(3, 3, 4)


class TestXorParity:
    def test_k2_exact(self):
        j = xor_parity(2)
        assert j.n == 3
        assert len(j.atoms) == 4
        assert all(prob == 0.25 for _, prob in j.atoms)
        assert marginals(j).p == (0.5, 0.5, 0.5)
        m = second_moments(j).m
        for i in range(3):
            for k in range(3):
                if i != k:
                    assert m[i][k] == 0.25

    def test_k1_single_fair_bit(self):
        assert dict(xor_parity(1).atoms) == {0: 0.5, 1: 0.5}

    def test_hit_probability_k2(self):
        assert prob_hit(xor_parity(2)) == 0.75

    def test_pairwise_independent_all_k(self):
        for k in range(1, 5):
            assert is_pairwise_independent(xor_parity(k), 1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            xor_parity(0)
        with pytest.raises(ValueError):
            xor_parity(5)


class TestProduct:
    def test_half_half(self):
        j = product(MarginalVector([0.5, 0.5]))
        assert dict(j.atoms) == {0: 0.25, 1: 0.25, 2: 0.25, 3: 0.25}
        assert prob_hit(j) == prob_hit_independent(MarginalVector([0.5, 0.5]))

    def test_atom_is_direct_product(self):
        j = product(MarginalVector([0.3, 0.7]))
        assert dict(j.atoms)[0b10] == 0.7 * 0.7
        assert dict(j.atoms)[0b10] == pytest.approx(0.49, abs=1e-15)

    def test_hit_matches_closed_form_randomized(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            p = MarginalVector([float(x) for x in rng.random(int(rng.integers(1, 9)))])
            assert prob_hit(product(p)) == pytest.approx(
                prob_hit_independent(p), abs=1e-12
            )

    def test_boundary_marginals_drop_zero_atoms(self):
        j = product(MarginalVector([1.0, 0.5]))
        assert dict(j.atoms) == {0b01: 0.5, 0b11: 0.5}

    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            product(MarginalVector([0.5] * 25))


class TestFamilySpec:
    def test_build_each_kind(self):
        cases = [
            (FamilySpec("one_hot_uniform", n=4), one_hot_uniform(4)),
            (FamilySpec("conjectured_extremal", n=5), conjectured_extremal(5)),
            (FamilySpec("comonotone", n=3, eps=0.25), comonotone(3, 0.25)),
            (FamilySpec("affine_hash", n=3, q=5, m=2), affine_hash(3, 5, 2)),
            (FamilySpec("xor_parity", k=2), xor_parity(2)),
            (
                FamilySpec("product", p=(0.3, 0.7)),
                product(MarginalVector([0.3, 0.7])),
            ),
        ]
        for spec, expected in cases:
            assert spec.build() == expected

    def test_missing_parameter_named(self):
        with pytest.raises(ValueError, match="eps"):
            FamilySpec("comonotone", n=3).build()

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown family"):
            FamilySpec("mystery", n=3)
