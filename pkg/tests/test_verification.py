"""The randomized battery itself: everything passes, output is stable."""

import pytest

from maxdecouple import verification


class TestBattery:
    def test_all_properties_pass(self):
        results = verification.run_battery(seed=0, trials=120)
        for result in results:
            assert result.ok, f"{result.name}: {result.counterexamples}"
        assert [r.name for r in results] == list(verification.PROPERTY_NAMES)

    def test_alternate_seed_passes(self):
        results = verification.run_battery(seed=20260809, trials=60)
        assert all(r.ok for r in results)

    def test_deterministic_for_fixed_seed(self):
        first = verification.run_battery(seed=3, trials=25)
        second = verification.run_battery(seed=3, trials=25)
        assert verification.format_battery(3, 25, first) == verification.format_battery(
            3, 25, second
        )

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            verification.run_battery(seed=0, trials=0)

    def test_format_reports_failures_with_instance(self):
        results = verification.run_battery(seed=1, trials=5)
        results[0].record(False, '{"kind":"bernoulli-joint","n":1,"atoms":[]}')
        text = verification.format_battery(1, 5, results)
        assert "FAIL" in text
        assert "counterexample" in text
        assert "properties FAILED" in text


class TestGenerators:
    def test_random_joint_is_valid_and_varied(self):
        import numpy as np

        rng = np.random.default_rng(0)
        sizes = set()
        for _ in range(200):
            j = verification.random_joint(rng)
            sizes.add(j.n)
            total = sum(p for _, p in j.atoms)
            assert abs(total - 1.0) <= 1e-12
        assert len(sizes) > 5

    def test_random_nonneg_joint_has_ties(self):
        import numpy as np

        rng = np.random.default_rng(1)
        tie_seen = False
        for _ in range(100):
            j = verification.random_nonneg_joint(rng)
            flat = [v for vec, _ in j.atoms for v in vec]
            if len(flat) != len(set(flat)):
                tie_seen = True
        assert tie_seen
