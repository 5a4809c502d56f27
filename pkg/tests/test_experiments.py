import numpy as np
import pytest

from projspan.experiments import (
    TrialReport,
    _derive,
    _wilson_interval,
    estimate_rate,
    format_table,
    identifiability_trial,
    recovery_curve,
    recovery_trial,
    to_csv,
)


class TestWilsonInterval:
    def test_reference_value(self):
        low, high = _wilson_interval(95, 100)
        assert low == pytest.approx(0.8882495307680808, abs=1e-12)
        assert high == pytest.approx(0.9784563208456319, abs=1e-12)

    def test_boundary_counts_stay_in_unit_interval(self):
        low, high = _wilson_interval(0, 50)
        assert 0.0 <= low < 1e-15
        assert high == pytest.approx(0.07134759913335872, abs=1e-12)
        low, high = _wilson_interval(50, 50)
        assert low == pytest.approx(0.9286524008666414, abs=1e-12)
        assert high == 1.0

    def test_symmetric_at_one_half(self):
        low, high = _wilson_interval(1, 2)
        assert low + high == pytest.approx(1.0, abs=1e-12)

    def test_contains_the_point_estimate(self):
        for successes, trials in ((3, 7), (10, 400), (399, 400)):
            low, high = _wilson_interval(successes, trials)
            assert low < successes / trials < high


class TestTrialReport:
    def _kwargs(self, **overrides):
        base = dict(
            d=10,
            r=2,
            ell=4,
            trials=10,
            successes=7,
            rate=0.7,
            wilson_ci=(0.4, 0.9),
            seed=1,
            elapsed=0.1,
        )
        base.update(overrides)
        return base

    def test_accepts_consistent_fields(self):
        TrialReport(**self._kwargs())

    def test_rejects_successes_above_trials(self):
        with pytest.raises(ValueError, match="successes"):
            TrialReport(**self._kwargs(successes=11, rate=1.1))

    def test_rejects_rate_mismatch(self):
        with pytest.raises(ValueError, match="rate"):
            TrialReport(**self._kwargs(rate=0.8))

    def test_rejects_disordered_interval(self):
        with pytest.raises(ValueError, match="bounds"):
            TrialReport(**self._kwargs(wilson_ci=(0.9, 0.4)))


class TestTrials:
    def test_identifiability_trial_is_deterministic(self):
        outcomes = [identifiability_trial(12, 2, 3, seed=99) for _ in range(3)]
        assert outcomes[0] == outcomes[1] == outcomes[2]

    def test_recovery_pairs_with_identifiability(self):
        # Under a shared seed both trials draw the same pattern, so a
        # successful recovery must coincide with a positive pattern verdict.
        master = np.random.SeedSequence(20240818)
        for i in range(40):
            ss = _derive(master, i)
            assert identifiability_trial(10, 2, 4, ss) == recovery_trial(10, 2, 4, ss)

    def test_fully_observed_columns_always_identify(self):
        report = estimate_rate(12, 2, 12, trials=50, seed=5)
        assert report.successes == 50
        assert report.rate == 1.0

    def test_sparse_supports_rarely_identify(self):
        report = estimate_rate(30, 1, 2, trials=40, seed=7)
        assert report.rate < 0.5

    def test_estimate_is_replayable(self):
        first = estimate_rate(10, 2, 4, trials=30, seed=123)
        second = estimate_rate(10, 2, 4, trials=30, seed=123)
        assert first.successes == second.successes
        assert first.wilson_ci == second.wilson_ci
        assert first.seed == second.seed == 123

    def test_seed_sequences_are_accepted(self):
        ss = np.random.SeedSequence(77)
        report = estimate_rate(10, 1, 3, trials=20, seed=ss)
        assert report.seed == 77

    def test_rejects_empty_batches(self):
        with pytest.raises(ValueError, match="trials"):
            estimate_rate(10, 1, 3, trials=0, seed=1)


class TestRecoveryCurve:
    def test_reports_come_back_sorted_with_shared_seed(self):
        reports = recovery_curve(10, 1, [10, 2, 5], trials=20, seed=42)
        assert [rep.ell for rep in reports] == [2, 5, 10]
        assert len({rep.seed for rep in reports}) == 1
        assert all(rep.trials == 20 for rep in reports)

    def test_full_observation_end_of_curve(self):
        reports = recovery_curve(10, 1, [2, 10], trials=20, seed=6)
        assert reports[-1].rate == 1.0
        assert reports[0].rate <= reports[-1].rate

    def test_rejects_empty_support_list(self):
        with pytest.raises(ValueError, match="nonempty"):
            recovery_curve(10, 1, [], trials=5, seed=1)


class TestFormatting:
    def _reports(self):
        return [
            estimate_rate(10, 1, 3, trials=20, seed=11),
            estimate_rate(10, 1, 10, trials=20, seed=11),
        ]

    def test_table_has_aligned_header_and_rows(self):
        reports = self._reports()
        lines = format_table(reports).splitlines()
        assert len(lines) == 3
        assert lines[0].split() == [
            "d", "r", "ell", "trials", "successes",
            "rate", "ci_low", "ci_high", "seed", "elapsed",
        ]
        assert len({len(line) for line in lines}) == 1  # fixed width
        assert lines[2].split()[5] == "1.0000"

    def test_csv_round_trips_the_numbers(self):
        reports = self._reports()
        lines = to_csv(reports).splitlines()
        assert lines[0] == "d,r,ell,trials,successes,rate,ci_low,ci_high,seed,elapsed"
        for rep, line in zip(reports, lines[1:]):
            cells = line.split(",")
            assert len(cells) == 10
            assert cells[0] == "10"
            assert int(cells[4]) == rep.successes
            assert float(cells[5]) == pytest.approx(rep.rate, abs=5e-5)
            assert int(cells[8]) == rep.seed
