import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projspan.completion import ObservedMatrix, ValidationCertificate, validate_completion
from projspan.graph import BipartiteGraph, build
from projspan.io import (
    FormatError,
    format_certificate,
    format_edge_list,
    format_matrix,
    format_observations,
    format_observed_matrix,
    format_pattern,
    parse_matrix,
    parse_observations,
    parse_observed_matrix,
    parse_pattern,
    read_pattern,
    write_pattern,
)
from projspan.patterns import ConditionVerdict, SamplingPattern
from projspan.recovery import project_onto_pattern


def canonical(text):
    lines = text.split("\n")
    assert lines[-1] == ""  # exactly one trailing newline
    assert all(line == line.rstrip() for line in lines)
    assert all("  " not in line for line in lines[:-1])


class TestPatternFormat:
    def test_header_then_rows(self, ambiguous_pattern):
        text = format_pattern(ambiguous_pattern)
        assert text.splitlines()[0] == "5 4 1"
        assert text.splitlines()[1] == "1 0 1 0"
        canonical(text)

    def test_round_trip(self, ambiguous_pattern):
        text = format_pattern(ambiguous_pattern)
        assert parse_pattern(text) == ambiguous_pattern
        assert format_pattern(parse_pattern(text)) == text

    def test_parser_tolerates_loose_whitespace(self, repaired_pattern):
        loose = format_pattern(repaired_pattern).replace(" ", "\t \t") + "\n  \n"
        assert parse_pattern(loose) == repaired_pattern

    def test_file_round_trip(self, tmp_path, repaired_pattern):
        path = tmp_path / "chain.pat"
        write_pattern(repaired_pattern, path)
        assert read_pattern(path) == repaired_pattern

    def test_errors_carry_source_and_line(self, tmp_path):
        path = tmp_path / "broken.pat"
        path.write_text("2 1 1\n1\nnope\n")
        with pytest.raises(FormatError, match=r"broken\.pat:3: not an integer"):
            read_pattern(path)

    def test_header_token_count(self):
        with pytest.raises(FormatError, match=":1: expected 3"):
            parse_pattern("5 4\n")

    def test_row_length_mismatch(self):
        with pytest.raises(FormatError, match=":2: expected 4"):
            parse_pattern("5 4 1\n1 0 1\n")

    def test_non_binary_entry(self):
        with pytest.raises(FormatError, match="0 or 1"):
            parse_pattern("2 1 1\n2\n1\n")

    def test_truncated_file(self):
        with pytest.raises(FormatError, match="unexpected end of file"):
            parse_pattern("3 2 1\n1 0\n")

    def test_trailing_garbage(self):
        with pytest.raises(FormatError, match="trailing content"):
            parse_pattern("2 1 1\n1\n1\n1\n")

    def test_semantic_errors_become_format_errors(self):
        # an all-zero column is structurally valid text but not a pattern
        with pytest.raises(FormatError, match="observes no rows"):
            parse_pattern("2 1 1\n0\n0\n")

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_random_round_trips(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 12))
        n = int(rng.integers(1, 8))
        m = rng.integers(0, 2, size=(d, n))
        m[rng.integers(0, d, size=n), np.arange(n)] = 1
        p = SamplingPattern.from_matrix(m, r=1)
        assert parse_pattern(format_pattern(p)) == p


class TestMatrixFormat:
    def test_round_trip_is_bit_exact(self):
        m = np.array([[1.0, -2.5e-17], [np.pi, 3.3333333333333335]])
        text = format_matrix(m)
        canonical(text)
        assert text.splitlines()[0] == "2 2"
        assert np.array_equal(parse_matrix(text), m)

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=12))
    @settings(max_examples=40, deadline=None)
    def test_repr_preserves_doubles(self, values):
        m = np.array(values).reshape(1, -1)
        assert np.array_equal(parse_matrix(format_matrix(m)), m)

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError, match="2-D"):
            format_matrix(np.zeros(3))

    def test_rejects_nonfinite_input_text(self):
        with pytest.raises(FormatError, match="finite"):
            parse_matrix("1 2\n1.0 inf\n")

    def test_rejects_short_row(self):
        with pytest.raises(FormatError, match=":2: expected 3 scalars"):
            parse_matrix("1 3\n1.0 2.0\n")

    def test_rejects_word_entries(self):
        with pytest.raises(FormatError, match="not a number"):
            parse_matrix("1 1\nhello\n")


class TestObservationsFormat:
    def _observations(self, line_subspace, repaired_pattern):
        return project_onto_pattern(line_subspace, repaired_pattern)

    def test_header_is_d_r_count(self, line_subspace, repaired_pattern):
        observations = self._observations(line_subspace, repaired_pattern)
        text = format_observations(observations, 5, 1)
        assert text.splitlines()[0] == "5 1 4"
        assert text.splitlines()[1] == "1 1 0 0 0"
        canonical(text)

    def test_round_trip(self, line_subspace, repaired_pattern):
        observations = self._observations(line_subspace, repaired_pattern)
        text = format_observations(observations, 5, 1)
        d, r, parsed = parse_observations(text)
        assert (d, r, len(parsed)) == (5, 1, 4)
        for before, after in zip(observations, parsed):
            assert np.array_equal(before.mask, after.mask)
            assert np.array_equal(before.basis, after.basis)

    def test_mask_must_have_r_plus_one_ones(self):
        with pytest.raises(FormatError, match="3 ones, expected r\\+1 = 2"):
            parse_observations("3 1 1\n1 1 1\n1.0 2.0\n")

    def test_degenerate_basis_rejected_with_location(self):
        with pytest.raises(FormatError, match=":2: .*rank-deficient"):
            parse_observations("3 1 1\n1 1 0\n0.0 0.0\n")

    def test_truncated_observation(self):
        with pytest.raises(FormatError, match="unexpected end of file"):
            parse_observations("3 1 2\n1 1 0\n1.0 2.0\n")

    def test_formatter_requires_observations(self):
        with pytest.raises(ValueError, match="at least one"):
            format_observations([], 5, 1)

    def test_formatter_checks_shapes(self, line_subspace, repaired_pattern):
        observations = self._observations(line_subspace, repaired_pattern)
        with pytest.raises(ValueError, match="expected \\(d=6"):
            format_observations(observations, 6, 1)

    def test_formatter_rejects_wide_masks(self, line_subspace):
        wide = project_onto_pattern(
            line_subspace, SamplingPattern(d=5, r=1, columns=(0b111,))
        )
        with pytest.raises(ValueError, match="exactly r\\+1"):
            format_observations(wide, 5, 1)


class TestObservedMatrixFormat:
    def test_stars_mark_unobserved_entries(self):
        data = ObservedMatrix(values=[[1.5, 0.0], [0.0, -2.0]], mask=[[1, 0], [0, 1]])
        text = format_observed_matrix(data)
        assert text == "2 2\n1.5 *\n* -2.0\n"

    def test_round_trip(self):
        rng = np.random.default_rng(17)
        values = rng.standard_normal((4, 3))
        mask = rng.random((4, 3)) < 0.6
        mask[0, 0] = True
        data = ObservedMatrix(values=values, mask=mask)
        again = parse_observed_matrix(format_observed_matrix(data))
        assert np.array_equal(again.mask, data.mask)
        assert np.array_equal(again.values[again.mask], data.values[data.mask])

    def test_rejects_unknown_tokens(self):
        with pytest.raises(FormatError, match="not a number or '\\*'"):
            parse_observed_matrix("1 2\n1.0 x\n")

    def test_rejects_nonfinite(self):
        with pytest.raises(FormatError, match="finite"):
            parse_observed_matrix("1 1\nnan\n")

    def test_rejects_ragged_rows(self):
        with pytest.raises(FormatError, match=":3: expected 2 entries"):
            parse_observed_matrix("2 2\n1.0 *\n*\n")


class TestCertificateFormat:
    def test_exact_layout(self):
        cert = ValidationCertificate(
            verdict="inconclusive_pattern",
            residuals=(0.5, 0.25),
            pattern_report=ConditionVerdict(
                satisfied=False, witness=(0, 2), checker="matching"
            ),
            split=((1,), (0, 2)),
        )
        assert format_certificate(cert) == (
            "verdict: inconclusive_pattern\n"
            "pattern-satisfied: no\n"
            "pattern-checker: matching\n"
            "pattern-witness: 1 3\n"
            "residual 1: 0.5\n"
            "residual 2: 0.25\n"
            "split-training: 2\n"
            "split-holdout: 1 3\n"
        )

    def test_dashes_for_absent_fields(self):
        cert = ValidationCertificate(
            verdict="validated",
            residuals=(0.0,),
            pattern_report=ConditionVerdict(satisfied=True, witness=None, checker="matching"),
            split=((), (0,)),
        )
        text = format_certificate(cert)
        assert "pattern-witness: -\n" in text
        assert "split-training: -\n" in text

    def test_byte_stable_across_runs(self, line_subspace, repaired_pattern):
        def run():
            from projspan.completion import synth

            values = synth(line_subspace, 4, seed=99)
            holdout = ObservedMatrix(
                values=values, mask=repaired_pattern.to_matrix().astype(bool)
            )
            return format_certificate(validate_completion(line_subspace, holdout, r=1))

        assert run() == run()


class TestEdgeListFormat:
    def test_one_based_row_column_pairs(self, repaired_pattern):
        text = format_edge_list(build(repaired_pattern))
        assert text.splitlines() == [
            "1 1", "2 1", "2 2", "3 2", "3 3", "4 3", "4 4", "5 4",
        ]

    def test_isolated_column_emits_nothing(self):
        g = BipartiteGraph(row_count=2, col_count=1, adjacency=((),))
        assert format_edge_list(g) == ""
