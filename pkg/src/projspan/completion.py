"""Validating low-rank completions against partially observed data.

A subspace fits an observed matrix when every observed column, restricted to
its own mask, lies in the correspondingly restricted subspace. Fitting is
cheap to test but treacherous: on a bad sampling pattern a wrong subspace can
fit perfectly. The functions here evaluate when a mask's pattern rules that
out (a necessary condition and a sufficient one) and package the whole
check-the-holdout protocol into a certificate: if the held-out columns'
pattern expands properly and the candidate fits them, the candidate is the
true subspace almost surely; if the pattern is deficient, the certificate
says so instead of pretending the fit means something.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    as_matrix,
    rank,
)
from .patterns import (
    ConditionVerdict,
    RegimeError,
    SamplingPattern,
    find_valid_submatrix,
    find_violating_subset,
    split as split_pattern,
)

__all__ = [
    "ObservedMatrix",
    "FitResult",
    "DistinctPatterns",
    "SubmatrixReport",
    "ValidationCertificate",
    "fits",
    "distinct_patterns",
    "necessary_condition",
    "sufficient_condition",
    "validate_completion",
    "synth",
    "split_for_validation",
]


@dataclass(frozen=True, eq=False)
class ObservedMatrix:
    """Numeric values paired with an observation mask of the same shape.

    Entries outside the mask are normalized to NaN and never read. Observed
    entries must be finite.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        m = np.asarray(self.mask).astype(bool)
        if vals.ndim != 2 or m.shape != vals.shape:
            raise ValueError("values and mask must be 2-D arrays of identical shape")
        if not np.all(np.isfinite(vals[m])):
            raise ValueError("observed entries must be finite")
        vals[~m] = np.nan
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mask", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @classmethod
    def from_full(cls, values, mask) -> "ObservedMatrix":
        """Mask a fully known matrix (convenience for synthetic data)."""
        return cls(values=values, mask=mask)


@dataclass(frozen=True)
class FitResult:
    """Per-column relative residuals plus the all-within-tolerance verdict."""

    ok: bool
    residuals: tuple[float, ...]


def fits(s: Subspace, data: ObservedMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> FitResult:
    """Does every observed column lie in the subspace's restriction to its mask?

    Column i's residual is the norm of the component of the observed entries
    orthogonal to the restricted subspace, divided by the norm of the
    entries; zero-norm columns get residual 0. The verdict is true when all
    residuals are at most ``fit_rel``.
    """
    d, n = data.shape
    if s.ambient_dim != d:
        raise ValueError(
            f"subspace lives in R^{s.ambient_dim} but the data has {d} rows"
        )
    residuals = []
    for i in range(n):
        m = data.mask[:, i]
        ones = int(m.sum())
        if ones < 1:
            raise ValueError(f"column {i} observes no entries")
        x = data.values[m, i]
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            residuals.append(0.0)
            continue
        restricted = s.basis[m, :]
        u, sv, _ = np.linalg.svd(restricted, full_matrices=False)
        if sv.size and sv[0] > 0.0:
            k = int(np.count_nonzero(sv > tol.rank_rel * sv[0]))
        else:
            k = 0
        if k == 0:
            residuals.append(1.0)
            continue
        q = u[:, :k]
        resid = x - q @ (q.T @ x)
        residuals.append(float(np.linalg.norm(resid)) / norm)
    ok = all(res <= tol.fit_rel for res in residuals)
    return FitResult(ok=ok, residuals=tuple(residuals))


@dataclass(frozen=True)
class DistinctPatterns:
    """Deduplicated mask columns in order of first appearance.

    ``multiplicities[k]`` counts how many data columns share distinct mask k;
    ``first_indices[k]`` is the original index of its first appearance.
    """

    pattern: SamplingPattern
    multiplicities: tuple[int, ...]
    first_indices: tuple[int, ...]


def _mask_columns(mask) -> tuple[int, list[int]]:
    m = np.asarray(mask).astype(bool)
    if m.ndim != 2:
        raise ValueError("observation mask must be a 2-D array")
    d = m.shape[0]
    cols = []
    for i in range(m.shape[1]):
        bits = 0
        for j in np.flatnonzero(m[:, i]):
            bits |= 1 << int(j)
        cols.append(bits)
    return d, cols


def _distinct_masks(cols: Sequence[int]) -> tuple[list[int], list[int], list[int]]:
    order: dict[int, int] = {}
    counts: dict[int, int] = {}
    for i, c in enumerate(cols):
        if c not in order:
            order[c] = i
        counts[c] = counts.get(c, 0) + 1
    masks = sorted(order, key=order.get)
    return masks, [order[c] for c in masks], [counts[c] for c in masks]


def distinct_patterns(data_mask, r: int) -> DistinctPatterns:
    """Collapse duplicate mask columns, retaining multiplicities."""
    d, cols = _mask_columns(data_mask)
    masks, firsts, counts = _distinct_masks(cols)
    return DistinctPatterns(
        pattern=SamplingPattern(d=d, r=r, columns=tuple(masks)),
        multiplicities=tuple(counts),
        first_indices=tuple(firsts),
    )


@dataclass(frozen=True)
class SubmatrixReport:
    """Outcome of searching a mask's split pattern for d-r expanding columns.

    ``selected_supports`` lists the row supports of the chosen columns when
    the search succeeds. ``witness_columns`` names original data columns
    whose split columns form a violating subset, when one exists; failure can
    also follow from a plain shortfall of usable columns, in which case it is
    ``None``. ``carrier_counts``, when present, gives for each selected
    support the number of data columns observed on all of it.
    """

    holds: bool
    dropped_columns: tuple[int, ...]
    distinct_columns: int
    selected_supports: tuple[tuple[int, ...], ...] | None
    witness_columns: tuple[int, ...] | None
    carrier_counts: tuple[int, ...] | None = None


def _children_with_origins(
    d: int, r: int, masks: Sequence[int], origins: Sequence[int]
) -> tuple[list[int], list[int]]:
    child_masks: list[int] = []
    child_origin: list[int] = []
    for mask, origin in zip(masks, origins):
        children = split_pattern(SamplingPattern(d=d, r=r, columns=(mask,))).columns
        child_masks.extend(children)
        child_origin.extend([origin] * len(children))
    return child_masks, child_origin


def _search_report(
    d: int,
    r: int,
    child_masks: list[int],
    child_origin: list[int],
    dropped: tuple[int, ...],
    distinct_count: int,
    carrier_of_child=None,
) -> SubmatrixReport:
    if len(child_masks) == 0:
        return SubmatrixReport(
            holds=False,
            dropped_columns=dropped,
            distinct_columns=distinct_count,
            selected_supports=None,
            witness_columns=None,
        )
    pool = SamplingPattern(d=d, r=r, columns=tuple(child_masks))
    chosen = find_valid_submatrix(pool)
    if chosen is not None:
        return SubmatrixReport(
            holds=True,
            dropped_columns=dropped,
            distinct_columns=distinct_count,
            selected_supports=tuple(pool.column_supports[c] for c in chosen),
            witness_columns=None,
            carrier_counts=None
            if carrier_of_child is None
            else tuple(carrier_of_child[c] for c in chosen),
        )
    violating = find_violating_subset(pool)
    witness = (
        tuple(sorted({child_origin[c] for c in violating})) if violating else None
    )
    return SubmatrixReport(
        holds=False,
        dropped_columns=dropped,
        distinct_columns=distinct_count,
        selected_supports=None,
        witness_columns=witness,
    )


def necessary_condition(data_mask, r: int) -> SubmatrixReport:
    """Can this mask possibly pin down a rank-r matrix uniquely?

    Splits each distinct mask column into r+1-row columns and searches for
    d-r of them satisfying the expansion condition. A negative answer is
    final: no matrix observed on this mask has a unique rank-r completion. A
    positive answer says nothing about sufficiency on its own.

    Columns observing fewer than r+1 entries are dropped from the search
    with a warning; their restriction is generically the whole space, so
    they carry no pattern information.
    """
    d, cols = _mask_columns(data_mask)
    if not 1 <= r < d:
        raise ValueError(f"need 1 <= r < d, got r={r}, d={d}")
    masks, firsts, _ = _distinct_masks(cols)
    usable_masks, usable_origins, dropped = [], [], []
    for mask, first in zip(masks, firsts):
        if mask.bit_count() < r + 1:
            dropped.append(first)
        else:
            usable_masks.append(mask)
            usable_origins.append(first)
    if dropped:
        warnings.warn(
            f"{len(dropped)} distinct column(s) observe fewer than r+1 = {r + 1} "
            "entries and were dropped from the pattern search",
            UserWarning,
            stacklevel=2,
        )
    child_masks, child_origin = _children_with_origins(d, r, usable_masks, usable_origins)
    return _search_report(
        d, r, child_masks, child_origin, tuple(dropped), len(masks)
    )


def sufficient_condition(data_mask, r: int) -> SubmatrixReport:
    """Do the observations pin down the matrix uniquely (generic data)?

    Requires every column to observe at least r entries. True when the split
    of the distinct masks contains d-r expanding columns, each of whose row
    supports is fully observed by at least r data columns. Candidates are
    filtered by that carrier count before the search, so a positive answer
    exhibits a submatrix meeting both requirements at once.
    """
    d, cols = _mask_columns(data_mask)
    if not 1 <= r < d:
        raise ValueError(f"need 1 <= r < d, got r={r}, d={d}")
    for i, c in enumerate(cols):
        if c.bit_count() < r:
            raise RegimeError(
                f"column {i} observes {c.bit_count()} entries; the sufficiency "
                f"test requires at least r = {r} per column"
            )
    masks, firsts, _ = _distinct_masks(cols)
    usable = [(m, f) for m, f in zip(masks, firsts) if m.bit_count() >= r + 1]
    child_masks, child_origin = _children_with_origins(
        d, r, [m for m, _ in usable], [f for _, f in usable]
    )
    carriers = [
        sum(1 for c in cols if child & c == child) for child in child_masks
    ]
    qualified = [i for i, count in enumerate(carriers) if count >= r]
    return _search_report(
        d,
        r,
        [child_masks[i] for i in qualified],
        [child_origin[i] for i in qualified],
        (),
        len(masks),
        carrier_of_child=[carriers[i] for i in qualified],
    )


@dataclass(frozen=True, eq=False)
class ValidationCertificate:
    """Structured verdict of the holdout validation protocol.

    ``verdict`` is ``"validated"`` (pattern expands and the candidate fits:
    the candidate equals the true subspace almost surely), ``"rejected"``
    (pattern expands, fit fails), or ``"inconclusive_pattern"`` (the holdout
    mask cannot discriminate; fitting it proves nothing). ``split`` records
    the (training, holdout) column indices when the caller performed the
    split.
    """

    verdict: str
    residuals: tuple[float, ...]
    pattern_report: ConditionVerdict
    split: tuple[tuple[int, ...], tuple[int, ...]]

    def __post_init__(self) -> None:
        if self.verdict not in ("validated", "rejected", "inconclusive_pattern"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "validated" and not self.pattern_report.satisfied:
            raise ValueError("a validated certificate needs a satisfied pattern report")
        if self.verdict == "inconclusive_pattern" and self.pattern_report.satisfied:
            raise ValueError("inconclusive_pattern requires a failed pattern report")


def _candidate_span(candidate, r: int, tol: Tolerances) -> Subspace:
    if isinstance(candidate, Subspace):
        if candidate.dim > r:
            raise ValueError(
                f"candidate spans {candidate.dim} dimensions, more than rank {r}"
            )
        return candidate
    m = as_matrix(candidate)
    k = rank(m, tol)
    if k > r:
        raise ValueError(f"candidate matrix has rank {k}, not a rank-{r} completion")
    if k == 0:
        raise ValueError("candidate matrix is zero; it spans nothing")
    return Subspace.from_spanning(m, tol)


def validate_completion(
    candidate,
    holdout: ObservedMatrix,
    r: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
    split: tuple[Sequence[int], Sequence[int]] | None = None,
) -> ValidationCertificate:
    """Judge a rank-r completion against held-out observations.

    ``candidate`` may be a completed matrix (rank at most r; its column span
    is what gets validated) or a subspace. The holdout mask is first checked
    for discriminating power; only then does the fit verdict carry meaning.
    """
    span = _candidate_span(candidate, r, tol)
    report = necessary_condition(holdout.mask, r)
    pattern_report = ConditionVerdict(
        satisfied=report.holds,
        witness=report.witness_columns if not report.holds else None,
        checker="matching",
    )
    fit = fits(span, holdout, tol)
    if not report.holds:
        verdict = "inconclusive_pattern"
    elif fit.ok:
        verdict = "validated"
    else:
        verdict = "rejected"
    if split is None:
        split_record = ((), tuple(range(holdout.shape[1])))
    else:
        split_record = (tuple(int(i) for i in split[0]), tuple(int(i) for i in split[1]))
    return ValidationCertificate(
        verdict=verdict,
        residuals=fit.residuals,
        pattern_report=pattern_report,
        split=split_record,
    )


def synth(data_spec: Subspace, n_cols: int, seed) -> np.ndarray:
    """Random matrix whose columns are drawn from the subspace (standard
    normal coefficients). Deterministic per seed."""
    if n_cols < 1:
        raise ValueError("n_cols must be at least 1")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((data_spec.dim, n_cols))
    return data_spec.basis @ coeffs


def split_for_validation(data_mask, r: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition column indices into (training, holdout) sets.

    Consumes columns left to right, pooling their split columns, until the
    pool contains d-r expanding columns; the holdout keeps only the columns
    whose split columns were actually selected, so it stays small and the
    training side keeps as much data as possible. Raises when no subset of
    columns can make the holdout conclusive.
    """
    d, cols = _mask_columns(data_mask)
    if not 1 <= r < d:
        raise ValueError(f"need 1 <= r < d, got r={r}, d={d}")
    pool_masks: list[int] = []
    pool_origin: list[int] = []
    seen: set[int] = set()
    for i, mask in enumerate(cols):
        if mask.bit_count() < r + 1 or mask in seen:
            continue
        seen.add(mask)
        children = split_pattern(SamplingPattern(d=d, r=r, columns=(mask,))).columns
        pool_masks.extend(children)
        pool_origin.extend([i] * len(children))
        pool = SamplingPattern(d=d, r=r, columns=tuple(pool_masks))
        chosen = find_valid_submatrix(pool)
        if chosen is None:
            continue
        holdout = sorted({pool_origin[c] for c in chosen})
        training = [j for j in range(len(cols)) if j not in holdout]
        return tuple(training), tuple(holdout)
    raise ValueError(
        "no subset of columns yields a conclusive holdout pattern for this mask"
    )
