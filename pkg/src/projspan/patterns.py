"""Sampling patterns and the expansion condition.

A pattern is a d x N binary matrix together with a target subspace dimension
r. The central question is whether every subset of n columns touches at least
n + r distinct rows (the expansion condition); that combinatorial property is
exactly what separates identifiable patterns from ambiguous ones.

Two checkers are provided. The brute-force one enumerates every column subset
and is the semantic definition. The fast one reduces the condition to N
bipartite matchings: the condition holds iff for every column c, the graph of
all N columns plus r duplicate copies of c admits a matching that saturates
all N + r column vertices (Hall's theorem applied to the duplicated multiset;
the duplicates add r units of demand on supp(c) without adding rows). The two
must agree everywhere, and the test suite enforces that.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from math import ceil, log
from typing import Iterable, Sequence

import numpy as np

from .graph import augmenting_path, maximum_matching

__all__ = [
    "SamplingPattern",
    "RegimeFlags",
    "ConditionVerdict",
    "RegimeError",
    "EnumerationLimitError",
    "GuaranteeRangeWarning",
    "classify",
    "check_identifiability_bruteforce",
    "check_identifiability_fast",
    "find_violating_subset",
    "split",
    "find_valid_submatrix",
    "random_pattern",
    "ell_for_identifiability",
    "block_pattern",
]

BRUTE_FORCE_LIMIT = 25


class RegimeError(ValueError):
    """An operation was asked to run outside its stated support-size regime."""


class EnumerationLimitError(ValueError):
    """Subset enumeration would exceed the hard cap (2^N blow-up)."""


class GuaranteeRangeWarning(UserWarning):
    """Parameters fall outside the range where the sampling bound is proven."""


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class SamplingPattern:
    """A d x N binary sampling pattern with target dimension r.

    Columns are stored as packed integer bit masks (bit j set means row j is
    observed), which keeps subset row-unions a single bitwise OR.
    """

    d: int
    r: int
    columns: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.r < self.d:
            raise ValueError(f"need 1 <= r < d, got r={self.r}, d={self.d}")
        cols = tuple(int(c) for c in self.columns)
        if not cols:
            raise ValueError("pattern needs at least one column")
        full = 1 << self.d
        for i, c in enumerate(cols):
            if c <= 0:
                raise ValueError(f"column {i} observes no rows")
            if c >= full:
                raise ValueError(f"column {i} has bits outside the {self.d} rows")
        object.__setattr__(self, "columns", cols)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def column_supports(self) -> tuple[tuple[int, ...], ...]:
        """Sorted row indices per column."""
        return tuple(_bits(c) for c in self.columns)

    @classmethod
    def from_matrix(cls, matrix, r: int) -> "SamplingPattern":
        """Build from a d x N array of 0/1 entries (row-major layout)."""
        m = np.asarray(matrix)
        if m.ndim != 2:
            raise ValueError("pattern matrix must be 2-D")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("pattern entries must be 0 or 1")
        d, n = m.shape
        cols = []
        for i in range(n):
            mask = 0
            for j in range(d):
                if m[j, i]:
                    mask |= 1 << j
            cols.append(mask)
        return cls(d=d, r=r, columns=tuple(cols))

    def to_matrix(self) -> np.ndarray:
        """Dense 0/1 matrix, rows = coordinates, columns = pattern columns."""
        out = np.zeros((self.d, self.n_cols), dtype=np.uint8)
        for i, mask in enumerate(self.columns):
            for j in _bits(mask):
                out[j, i] = 1
        return out

    def take(self, cols: Iterable[int]) -> "SamplingPattern":
        """Subpattern formed by the given column indices, order preserved."""
        sel = [int(c) for c in cols]
        for c in sel:
            if not 0 <= c < self.n_cols:
                raise ValueError(f"column index {c} out of range")
        return SamplingPattern(self.d, self.r, tuple(self.columns[c] for c in sel))

    def row_union_size(self, cols: Iterable[int]) -> int:
        """Number of distinct rows touched by the given columns (their m value)."""
        union = 0
        for c in cols:
            union |= self.columns[c]
        return union.bit_count()


@dataclass(frozen=True)
class RegimeFlags:
    """Which support-size regimes a pattern satisfies.

    uniform_support: every column observes exactly r+1 rows.
    support_at_least_r: every column observes at least r rows.
    support_above_r: every column observes at least r+1 rows.
    complement_columns: the pattern has exactly N = d - r columns.
    """

    uniform_support: bool
    support_at_least_r: bool
    support_above_r: bool
    complement_columns: bool


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of an expansion-condition check.

    When ``satisfied`` is false the witness, if present, is a column index
    set whose row union is too small (m < n + r). Both checkers always attach
    a witness; reports built by other code may leave it ``None`` when
    failure follows from a counting shortfall rather than a violating subset.
    """

    satisfied: bool
    witness: tuple[int, ...] | None
    checker: str

    def __post_init__(self) -> None:
        if self.witness is not None:
            object.__setattr__(self, "witness", tuple(sorted(int(c) for c in self.witness)))
            if self.satisfied:
                raise ValueError("a satisfied verdict cannot carry a witness")
            if not self.witness:
                raise ValueError("a witness must be nonempty")


def classify(p: SamplingPattern) -> RegimeFlags:
    """Support-size flags for a pattern (see :class:`RegimeFlags`)."""
    sizes = [c.bit_count() for c in p.columns]
    return RegimeFlags(
        uniform_support=all(s == p.r + 1 for s in sizes),
        support_at_least_r=all(s >= p.r for s in sizes),
        support_above_r=all(s >= p.r + 1 for s in sizes),
        complement_columns=p.n_cols == p.d - p.r,
    )


def _require_checker_regime(p: SamplingPattern, op: str) -> None:
    flags = classify(p)
    if not flags.uniform_support:
        raise RegimeError(
            f"{op} requires every column to observe exactly r+1 = {p.r + 1} rows"
        )
    if not flags.complement_columns:
        raise RegimeError(
            f"{op} requires exactly N = d - r = {p.d - p.r} columns, got {p.n_cols}"
        )


def check_identifiability_bruteforce(p: SamplingPattern) -> ConditionVerdict:
    """Decide the expansion condition by enumerating every column subset.

    This is the definitional oracle. On failure the witness is a violating
    subset of minimum cardinality, ties broken by lexicographically smallest
    index tuple. Capped at N <= 25 columns.
    """
    _require_checker_regime(p, "brute-force check")
    n = p.n_cols
    if n > BRUTE_FORCE_LIMIT:
        raise EnumerationLimitError(
            f"{n} columns exceed the enumeration cap of {BRUTE_FORCE_LIMIT}"
        )
    if p.d <= 63:
        witness = _violator_numpy(p.columns, p.r)
    else:
        witness = _violator_python(p.columns, p.r)
    if witness is None:
        return ConditionVerdict(satisfied=True, witness=None, checker="brute-force")
    return ConditionVerdict(satisfied=False, witness=witness, checker="brute-force")


def _violator_numpy(masks: Sequence[int], r: int) -> tuple[int, ...] | None:
    """Minimum-cardinality violating subset via vectorized subset unions."""
    n = len(masks)
    unions = np.zeros(1 << n, dtype=np.uint64)
    arr = np.array(masks, dtype=np.uint64)
    for b in range(n):
        lo = 1 << b
        unions[lo : 2 * lo] = unions[:lo] | arr[b]
    m_counts = np.bitwise_count(unions)
    n_counts = np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.uint64)
    violating = m_counts < n_counts + r
    violating[0] = False
    if not violating.any():
        return None
    hits = np.flatnonzero(violating)
    smallest = n_counts[hits].min()
    best = None
    for s in hits[n_counts[hits] == smallest]:
        cand = _bits(int(s))
        if best is None or cand < best:
            best = cand
    return best


def _violator_python(masks: Sequence[int], r: int) -> tuple[int, ...] | None:
    """Fallback enumeration for patterns with more than 63 rows."""
    n = len(masks)
    for k in range(1, n + 1):
        for combo in combinations(range(n), k):
            union = 0
            for c in combo:
                union |= masks[c]
            if union.bit_count() < k + r:
                return combo
    return None


def _expansion_witness(masks: Sequence[int], r: int) -> tuple[int, ...] | None:
    """Violating subset via the duplication/matching reduction, or None.

    Works for arbitrary support sizes: a column with fewer than r+1 rows is
    itself a violating singleton, and once all supports have at least r+1
    rows the matching reduction is exact.
    """
    for i, mask in enumerate(masks):
        if mask.bit_count() < r + 1:
            return (i,)
    n = len(masks)
    supports = [_bits(m) for m in masks]
    for c in range(n):
        adjacency = supports + [supports[c]] * r
        pairing = maximum_matching(adjacency)
        if len(pairing) == n + r:
            continue
        # Hall violator: columns reachable from an unmatched column along
        # alternating paths. Its neighborhood has exactly one row fewer than
        # it has columns; collapsing the duplicates onto c keeps the union
        # and drops at most r columns, so the deduplicated set violates too.
        pair_row = {row: col for col, row in pairing.items()}
        unmatched = next(i for i in range(n + r) if i not in pairing)
        reach = {unmatched}
        queue = [unmatched]
        seen_rows: set[int] = set()
        while queue:
            col = queue.pop()
            for row in adjacency[col]:
                if row in seen_rows:
                    continue
                seen_rows.add(row)
                owner = pair_row.get(row)
                if owner is not None and owner not in reach:
                    reach.add(owner)
                    queue.append(owner)
        witness = sorted({i if i < n else c for i in reach})
        return tuple(witness)
    return None


def find_violating_subset(p: SamplingPattern) -> tuple[int, ...] | None:
    """Some violating column subset of the pattern, or None when the
    expansion condition holds for every subset. No regime preconditions."""
    return _expansion_witness(p.columns, p.r)


def check_identifiability_fast(p: SamplingPattern) -> ConditionVerdict:
    """Matching-based expansion check; same verdict as brute force, no size cap."""
    _require_checker_regime(p, "matching check")
    witness = _expansion_witness(p.columns, p.r)
    if witness is None:
        return ConditionVerdict(satisfied=True, witness=None, checker="matching")
    return ConditionVerdict(satisfied=False, witness=witness, checker="matching")


def split(p: SamplingPattern) -> SamplingPattern:
    """Expand every column into columns observing exactly r+1 rows.

    A column with sorted support k(1) < ... < k(l) becomes l - r columns; the
    j-th keeps rows k(1), ..., k(r) and adds k(r+j). Identifiability is
    preserved: the original pattern identifies a generic subspace exactly when
    some d-r columns of the expansion satisfy the expansion condition.
    """
    r = p.r
    children: list[int] = []
    for i, mask in enumerate(p.columns):
        rows = _bits(mask)
        if len(rows) < r + 1:
            raise RegimeError(
                f"column {i} observes {len(rows)} rows; splitting needs at least r+1 = {r + 1}"
            )
        base = 0
        for b in rows[:r]:
            base |= 1 << b
        for b in rows[r:]:
            children.append(base | (1 << b))
    return SamplingPattern(p.d, r, tuple(children))


def find_valid_submatrix(p: SamplingPattern) -> tuple[int, ...] | None:
    """Indices of d-r columns that satisfy the expansion condition, or None.

    Requires every column to observe exactly r+1 rows (run :func:`split`
    first otherwise). The search adds columns greedily and backtracks
    exhaustively when stuck. Subsets of a valid set are valid (removing
    columns only removes constraints), which is what makes include/exclude
    pruning sound; whether greedy alone would already be exact is left open,
    so it is not relied on. The exhaustive fallback is exponential in the
    worst case; it stays cheap when valid selections are plentiful (supports
    at or above the sampling bound) or the pool is small.

    Each candidate is tested with a single matching check: when the current
    set T is valid, T plus column j is valid iff the graph of T, j, and r
    duplicate copies of j admits a column-saturating matching (any new
    violator would have to contain j, and Hall applied to the duplicated
    multiset pins that down). One matching is maintained incrementally with
    augmenting paths and undone on rejection or backtrack.
    """
    r = p.r
    for i, mask in enumerate(p.columns):
        if mask.bit_count() != r + 1:
            raise RegimeError(
                f"column {i} observes {mask.bit_count()} rows, expected exactly r+1 = {r + 1}"
            )
    target = p.d - r
    # Identical masks can never be chosen together (two copies already violate
    # the condition), so only first occurrences are searched.
    first_seen: dict[int, int] = {}
    for i, mask in enumerate(p.columns):
        first_seen.setdefault(mask, i)
    order = sorted(first_seen.values())
    if len(order) < target:
        return None

    supports = {i: _bits(p.columns[i]) for i in order}
    dup_keys = [-(t + 1) for t in range(r)]
    adjacency: dict[int, tuple[int, ...]] = {}
    pair_col: dict[int, int] = {}
    pair_row: dict[int, int] = {}
    chosen: list[int] = []

    def apply_path(path, journal) -> None:
        for cc, rr in path:
            journal.append((cc, pair_col.get(cc), rr, pair_row.get(rr)))
            pair_col[cc] = rr
            pair_row[rr] = cc

    def undo(journal) -> None:
        for cc, old_row, rr, old_col in reversed(journal):
            if old_row is None:
                pair_col.pop(cc, None)
            else:
                pair_col[cc] = old_row
            if old_col is None:
                pair_row.pop(rr, None)
            else:
                pair_row[rr] = old_col

    def try_add(j: int) -> bool:
        adjacency[j] = supports[j]
        for t in dup_keys:
            adjacency[t] = supports[j]
        journal: list[tuple] = []
        ok = True
        for key in (j, *dup_keys):
            path = augmenting_path(adjacency, key, pair_col, pair_row)
            if path is None:
                ok = False
                break
            apply_path(path, journal)
        for t in dup_keys:
            del adjacency[t]
        if not ok:
            undo(journal)
            del adjacency[j]
            return False
        for t in dup_keys:
            row = pair_col.pop(t)
            del pair_row[row]
        chosen.append(j)
        return True

    def remove_last() -> None:
        j = chosen.pop()
        row = pair_col.pop(j)
        del pair_row[row]
        del adjacency[j]

    decision_stack: list[int] = []
    pos = 0
    while True:
        if len(chosen) == target:
            return tuple(chosen)
        if pos >= len(order) or len(chosen) + (len(order) - pos) < target:
            if not decision_stack:
                return None
            pos = decision_stack.pop()
            remove_last()
            pos += 1
            continue
        if try_add(order[pos]):
            decision_stack.append(pos)
        pos += 1


def random_pattern(d: int, n_cols: int, ell: int, r: int, seed) -> SamplingPattern:
    """Pattern whose columns are independent uniform ell-subsets of the rows.

    Deterministic per seed. ``seed`` may be anything accepted by
    ``numpy.random.default_rng``.
    """
    if not r + 1 <= ell <= d:
        raise ValueError(f"need r+1 <= ell <= d, got ell={ell}, r={r}, d={d}")
    if n_cols < 1:
        raise ValueError("n_cols must be at least 1")
    rng = np.random.default_rng(seed)
    cols = []
    for _ in range(n_cols):
        mask = 0
        for b in rng.choice(d, size=ell, replace=False):
            mask |= 1 << int(b)
        cols.append(mask)
    return SamplingPattern(d=d, r=r, columns=tuple(cols))


def ell_for_identifiability(d: int, r: int, eps: float) -> int:
    """Per-column observation count that makes a random pattern identifiable
    with probability at least 1 - eps.

    Returns the smallest integer ell >= max(9 * ln(d / eps) + 12, 2 r), capped
    at d. The logarithm is natural. The guarantee is proven for r <= d / 6;
    outside that range the value is still returned but a
    :class:`GuaranteeRangeWarning` is emitted.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if d < 2 or r < 1 or r >= d:
        raise ValueError(f"need 1 <= r < d, got r={r}, d={d}")
    if 6 * r > d:
        warnings.warn(
            f"r={r} exceeds d/6={d / 6:.2f}; the probability guarantee is unproven here",
            GuaranteeRangeWarning,
            stacklevel=2,
        )
    bound = max(ceil(9.0 * log(d / eps) + 12.0), 2 * r)
    return min(bound, d)


def block_pattern(d: int, r: int) -> SamplingPattern:
    """The reference identifiable pattern: r all-ones rows stacked on an
    identity block. Satisfies the expansion condition with equality on the
    full column set."""
    if not 1 <= r < d:
        raise ValueError(f"need 1 <= r < d, got r={r}, d={d}")
    base = (1 << r) - 1
    cols = tuple(base | (1 << (r + j)) for j in range(d - r))
    return SamplingPattern(d=d, r=r, columns=cols)
