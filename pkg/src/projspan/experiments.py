"""Monte Carlo rate estimation for random sampling patterns.

Each trial draws d-r columns whose supports are independent uniform
ell-subsets of the d rows and asks whether the resulting pattern determines
a rank-r subspace. Trials are seeded individually by a counter-mode
derivation from the master seed (``SeedSequence`` with the trial index
appended to the spawn key), so outcomes do not depend on execution order and
any single trial can be replayed in isolation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import DEFAULT_TOLERANCES, Tolerances, random_subspace, subspace_distance
from .patterns import (
    SamplingPattern,
    check_identifiability_fast,
    find_valid_submatrix,
    random_pattern,
    split,
)
from .recovery import project_onto_pattern, recover

__all__ = [
    "TrialReport",
    "identifiability_trial",
    "recovery_trial",
    "estimate_rate",
    "recovery_curve",
    "format_table",
    "to_csv",
]

_Z95 = 1.959963984540054

_RECOVERY_DISTANCE = 1e-8


def _wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    p = successes / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = _Z95 * np.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class TrialReport:
    """Aggregated outcome of a batch of independent trials."""

    d: int
    r: int
    ell: int
    trials: int
    successes: int
    rate: float
    wilson_ci: tuple[float, float]
    seed: int
    elapsed: float

    def __post_init__(self) -> None:
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")
        if abs(self.rate - self.successes / self.trials) > 1e-12:
            raise ValueError("rate must equal successes/trials")
        low, high = self.wilson_ci
        if not 0.0 <= low <= high <= 1.0:
            raise ValueError("confidence bounds must satisfy 0 <= low <= high <= 1")


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def _derive(ss: np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=ss.entropy, spawn_key=ss.spawn_key + key)


def _trial_pattern(d: int, r: int, ell: int, ss: np.random.SeedSequence) -> SamplingPattern:
    rng = np.random.default_rng(_derive(ss, 0))
    return random_pattern(d, d - r, ell, r, rng)


def identifiability_trial(d: int, r: int, ell: int, seed) -> bool:
    """One random pattern: does it determine an r-dimensional subspace?

    With ell = r+1 the pattern is checked directly; for larger supports the
    pattern is identifiable exactly when d-r of its split columns satisfy
    the expansion condition, so the trial searches the split.
    """
    ss = _seed_sequence(seed)
    pattern = _trial_pattern(d, r, ell, ss)
    if ell == r + 1:
        return check_identifiability_fast(pattern).satisfied
    return find_valid_submatrix(split(pattern)) is not None


def recovery_trial(
    d: int, r: int, ell: int, seed, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """One end-to-end trial: project a random subspace, then recover it.

    Draws the same pattern as :func:`identifiability_trial` under the same
    seed (the subspace comes from an independent derived stream), selects
    d-r expanding split columns, observes the subspace's projections on
    them, and succeeds when recovery returns a subspace within 1e-8 of the
    original. Patterns with no expanding selection fail outright.
    """
    ss = _seed_sequence(seed)
    pattern = _trial_pattern(d, r, ell, ss)
    space = random_subspace(d, r, np.random.default_rng(_derive(ss, 1)))
    children = split(pattern) if ell > r + 1 else pattern
    chosen = find_valid_submatrix(children)
    if chosen is None:
        return False
    selected = children.take(chosen)
    observations = project_onto_pattern(space, selected, tol)
    result = recover(observations, d, r, tol)
    if result.status != "identified":
        return False
    return subspace_distance(result.subspace, space) <= _RECOVERY_DISTANCE


def _run_batch(d, r, ell, trials, seed, trial_fn, base_key=()) -> TrialReport:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    master = _seed_sequence(seed)
    start = time.perf_counter()
    successes = sum(
        trial_fn(d, r, ell, _derive(master, *base_key, i)) for i in range(trials)
    )
    elapsed = time.perf_counter() - start
    return TrialReport(
        d=d,
        r=r,
        ell=ell,
        trials=trials,
        successes=successes,
        rate=successes / trials,
        wilson_ci=_wilson_interval(successes, trials),
        seed=int(master.entropy),
        elapsed=elapsed,
    )


def estimate_rate(d: int, r: int, ell: int, trials: int, seed) -> TrialReport:
    """Empirical identifiability rate over independent random patterns."""
    return _run_batch(d, r, ell, trials, seed, identifiability_trial)


def recovery_curve(
    d: int,
    r: int,
    ell_values: Sequence[int],
    trials: int,
    seed,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[TrialReport, ...]:
    """End-to-end recovery rate at each support size in ``ell_values``.

    Reports come back sorted by support size regardless of input order.
    """
    if len(ell_values) == 0:
        raise ValueError("ell_values must be nonempty")

    def trial(d_, r_, ell_, ss):
        return recovery_trial(d_, r_, ell_, ss, tol)

    return tuple(
        _run_batch(d, r, int(ell), trials, seed, trial, base_key=(k,))
        for k, ell in enumerate(sorted(int(e) for e in ell_values))
    )


_COLUMNS = ("d", "r", "ell", "trials", "successes", "rate", "ci_low", "ci_high", "seed", "elapsed")


def _rows(reports: Sequence[TrialReport]) -> list[tuple[str, ...]]:
    out = []
    for rep in reports:
        low, high = rep.wilson_ci
        out.append(
            (
                str(rep.d),
                str(rep.r),
                str(rep.ell),
                str(rep.trials),
                str(rep.successes),
                f"{rep.rate:.4f}",
                f"{low:.4f}",
                f"{high:.4f}",
                str(rep.seed),
                f"{rep.elapsed:.3f}",
            )
        )
    return out


def format_table(reports: Sequence[TrialReport]) -> str:
    """Fixed-width text table, one report per line, header first."""
    rows = [_COLUMNS, *_rows(reports)]
    widths = [max(len(row[j]) for row in rows) for j in range(len(_COLUMNS))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def to_csv(reports: Sequence[TrialReport]) -> str:
    """Comma-separated report lines with a header row."""
    lines = [",".join(_COLUMNS)]
    lines.extend(",".join(row) for row in _rows(reports))
    return "\n".join(lines)
