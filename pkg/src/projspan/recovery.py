"""Constructive subspace recovery from coordinate projections.

Each observation exposes the restriction of an unknown r-dimensional subspace
to r+1 coordinates. Inside those coordinates the restriction has a
one-dimensional orthogonal complement; scattering that kernel direction back
into R^d and collecting the results as columns of a matrix A turns recovery
into a null-space computation: the subspace is ker A^T exactly when that
kernel is r-dimensional, and a larger kernel means the observations admit a
whole family of consistent subspaces.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    as_matrix,
    kernel_basis,
    orthonormal_basis,
    rank,
    restrict_rows,
)

if TYPE_CHECKING:  # pragma: no cover
    from .patterns import SamplingPattern

__all__ = [
    "ProjectionObservation",
    "RecoveryResult",
    "RankDeficientProjectionError",
    "KernelDimensionError",
    "InconsistentObservationsError",
    "GenericityWarning",
    "project",
    "project_onto_pattern",
    "kernel_vector",
    "lift",
    "assemble_constraints",
    "recover",
]

GENERICITY_RATIO = 1e-6


class RankDeficientProjectionError(ValueError):
    """A coordinate restriction dropped rank (the subspace is non-generic
    relative to the mask)."""


class KernelDimensionError(ValueError):
    """An observation's orthogonal complement is not one-dimensional."""


class InconsistentObservationsError(ValueError):
    """The assembled kernel is smaller than r: the observations cannot all
    come from projections of a single r-dimensional subspace (or tolerances
    are misconfigured)."""


class GenericityWarning(UserWarning):
    """A computed quantity sits suspiciously close to the measure-zero set
    where the generic-position guarantees stop applying."""


def _as_mask(mask, d: int | None = None) -> np.ndarray:
    m = np.asarray(mask).astype(bool).ravel()
    if d is not None and m.size != d:
        raise ValueError(f"mask length {m.size} does not match ambient dimension {d}")
    return m


@dataclass(frozen=True, eq=False)
class ProjectionObservation:
    """One coordinate mask plus a spanning set of the restricted subspace.

    ``basis`` has one row per observed coordinate and need not be
    orthonormal; any invertible recombination of its columns describes the
    same restriction. It must have full column rank, since the restriction of
    a generic r-dimensional subspace to more than r coordinates keeps
    dimension r.
    """

    mask: np.ndarray
    basis: np.ndarray

    def __post_init__(self) -> None:
        m = _as_mask(self.mask)
        b = as_matrix(self.basis)
        ones = int(m.sum())
        if ones == 0:
            raise ValueError("observation mask selects no coordinates")
        if b.shape[0] != ones:
            raise ValueError(
                f"basis has {b.shape[0]} rows but the mask observes {ones} coordinates"
            )
        if rank(b) != b.shape[1]:
            raise RankDeficientProjectionError(
                "observation basis is rank-deficient; the restriction is not "
                f"{b.shape[1]}-dimensional"
            )
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return int(self.mask.size)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Outcome of :func:`recover`.

    ``kernel_dim`` is the ambient dimension minus the rank of the assembled
    constraint matrix (returned as ``assembled``). ``status`` is ``"identified"`` exactly
    when ``kernel_dim`` equals the target dimension, and then ``subspace``
    holds the unique consistent subspace; ``"underdetermined"`` means a
    positive-dimensional family of subspaces matches the observations.
    """

    status: str
    subspace: Subspace | None
    kernel_dim: int
    assembled: np.ndarray

    def __post_init__(self) -> None:
        if self.status not in ("identified", "underdetermined"):
            raise ValueError(f"unknown status {self.status!r}")
        if (self.status == "identified") != (self.subspace is not None):
            raise ValueError("subspace must be present exactly when identified")


def project(
    s: Subspace, mask, tol: Tolerances = DEFAULT_TOLERANCES
) -> ProjectionObservation:
    """Restriction of a subspace to the coordinates flagged by ``mask``.

    Raises :class:`RankDeficientProjectionError` when the restriction loses
    rank, rather than silently returning a smaller subspace.
    """
    m = _as_mask(mask, s.ambient_dim)
    restricted = restrict_rows(s.basis, m)
    if rank(restricted, tol) < s.dim:
        raise RankDeficientProjectionError(
            "restriction to the mask support is lower-dimensional than the subspace"
        )
    return ProjectionObservation(mask=m, basis=orthonormal_basis(restricted, tol))


def project_onto_pattern(
    s: Subspace, pattern: "SamplingPattern", tol: Tolerances = DEFAULT_TOLERANCES
) -> list[ProjectionObservation]:
    """Project a subspace onto every column mask of a sampling pattern."""
    if pattern.d != s.ambient_dim:
        raise ValueError(
            f"pattern rows ({pattern.d}) do not match ambient dimension ({s.ambient_dim})"
        )
    observations = []
    for support in pattern.column_supports:
        mask = np.zeros(pattern.d, dtype=bool)
        mask[list(support)] = True
        observations.append(project(s, mask, tol))
    return observations


def kernel_vector(
    obs: ProjectionObservation, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """The unit normal of an r-dimensional restriction inside its r+1
    coordinates.

    The sign is fixed by making the first nonzero entry positive so repeated
    runs agree. For a generic subspace every entry is nonzero; entries below
    ``GENERICITY_RATIO`` times the norm trigger a :class:`GenericityWarning`
    because downstream support arguments silently assume they are nonzero.
    """
    r = obs.dim
    if obs.basis.shape[0] != r + 1:
        raise ValueError(
            f"kernel vectors need exactly r+1 = {r + 1} observed coordinates, "
            f"got {obs.basis.shape[0]}"
        )
    kern = kernel_basis(obs.basis.T, tol)
    if kern.shape[1] != 1:
        raise KernelDimensionError(
            f"restriction has a {kern.shape[1]}-dimensional complement; expected 1"
        )
    a = kern[:, 0]
    nonzero = np.flatnonzero(a)
    if nonzero.size and a[nonzero[0]] < 0:
        a = -a
    if np.abs(a).min() < GENERICITY_RATIO * float(np.linalg.norm(a)):
        warnings.warn(
            "kernel vector has a near-zero entry; the observed subspace sits "
            "close to a degenerate configuration",
            GenericityWarning,
            stacklevel=2,
        )
    return a


def lift(a, mask, d: int) -> np.ndarray:
    """Scatter a vector into the mask's support inside R^d, zeros elsewhere.

    The lifted vector satisfies <lift(a), x> = <a, x restricted to the mask>
    for every x, which is what lets restricted kernel directions act as
    global linear constraints.
    """
    m = _as_mask(mask, d)
    vec = np.asarray(a, dtype=float).ravel()
    if vec.size != int(m.sum()):
        raise ValueError(
            f"vector length {vec.size} does not match mask support {int(m.sum())}"
        )
    out = np.zeros(d, dtype=float)
    out[m] = vec
    return out


def assemble_constraints(
    observations: Sequence[ProjectionObservation],
    d: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """The d x N matrix whose i-th column is the lifted kernel direction of
    observation i. For generic inputs its support equals the sampling pattern
    bit-for-bit."""
    if not observations:
        raise ValueError("need at least one observation")
    cols = []
    for obs in observations:
        if obs.ambient_dim != d:
            raise ValueError(
                f"observation mask length {obs.ambient_dim} does not match d={d}"
            )
        cols.append(lift(kernel_vector(obs, tol), obs.mask, d))
    return np.column_stack(cols)


def recover(
    observations: Sequence[ProjectionObservation],
    d: int,
    r: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RecoveryResult:
    """Recover the subspace consistent with all observations, if unique.

    Any number of observations is accepted (more than d - r simply adds
    redundant constraints). ``kernel_dim`` below r is impossible for true
    projections of one r-dimensional subspace and raises
    :class:`InconsistentObservationsError`.
    """
    if not 1 <= r < d:
        raise ValueError(f"need 1 <= r < d, got r={r}, d={d}")
    for obs in observations:
        if obs.dim != r:
            raise ValueError(
                f"observation exposes a {obs.dim}-dimensional restriction, expected r={r}"
            )
    a = assemble_constraints(observations, d, tol)
    kernel_dim = d - rank(a, tol)
    if kernel_dim < r:
        raise InconsistentObservationsError(
            f"assembled constraints leave a {kernel_dim}-dimensional kernel, "
            f"smaller than r={r}; observations are mutually inconsistent"
        )
    if kernel_dim == r:
        basis = kernel_basis(a.T, tol)
        return RecoveryResult(
            status="identified",
            subspace=Subspace(basis),
            kernel_dim=kernel_dim,
            assembled=a,
        )
    return RecoveryResult(
        status="underdetermined", subspace=None, kernel_dim=kernel_dim, assembled=a
    )
