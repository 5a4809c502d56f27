"""Dense linear algebra kernel: ranks, null spaces, row restrictions, and
subspace geometry on the Grassmannian.

Everything here is a pure function on immutable inputs (arrays are treated as
read-only and never mutated), so values are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "Subspace",
    "as_matrix",
    "rank",
    "kernel_basis",
    "orthonormal_basis",
    "restrict_rows",
    "subspace_distance",
    "random_subspace",
]


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds used across the package.

    Attributes:
        rank_rel: relative singular-value threshold for rank decisions,
            measured against the largest singular value.
        orth: maximum allowed deviation of a basis from orthonormality,
            measured entrywise on ``B.T @ B - I``.
        fit_rel: relative residual threshold for the data-fit predicate.
    """

    rank_rel: float = 1e-9
    orth: float = 1e-10
    fit_rel: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("rank_rel", "orth", "fit_rel"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly between 0 and 1, got {value!r}")


DEFAULT_TOLERANCES = Tolerances()


def as_matrix(a) -> np.ndarray:
    """Validate and convert input to a 2-D float array.

    Rejects empty shapes and non-finite entries; those are never legal
    anywhere in this package.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"matrix must have at least one row and one column, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def rank(m, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Numerical rank: singular values above ``rank_rel`` times the largest."""
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel * s[0]))


def kernel_basis(m, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal basis of ``{v : m @ v = 0}``.

    Returns a ``cols x (cols - rank)`` array; zero columns when the kernel is
    trivial. Columns come from the right singular vectors attached to the
    discarded singular values, so they are orthonormal to machine precision.
    """
    m = as_matrix(m)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > tol.rank_rel * s[0]))
    return np.ascontiguousarray(vh[r:].T)


def orthonormal_basis(m, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal basis of the column span of ``m`` (left singular vectors)."""
    m = as_matrix(m)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise ValueError("cannot orthonormalize the span of a zero matrix")
    r = int(np.count_nonzero(s > tol.rank_rel * s[0]))
    return np.ascontiguousarray(u[:, :r])


def restrict_rows(m, mask) -> np.ndarray:
    """Submatrix of the rows flagged by ``mask``, order preserved.

    Args:
        m: matrix with ``len(mask)`` rows.
        mask: binary/boolean vector; at least one entry must be set.
    """
    m = as_matrix(m)
    sel = np.asarray(mask).astype(bool).ravel()
    if sel.size != m.shape[0]:
        raise ValueError(f"mask length {sel.size} does not match row count {m.shape[0]}")
    if not sel.any():
        raise ValueError("row mask selects no rows")
    return m[sel, :]


@dataclass(frozen=True, eq=False)
class Subspace:
    """A point of the Grassmannian of ``dim``-planes in R^``ambient_dim``,
    stored as a matrix with orthonormal columns.

    Construction validates orthonormality against the default ``orth``
    tolerance; use :meth:`from_spanning` to orthonormalize an arbitrary
    spanning set first.
    """

    basis: np.ndarray

    def __post_init__(self) -> None:
        b = as_matrix(self.basis)
        d, r = b.shape
        if not 1 <= r < d:
            raise ValueError(f"subspace dimension must satisfy 1 <= r < d, got r={r}, d={d}")
        gram_err = np.abs(b.T @ b - np.eye(r)).max()
        if gram_err > DEFAULT_TOLERANCES.orth:
            raise ValueError(
                f"basis columns are not orthonormal (deviation {gram_err:.3e}); "
                "use Subspace.from_spanning to orthonormalize"
            )
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @classmethod
    def from_spanning(cls, m, tol: Tolerances = DEFAULT_TOLERANCES) -> "Subspace":
        """Subspace spanned by the columns of ``m`` (rank detected numerically)."""
        return cls(orthonormal_basis(m, tol))


def subspace_distance(u: Subspace, v: Subspace) -> float:
    """Sine of the largest principal angle between two subspaces.

    Symmetric, zero exactly on equal subspaces, and a pseudometric on each
    fixed Grassmannian; values lie in [0, 1].
    """
    if u.ambient_dim != v.ambient_dim:
        raise ValueError(
            f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}"
        )
    if u.dim != v.dim:
        raise ValueError(f"subspace dimensions differ: {u.dim} vs {v.dim}")
    if u.basis is v.basis or np.array_equal(u.basis, v.basis):
        return 0.0
    # The singular values of (I - U U^T) V are exactly the principal-angle
    # sines; forming them directly stays accurate for nearly equal subspaces,
    # where sqrt(1 - cos^2) would lose half the significant digits. Both
    # orders give the same value in exact arithmetic; taking the max keeps
    # the result symmetric in floating point too.
    uv = v.basis - u.basis @ (u.basis.T @ v.basis)
    vu = u.basis - v.basis @ (v.basis.T @ u.basis)
    s = max(
        np.linalg.svd(uv, compute_uv=False).max(initial=0.0),
        np.linalg.svd(vu, compute_uv=False).max(initial=0.0),
    )
    return float(np.clip(s, 0.0, 1.0))


def random_subspace(d: int, r: int, seed) -> Subspace:
    """Uniform (rotation-invariant) random ``r``-plane in R^``d``.

    A ``d x r`` standard normal draw is orthonormalized by QR; the R factor's
    diagonal signs are absorbed into Q so the distribution is exactly the
    invariant one. Deterministic per seed; ``seed`` may be anything
    ``numpy.random.default_rng`` accepts.
    """
    if not 1 <= r < d:
        raise ValueError(f"need 1 <= r < d, got r={r}, d={d}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, r))
    q, rr = np.linalg.qr(g)
    signs = np.sign(np.diag(rr))
    signs[signs == 0.0] = 1.0
    return Subspace(q * signs)
