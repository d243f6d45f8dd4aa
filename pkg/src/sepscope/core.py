"""Density matrices and the basic linear algebra on them.

Matrices are plain complex ``numpy`` arrays. A :class:`DensityMatrix` wraps a
validated, read-only array together with an optional bipartite split
``(N, K)``. Composite indices follow the row-major Kronecker convention:
the basis vector ``|i>|j>`` sits at index ``i*K + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import tolerances
from .errors import (
    DimMismatchError,
    NoFactorDimsError,
    NotFiniteError,
    NotHermitianError,
    NotPositiveError,
    NotSquareError,
    TraceNotOneError,
)

FactorDims = Tuple[int, int]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state.

    Build instances with :func:`validate_density`; the constructor itself
    does not check anything.
    """

    matrix: np.ndarray
    factor_dims: Optional[FactorDims] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def require_dims(self) -> FactorDims:
        if self.factor_dims is None:
            raise NoFactorDimsError()
        return self.factor_dims

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, factor_dims={self.factor_dims})"


def _trusted(matrix, factor_dims: Optional[FactorDims] = None) -> DensityMatrix:
    """Wrap the output of a state-preserving operation without revalidating."""
    return DensityMatrix(_frozen(matrix), None if factor_dims is None else tuple(factor_dims))


def as_array(a) -> np.ndarray:
    if isinstance(a, DensityMatrix):
        return a.matrix
    return np.asarray(a, dtype=np.complex128)


def _check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {m.shape}")


def validate_density(matrix, factor_dims: Optional[FactorDims] = None) -> DensityMatrix:
    """Check that ``matrix`` is a density matrix and wrap it.

    The Hermitian part is not symmetrized: a matrix that is off by more than
    ``tol.herm`` is rejected, anything within tolerance is stored as given.

    Raises
    ------
    NotSquareError, NotFiniteError, DimMismatchError, NotHermitianError,
    TraceNotOneError, NotPositiveError
    """
    tol = tolerances.current()
    m = as_array(matrix)
    _check_square(m)
    if not np.all(np.isfinite(m)):
        raise NotFiniteError("matrix has non-finite entries")
    d = m.shape[0]
    if factor_dims is not None:
        factor_dims = tuple(int(n) for n in factor_dims)
        if len(factor_dims) != 2 or factor_dims[0] < 1 or factor_dims[1] < 1:
            raise DimMismatchError(f"factor dims must be a pair of positive ints, got {factor_dims}")
        if factor_dims[0] * factor_dims[1] != d:
            raise DimMismatchError(f"factor dims {factor_dims} do not multiply to {d}")

    herm = float(np.max(np.abs(m - m.conj().T))) if d else 0.0
    if herm > tol.herm:
        raise NotHermitianError(herm)
    trace_dev = abs(np.trace(m) - 1.0)
    if trace_dev > tol.trace:
        raise TraceNotOneError(float(trace_dev))
    lam_min = float(np.linalg.eigvalsh(m)[0])
    if lam_min < -tol.psd:
        raise NotPositiveError(lam_min)
    return _trusted(m, factor_dims)


def pure_state(psi, factor_dims: Optional[FactorDims] = None) -> DensityMatrix:
    """|psi><psi| for a normalized vector."""
    v = np.asarray(psi, dtype=np.complex128).ravel()
    return validate_density(np.outer(v, v.conj()), factor_dims)


def maximally_mixed(d: int, factor_dims: Optional[FactorDims] = None) -> DensityMatrix:
    return _trusted(np.eye(d) / d, factor_dims)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_array(a), as_array(b))


def tensor_states(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Product state ``a (x) b`` with factor dims ``(a.dim, b.dim)``."""
    return _trusted(np.kron(a.matrix, b.matrix), (a.dim, b.dim))


def _ptrace_array(m: np.ndarray, dims: FactorDims, keep: int) -> np.ndarray:
    n, k = dims
    r = m.reshape(n, k, n, k)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced state on subsystem ``keep`` (1 or 2)."""
    if keep not in (1, 2):
        raise ValueError(f"keep must be 1 or 2, got {keep!r}")
    dims = rho.require_dims()
    return _trusted(_ptrace_array(rho.matrix, dims, keep))


def partial_transpose(rho: DensityMatrix, sys: int = 2) -> np.ndarray:
    """Partial transpose on subsystem ``sys``. Works on stacks ``(..., d, d)`` too."""
    return _ptranspose_array(rho.matrix, rho.require_dims(), sys)


def _ptranspose_array(m: np.ndarray, dims: FactorDims, sys: int = 2) -> np.ndarray:
    n, k = dims
    lead = m.shape[:-2]
    r = m.reshape(*lead, n, k, n, k)
    if sys == 2:
        r = np.swapaxes(r, -3, -1)
    else:
        r = np.swapaxes(r, -4, -2)
    return r.reshape(*lead, n * k, n * k)


def hs_inner(a, b) -> complex:
    """tr(A^dagger B)."""
    return complex(np.vdot(as_array(a), as_array(b)))


def hs_norm_sq(a) -> float:
    """Squared Hilbert-Schmidt norm tr(A A^dagger)."""
    m = as_array(a)
    _check_square(m)
    return float(np.sum(np.abs(m) ** 2))


def hs_distance(a, b) -> float:
    return float(np.sqrt(hs_norm_sq(as_array(a) - as_array(b))))


def _clamped_eigvalsh(m: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(m)
    return np.where(lam < 0.0, 0.0, lam)


def vn_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in nats. Tiny negative eigenvalues count as zero."""
    lam = _clamped_eigvalsh(as_array(rho))
    lam = lam[lam > 0.0]
    return float(max(0.0, -np.sum(lam * np.log(lam))))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho || sigma) in nats, or ``math.inf`` when supp(rho) is not inside supp(sigma).

    Eigenvalues of ``sigma`` at or below ``tol.psd`` are treated as its
    kernel; ``rho`` having more than ``tol.psd`` weight there gives infinity.
    """
    r, s = as_array(rho), as_array(sigma)
    if r.shape != s.shape:
        raise DimMismatchError(f"shapes differ: {r.shape} vs {s.shape}")
    tol = tolerances.current().psd
    lam_s, u = np.linalg.eigh(s)
    # diagonal of rho in sigma's eigenbasis
    rho_diag = np.real(np.einsum("ai,ab,bi->i", u.conj(), r, u))
    kernel = lam_s <= tol
    if np.any(kernel) and float(np.sum(rho_diag[kernel])) > tol:
        return float("inf")
    cross = -float(np.sum(rho_diag[~kernel] * np.log(lam_s[~kernel])))
    return max(cross - vn_entropy(rho), 0.0)
