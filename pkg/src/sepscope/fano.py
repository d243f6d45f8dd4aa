"""Generalized Gell-Mann bases, Fano decomposition and the SM correlation measure.

With generators normalized so that ``tr(s_i s_j) = 2 delta_ij`` a bipartite
state on ``C^N (x) C^K`` reads::

    rho = (1/NK) [ 1 + sum_i tau_a[i] s_i (x) 1 + sum_j tau_b[j] 1 (x) s_j
                     + sum_ij beta[i, j] s_i (x) s_j ]

so ``tau_a[i] = (N/2) tr(rho s_i (x) 1)`` and
``beta[i, j] = (NK/4) tr(rho s_i (x) s_j)``. The correlation tensor is
``m = beta - outer(tau_a, tau_b)``, and since
``rho - rho_A (x) rho_B = (1/NK) sum_ij m[i, j] s_i (x) s_j`` the SM measure
equals ``4 tr(m m^T) / (NK)^2`` for every state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np

from .core import DensityMatrix, FactorDims, hs_norm_sq, partial_trace, validate_density
from .errors import DimTooSmallError, UnsupportedDimsError


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    dim: int
    generators: tuple  # of read-only (d, d) complex arrays

    def __len__(self) -> int:
        return len(self.generators)

    def stacked(self) -> np.ndarray:
        return np.stack(self.generators)


@lru_cache(maxsize=None)
def su_generators(d: int) -> GeneratorBasis:
    """The ``d**2 - 1`` generalized Gell-Mann matrices.

    Order: symmetric off-diagonal ``(j, k)`` for ``j < k`` in lexicographic
    order, then antisymmetric off-diagonal in the same order, then the
    ``d - 1`` diagonal ones. For ``d = 2`` this is ``(X, Y, Z)``.
    """
    if d < 2:
        raise DimTooSmallError(f"SU(d) needs d >= 2, got {d}")
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    gens = []
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = g[k, j] = 1.0
        gens.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = -1j
        g[k, j] = 1j
        gens.append(g)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        gens.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(np.complex128))
    for g in gens:
        g.flags.writeable = False
    return GeneratorBasis(d, tuple(gens))


@dataclass(frozen=True, eq=False)
class FanoDecomposition:
    dims: FactorDims
    tau_a: np.ndarray
    tau_b: np.ndarray
    beta: np.ndarray
    m_tensor: np.ndarray

    @classmethod
    def from_coefficients(cls, dims, tau_a, tau_b, beta) -> "FanoDecomposition":
        """Build a decomposition from hand-picked coefficients; ``m`` is derived."""
        n, k = (int(x) for x in dims)
        tau_a = np.asarray(tau_a, dtype=float).reshape(n * n - 1)
        tau_b = np.asarray(tau_b, dtype=float).reshape(k * k - 1)
        beta = np.asarray(beta, dtype=float).reshape(n * n - 1, k * k - 1)
        return cls((n, k), tau_a, tau_b, beta, beta - np.outer(tau_a, tau_b))

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "tau_a": self.tau_a.tolist(),
            "tau_b": self.tau_b.tolist(),
            "beta": self.beta.tolist(),
            "m": self.m_tensor.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FanoDecomposition":
        dec = cls.from_coefficients(obj["dims"], obj["tau_a"], obj["tau_b"], obj["beta"])
        if "m" in obj and not np.allclose(np.asarray(obj["m"], dtype=float), dec.m_tensor, atol=1e-12):
            raise ValueError("stored m tensor disagrees with beta - tau_a tau_b^T")
        return dec


def _expectations(m: np.ndarray, ops: np.ndarray) -> np.ndarray:
    # tr(m @ op) for a stack of operators; real for Hermitian m and op
    return np.real(np.einsum("ij,nji->n", m, ops))


def fano_decompose(rho: DensityMatrix) -> FanoDecomposition:
    n, k = rho.require_dims()
    ga = su_generators(n).stacked()
    gb = su_generators(k).stacked()
    r = rho.matrix.reshape(n, k, n, k)
    # tr(rho s_i (x) s_j) = sum r[a,b,c,d] s_i[c,a] s_j[d,b]
    corr = np.real(np.einsum("abcd,ica,jdb->ij", r, ga, gb))
    tau_a = (n / 2.0) * _expectations(partial_trace(rho, 1).matrix, ga)
    tau_b = (k / 2.0) * _expectations(partial_trace(rho, 2).matrix, gb)
    beta = (n * k / 4.0) * corr
    return FanoDecomposition((n, k), tau_a, tau_b, beta, beta - np.outer(tau_a, tau_b))


def fano_assemble(decomp: FanoDecomposition) -> np.ndarray:
    """The operator built from the coefficients, without any positivity check."""
    n, k = decomp.dims
    ga = su_generators(n).stacked()
    gb = su_generators(k).stacked()
    op_a = np.einsum("i,iab->ab", decomp.tau_a, ga)
    op_b = np.einsum("j,jab->ab", decomp.tau_b, gb)
    corr = np.einsum("ij,iab,jcd->acbd", decomp.beta, ga, gb).reshape(n * k, n * k)
    total = np.eye(n * k) + np.kron(op_a, np.eye(k)) + np.kron(np.eye(n), op_b) + corr
    return total / (n * k)


def fano_reconstruct(decomp: FanoDecomposition) -> DensityMatrix:
    """Inverse of :func:`fano_decompose`. Raises NotPositiveError for non-states."""
    return validate_density(fano_assemble(decomp), decomp.dims)


def product_of_marginals(rho: DensityMatrix) -> np.ndarray:
    return np.kron(partial_trace(rho, 1).matrix, partial_trace(rho, 2).matrix)


def sm_measure(rho: DensityMatrix) -> float:
    """Squared HS distance between ``rho`` and the product of its marginals."""
    rho.require_dims()
    return hs_norm_sq(rho.matrix - product_of_marginals(rho))


def m_tensor_norm_sq(decomp: FanoDecomposition) -> float:
    """tr(M M^dagger), unnormalized."""
    return float(np.sum(decomp.m_tensor**2))


def sm_from_m_tensor(decomp: FanoDecomposition) -> float:
    n, k = decomp.dims
    return 4.0 * m_tensor_norm_sq(decomp) / (n * k) ** 2


_PAULIS = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128
)


def correlation_sum(rho: DensityMatrix) -> float:
    """Sum over Pauli pairs of the squared connected correlators.

    Only defined for two qubits. Equals ``4 * sm_measure(rho)``.
    """
    dims = rho.require_dims()
    if tuple(dims) != (2, 2):
        raise UnsupportedDimsError(f"correlation_sum needs two qubits, got dims {dims}")
    eye = np.eye(2)
    m = rho.matrix
    total = 0.0
    for sa in _PAULIS:
        ea = np.real(np.trace(m @ np.kron(sa, eye)))
        for sb in _PAULIS:
            eb = np.real(np.trace(m @ np.kron(eye, sb)))
            eab = np.real(np.trace(m @ np.kron(sa, sb)))
            total += (eab - ea * eb) ** 2
    return float(total)


def _norm(x: np.ndarray, kind: str) -> float:
    if kind == "HS":
        return float(np.sqrt(hs_norm_sq(x)))
    if kind == "trace":
        return float(np.sum(np.linalg.svd(x, compute_uv=False)))
    raise ValueError(f"unknown norm {kind!r}; expected 'HS' or 'trace'")


def w_measure(
    rho: DensityMatrix,
    transform: Callable[[np.ndarray], np.ndarray] | None = None,
    norm: Literal["HS", "trace"] = "HS",
) -> float:
    """``|| F(rho - rho_A (x) rho_B) ||`` for a linear map ``F`` (identity by default)."""
    rho.require_dims()
    core = rho.matrix - product_of_marginals(rho)
    if transform is not None:
        core = np.asarray(transform(core), dtype=np.complex128)
    return _norm(core, norm)


__all__ = [
    "GeneratorBasis",
    "FanoDecomposition",
    "su_generators",
    "fano_decompose",
    "fano_assemble",
    "fano_reconstruct",
    "sm_measure",
    "m_tensor_norm_sq",
    "sm_from_m_tensor",
    "correlation_sum",
    "w_measure",
    "product_of_marginals",
]
