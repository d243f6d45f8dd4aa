"""Named states, random ensembles and separable decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.stats import unitary_group

from .core import DensityMatrix, FactorDims, _trusted, validate_density
from .errors import BadParameterError, InvalidDecompositionError, SepscopeError

SeedLike = int | np.random.Generator | None
BellKind = Literal["phi+", "phi-", "psi+", "psi-"]

_BELL_VECTORS = {
    "phi+": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / np.sqrt(2),
}


def _rng(seed: SeedLike) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def make_bell(kind: BellKind = "phi+") -> DensityMatrix:
    try:
        v = _BELL_VECTORS[kind]
    except KeyError:
        raise BadParameterError(f"unknown Bell state {kind!r}; expected one of {sorted(_BELL_VECTORS)}")
    return _trusted(np.outer(v, v.conj()), (2, 2))


def make_werner(p: float) -> DensityMatrix:
    """``p |phi+><phi+| + (1 - p) I/4``."""
    if not 0.0 <= p <= 1.0:
        raise BadParameterError(f"Werner weight must lie in [0, 1], got {p}")
    return _trusted(p * make_bell("phi+").matrix + (1.0 - p) * np.eye(4) / 4, (2, 2))


def ginibre(d: int, rank: int | None = None, seed: SeedLike = None) -> np.ndarray:
    rng = _rng(seed)
    r = d if rank is None else rank
    return (rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))) / np.sqrt(2)


def random_state(d: int, seed: SeedLike = None, factor_dims: FactorDims | None = None) -> DensityMatrix:
    """Hilbert-Schmidt distributed state: ``G G^dagger / tr(G G^dagger)`` with complex Gaussian ``G``."""
    if d < 1:
        raise BadParameterError(f"dimension must be positive, got {d}")
    g = ginibre(d, seed=seed)
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return validate_density(m / np.trace(m).real, factor_dims)


def random_pure_vector(d: int, seed: SeedLike = None) -> np.ndarray:
    """Haar-random unit vector."""
    v = ginibre(d, rank=1, seed=seed)[:, 0]
    return v / np.linalg.norm(v)


def random_pure_state(d: int, seed: SeedLike = None, factor_dims: FactorDims | None = None) -> DensityMatrix:
    v = random_pure_vector(d, seed)
    return _trusted(np.outer(v, v.conj()), factor_dims)


def random_unitary(d: int, seed: SeedLike = None) -> np.ndarray:
    if d == 1:
        return np.exp(2j * np.pi * _rng(seed).random()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=_rng(seed))


def random_product_state(dims: FactorDims, seed: SeedLike = None, pure: bool = False) -> DensityMatrix:
    rng = _rng(seed)
    draw = random_pure_state if pure else random_state
    a, b = draw(dims[0], rng), draw(dims[1], rng)
    return _trusted(np.kron(a.matrix, b.matrix), tuple(dims))


@dataclass(frozen=True, eq=False)
class SeparableDecomposition:
    """``rho = sum_k weights[k] * factors_a[k] (x) factors_b[k]``.

    Construct through :meth:`create`, which enforces the invariants.
    """

    weights: np.ndarray
    factors_a: tuple
    factors_b: tuple

    @classmethod
    def create(
        cls,
        weights: Sequence[float],
        factors_a: Sequence[DensityMatrix],
        factors_b: Sequence[DensityMatrix],
    ) -> "SeparableDecomposition":
        w = np.asarray(weights, dtype=float).ravel()
        fa, fb = tuple(factors_a), tuple(factors_b)
        if not (len(w) == len(fa) == len(fb)) or len(w) == 0:
            raise InvalidDecompositionError(
                f"need equally many weights and factors (got {len(w)}, {len(fa)}, {len(fb)})"
            )
        if np.any(w < -1e-12):
            raise InvalidDecompositionError(f"negative weight {w.min():.3e}")
        if abs(w.sum() - 1.0) > 1e-9:
            raise InvalidDecompositionError(f"weights sum to {w.sum():.12f}, not 1")
        for side, fs in (("a", fa), ("b", fb)):
            if len({f.dim for f in fs}) != 1:
                raise InvalidDecompositionError(f"factors_{side} have mixed dimensions")
        w = np.clip(w, 0.0, None)
        w.flags.writeable = False
        return cls(w, fa, fb)

    @property
    def n_terms(self) -> int:
        return len(self.weights)

    @property
    def factor_dims(self) -> FactorDims:
        return (self.factors_a[0].dim, self.factors_b[0].dim)

    def assemble(self) -> DensityMatrix:
        m = sum(w * np.kron(a.matrix, b.matrix) for w, a, b in zip(self.weights, self.factors_a, self.factors_b))
        try:
            return validate_density(m, self.factor_dims)
        except SepscopeError as exc:
            raise InvalidDecompositionError(f"assembled operator is not a state: {exc}") from exc

    def transformed(self, u1: np.ndarray, u2: np.ndarray) -> "SeparableDecomposition":
        """Apply ``u1`` to every A factor and ``u2`` to every B factor."""
        fa = tuple(_trusted(u1 @ a.matrix @ u1.conj().T) for a in self.factors_a)
        fb = tuple(_trusted(u2 @ b.matrix @ u2.conj().T) for b in self.factors_b)
        return SeparableDecomposition(self.weights, fa, fb)


def random_separable(
    n_terms: int,
    dims: FactorDims,
    seed: SeedLike = None,
    pure: bool = False,
) -> SeparableDecomposition:
    """Flat-Dirichlet weights over random product terms.

    Factors come from the Hilbert-Schmidt ensemble, or are Haar-random pure
    states when ``pure`` is set.
    """
    if n_terms < 1:
        raise BadParameterError(f"n_terms must be >= 1, got {n_terms}")
    if len(dims) != 2 or min(dims) < 1:
        raise BadParameterError(f"dims must be a pair of positive ints, got {dims}")
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(n_terms))
    draw = random_pure_state if pure else random_state
    fa = [draw(dims[0], rng) for _ in range(n_terms)]
    fb = [draw(dims[1], rng) for _ in range(n_terms)]
    return SeparableDecomposition.create(weights, fa, fb)


def computational_projector(d: int, i: int) -> DensityMatrix:
    m = np.zeros((d, d), dtype=np.complex128)
    m[i, i] = 1.0
    return _trusted(m)


def pauli_eigenstates() -> list[tuple[np.ndarray, np.ndarray]]:
    """The six qubit states ``+-x, +-y, +-z`` paired with their complex conjugates."""
    s = 1 / np.sqrt(2)
    vecs = [
        np.array([s, s]),
        np.array([s, -s]),
        np.array([s, 1j * s]),
        np.array([s, -1j * s]),
        np.array([1, 0]),
        np.array([0, 1]),
    ]
    return [(v.astype(np.complex128), v.conj().astype(np.complex128)) for v in vecs]
