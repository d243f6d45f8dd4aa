"""Separability verdicts built on the polytope machinery.

Entanglement on segment points is detected with the partial-transpose
(PPT) test. A negative partial-transpose eigenvalue proves entanglement in
any dimension. A nonnegative one proves separability only for 2x2 and 2x3
systems, and reports say whether a verdict is conclusive.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .core import (
    DensityMatrix,
    FactorDims,
    _ptranspose_array,
    _trusted,
    hs_norm_sq,
    partial_trace,
    vn_entropy,
)
from .errors import (
    BadParameterError,
    FactorNotPureError,
    NotNormalizedError,
    VerdictMismatchError,
)
from .fano import product_of_marginals
from .geometry import FactorPolytope, ProductPolytope, hull_membership, lambda_map
from .states import (
    SeparableDecomposition,
    computational_projector,
    make_werner,
    pauli_eigenstates,
)

# pairs for which PPT is equivalent to separability
PPT_CONCLUSIVE_DIMS = {(2, 2), (2, 3), (3, 2)}


def ppt_conclusive(dims: FactorDims) -> bool:
    return tuple(dims) in PPT_CONCLUSIVE_DIMS or min(dims) == 1


def omega(rho: DensityMatrix) -> DensityMatrix:
    """Product of the two marginals, ``rho_A (x) rho_B``."""
    return _trusted(product_of_marginals(rho), rho.require_dims())


def is_product(rho: DensityMatrix) -> bool:
    tol = tolerances.current().product
    return hs_norm_sq(rho.matrix - product_of_marginals(rho)) <= tol**2


def invariant_polytope(dec: SeparableDecomposition) -> ProductPolytope:
    """All ``n**2`` cross products of the decomposition's factors.

    The result contains the decomposed state and is fixed by ``lambda_tau``.
    Factors are used as given; no pruning.
    """
    return lambda_map(FactorPolytope.of(dec.factors_a), FactorPolytope.of(dec.factors_b))


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Smallest eigenvalue of the partial transpose on the second factor."""
    return float(np.linalg.eigvalsh(_ptranspose_array(rho.matrix, rho.require_dims()))[0])


def segment(rho: DensityMatrix, n: int) -> list[DensityMatrix]:
    """``n`` evenly spaced states from ``omega(rho)`` (x=0) to ``rho`` (x=1)."""
    dims = rho.require_dims()
    if n < 2:
        raise BadParameterError(f"segment needs at least 2 points, got {n}")
    end = omega(rho).matrix
    xs = np.linspace(0.0, 1.0, n)
    pts = [_trusted(x * rho.matrix + (1.0 - x) * end, dims) for x in xs[1:-1]]
    return [omega(rho), *pts, rho]


class SegmentVerdict(str, enum.Enum):
    ENTANGLED_DETECTED = "EntangledDetected"
    NO_VIOLATION_FOUND = "NoViolationFound"


@dataclass(frozen=True)
class SegmentScanReport:
    dims: FactorDims
    x_values: np.ndarray
    min_pt_eigenvalues: np.ndarray
    verdict: SegmentVerdict
    conclusive: bool

    @property
    def n_points(self) -> int:
        return len(self.x_values)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "n_points": self.n_points,
            "x_values": self.x_values.tolist(),
            "min_pt_eigenvalues": self.min_pt_eigenvalues.tolist(),
            "verdict": self.verdict.value,
            "conclusive": self.conclusive,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "min_pt_eigenvalue"])
        for x, e in zip(self.x_values, self.min_pt_eigenvalues):
            w.writerow([f"{x:.17g}", f"{e:.17g}"])
        return buf.getvalue()


def segment_scan(rho: DensityMatrix, n: int = 101) -> SegmentScanReport:
    """PPT test at ``n`` points of the segment between ``omega(rho)`` and ``rho``.

    Any violation proves ``rho`` entangled. Without a violation the verdict is
    conclusive only where PPT implies separability.
    """
    dims = rho.require_dims()
    if n < 2:
        raise BadParameterError(f"segment needs at least 2 points, got {n}")
    xs = np.linspace(0.0, 1.0, n)
    end = product_of_marginals(rho)
    stack = xs[:, None, None] * rho.matrix + (1.0 - xs)[:, None, None] * end
    stack[-1] = rho.matrix
    eigs = np.linalg.eigvalsh(_ptranspose_array(stack, dims))[:, 0]
    violated = bool(np.any(eigs < -tolerances.current().psd))
    verdict = SegmentVerdict.ENTANGLED_DETECTED if violated else SegmentVerdict.NO_VIOLATION_FOUND
    conclusive = violated or ppt_conclusive(dims)
    return SegmentScanReport(tuple(dims), xs, eigs, verdict, conclusive)


# --- pure states -------------------------------------------------------------


@dataclass(frozen=True)
class PureSeparabilityChecks:
    reduced_entropy: float
    omega_distance: float
    by_entropy: bool
    by_omega: bool


def pure_separability_checks(psi, dims: FactorDims) -> PureSeparabilityChecks:
    """Both pure-state product tests, without reconciling them."""
    v = np.asarray(psi, dtype=np.complex128).ravel()
    if v.size != dims[0] * dims[1]:
        raise BadParameterError(f"vector of length {v.size} does not fit dims {tuple(dims)}")
    tol = tolerances.current()
    if abs(np.linalg.norm(v) - 1.0) > tol.norm:
        raise NotNormalizedError(f"vector norm is {np.linalg.norm(v):.12f}")
    rho = _trusted(np.outer(v, v.conj()), tuple(dims))
    s = vn_entropy(partial_trace(rho, 1))
    dist = math.sqrt(hs_norm_sq(rho.matrix - product_of_marginals(rho)))
    return PureSeparabilityChecks(s, dist, s <= tol.entropy, dist <= tol.product)


def pure_separability(psi, dims: FactorDims = (2, 2)) -> bool:
    """Is the pure state ``psi`` a product vector?

    Decided by the entropy of the reduced state and, independently, by
    whether ``|psi><psi|`` is a fixed point of :func:`omega`. Raises
    VerdictMismatchError if the two disagree.
    """
    c = pure_separability_checks(psi, dims)
    if c.by_entropy != c.by_omega:
        raise VerdictMismatchError(
            f"entropy test says {c.by_entropy} (S={c.reduced_entropy:.3e}), "
            f"omega test says {c.by_omega} (distance={c.omega_distance:.3e})"
        )
    return c.by_entropy


# --- pure-product polytopes ----------------------------------------------------


def _second_eigenvalue(m: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(m)
    return float(lam[-2]) if len(lam) > 1 else 0.0


def p_pure_polytope(dec: SeparableDecomposition) -> ProductPolytope:
    """Invariant polytope of a decomposition whose factors are all pure."""
    limit = tolerances.current().psd
    for side, factors in (("factors_a", dec.factors_a), ("factors_b", dec.factors_b)):
        for i, f in enumerate(factors):
            second = _second_eigenvalue(f.matrix)
            if second > limit:
                raise FactorNotPureError(side, i, second)
    return invariant_polytope(dec)


def min_entropy_over(p: ProductPolytope) -> float:
    """Minimum von Neumann entropy over the hull.

    Entropy is concave, so the minimum sits at a vertex.
    """
    return min(vn_entropy(v) for v in p.vertices)


def werner_pure_decomposition(p: float) -> SeparableDecomposition:
    """Pure-product decomposition of ``make_werner(p)`` for ``p <= 1/3``.

    Candidate terms are the six ``|s> (x) |s*>`` for Pauli eigenstates ``s``
    and the four computational product states; the weights are found by
    simplex least squares against the target state.
    """
    if not 0.0 <= p <= 1.0 / 3.0 + 1e-12:
        raise BadParameterError(f"Werner({p}) is entangled; no separable decomposition exists")
    fa, fb = [], []
    for a, b in pauli_eigenstates():
        fa.append(_trusted(np.outer(a, a.conj())))
        fb.append(_trusted(np.outer(b, b.conj())))
    for i in range(2):
        for j in range(2):
            fa.append(computational_projector(2, i))
            fb.append(computational_projector(2, j))
    products = ProductPolytope((2, 2), tuple(_trusted(np.kron(a.matrix, b.matrix), (2, 2)) for a, b in zip(fa, fb)))
    target = make_werner(min(p, 1.0 / 3.0))
    cert = hull_membership(target, products)
    if not cert.inside:
        raise BadParameterError(f"no decomposition found (residual {cert.residual:.3e})")
    keep = cert.coefficients > 1e-14
    w = cert.coefficients[keep] / cert.coefficients[keep].sum()
    return SeparableDecomposition.create(
        w, [f for f, k in zip(fa, keep) if k], [f for f, k in zip(fb, keep) if k]
    )
