"""Vertex-represented convex sets of states and the maps between them.

A polytope is stored as a finite list of vertex states and stands for their
convex hull. The maps are

* ``tau``: joint polytope -> pair of factor polytopes (partial traces of the
  vertices; the image of a hull under a linear map is the hull of the image),
* ``lambda_map``: pair of factor polytopes -> hull of all vertex products,
* ``lambda_tau``: their composition, which sends a singleton ``{rho}`` to
  ``{rho_A (x) rho_B}``.

Set equality is decided by mutual hull inclusion, with each inclusion a
least-squares problem over the probability simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import nnls

from . import tolerances
from .core import DensityMatrix, FactorDims, _trusted, relative_entropy
from .errors import DimMismatchError, NotUnitaryError, SepscopeError


class EmptyPolytopeError(SepscopeError):
    pass


@dataclass(frozen=True, eq=False)
class FactorPolytope:
    dim: int
    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise EmptyPolytopeError("a polytope needs at least one vertex")
        if any(v.dim != self.dim for v in self.vertices):
            raise DimMismatchError(f"all vertices must have dimension {self.dim}")

    @classmethod
    def of(cls, vertices: Sequence[DensityMatrix]) -> "FactorPolytope":
        vs = tuple(vertices)
        if not vs:
            raise EmptyPolytopeError("a polytope needs at least one vertex")
        return cls(vs[0].dim, vs)

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True, eq=False)
class ProductPolytope:
    factor_dims: FactorDims
    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise EmptyPolytopeError("a polytope needs at least one vertex")
        for v in self.vertices:
            if v.factor_dims is None or tuple(v.factor_dims) != tuple(self.factor_dims):
                raise DimMismatchError(
                    f"vertex factor dims {v.factor_dims} do not match polytope dims {self.factor_dims}"
                )

    @classmethod
    def of(cls, vertices: Sequence[DensityMatrix]) -> "ProductPolytope":
        vs = tuple(vertices)
        if not vs:
            raise EmptyPolytopeError("a polytope needs at least one vertex")
        return cls(vs[0].require_dims(), vs)

    @property
    def dim(self) -> int:
        return self.factor_dims[0] * self.factor_dims[1]

    def __len__(self) -> int:
        return len(self.vertices)


Polytope = Union[ProductPolytope, FactorPolytope]


@dataclass(frozen=True)
class HullCertificate:
    inside: bool
    residual: float
    coefficients: Optional[np.ndarray] = field(default=None, compare=False)

    def to_json(self) -> dict:
        return {
            "inside": self.inside,
            "residual": self.residual,
            "coefficients": None if self.coefficients is None else self.coefficients.tolist(),
        }


def _realify(mats: Sequence[np.ndarray]) -> np.ndarray:
    # columns are [Re(vec m); Im(vec m)], so Euclidean norm == HS norm
    flat = np.stack([np.asarray(m).ravel() for m in mats], axis=1)
    return np.concatenate([flat.real, flat.imag], axis=0)


# weight of the sum-to-one row in the augmented NNLS system
_SIMPLEX_ROW_WEIGHT = 10.0


def simplex_least_squares(vertices: Sequence[np.ndarray], target: np.ndarray) -> tuple[np.ndarray, float]:
    """Convex weights minimizing the HS distance to ``target``, and that distance."""
    a = _realify(vertices)
    b = _realify([target])[:, 0]
    n = a.shape[1]
    a_aug = np.vstack([a, _SIMPLEX_ROW_WEIGHT * np.ones((1, n))])
    b_aug = np.concatenate([b, [_SIMPLEX_ROW_WEIGHT]])
    w, _ = nnls(a_aug, b_aug, maxiter=max(50 * n, 200))
    total = w.sum()
    w = w / total if total > 0 else np.full(n, 1.0 / n)
    return w, float(np.linalg.norm(a @ w - b))


def _dim_of(p: Polytope) -> int:
    return p.dim


def hull_membership(x: DensityMatrix, p: Polytope) -> HullCertificate:
    """Is ``x`` in the convex hull of ``p``'s vertices?

    ``residual`` is the HS distance from ``x`` to the closest hull point found;
    ``inside`` means ``residual <= tol.hull``. The returned coefficients are
    convex weights on ``p.vertices`` realizing that point.
    """
    if x.dim != _dim_of(p):
        raise DimMismatchError(f"state has dimension {x.dim}, polytope {_dim_of(p)}")
    w, res = simplex_least_squares([v.matrix for v in p.vertices], x.matrix)
    return HullCertificate(res <= tolerances.current().hull, res, w)


def prune_duplicates(vertices: Sequence[DensityMatrix]) -> list[DensityMatrix]:
    """Drop vertices within ``tol.prune`` (HS distance) of an earlier one."""
    tol = tolerances.current().prune
    kept: list[DensityMatrix] = []
    for v in vertices:
        if all(np.linalg.norm(v.matrix - k.matrix) > tol for k in kept):
            kept.append(v)
    return kept


def extreme_vertices(p: Polytope) -> Polytope:
    """Remove every vertex lying in the hull of the remaining ones."""
    vs = list(prune_duplicates(p.vertices))
    i = 0
    while i < len(vs) and len(vs) > 1:
        others = vs[:i] + vs[i + 1 :]
        _, res = simplex_least_squares([o.matrix for o in others], vs[i].matrix)
        if res <= tolerances.current().hull:
            vs = others
        else:
            i += 1
    return type(p)(p.factor_dims if isinstance(p, ProductPolytope) else p.dim, tuple(vs))


def tau(p: ProductPolytope) -> tuple[FactorPolytope, FactorPolytope]:
    """Partial-trace images of ``p`` on each factor, duplicates pruned."""
    n, k = p.factor_dims
    firsts, seconds = [], []
    for v in p.vertices:
        r = v.matrix.reshape(n, k, n, k)
        firsts.append(_trusted(np.einsum("ijkj->ik", r)))
        seconds.append(_trusted(np.einsum("ijil->jl", r)))
    return FactorPolytope(n, tuple(prune_duplicates(firsts))), FactorPolytope(k, tuple(prune_duplicates(seconds)))


def quasi_tensor(c1: FactorPolytope, c2: FactorPolytope) -> list[DensityMatrix]:
    """Products ``v (x) w`` over all vertex pairs, ``c1``-major order."""
    dims = (c1.dim, c2.dim)
    return [_trusted(np.kron(v.matrix, w.matrix), dims) for v, w in itertools.product(c1.vertices, c2.vertices)]


def lambda_map(c1: FactorPolytope, c2: FactorPolytope) -> ProductPolytope:
    """Convex hull of the quasi-tensor product of two factor polytopes."""
    return ProductPolytope((c1.dim, c2.dim), tuple(quasi_tensor(c1, c2)))


def lambda_tau(p: ProductPolytope) -> ProductPolytope:
    return lambda_map(*tau(p))


def inclusion_residual(a: Polytope, b: Polytope) -> float:
    """Largest hull residual of a vertex of ``a`` with respect to ``b``."""
    if _dim_of(a) != _dim_of(b):
        raise DimMismatchError(f"dimensions differ: {_dim_of(a)} vs {_dim_of(b)}")
    bv = [v.matrix for v in b.vertices]
    return max(simplex_least_squares(bv, v.matrix)[1] for v in a.vertices)


def _check_same_dims(a: Polytope, b: Polytope) -> None:
    da = a.factor_dims if isinstance(a, ProductPolytope) else (a.dim,)
    db = b.factor_dims if isinstance(b, ProductPolytope) else (b.dim,)
    if tuple(da) != tuple(db):
        raise DimMismatchError(f"polytope dims differ: {da} vs {db}")


def equality_residual(a: Polytope, b: Polytope) -> float:
    _check_same_dims(a, b)
    return max(inclusion_residual(a, b), inclusion_residual(b, a))


def polytope_equal(a: Polytope, b: Polytope) -> bool:
    """Mutual hull inclusion within ``tol.hull``."""
    return equality_residual(a, b) <= tolerances.current().hull


def is_css(p: ProductPolytope) -> bool:
    """Does ``lambda_tau`` map ``p`` onto itself?"""
    return polytope_equal(lambda_tau(p), p)


def css_projection_check(p: ProductPolytope) -> bool:
    """``lambda_tau`` applied twice gives the same set as applied once."""
    once = lambda_tau(p)
    return polytope_equal(lambda_tau(once), once)


def local_unitary_transform(p: ProductPolytope, u1, u2) -> ProductPolytope:
    """Conjugate every vertex by ``u1 (x) u2``."""
    u1 = np.asarray(u1, dtype=np.complex128)
    u2 = np.asarray(u2, dtype=np.complex128)
    n, k = p.factor_dims
    if u1.shape != (n, n) or u2.shape != (k, k):
        raise DimMismatchError(f"unitaries of shape {u1.shape}, {u2.shape} do not fit dims {(n, k)}")
    tol = tolerances.current().unitary
    for name, u in (("u1", u1), ("u2", u2)):
        dev = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
        if dev > tol:
            raise NotUnitaryError(f"{name} deviates from unitarity by {dev:.3e}")
    u = np.kron(u1, u2)
    return ProductPolytope(p.factor_dims, tuple(_trusted(u @ v.matrix @ u.conj().T, (n, k)) for v in p.vertices))


# --- set-level relative entropy -------------------------------------------

# eigenvalue floor inside gradient formulas only; objective values are exact
_LOG_FLOOR = 1e-14
_LINE_SEARCH = 2.0 ** -np.arange(0, 24)


@dataclass(frozen=True)
class SetDivergence:
    """Best value found for ``inf S(rho || sigma)`` and the weights realizing it.

    The value is an upper bound on the infimum (``approximate`` is always true).
    """

    value: float
    weights_c: np.ndarray = field(compare=False)
    weights_cprime: np.ndarray = field(compare=False)
    budget: int = 0
    n_starts: int = 0
    approximate: bool = True

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> dict:
        return {
            "value": "inf" if math.isinf(self.value) else self.value,
            "approximate": self.approximate,
            "weights_c": self.weights_c.tolist(),
            "weights_cprime": self.weights_cprime.tolist(),
            "budget": self.budget,
            "n_starts": self.n_starts,
        }


def _logm_h(m: np.ndarray) -> np.ndarray:
    lam, u = np.linalg.eigh(m)
    return (u * np.log(np.maximum(lam, _LOG_FLOOR))) @ u.conj().T


def _grad_first(verts: np.ndarray, rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    diff = _logm_h(rho) - _logm_h(sigma)
    return np.real(np.einsum("kab,ba->k", verts, diff))


def _grad_second(verts: np.ndarray, rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    # d/dmu_k of -tr(rho log sigma), via divided differences of log
    s, u = np.linalg.eigh(sigma)
    s = np.maximum(s, _LOG_FLOOR)
    ls = np.log(s)
    ds = s[:, None] - s[None, :]
    same = np.abs(ds) < 1e-12 * np.maximum(s[:, None], s[None, :])
    gamma = np.where(same, 1.0 / s[:, None], (ls[:, None] - ls[None, :]) / np.where(same, 1.0, ds))
    rho_e = u.conj().T @ rho @ u
    verts_e = np.einsum("ai,kab,bj->kij", u.conj(), verts, u)
    return -np.real(np.einsum("ba,ab,kab->k", rho_e, gamma, verts_e))


def _objective(a: np.ndarray, b: np.ndarray, wa: np.ndarray, wb: np.ndarray) -> float:
    rho = _trusted(np.einsum("k,kab->ab", wa, a))
    sigma = _trusted(np.einsum("k,kab->ab", wb, b))
    return relative_entropy(rho, sigma)


def _fw_step(obj, w: np.ndarray, grad: np.ndarray, current: float) -> tuple[np.ndarray, float]:
    k = int(np.argmin(grad))
    if w[k] >= 1.0:
        return w, current
    target = np.zeros_like(w)
    target[k] = 1.0
    best_w, best = w, current
    # objective is convex along the segment: stop once it rises past an improvement
    for g in _LINE_SEARCH:
        cand = (1.0 - g) * w + g * target
        val = obj(cand)
        if val < best:
            best_w, best = cand, val
        elif best < current:
            break
    return best_w, best


def _start_candidates(a: np.ndarray, b: np.ndarray) -> list[tuple[float, np.ndarray, np.ndarray]]:
    na, nb = len(a), len(b)
    ua, ub = np.full(na, 1.0 / na), np.full(nb, 1.0 / nb)
    eye_a, eye_b = np.eye(na), np.eye(nb)
    cands = []
    for i, j in itertools.product(range(na), range(nb)):
        cands.append((eye_a[i], eye_b[j]))
    for i in range(na):
        cands.append((eye_a[i], ub))
    cands.append((ua, ub))
    scored = [(_objective(a, b, wa, wb), wa, wb) for wa, wb in cands]
    # stable sort keeps the enumeration order among ties
    scored.sort(key=lambda t: t[0])
    return scored


def set_relative_entropy(
    c: ProductPolytope | FactorPolytope,
    cprime: ProductPolytope | FactorPolytope,
    budget: int = 50,
    n_starts: int = 8,
) -> SetDivergence:
    """Upper bound on ``inf { S(rho || sigma) : rho in c, sigma in cprime }``.

    Starts are the ``n_starts`` best vertex pairs (plus vertex/barycentre and
    barycentre/barycentre pairs); from each, ``budget`` rounds of alternating
    Frank-Wolfe steps on the two weight vectors are taken, accepting only
    strict improvements. The result never increases when ``budget`` grows.
    """
    _check_same_dims(c, cprime)
    if budget < 0 or n_starts < 1:
        raise ValueError("budget must be >= 0 and n_starts >= 1")
    a = np.stack([v.matrix for v in c.vertices])
    b = np.stack([v.matrix for v in cprime.vertices])
    starts = _start_candidates(a, b)[:n_starts]

    best = (math.inf, starts[0][1], starts[0][2])
    for val, wa, wb in starts:
        if val <= 0.0 or math.isinf(val):
            if val < best[0]:
                best = (val, wa, wb)
            if val <= 0.0:
                break
            continue
        for _ in range(budget):
            before = val
            rho = np.einsum("k,kab->ab", wa, a)
            sigma = np.einsum("k,kab->ab", wb, b)
            wa, val = _fw_step(lambda w: _objective(a, b, w, wb), wa, _grad_first(a, rho, sigma), val)
            rho = np.einsum("k,kab->ab", wa, a)
            wb, val = _fw_step(lambda w: _objective(a, b, wa, w), wb, _grad_second(b, rho, sigma), val)
            # deterministic iteration: a stalled start never moves again
            if val <= 0.0 or val >= before:
                break
        if val < best[0]:
            best = (val, wa, wb)
        if best[0] <= 0.0:
            break
    return SetDivergence(max(best[0], 0.0), best[1], best[2], budget, len(starts))


def f_tilde(c: ProductPolytope, budget: int = 50, n_starts: int = 8) -> SetDivergence:
    """``S(lambda_tau(c) || c)``; zero whenever the two sets meet."""
    return set_relative_entropy(lambda_tau(c), c, budget=budget, n_starts=n_starts)
