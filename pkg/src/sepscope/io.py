"""JSON encodings.

A matrix is ``{"dims": [N, K], "matrix": [[[re, im], ...], ...]}``; a
single-system matrix uses ``"dims": [d]``. Polytopes and decompositions nest
matrix objects.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .core import DensityMatrix, validate_density
from .errors import DimMismatchError, NoFactorDimsError
from .geometry import ProductPolytope
from .states import SeparableDecomposition


class ParseError(ValueError):
    """Input is not well-formed JSON of the expected shape."""


def matrix_to_json(m, dims=None) -> dict:
    if isinstance(m, DensityMatrix):
        dims = dims or (list(m.factor_dims) if m.factor_dims else [m.dim])
        m = m.matrix
    m = np.asarray(m, dtype=np.complex128)
    dims = list(dims) if dims is not None else [m.shape[0]]
    return {"dims": [int(d) for d in dims], "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def _parse_matrix(obj: Any) -> tuple[np.ndarray, list[int]]:
    if not isinstance(obj, dict) or "matrix" not in obj or "dims" not in obj:
        raise ParseError("matrix object needs 'dims' and 'matrix' keys")
    dims = obj["dims"]
    if not isinstance(dims, list) or not 1 <= len(dims) <= 2 or not all(isinstance(d, int) and d > 0 for d in dims):
        raise ParseError(f"'dims' must be [d] or [N, K] with positive ints, got {dims!r}")
    try:
        arr = np.asarray(obj["matrix"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"'matrix' is not a nested numeric array: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"'matrix' must have shape (rows, cols, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1], dims


def density_from_json(obj: Any, require_bipartite: bool = False) -> DensityMatrix:
    """Decode and validate. Validation failures raise the core errors."""
    m, dims = _parse_matrix(obj)
    if require_bipartite and len(dims) != 2:
        raise NoFactorDimsError(f"expected bipartite dims [N, K], got {dims}")
    if len(dims) == 1:
        if dims[0] != m.shape[0]:
            raise DimMismatchError(f"dims {dims} do not match a {m.shape[0]}x{m.shape[1]} matrix")
        return validate_density(m)
    return validate_density(m, tuple(dims))


def polytope_to_json(p: ProductPolytope) -> dict:
    return {"factor_dims": list(p.factor_dims), "vertices": [matrix_to_json(v) for v in p.vertices]}


def polytope_from_json(obj: Any) -> ProductPolytope:
    if not isinstance(obj, dict) or "vertices" not in obj or "factor_dims" not in obj:
        raise ParseError("polytope object needs 'factor_dims' and 'vertices' keys")
    verts = obj["vertices"]
    if not isinstance(verts, list) or not verts:
        raise ParseError("'vertices' must be a nonempty list")
    dims = tuple(obj["factor_dims"])
    return ProductPolytope(dims, tuple(validate_density(_parse_matrix(v)[0], dims) for v in verts))


def decomposition_to_json(dec: SeparableDecomposition) -> dict:
    return {
        "weights": dec.weights.tolist(),
        "factors_a": [matrix_to_json(f) for f in dec.factors_a],
        "factors_b": [matrix_to_json(f) for f in dec.factors_b],
    }


def decomposition_from_json(obj: Any) -> SeparableDecomposition:
    if not isinstance(obj, dict) or not {"weights", "factors_a", "factors_b"} <= set(obj):
        raise ParseError("decomposition object needs 'weights', 'factors_a' and 'factors_b'")
    fa = [validate_density(_parse_matrix(f)[0]) for f in obj["factors_a"]]
    fb = [validate_density(_parse_matrix(f)[0]) for f in obj["factors_b"]]
    return SeparableDecomposition.create(obj["weights"], fa, fb)


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
