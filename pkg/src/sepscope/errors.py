"""Exception hierarchy. All errors derive from :class:`SepscopeError`."""


class SepscopeError(ValueError):
    pass


class NotSquareError(SepscopeError):
    pass


class NotFiniteError(SepscopeError):
    pass


class NotHermitianError(SepscopeError):
    def __init__(self, violation: float):
        super().__init__(f"matrix is not Hermitian (max |a_ij - conj(a_ji)| = {violation:.3e})")
        self.violation = violation


class TraceNotOneError(SepscopeError):
    def __init__(self, deviation: float):
        super().__init__(f"trace deviates from 1 by {deviation:.3e}")
        self.deviation = deviation


class NotPositiveError(SepscopeError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class DimMismatchError(SepscopeError):
    pass


class NoFactorDimsError(SepscopeError):
    def __init__(self, msg: str = "state carries no bipartite factor dimensions"):
        super().__init__(msg)


class UnsupportedDimsError(SepscopeError):
    pass


class DimTooSmallError(SepscopeError):
    pass


class NotUnitaryError(SepscopeError):
    pass


class NotNormalizedError(SepscopeError):
    pass


class InvalidDecompositionError(SepscopeError):
    pass


class FactorNotPureError(SepscopeError):
    def __init__(self, side: str, index: int, second_eigenvalue: float):
        super().__init__(
            f"factor {side}[{index}] is not pure (second-largest eigenvalue {second_eigenvalue:.3e})"
        )
        self.side = side
        self.index = index
        self.second_eigenvalue = second_eigenvalue


class BadParameterError(SepscopeError):
    pass


class VerdictMismatchError(SepscopeError):
    """Two independent tests that must agree returned different answers."""
