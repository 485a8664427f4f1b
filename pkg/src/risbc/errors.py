"""Exception types shared across the package."""


class DegenerateGeometryError(ValueError):
    """A placement makes a link physically meaningless (e.g. a user lying
    in the reflecting surface's plane, where the reflection cosine is zero
    and the surface path loss is infinite)."""


class NonPsdMatrixError(ValueError):
    """A matrix that must be Hermitian positive semidefinite is not,
    beyond the numerical tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative solve exceeded its iteration cap.  This indicates
    numerical trouble in the inputs, not a limitation of the algorithm."""


class ScenarioRunError(RuntimeError):
    """A Monte Carlo run had too many failed realizations to trust the
    aggregate."""
