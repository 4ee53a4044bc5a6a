"""Exception hierarchy shared by all modules."""


class RedfieldError(Exception):
    """Base class for every error raised by this package."""


class SymmetryError(RedfieldError, ValueError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotPSDError(RedfieldError, ValueError):
    """Matrix expected to be positive semidefinite has a negative eigenvalue."""


class BathParameterError(RedfieldError, ValueError):
    """Base class for invalid bath parameter sets."""


class NonnegativityError(BathParameterError):
    pass


class KMSViolationError(BathParameterError):
    pass


class StrongCouplingError(BathParameterError):
    """The frequency Omega is not real and positive."""


class TruncationError(BathParameterError):
    """Correlation samples have not decayed by the end of the grid."""


class FamilyConstraintError(RedfieldError, ValueError):
    pass


class PositivityError(RedfieldError, ValueError):
    """A quantity is undefined because the state is not positive."""


class WrongRegimeError(RedfieldError, ValueError):
    pass


class NoEquilibriumError(RedfieldError, ValueError):
    pass


class ResolutionError(RedfieldError, ValueError):
    """Time grid too coarse to resolve the coherent oscillation."""


class ConfigError(RedfieldError, ValueError):
    pass
