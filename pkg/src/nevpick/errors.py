"""Exception hierarchy shared by all modules."""


class NevPickError(Exception):
    """Base class for every error raised by the package."""


class PoleProximity(NevPickError):
    """Evaluation point collides with a pole, an atom or an interpolation node."""


class QuadratureFailure(NevPickError):
    pass


class NotHerglotzData(NevPickError):
    """Values are inconsistent with a function of class R0."""


class AsymmetricData(NevPickError):
    pass


class DegenerateTail(NevPickError):
    pass


class InsufficientDepth(NevPickError):
    pass


class SingularJ(NevPickError):
    pass


class SingularPencil(NevPickError):
    pass


class EigenFailure(NevPickError):
    pass


class DegenerateCircle(NevPickError):
    pass


class SerializationFailure(NevPickError):
    pass


class ConfigError(NevPickError):
    """Invalid run configuration; ``location`` is a JSON pointer."""

    def __init__(self, location, reason):
        super().__init__(f"{location or '/'}: {reason}")
        self.location = location
        self.reason = reason


class DepthExceedsSupport(UserWarning):
    """Requested Schur depth reaches the atom count of a finite measure."""
