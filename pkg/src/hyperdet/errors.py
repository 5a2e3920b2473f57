"""Exception hierarchy shared by all hyperdet modules."""


class HyperdetError(Exception):
    """Base class for every error raised by this package."""


class InvalidFaceError(HyperdetError, ValueError):
    pass


class UnsupportedGradeError(HyperdetError, ValueError):
    pass


class InvalidRelationError(HyperdetError, ValueError):
    pass


class InfeasibleError(HyperdetError):
    """A requested computation exceeds the configured size budget."""


class NotApplicableError(HyperdetError, ValueError):
    """A reduction was requested for a generator outside the lemma's hypothesis."""


class InvalidCertificateError(HyperdetError):
    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class StructuralFailure(HyperdetError):
    """A computed structure contradicts a proven property (rank, orbit constancy...)."""


class DigestMismatch(HyperdetError):
    """A persisted file failed its digest or line-count check."""


class MalformedTableError(HyperdetError, ValueError):
    pass


class ConfigError(HyperdetError, ValueError):
    """A tensor configuration is incomplete or malformed."""
