"""Exception types shared across the package."""


class CatqfiError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateCat(CatqfiError):
    """Cat-state construction collapsed; the two components are numerically parallel."""


class NoBracket(CatqfiError):
    """Amplitude matching could not bracket the target mean photon number."""


class DomainError(CatqfiError):
    """Parameter outside its physical domain (e.g. transmission outside [0, 1])."""


class IllConditionedGram(CatqfiError):
    """Gram matrix of the coherent basis is numerically singular."""


class EmptySupport(CatqfiError):
    """No mixture component survives the support threshold."""


class TruncationError(CatqfiError):
    """Fock-space truncation too small for the requested amplitudes."""


class ConfigError(CatqfiError):
    """Sweep configuration rejected (bad flag value, bad file, bad grid)."""
