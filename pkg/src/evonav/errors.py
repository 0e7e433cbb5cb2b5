"""Exception types shared across the library."""


class NavError(Exception):
    """Base class for all evonav errors."""


class EmptyCorpus(NavError):
    """Corpus ingestion produced zero documents."""


class DegenerateInput(NavError):
    """Not enough distinct data points to fit a projection."""


class DimensionMismatch(NavError):
    """Vector length does not match the fitted projection."""


class UnknownDocument(NavError):
    """Referenced document id is not in the map/corpus."""


class NoCandidates(NavError):
    """Every document was excluded from a nearest-document query."""


class TooFewDocuments(NavError):
    """Fewer documents than requested clusters."""


class EmptyCluster(NavError):
    """A cluster has no eligible members after exclusions."""


class MapTooSmall(NavError):
    """The map does not hold enough documents to fill a link set."""


class NotInSet(NavError):
    """Clicked document is not a member of the current link set."""


class NoInterestSignal(NavError):
    """No positive-fitness links and no favorites to aggregate."""


class AlreadyFavorite(NavError):
    """Document is already in the user's favorites."""


class NotAFavorite(NavError):
    """Document is not in the user's favorites."""


class NoSignal(NavError):
    """User has no favorites and no usable favorites history."""
