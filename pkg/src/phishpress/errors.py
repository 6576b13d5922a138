"""Exception hierarchy shared by all phishpress modules."""


class PhishpressError(Exception):
    """Base class for every error raised by this package."""


# corpus / fetching

class NetworkError(PhishpressError):
    """DNS failure, refused connection, timeout, or too many redirects."""


class HttpError(PhishpressError):
    """Non-2xx HTTP status after following redirects."""

    def __init__(self, status: int, url: str = ""):
        super().__init__(f"HTTP {status} for {url}" if url else f"HTTP {status}")
        self.status = status
        self.url = url


class EmptyBody(PhishpressError):
    """Response body was zero bytes."""


class EmptySplit(PhishpressError):
    """A temporal split would leave one side empty."""


class InvalidDistribution(PhishpressError):
    """A synthetic-corpus probability vector does not sum to 1."""


class EmptyCorpus(PhishpressError):
    """An operation requires a non-empty (or two-class) corpus."""


# dictionary

class EmptyVocabulary(PhishpressError):
    """Global vocabulary size is zero."""


class EmptyTable(PhishpressError):
    """Likelihood table holds no stored words."""


class EmptyDictionary(PhishpressError):
    """No word exceeds the requested likelihood threshold."""


class SweepFailed(PhishpressError):
    """Every grid point of a threshold sweep was skipped."""


# compressor

class EmptyInput(PhishpressError):
    """Payload to compress or classify is empty."""


class MismatchedModels(PhishpressError):
    """The two compression models were built from different corpora."""


# ml

class DegenerateData(PhishpressError):
    """Training data contains a single class."""


class InsufficientData(PhishpressError):
    """Too few samples for the requested split or training."""


class ArityMismatch(PhishpressError):
    """Feature vector arity does not match the trained model."""


# eval

class EmptyPredictions(PhishpressError):
    """Metrics requested over an empty prediction list."""


class PoolTooSmall(PhishpressError):
    """Phishing pool cannot supply the per-iteration subsample."""
