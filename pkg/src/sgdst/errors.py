"""Exception hierarchy shared across the package."""


class SgdstError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(SgdstError):
    """Schema file failed to parse or violated a structural invariant."""


class DialogueError(SgdstError):
    """Dialogue file failed to parse or violated a structural invariant."""


class DataError(SgdstError):
    """Annotations are inconsistent with the utterances they describe."""


class UsageError(SgdstError):
    """An operation was called outside its contract (wrong slot kind, bad index)."""


class UnsupportedValueError(UsageError):
    """A numeric value is outside the range the numeral lexicon covers."""


class TransportError(SgdstError):
    """The encoder sidecar is unreachable, died, or timed out."""


class ProtocolError(SgdstError):
    """The encoder sidecar answered with a malformed or inconsistent message."""


class CacheMissError(SgdstError):
    """An expansion provider has no cached result for a term."""


class TrainingError(SgdstError):
    """Training diverged (non-finite loss) or could not proceed."""


class CompatibilityError(SgdstError):
    """Loaded parameters do not match the current configuration or layout."""
