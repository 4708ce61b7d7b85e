"""Exception hierarchy."""


class PhastError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfigError(PhastError, ValueError):
    """Inconsistent or out-of-range construction parameters."""


class DuplicateKeysError(PhastError, ValueError):
    """The key set contains the same key more than once."""


class LayerLimitError(PhastError, RuntimeError):
    """Construction needed more layers than allowed."""


class CorruptStreamError(PhastError, ValueError):
    """A serialized structure is truncated or fails validation."""


class VersionMismatchError(CorruptStreamError):
    pass


class HashMismatchError(CorruptStreamError):
    pass
