"""Error taxonomy shared by all modules."""


def describe_identity(identity):
    """Identity bytes as the string a user typed where that is faithful."""
    if isinstance(identity, bytes):
        try:
            return repr(identity.decode("utf-8"))
        except UnicodeDecodeError:
            return repr(identity)
    return repr(identity)


class IbbekitError(Exception):
    """Base class for all library errors."""


class InvalidInputError(IbbekitError, ValueError):
    """Malformed argument: bad bytes, empty identity, duplicate member, bad size."""


class CapacityExceededError(IbbekitError):
    """Member set larger than the capacity the public key was set up for."""


class NotAMemberError(IbbekitError):
    """The identity is not part of the relevant member set."""


class DegenerateIdentityError(IbbekitError):
    """gamma + H(u) = 0; the identity cannot be served by this master key."""


class StaleMetadataError(IbbekitError):
    """Client-side decryption failed against fetched metadata; re-fetch needed."""


class TrustBoundaryError(IbbekitError):
    """Seal/unseal failure or an operation attempted without the sealing key."""


class TraceParseError(InvalidInputError):
    """Trace or log file could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
