"""Exception types.

Every error raised on bad input derives from `ValueError`, so callers that
only care about "the input was wrong" can catch that alone.
"""

from typing import Optional

from cfsm_verify.src.api_export import cfsm_verify_export


@cfsm_verify_export("cfsm_verify.errors.ParseError")
class ParseError(ValueError):
    """Raised when a text input does not conform to its grammar.

    Args:
        message: What went wrong.
        line: 1-based line number in the input, if known.
        position: 0-based character offset within the line (or within the
            whole text for single-line inputs), if known.
    """

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        position: Optional[int] = None,
    ) -> None:
        self.message = message
        self.line = line
        self.position = position
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


@cfsm_verify_export("cfsm_verify.errors.RegexSyntaxError")
class RegexSyntaxError(ParseError):
    pass


@cfsm_verify_export("cfsm_verify.errors.ProtocolFormatError")
class ProtocolFormatError(ParseError):
    pass


@cfsm_verify_export("cfsm_verify.errors.ProofFormatError")
class ProofFormatError(ParseError):
    pass


@cfsm_verify_export("cfsm_verify.errors.TagFormatError")
class TagFormatError(ParseError):
    pass


@cfsm_verify_export("cfsm_verify.errors.AlphabetMismatchError")
class AlphabetMismatchError(ValueError):
    """Raised when two automata over different alphabets are combined."""


@cfsm_verify_export("cfsm_verify.errors.ChannelMismatchError")
class ChannelMismatchError(ValueError):
    """Raised when two relations over different channel lists are combined."""


@cfsm_verify_export("cfsm_verify.errors.RelationTooLargeError")
class RelationTooLargeError(ValueError):
    """Raised when a relation's acceptance set exceeds the configured cap."""


@cfsm_verify_export("cfsm_verify.errors.HypothesisError")
class HypothesisError(ValueError):
    """Raised when a precondition of a proof method does not hold."""
