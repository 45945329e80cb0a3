"""Exception types shared across the toolkit."""


class RetokError(Exception):
    """Base class for all retok errors."""


class TokenizerFileError(RetokError):
    """A vocab/merges/pretokenizer file is missing, malformed, or inconsistent."""


class UncoverableTextError(RetokError):
    """A pretoken cannot be covered by vocabulary units (non-byte-level vocabularies)."""


class UnknownTokenIdError(RetokError):
    """A token ID is not present in the vocabulary."""


class NoSegmentationError(RetokError):
    """A token admits no valid segmentation over the vocabulary."""


class SftFormatError(RetokError):
    """An instruction/response pair cannot be rendered in the requested mode."""


class GrammarProviderError(RetokError):
    """The external grammar-check provider failed or timed out."""
