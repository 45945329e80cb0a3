"""Byte <-> printable-character remapping used by byte-level BPE distributions.

vocab.json and merges.txt files from byte-level tokenizers store token surface
units in a 256-symbol printable alphabet (every byte is assigned a visible
unicode character, e.g. space -> "Ġ"). Internally retok always works with raw
bytes; this module converts between the two representations.
"""

from functools import lru_cache

from .errors import TokenizerFileError


@lru_cache(maxsize=None)
def byte_to_char() -> dict[int, str]:
    """Mapping from each byte value 0..255 to its printable stand-in character."""
    # Printable ASCII and most of latin-1 map to themselves; the remaining
    # bytes are assigned codepoints 256, 257, ... in order.
    keep = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("\xa1"), ord("\xac") + 1))
        + list(range(ord("\xae"), ord("\xff") + 1))
    )
    table = {}
    fill = 0
    for b in range(256):
        if b in keep:
            table[b] = chr(b)
        else:
            table[b] = chr(256 + fill)
            fill += 1
    return table


@lru_cache(maxsize=None)
def char_to_byte() -> dict[str, int]:
    """Inverse of :func:`byte_to_char`."""
    return {c: b for b, c in byte_to_char().items()}


def unit_to_printable(unit: bytes) -> str:
    """Render raw unit bytes in the printable alphabet (lossless)."""
    table = byte_to_char()
    return "".join(table[b] for b in unit)


def printable_to_unit(text: str) -> bytes:
    """Decode a printable-alphabet rendering back to raw bytes.

    Raises TokenizerFileError if a character is outside the 256-symbol alphabet.
    """
    table = char_to_byte()
    try:
        return bytes(table[c] for c in text)
    except KeyError as exc:
        raise TokenizerFileError(
            f"character {exc.args[0]!r} is not in the byte-level alphabet"
        ) from None
