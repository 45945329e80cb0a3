"""Independent oracles used by the tests.

These deliberately share no code with the package: brute-force recursive
segmentation enumeration (top-down, no memo) and a textbook Levenshtein
distance.
"""

from __future__ import annotations


def brute_force_segmentations(token: bytes, units: set[bytes]) -> list[tuple[bytes, ...]]:
    """Every way to split ``token`` into units, by trying all prefixes recursively."""
    if not token:
        return [()]
    out = []
    for end in range(1, len(token) + 1):
        head = token[:end]
        if head in units:
            for rest in brute_force_segmentations(token[end:], units):
                out.append((head,) + rest)
    return out


def levenshtein(a: str, b: str) -> int:
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]
