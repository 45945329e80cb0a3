"""Pure-Python hot kernels: BPE merge loop and segmentation-count DP.

The compiled lane in ``_native.pyx`` implements the same two functions with
identical semantics (same merge order, same RNG draw order for dropout); both
lanes must stay bit-for-bit interchangeable.
"""

import heapq

# Pair keys pack two token IDs into one int; values pack (rank, merged id).
ID_BITS = 24
ID_MASK = (1 << ID_BITS) - 1

BACKEND = "pure"


def pack_pair_lookup(merge_pairs):
    """Build the kernel lookup: (left_id<<24 | right_id) -> (rank<<24 | merged_id).

    ``merge_pairs`` is an iterable of (left_id, right_id, merged_id) in rank
    order. IDs must fit in 24 bits.
    """
    lookup = {}
    for rank, (left, right, merged) in enumerate(merge_pairs):
        if max(left, right, merged) > ID_MASK:
            raise ValueError("token IDs above 2**24 are not supported by the kernels")
        lookup[(left << ID_BITS) | right] = (rank << ID_BITS) | merged
    return lookup


def bpe_merge(ids, pair_lookup, dropout_p=0.0, rng=None):
    """Apply ranked merges to one pretoken's base-unit IDs.

    Repeatedly applies the lowest-rank (leftmost on equal rank) mergeable pair.
    With ``dropout_p`` > 0, each attempted application is independently skipped
    with that probability; a skipped pair becomes eligible again after the next
    successful merge. ``dropout_p=0`` never consumes RNG state.
    """
    n = len(ids)
    if n < 2:
        return list(ids)
    sym = list(ids)
    nxt = list(range(1, n)) + [-1]
    prv = [-1] + list(range(n - 1))
    alive = [True] * n

    heap = []
    for i in range(n - 1):
        val = pair_lookup.get((sym[i] << ID_BITS) | sym[i + 1])
        if val is not None:
            heap.append((val >> ID_BITS, i, sym[i], sym[i + 1]))
    heapq.heapify(heap)

    skipped = []
    while heap:
        rank, pos, left, right = heapq.heappop(heap)
        if not alive[pos] or sym[pos] != left:
            continue
        j = nxt[pos]
        if j == -1 or sym[j] != right:
            continue
        if dropout_p > 0.0 and rng.random() < dropout_p:
            skipped.append((rank, pos, left, right))
            continue

        merged = pair_lookup[(left << ID_BITS) | right] & ID_MASK
        sym[pos] = merged
        alive[j] = False
        nxt[pos] = nxt[j]
        if nxt[j] != -1:
            prv[nxt[j]] = pos

        p = prv[pos]
        if p != -1:
            val = pair_lookup.get((sym[p] << ID_BITS) | merged)
            if val is not None:
                heapq.heappush(heap, (val >> ID_BITS, p, sym[p], merged))
        q = nxt[pos]
        if q != -1:
            val = pair_lookup.get((merged << ID_BITS) | sym[q])
            if val is not None:
                heapq.heappush(heap, (val >> ID_BITS, pos, merged, sym[q]))
        if skipped:
            for entry in skipped:
                heapq.heappush(heap, entry)
            skipped.clear()

    return [s for s, a in zip(sym, alive) if a]


def segment_counts(token, units, max_unit_len):
    """Number of vocabulary segmentations of every suffix of ``token``.

    Returns the memo array ``counts`` with ``counts[i]`` = number of ways to
    segment ``token[i:]`` into units, ``counts[len(token)] == 1``. Exact
    arbitrary-precision integers.
    """
    length = len(token)
    counts = [0] * (length + 1)
    counts[length] = 1
    for i in range(length - 1, -1, -1):
        hi = min(length, i + max_unit_len)
        total = 0
        for j in range(i + 1, hi + 1):
            if counts[j] and token[i:j] in units:
                total += counts[j]
        counts[i] = total
    return counts
