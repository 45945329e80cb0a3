# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled twin of ``pure.py``: same merge order, same RNG draw order.

The heap is ordered by the packed key rank<<32 | pos, which matches the pure
lane's (rank, pos) tuple ordering; (rank, pos) pairs are unique while live, so
the two lanes pop candidates and consume RNG draws in the same sequence.
"""

from cpython.dict cimport PyDict_GetItem
from cpython.object cimport PyObject
from libc.stdlib cimport free, malloc, realloc

BACKEND = "native"

DEF ID_BITS = 24
DEF ID_MASK = (1 << ID_BITS) - 1


cdef struct Entry:
    unsigned long long key  # rank << 32 | pos
    long long left
    long long right


cdef inline void heap_swap(Entry* h, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Entry tmp = h[a]
    h[a] = h[b]
    h[b] = tmp


cdef inline void heap_up(Entry* h, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t parent
    while i > 0:
        parent = (i - 1) >> 1
        if h[i].key < h[parent].key:
            heap_swap(h, i, parent)
            i = parent
        else:
            break


cdef inline void heap_down(Entry* h, Py_ssize_t size, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t child
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        if child + 1 < size and h[child + 1].key < h[child].key:
            child += 1
        if h[child].key < h[i].key:
            heap_swap(h, i, child)
            i = child
        else:
            break


def bpe_merge(ids, dict pair_lookup, double dropout_p=0.0, rng=None):
    """See ``pure.bpe_merge``; bit-identical behavior."""
    cdef Py_ssize_t n = len(ids)
    if n < 2:
        return list(ids)

    cdef long long* sym = <long long*> malloc(n * sizeof(long long))
    cdef Py_ssize_t* nxt = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* prv = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef char* alive = <char*> malloc(n * sizeof(char))
    cdef Py_ssize_t cap = 4 * n
    cdef Entry* heap = <Entry*> malloc(cap * sizeof(Entry))
    cdef Entry* skipped = <Entry*> malloc(n * sizeof(Entry))
    cdef Py_ssize_t skip_cap = n
    if sym == NULL or nxt == NULL or prv == NULL or alive == NULL or heap == NULL or skipped == NULL:
        free(sym); free(nxt); free(prv); free(alive); free(heap); free(skipped)
        raise MemoryError()

    cdef Py_ssize_t heap_size = 0, skip_size = 0
    cdef Py_ssize_t i, j, p, q
    cdef long long left, right, merged, val
    cdef unsigned long long key
    cdef PyObject* hit
    cdef Entry ent
    cdef bint use_dropout = dropout_p > 0.0
    cdef Entry* newbuf

    try:
        for i in range(n):
            sym[i] = ids[i]
            nxt[i] = i + 1 if i + 1 < n else -1
            prv[i] = i - 1
            alive[i] = 1

        for i in range(n - 1):
            hit = PyDict_GetItem(pair_lookup, (sym[i] << ID_BITS) | sym[i + 1])
            if hit != NULL:
                val = <object> hit
                heap[heap_size].key = (<unsigned long long> (val >> ID_BITS)) << 32 | <unsigned long long> i
                heap[heap_size].left = sym[i]
                heap[heap_size].right = sym[i + 1]
                heap_size += 1
                heap_up(heap, heap_size - 1)

        while heap_size > 0:
            ent = heap[0]
            heap_size -= 1
            heap[0] = heap[heap_size]
            heap_down(heap, heap_size, 0)

            i = <Py_ssize_t> (ent.key & 0xFFFFFFFFULL)
            if not alive[i] or sym[i] != ent.left:
                continue
            j = nxt[i]
            if j == -1 or sym[j] != ent.right:
                continue
            if use_dropout and rng.random() < dropout_p:
                if skip_size == skip_cap:
                    skip_cap *= 2
                    newbuf = <Entry*> realloc(skipped, skip_cap * sizeof(Entry))
                    if newbuf == NULL:
                        raise MemoryError()
                    skipped = newbuf
                skipped[skip_size] = ent
                skip_size += 1
                continue

            hit = PyDict_GetItem(pair_lookup, (ent.left << ID_BITS) | ent.right)
            val = <object> hit
            merged = val & ID_MASK
            sym[i] = merged
            alive[j] = 0
            nxt[i] = nxt[j]
            if nxt[j] != -1:
                prv[nxt[j]] = i

            if heap_size + skip_size + 2 > cap:
                cap = 2 * (heap_size + skip_size + 2)
                newbuf = <Entry*> realloc(heap, cap * sizeof(Entry))
                if newbuf == NULL:
                    raise MemoryError()
                heap = newbuf

            p = prv[i]
            if p != -1:
                hit = PyDict_GetItem(pair_lookup, (sym[p] << ID_BITS) | merged)
                if hit != NULL:
                    val = <object> hit
                    heap[heap_size].key = (<unsigned long long> (val >> ID_BITS)) << 32 | <unsigned long long> p
                    heap[heap_size].left = sym[p]
                    heap[heap_size].right = merged
                    heap_size += 1
                    heap_up(heap, heap_size - 1)
            q = nxt[i]
            if q != -1:
                hit = PyDict_GetItem(pair_lookup, (merged << ID_BITS) | sym[q])
                if hit != NULL:
                    val = <object> hit
                    heap[heap_size].key = (<unsigned long long> (val >> ID_BITS)) << 32 | <unsigned long long> i
                    heap[heap_size].left = merged
                    heap[heap_size].right = sym[q]
                    heap_size += 1
                    heap_up(heap, heap_size - 1)

            while skip_size > 0:
                skip_size -= 1
                heap[heap_size] = skipped[skip_size]
                heap_size += 1
                heap_up(heap, heap_size - 1)

        out = []
        for i in range(n):
            if alive[i]:
                out.append(sym[i])
        return out
    finally:
        free(sym)
        free(nxt)
        free(prv)
        free(alive)
        free(heap)
        free(skipped)


def segment_counts(bytes token, units, Py_ssize_t max_unit_len):
    """See ``pure.segment_counts``; exact big-integer counts."""
    cdef Py_ssize_t length = len(token)
    cdef list counts = [0] * (length + 1)
    counts[length] = 1
    cdef Py_ssize_t i, j, hi
    cdef object total, wj
    for i in range(length - 1, -1, -1):
        hi = i + max_unit_len
        if hi > length:
            hi = length
        total = 0
        for j in range(i + 1, hi + 1):
            wj = counts[j]
            if wj != 0 and token[i:j] in units:
                total = total + wj
        counts[i] = total
    return counts
