# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) elimination on word-packed rows.

Rows are ``uint64`` words, little-endian by bit: column ``c`` lives in word
``c >> 6`` at bit ``c & 63``.  Same pivot rule as the Python path (leftmost
column, topmost row), so outputs are identical.
"""

from libc.stdint cimport uint64_t


def rref_words(uint64_t[:, ::1] a, Py_ssize_t ncols):
    """Reduce ``a`` in place to RREF; return the pivot columns.

    Nonzero rows end up first, in pivot order.
    """
    cdef Py_ssize_t nrows = a.shape[0]
    cdef Py_ssize_t nwords = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, w, word
    cdef uint64_t bit, tmp
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        word = c >> 6
        bit = (<uint64_t>1) << (c & 63)
        i = r
        while i < nrows and not (a[i, word] & bit):
            i += 1
        if i == nrows:
            continue
        if i != r:
            for w in range(nwords):
                tmp = a[i, w]
                a[i, w] = a[r, w]
                a[r, w] = tmp
        for i in range(nrows):
            if i != r and (a[i, word] & bit):
                for w in range(word, nwords):
                    a[i, w] ^= a[r, w]
        pivots.append(c)
        r += 1
    return pivots


def rank_words(uint64_t[:, ::1] a, Py_ssize_t ncols):
    """Rank by forward elimination only; destroys ``a``."""
    cdef Py_ssize_t nrows = a.shape[0]
    cdef Py_ssize_t nwords = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, w, word
    cdef uint64_t bit, tmp
    for c in range(ncols):
        if r == nrows:
            break
        word = c >> 6
        bit = (<uint64_t>1) << (c & 63)
        i = r
        while i < nrows and not (a[i, word] & bit):
            i += 1
        if i == nrows:
            continue
        if i != r:
            for w in range(nwords):
                tmp = a[i, w]
                a[i, w] = a[r, w]
                a[r, w] = tmp
        for i in range(r + 1, nrows):
            if a[i, word] & bit:
                for w in range(word, nwords):
                    a[i, w] ^= a[r, w]
        r += 1
    return r
