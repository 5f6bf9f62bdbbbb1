# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: early-exit table verification and rearrangement DFS.

Contract mirrors ``_kernels_py`` exactly; see there for documentation.
Limited to 64 argument positions (bitmask width); the dispatcher falls
back to the pure-Python module beyond that.
"""

from libc.stdint cimport int64_t, uint64_t
from libc.string cimport memset

from time import monotonic

FOUND = 0
EXHAUSTED = 1
BUDGET = 2

BACKEND_NAME = "compiled"

DEF MAXN = 64


cdef inline bint _verify(const int64_t[::1] t1, const int64_t[::1] t2,
                         const int64_t[::1] radices, int64_t* tstrides,
                         Py_ssize_t n, Py_ssize_t length) noexcept nogil:
    cdef int64_t digits[MAXN]
    cdef int64_t r2 = 0
    cdef Py_ssize_t r1, j
    cdef int64_t d
    if length == 0:
        return True
    if t1[0] != t2[0]:
        return False
    memset(digits, 0, n * sizeof(int64_t))
    for r1 in range(1, length):
        j = n - 1
        while True:
            d = digits[j] + 1
            if d == radices[j]:
                r2 -= digits[j] * tstrides[j]
                digits[j] = 0
                j -= 1
            else:
                digits[j] = d
                r2 += tstrides[j]
                break
        if t1[r1] != t2[r2]:
            return False
    return True


def verify_table_perm(const int64_t[::1] t1, const int64_t[::1] t2,
                      const int64_t[::1] radices, const int64_t[::1] tstrides):
    cdef Py_ssize_t n = radices.shape[0]
    cdef int64_t ts[MAXN]
    cdef Py_ssize_t i
    if n > MAXN:
        raise ValueError("compiled kernel supports at most 64 positions")
    for i in range(n):
        ts[i] = tstrides[i]
    return bool(_verify(t1, t2, radices, ts, n, t1.shape[0]))


def search_rearrangements(const int64_t[::1] t1, const int64_t[::1] t2,
                          const int64_t[::1] radices, const int64_t[::1] strides2,
                          const uint64_t[::1] masks,
                          long long max_verifications=-1, deadline=None):
    cdef Py_ssize_t n = masks.shape[0]
    cdef Py_ssize_t length = t1.shape[0]
    cdef long long candidates = 0, verifications = 0
    cdef uint64_t rem[MAXN]
    cdef Py_ssize_t chosen[MAXN]
    cdef int64_t tstrides[MAXN]
    cdef uint64_t used = 0, m, bit
    cdef Py_ssize_t depth, target, i
    cdef bint has_deadline = deadline is not None
    cdef double deadline_d = deadline if has_deadline else 0.0
    cdef bint ok

    if n > MAXN:
        raise ValueError("compiled kernel supports at most 64 positions")

    if n == 0:
        if max_verifications >= 0 and verifications >= max_verifications:
            return (BUDGET, None, 0, 0)
        if has_deadline and monotonic() > deadline_d:
            return (BUDGET, None, 0, 0)
        if t1[0] == t2[0]:
            return (FOUND, (), 1, 1)
        return (EXHAUSTED, None, 1, 1)

    depth = 0
    rem[0] = masks[0]
    while depth >= 0:
        m = rem[depth]
        if m == 0:
            depth -= 1
            if depth >= 0:
                used &= ~((<uint64_t>1) << chosen[depth])
            continue
        bit = m & (~m + 1)
        rem[depth] = m & (m - 1)
        target = 0
        while not (bit >> target) & 1:
            target += 1
        chosen[depth] = target
        used |= bit
        if depth == n - 1:
            if max_verifications >= 0 and verifications >= max_verifications:
                return (BUDGET, None, candidates, verifications)
            if has_deadline and (candidates & 0xFF) == 0 and monotonic() > deadline_d:
                return (BUDGET, None, candidates, verifications)
            candidates += 1
            verifications += 1
            for i in range(n):
                tstrides[chosen[i]] = strides2[i]
            with nogil:
                ok = _verify(t1, t2, radices, tstrides, n, length)
            if ok:
                return (FOUND, tuple([chosen[i] for i in range(n)]),
                        candidates, verifications)
            used &= ~bit
        else:
            depth += 1
            rem[depth] = masks[depth] & ~used
    return (EXHAUSTED, None, candidates, verifications)
