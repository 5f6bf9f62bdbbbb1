"""Pure-Python kernels for table verification and rearrangement search.

Same contract as the compiled module in ``_speedups.pyx``; one of the two
is selected at import time (see ``_backend``).  Tables are sequences of
interned potential tokens; a "table comparison" walks both tables in the
first factor's row order with an incremental mixed-radix remap and exits
on the first mismatch.
"""

from __future__ import annotations

from time import monotonic

FOUND = 0
EXHAUSTED = 1
BUDGET = 2

BACKEND_NAME = "python"


def verify_table_perm(t1, t2, radices, tstrides) -> bool:
    """True iff t1[r] == t2[remap(r)] for every row r.

    ``tstrides[j]`` is the contribution of row-r's digit at position j
    (under ``radices``) to the remapped index into t2.
    """
    t1 = list(t1)
    t2 = list(t2)
    radices = list(radices)
    tstrides = list(tstrides)
    n = len(radices)
    length = len(t1)
    if length == 0:
        return True
    if t1[0] != t2[0]:
        return False
    digits = [0] * n
    r2 = 0
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


def search_rearrangements(
    t1,
    t2,
    radices,
    strides2,
    masks,
    max_verifications: int = -1,
    deadline: float | None = None,
):
    """Depth-first search over position rearrangements with verification.

    ``masks[i]`` is a bitmask of target positions allowed for position i
    of the second factor.  Candidates are generated positions-ascending,
    targets-ascending (lexicographic), each immediately verified.

    Returns (status, witness, candidates, verifications); witness is the
    first verifying rearrangement or None.  ``max_verifications < 0``
    means unlimited; ``deadline`` is an absolute time.monotonic() stamp.
    """
    t1 = list(t1)
    t2 = list(t2)
    radices = list(radices)
    strides2 = list(strides2)
    masks = list(masks)
    n = len(masks)
    length = len(t1)
    candidates = 0
    verifications = 0

    def over_budget() -> bool:
        if max_verifications >= 0 and verifications >= max_verifications:
            return True
        return (
            deadline is not None
            and (candidates & 0xFF) == 0
            and monotonic() > deadline
        )

    def verify(chosen) -> bool:
        tstrides = [0] * n
        for i in range(n):
            tstrides[chosen[i]] = strides2[i]
        return verify_table_perm(t1, t2, radices, tstrides)

    if n == 0:
        if over_budget():
            return (BUDGET, None, 0, 0)
        candidates = 1
        verifications = 1
        if t1[0] == t2[0]:
            return (FOUND, (), 1, 1)
        return (EXHAUSTED, None, 1, 1)

    chosen = [0] * n
    rem = [0] * n
    used = 0
    depth = 0
    rem[0] = masks[0]
    while depth >= 0:
        m = rem[depth]
        if m == 0:
            depth -= 1
            if depth >= 0:
                used &= ~(1 << chosen[depth])
            continue
        bit = m & (-m)
        rem[depth] = m & (m - 1)
        target = bit.bit_length() - 1
        chosen[depth] = target
        used |= bit
        if depth == n - 1:
            if over_budget():
                return (BUDGET, None, candidates, verifications)
            candidates += 1
            verifications += 1
            if verify(chosen):
                return (FOUND, tuple(chosen), candidates, verifications)
            used &= ~bit
        else:
            depth += 1
            rem[depth] = masks[depth] & ~used
    return (EXHAUSTED, None, candidates, verifications)
