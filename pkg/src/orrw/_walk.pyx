# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping loop for batches of once-reinforced walks."""
from libc.stdint cimport int64_t, uint8_t


def advance(const int64_t[:] ptr, const int64_t[:] nbr, const int64_t[:] edge,
            double delta, const uint8_t[:] table, const double[:, :] uniforms,
            int64_t[:] vertex, int64_t[:] mask, int64_t[:] stop, int64_t offset):
    """Advance each row by up to ``uniforms.shape[1]`` steps.

    ``stop[i]`` receives the first step at which the traversed mask leaves the
    family; rows with ``stop[i] >= 0`` are skipped.
    """
    cdef Py_ssize_t i, j, k, lo, hi, rows = uniforms.shape[0], cols = uniforms.shape[1]
    cdef int64_t x, m, bit, chosen
    cdef double total, target, acc, w
    with nogil:
        for i in range(rows):
            if stop[i] >= 0:
                continue
            x = vertex[i]
            m = mask[i]
            for j in range(cols):
                lo = ptr[x]
                hi = ptr[x + 1]
                total = 0.0
                for k in range(lo, hi):
                    if (m >> edge[k]) & 1:
                        total = total + delta
                    else:
                        total = total + 1.0
                target = uniforms[i, j] * total
                acc = 0.0
                chosen = hi - 1
                for k in range(lo, hi):
                    if (m >> edge[k]) & 1:
                        w = delta
                    else:
                        w = 1.0
                    acc = acc + w
                    if target < acc:
                        chosen = k
                        break
                bit = (<int64_t>1) << edge[chosen]
                x = nbr[chosen]
                if not (m & bit):
                    m = m | bit
                    if not table[m]:
                        stop[i] = offset + j + 1
                        break
            vertex[i] = x
            mask[i] = m
