# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels; same contract as ``_kernels_py``."""
from fractions import Fraction


cpdef tuple mono_mul(tuple a, tuple b):
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t na = len(a), nb = len(b)
    cdef list out
    cdef tuple pa, pb
    if na == 0:
        return b
    if nb == 0:
        return a
    out = []
    while i < na and j < nb:
        pa = <tuple>a[i]
        pb = <tuple>b[j]
        if pa[0] == pb[0]:
            out.append((pa[0], <long>pa[1] + <long>pb[1]))
            i += 1
            j += 1
        elif pa[0] < pb[0]:
            out.append(pa)
            i += 1
        else:
            out.append(pb)
            j += 1
    while i < na:
        out.append(a[i])
        i += 1
    while j < nb:
        out.append(b[j])
        j += 1
    return tuple(out)


cpdef dict add_terms(dict a, dict b):
    cdef dict out
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for m, c in b.items():
        s = out.get(m)
        if s is None:
            out[m] = c
        else:
            s = s + c
            if s:
                out[m] = s
            else:
                del out[m]
    return out


cpdef dict sub_terms(dict a, dict b):
    cdef dict out = dict(a)
    for m, c in b.items():
        s = out.get(m)
        if s is None:
            out[m] = -c
        else:
            s = s - c
            if s:
                out[m] = s
            else:
                del out[m]
    return out


cpdef dict mul_terms(dict a, dict b):
    cdef dict out = {}
    cdef tuple m
    if len(a) > len(b):
        a, b = b, a
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(<tuple>ma, <tuple>mb)
            c = ca * cb
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
    return out


cpdef dict scale_terms(dict a, c):
    if not c:
        return {}
    return {m: k * c for m, k in a.items()}


cpdef dict diff_terms(dict a, sym):
    cdef dict out = {}
    cdef tuple m, nm, pair
    cdef Py_ssize_t k, n
    for m, c in a.items():
        n = len(m)
        for k in range(n):
            pair = <tuple>m[k]
            if pair[0] == sym:
                e = pair[1]
                if e == 1:
                    nm = m[:k] + m[k + 1:]
                else:
                    nm = m[:k] + ((pair[0], e - 1),) + m[k + 1:]
                nc = c * e
                prev = out.get(nm)
                if prev is None:
                    out[nm] = nc
                else:
                    prev = prev + nc
                    if prev:
                        out[nm] = prev
                    else:
                        del out[nm]
                break
    return out


def one():
    return {(): Fraction(1)}
