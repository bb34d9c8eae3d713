"""Pure-Python term kernels.

Terms are dicts mapping a monomial to a nonzero ``Fraction``.  A monomial is a
tuple of ``(symbol, exponent)`` pairs sorted by symbol, exponents >= 1.  The
compiled module ``_ckernels`` exports the same functions.
"""
from fractions import Fraction


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        sa, ea = a[i]
        sb, eb = b[j]
        if sa == sb:
            out.append((sa, ea + eb))
            i += 1
            j += 1
        elif sa < sb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < na:
        out.extend(a[i:])
    if j < nb:
        out.extend(b[j:])
    return tuple(out)


def add_terms(a, b):
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


def sub_terms(a, b):
    out = dict(a)
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


def mul_terms(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(ma, mb)
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


def scale_terms(a, c):
    if not c:
        return {}
    return {m: k * c for m, k in a.items()}


def diff_terms(a, sym):
    out = {}
    for m, c in a.items():
        for k, (s, e) in enumerate(m):
            if s == sym:
                if e == 1:
                    nm = m[:k] + m[k + 1:]
                else:
                    nm = m[:k] + ((s, e - 1),) + m[k + 1:]
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
