"""Sparse polynomial arithmetic on raw term dictionaries (pure Python).

A monomial is a flat tuple ``(id0, e0, id1, e1, ...)`` sorted by atom id with
nonzero integer exponents.  A polynomial is a ``dict`` mapping monomials to
nonzero rational coefficients.  Nothing here knows about rewrite rules; the
caller canonicalizes.  ``_ckernel.pyx`` mirrors this module exactly.
"""


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    na = len(a)
    nb = len(b)
    while i < na and j < nb:
        ia = a[i]
        ib = b[j]
        if ia == ib:
            e = a[i + 1] + b[j + 1]
            if e:
                out.append(ia)
                out.append(e)
            i += 2
            j += 2
        elif ia < ib:
            out.append(ia)
            out.append(a[i + 1])
            i += 2
        else:
            out.append(ib)
            out.append(b[j + 1])
            j += 2
    if i < na:
        out.extend(a[i:])
    if j < nb:
        out.extend(b[j:])
    return tuple(out)


def mono_pow(a, n):
    if n == 0:
        return ()
    return tuple(v if k % 2 == 0 else v * n for k, v in enumerate(a))


def poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = dict(p)
    for m, c in q.items():
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


def poly_addmul(acc, p, c, mono):
    """In place: ``acc += c * mono * p``."""
    for m, cm in p.items():
        if mono:
            m = mono_mul(m, mono)
        v = cm * c
        s = acc.get(m)
        if s is None:
            acc[m] = v
        else:
            s = s + v
            if s:
                acc[m] = s
            else:
                del acc[m]
    return acc


def poly_scale(p, c):
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def poly_mul(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = {}
    for mb, cb in q.items():
        for ma, ca in p.items():
            m = mono_mul(ma, mb)
            v = ca * cb
            s = out.get(m)
            if s is None:
                out[m] = v
            else:
                s = s + v
                if s:
                    out[m] = s
                else:
                    del out[m]
    return out


def touches(p, ids):
    """True when some monomial of ``p`` contains an atom id from ``ids``."""
    for m in p:
        for k in range(0, len(m), 2):
            if m[k] in ids:
                return True
    return False
