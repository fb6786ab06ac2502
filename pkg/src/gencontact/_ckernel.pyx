# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``gencontact._pykernel``; same contracts, same results."""


cpdef tuple mono_mul(tuple a, tuple b):
    cdef Py_ssize_t i = 0, j = 0, na = len(a), nb = len(b)
    cdef long ia, ib, e
    if na == 0:
        return b
    if nb == 0:
        return a
    cdef list out = []
    while i < na and j < nb:
        ia = a[i]
        ib = b[j]
        if ia == ib:
            e = <long>a[i + 1] + <long>b[j + 1]
            if e != 0:
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


def mono_pow(tuple a, long n):
    if n == 0:
        return ()
    cdef Py_ssize_t k
    cdef list out = list(a)
    for k in range(1, len(out), 2):
        out[k] = out[k] * n
    return tuple(out)


def poly_add(dict p, dict q):
    if len(p) < len(q):
        p, q = q, p
    cdef dict out = dict(p)
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


def poly_addmul(dict acc, dict p, c, tuple mono):
    cdef tuple m
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


def poly_scale(dict p, c):
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def poly_mul(dict p, dict q):
    if len(p) < len(q):
        p, q = q, p
    cdef dict out = {}
    cdef tuple ma, mb, m
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


def touches(dict p, ids):
    cdef tuple m
    cdef Py_ssize_t k
    for m in p:
        for k in range(0, len(m), 2):
            if m[k] in ids:
                return True
    return False
