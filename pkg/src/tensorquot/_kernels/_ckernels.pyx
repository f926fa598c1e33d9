# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled arithmetic kernels.

Same contracts as ``_pykernels``.  Packed monomials live in C ``long long``
when they fit in 62 bits; wider inputs are delegated to the Python kernels.
"""
from fractions import Fraction
from heapq import heapify, heappop, heappush

from tensorquot._kernels import _pykernels

from libc.stdlib cimport malloc, free


cdef inline int _bitlen(long long x):
    cdef int n = 0
    if x < 1:
        x = 1
    while x:
        n += 1
        x >>= 1
    return n


cdef object _exact_div(object c, object d):
    if type(c) is int and type(d) is int:
        q, r = divmod(c, d)
        if not r:
            return q
        return Fraction(c, d)
    q = c / d
    if type(q) is Fraction and q.denominator == 1:
        return q.numerator
    return q


def mul_terms(dict a, dict b, int nvars):
    if not a or not b:
        return {}
    if nvars == 0 or len(a) == 1 or len(b) == 1:
        return _pykernels.mul_terms(a, b, nvars)
    cdef int i, width
    cdef long long m
    cdef list da = [0] * nvars
    cdef list db = [0] * nvars
    cdef tuple e
    for e in a:
        for i in range(nvars):
            if e[i] > da[i]:
                da[i] = e[i]
    for e in b:
        for i in range(nvars):
            if e[i] > db[i]:
                db[i] = e[i]
    m = 0
    for i in range(nvars):
        if da[i] + db[i] > m:
            m = da[i] + db[i]
    width = _bitlen(m)
    if width * nvars > 62:
        return _pykernels.mul_terms(a, b, nvars)

    cdef Py_ssize_t nb = len(b), j
    cdef long long *kb = <long long *> malloc(nb * sizeof(long long))
    cdef list cb = []
    cdef long long k, ka
    cdef dict acc = {}
    cdef object c, old
    try:
        j = 0
        for e, c in b.items():
            k = 0
            for i in range(nvars):
                k |= (<long long> e[i]) << (i * width)
            kb[j] = k
            cb.append(c)
            j += 1
        for e, c in a.items():
            ka = 0
            for i in range(nvars):
                ka |= (<long long> e[i]) << (i * width)
            for j in range(nb):
                k = ka + kb[j]
                old = acc.get(k)
                if old is None:
                    acc[k] = c * cb[j]
                else:
                    acc[k] = old + c * cb[j]
    finally:
        free(kb)
    cdef long long mask = (1LL << width) - 1
    cdef dict out = {}
    cdef list exps
    for key, c in acc.items():
        if c:
            k = key
            exps = [0] * nvars
            for i in range(nvars):
                exps[i] = (k >> (i * width)) & mask
            out[tuple(exps)] = c
    return out


def divide_terms(dict a, dict b, int nvars, bint integral=False):
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if not a:
        return {}
    if nvars == 0:
        return _pykernels.divide_terms(a, b, nvars, integral)
    cdef long long dmax = 0, s
    cdef tuple e
    cdef int i, width
    for e in a:
        s = 0
        for i in range(nvars):
            s += e[i]
        if s > dmax:
            dmax = s
    width = _bitlen(dmax)
    if width * (nvars + 1) > 62:
        return _pykernels.divide_terms(a, b, nvars, integral)
    cdef long long mask = (1LL << width) - 1
    cdef int nf = nvars + 1

    def pack(tuple e):
        cdef long long k = 0, t = 0
        cdef int i
        for i in range(nvars):
            t += e[i]
            k |= (<long long> e[i]) << ((nvars - 1 - i) * width)
        return k | (t << (nvars * width))

    cdef dict pb = {pack(e): c for e, c in b.items()}
    cdef long long lk = max(pb)
    lc = pb.pop(lk)
    cdef list rest = list(pb.items())
    cdef dict rem = {pack(e): c for e, c in a.items()}
    cdef list heap = [-x for x in rem]
    heapify(heap)
    cdef dict q = {}
    cdef long long k, d, kk
    cdef bint ok
    cdef object c, t, old, v
    while heap:
        k = -heappop(heap)
        c = rem.get(k)
        if c is None:
            continue
        ok = True
        for i in range(nf):
            if ((k >> (i * width)) & mask) < ((lk >> (i * width)) & mask):
                ok = False
                break
        if not ok:
            return None
        d = k - lk
        if integral:
            t, r = divmod(c, lc)
            if r:
                return None
        else:
            t = _exact_div(c, lc)
        q[d] = t
        del rem[k]
        for kbo, cbv in rest:
            kk = d + <long long> kbo
            old = rem.get(kk)
            if old is None:
                rem[kk] = -t * cbv
                heappush(heap, -kk)
            else:
                v = old - t * cbv
                if v:
                    rem[kk] = v
                else:
                    del rem[kk]
    cdef dict out = {}
    cdef list exps
    for key, c in q.items():
        k = key
        exps = [0] * nvars
        for i in range(nvars):
            exps[i] = (k >> ((nvars - 1 - i) * width)) & mask
        out[tuple(exps)] = c
    return out


def cyc_mulmod(list a, list b, list phi):
    cdef Py_ssize_t n = len(phi) - 1, i, j, base
    cdef list prod = [0] * (2 * n - 1)
    cdef object x, y, c, pj
    for i in range(n):
        x = a[i]
        if x:
            for j in range(n):
                y = b[j]
                if y:
                    prod[i + j] = prod[i + j] + x * y
    for i in range(2 * n - 2, n - 1, -1):
        c = prod[i]
        if c:
            base = i - n
            for j in range(n):
                pj = phi[j]
                if pj:
                    prod[base + j] = prod[base + j] - c * pj
    return prod[:n]
