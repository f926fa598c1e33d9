"""Pure-Python implementations of the arithmetic kernels.

Monomials are packed into a single integer (one bit field per variable,
plus a leading total-degree field for the ordered routines) so that
monomial multiplication is one integer addition and graded-lex comparison
is integer comparison.  The compiled module in ``_ckernels.pyx`` exposes the
same functions with the same semantics.
"""
from fractions import Fraction
from heapq import heapify, heappop, heappush


def _bits(bound):
    return max(bound, 1).bit_length()


def _exact_div(c, d):
    if type(c) is int and type(d) is int:
        q, r = divmod(c, d)
        if not r:
            return q
        return Fraction(c, d)
    q = c / d
    if type(q) is Fraction and q.denominator == 1:
        return q.numerator
    return q


def mul_terms(a, b, nvars):
    """Product of two sparse term dicts ``{exponent tuple: coeff}``."""
    if not a or not b:
        return {}
    if nvars == 0:
        c = a[()] * b[()]
        return {(): c} if c else {}
    if len(b) == 1:
        (eb, cb), = b.items()
        out = {}
        for ea, ca in a.items():
            c = ca * cb
            if c:
                out[tuple([x + y for x, y in zip(ea, eb)])] = c
        return out
    if len(a) == 1:
        return mul_terms(b, a, nvars)
    da = [0] * nvars
    for e in a:
        for i in range(nvars):
            if e[i] > da[i]:
                da[i] = e[i]
    db = [0] * nvars
    for e in b:
        for i in range(nvars):
            if e[i] > db[i]:
                db[i] = e[i]
    width = _bits(max(x + y for x, y in zip(da, db)))
    shifts = [i * width for i in range(nvars)]

    def pack(e):
        k = 0
        for x, s in zip(e, shifts):
            k |= x << s
        return k

    pb = [(pack(e), c) for e, c in b.items()]
    acc = {}
    get = acc.get
    for ea, ca in a.items():
        ka = pack(ea)
        for kb, cb in pb:
            k = ka + kb
            acc[k] = get(k, 0) + ca * cb
    mask = (1 << width) - 1
    out = {}
    for k, c in acc.items():
        if c:
            out[tuple([(k >> s) & mask for s in shifts])] = c
    return out


def divide_terms(a, b, nvars, integral=False):
    """Exact quotient ``a / b`` of term dicts, or ``None`` if b does not divide a.

    Graded-lex long division driven by a heap of packed monomials.  With
    ``integral=True`` all coefficients are integers and an inexact
    coefficient division is reported as non-divisibility, which is exact
    when ``b`` is primitive (Gauss's lemma).
    """
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if not a:
        return {}
    if nvars == 0:
        if integral:
            t, r = divmod(a[()], b[()])
            return None if r else {(): t}
        return {(): _exact_div(a[()], b[()])}
    dmax = 0
    for e in a:
        s = sum(e)
        if s > dmax:
            dmax = s
    width = _bits(dmax)
    mask = (1 << width) - 1
    nf = nvars + 1
    shifts = [(nvars - i) * width for i in range(nf)]  # degree field first

    def pack(e):
        k = sum(e) << shifts[0]
        for i in range(nvars):
            k |= e[i] << shifts[i + 1]
        return k

    pb = {pack(e): c for e, c in b.items()}
    lk = max(pb)
    lc = pb.pop(lk)
    lfields = [(lk >> s) & mask for s in shifts]
    rest = list(pb.items())
    rem = {pack(e): c for e, c in a.items()}
    heap = [-k for k in rem]
    heapify(heap)
    q = {}
    while heap:
        k = -heappop(heap)
        c = rem.get(k)
        if c is None:
            continue
        for s, lf in zip(shifts, lfields):
            if ((k >> s) & mask) < lf:
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
        for kb, cb in rest:
            kk = d + kb
            old = rem.get(kk)
            if old is None:
                rem[kk] = -t * cb
                heappush(heap, -kk)
            else:
                v = old - t * cb
                if v:
                    rem[kk] = v
                else:
                    del rem[kk]
    out = {}
    for k, c in q.items():
        out[tuple([(k >> shifts[i + 1]) & mask for i in range(nvars)])] = c
    return out


def cyc_mulmod(a, b, phi):
    """Multiply coefficient vectors a, b and reduce modulo the monic ``phi``.

    ``phi`` lists coefficients low to high and has length ``len(a) + 1``.
    """
    n = len(phi) - 1
    prod = [0] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    for i in range(2 * n - 2, n - 1, -1):
        c = prod[i]
        if c:
            base = i - n
            for j in range(n):
                pj = phi[j]
                if pj:
                    prod[base + j] -= c * pj
    return prod[:n]
