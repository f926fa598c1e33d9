"""Sparse multivariate polynomials and reduced rational functions.

``MPoly`` maps exponent tuples to nonzero scalar coefficients (see
:mod:`tensorquot.scalar`).  Terms are ordered graded-lexicographically;
``x0 > x1 > ...`` inside a degree.  ``RatFn`` keeps numerator and denominator
coprime with a monic denominator, so equality is literal.
"""
from fractions import Fraction
from math import gcd as igcd

from tensorquot import _kernels
from tensorquot.errors import (
    ArityError,
    DivisionByZero,
    InvalidComponentError,
    UndefinedGcdError,
    ZeroInputError,
)
from tensorquot.scalar import CycScalar, is_rational, qnorm, scalar_div


def _grlex(e):
    return (sum(e), e)


class MPoly:
    __slots__ = ("nvars", "terms", "_hash", "_ip")

    def __init__(self, nvars, terms=None):
        self._ip = None
        self.nvars = nvars
        if terms:
            clean = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ArityError(f"exponent {e} has length {len(e)}, expected {nvars}")
                if isinstance(c, CycScalar):
                    c = c.simplify()
                elif type(c) is Fraction:
                    c = qnorm(c)
                if c:
                    clean[e] = c
            self.terms = clean
        else:
            self.terms = {}
        self._hash = None

    @classmethod
    def _from(cls, nvars, terms):
        # trusted: no zero coefficients, exponent tuples of the right length
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj._hash = None
        obj._ip = None
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars):
        return cls._from(nvars, {})

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, nvars):
        return cls._from(nvars, {(0,) * nvars: 1})

    @classmethod
    def var(cls, nvars, i):
        if not 0 <= i < nvars:
            raise ArityError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._from(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps, c=1):
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def linear_form(cls, coeffs, const=0):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        terms[(0,) * n] = const
        return cls(n, terms)

    # -- inspection ----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, 0)

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=-1)

    def leading_exponent(self):
        return max(self.terms, key=_grlex)

    def leading_term(self):
        e = self.leading_exponent()
        return e, self.terms[e]

    def lc(self):
        return self.terms[self.leading_exponent()]

    def sorted_terms(self):
        """Terms in decreasing graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: _grlex(t[0]), reverse=True)

    def is_homogeneous(self):
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_components(self):
        out = {}
        for e, c in self.terms.items():
            out.setdefault(sum(e), {})[e] = c
        return {d: MPoly._from(self.nvars, t) for d, t in sorted(out.items())}

    def variables(self):
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return sorted(used)

    def is_rational(self):
        return all(is_rational(c) for c in self.terms.values())

    def coefficients(self):
        return list(self.terms.values())

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if other.nvars != self.nvars:
            raise ArityError(f"mismatched arity: {self.nvars} vs {other.nvars}")

    def _coerce(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if is_rational(other) or isinstance(other, CycScalar):
            return MPoly.constant(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for e, c in small.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = _clean(v + c)
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MPoly._from(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._from(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = -c
            else:
                v = _clean(v - c)
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MPoly._from(self.nvars, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            if self.is_zero() or other.is_zero():
                return MPoly.zero(self.nvars)
            ia, ib = self._int_part(), other._int_part()
            if ia and ib:
                raw = _kernels.mul_terms(ia[1], ib[1], self.nvars)
                return MPoly._from(self.nvars, _rescale(raw, ia[0] * ib[0]))
            raw = _kernels.mul_terms(self.terms, other.terms, self.nvars)
            return MPoly._from(self.nvars, _clean_terms(raw))
        if is_rational(other) or isinstance(other, CycScalar):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def _int_part(self):
        """(s, integer terms) with self = s * terms; False over a cyclotomic field."""
        if self._ip is None:
            den = 1
            ok = True
            for c in self.terms.values():
                t = type(c)
                if t is int:
                    continue
                if t is Fraction:
                    den = den * c.denominator // igcd(den, c.denominator)
                else:
                    ok = False
                    break
            if not ok:
                self._ip = False
            elif den == 1:
                self._ip = (1, self.terms)
            else:
                self._ip = (Fraction(1, den), {
                    e: c * den if type(c) is int else c.numerator * (den // c.denominator)
                    for e, c in self.terms.items()})
        return self._ip

    def scale(self, c):
        if isinstance(c, CycScalar):
            c = c.simplify()
        if not c:
            return MPoly.zero(self.nvars)
        if c == 1:
            return self
        return MPoly._from(self.nvars, _clean_terms({e: v * c for e, v in self.terms.items()}))

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result = MPoly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if is_rational(other) or isinstance(other, CycScalar):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(scalar_div(1, self.lc()))

    def integer_primitive(self):
        """For rational coefficients: (content, primitive integer poly with positive lc)."""
        den = 1
        for c in self.terms.values():
            if type(c) is Fraction:
                den = den * c.denominator // igcd(den, c.denominator)
        ints = {e: int(c * den) for e, c in self.terms.items()}
        g = 0
        for c in ints.values():
            g = igcd(g, c)
        if ints[self.leading_exponent()] < 0:
            g = -g
        return Fraction(g, den), MPoly._from(self.nvars, {e: c // g for e, c in ints.items()})

    def diff(self, i):
        return partial_derivative(self, i)

    def evaluate(self, point):
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        return _clean(total)

    def compose(self, images):
        """Substitute polynomial images for the variables."""
        return substitute_poly(self, images)

    def extend(self, nvars, offset=0):
        """Embed into a ring with more variables (shifting indices by offset)."""
        pad_l = (0,) * offset
        pad_r = (0,) * (nvars - offset - self.nvars)
        return MPoly._from(nvars, {pad_l + e + pad_r: c for e, c in self.terms.items()})

    def __repr__(self):
        from tensorquot.parsing import format_poly
        return f"MPoly({format_poly(self)!r})"

    def to_str(self, names=None):
        from tensorquot.parsing import format_poly
        return format_poly(self, names)


def _clean(c):
    if isinstance(c, CycScalar):
        return c.simplify()
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _rescale(terms, s):
    if s == 1:
        return {e: c for e, c in terms.items() if c}
    num, den = s.numerator, s.denominator
    out = {}
    for e, c in terms.items():
        if not c:
            continue
        c = c * num
        g = igcd(c, den)
        out[e] = c // den if g == den else Fraction(c // g, den // g)
    return out


def _clean_terms(terms):
    out = {}
    for e, c in terms.items():
        t = type(c)
        if t is int:
            if c:
                out[e] = c
            continue
        c = _clean(c)
        if c:
            out[e] = c
    return out


# -- operations ------------------------------------------------------------

def poly_arith(op, a, b):
    if a.nvars != b.nvars:
        raise ArityError(f"mismatched arity: {a.nvars} vs {b.nvars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def exact_divide(a, b):
    """Return q with a == q*b, or None when b does not divide a."""
    if b.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    if a.nvars != b.nvars:
        raise ArityError(f"mismatched arity: {a.nvars} vs {b.nvars}")
    if a.is_zero():
        return MPoly.zero(a.nvars)
    if b.is_constant():
        return a.scale(scalar_div(1, b.constant_value()))
    ia = a._int_part()
    if ia and b._int_part():
        cb, pb = b.integer_primitive()
        q = _kernels.divide_terms(ia[1], pb.terms, a.nvars, True)
        if q is None:
            return None
        return MPoly._from(a.nvars, _rescale(q, ia[0] / cb))
    q = _kernels.divide_terms(a.terms, b.terms, a.nvars)
    if q is None:
        return None
    return MPoly._from(a.nvars, _clean_terms(q))


def partial_derivative(p, i):
    if not 0 <= i < p.nvars:
        raise ArityError(f"variable index {i} out of range for {p.nvars} variables")
    out = {}
    for e, c in p.terms.items():
        k = e[i]
        if k:
            e2 = list(e)
            e2[i] = k - 1
            out[tuple(e2)] = c * k
    return MPoly._from(p.nvars, _clean_terms(out))


def jacobian(polys, nvars=None):
    n = nvars if nvars is not None else polys[0].nvars
    return [[partial_derivative(f, j) for j in range(n)] for f in polys]


def substitute_poly(p, images):
    """p(images) for polynomial images, by nested Horner evaluation."""
    if len(images) != p.nvars:
        raise ArityError(f"{len(images)} images for {p.nvars} variables")
    if not images:
        return p
    m = images[0].nvars
    for g in images:
        if g.nvars != m:
            raise ArityError("substitution images must share one ring")
    if p.is_zero():
        return MPoly.zero(m)
    return _horner(list(p.terms.items()), 0, images, m)


def _horner(items, i, images, m):
    n = len(images)
    if i == n:
        c = 0
        for _, v in items:
            c = c + v
        return MPoly.constant(m, c)
    if all(e[i] == 0 for e, _ in items):
        return _horner(items, i + 1, images, m)
    groups = {}
    for e, c in items:
        groups.setdefault(e[i], []).append((e, c))
    img = images[i]
    degs = sorted(groups, reverse=True)
    acc = None
    prev = None
    for k in degs:
        part = _horner(groups[k], i + 1, images, m)
        if acc is None:
            acc = part
        else:
            acc = acc * _pow_cached(img, prev - k) + part
        prev = k
    if prev:
        acc = acc * _pow_cached(img, prev)
    return acc


def _pow_cached(g, k):
    return g if k == 1 else g ** k


def substitute(p, images):
    """Compose p with rational-function images, returning a reduced RatFn."""
    if len(images) != p.nvars:
        raise ArityError(f"{len(images)} images for {p.nvars} variables")
    images = [im if isinstance(im, RatFn) else RatFn.from_poly(im) for im in images]
    if not images:
        return RatFn.from_poly(p)
    m = images[0].nvars
    if any(im.nvars != m for im in images):
        raise ArityError("substitution images must share one ring")
    if all(im.is_polynomial() for im in images):
        return RatFn.from_poly(substitute_poly(p, [im.num for im in images]))
    # common denominator prod den_i^deg_i(p)
    degs = [p.degree_in(i) for i in range(p.nvars)]
    num = MPoly.zero(m)
    cache = {}

    def power(poly, k, key):
        if (key, k) not in cache:
            cache[(key, k)] = poly ** k
        return cache[(key, k)]

    for e, c in p.terms.items():
        t = MPoly.constant(m, c)
        for i, k in enumerate(e):
            im = images[i]
            if k:
                t = t * power(im.num, k, ("n", i))
            if degs[i] - k and not im.den.is_constant():
                t = t * power(im.den, degs[i] - k, ("d", i))
        num = num + t
    den = MPoly.one(m)
    for i, im in enumerate(images):
        if degs[i] > 0 and not im.den.is_constant():
            den = den * power(im.den, degs[i], ("d", i))
    return RatFn(num, den)


def linear_substitute(p, matrix):
    """p(M x): substitute x_i -> sum_j M[i][j] x_j.

    Monomial matrices (one nonzero per row) take a term-by-term fast path.
    """
    n = p.nvars
    if len(matrix) != n:
        raise ArityError("matrix size does not match the polynomial ring")
    perm = []
    scal = []
    for row in matrix:
        nz = [(j, c) for j, c in enumerate(row) if c]
        if len(nz) != 1:
            perm = None
            break
        perm.append(nz[0][0])
        scal.append(nz[0][1])
    if perm is not None and len(set(perm)) == n:
        out = {}
        for e, c in p.terms.items():
            ne = [0] * n
            coef = c
            for i, k in enumerate(e):
                if k:
                    ne[perm[i]] = k
                    if scal[i] != 1:
                        coef = coef * scal[i] ** k
            out[tuple(ne)] = coef
        return MPoly(n, out)
    images = [MPoly.linear_form(list(row)) for row in matrix]
    return substitute_poly(p, images)


# -- gcd ---------------------------------------------------------------------

def gcd(a, b):
    """Monic greatest common divisor."""
    if a.nvars != b.nvars:
        raise ArityError(f"mismatched arity: {a.nvars} vs {b.nvars}")
    if a.is_zero() and b.is_zero():
        raise UndefinedGcdError("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return MPoly.one(a.nvars)
    if a == b:
        return a.monic()
    n = a.nvars
    # monomial content
    ma = [min(e[i] for e in a.terms) for i in range(n)]
    mb = [min(e[i] for e in b.terms) for i in range(n)]
    mono = tuple(min(x, y) for x, y in zip(ma, mb))
    if any(ma):
        a = _shift_down(a, ma)
    if any(mb):
        b = _shift_down(b, mb)
    g = _gcd_nomono(a, b)
    if any(mono):
        g = g * MPoly._from(n, {mono: 1})
    return g.monic()


def _shift_down(p, m):
    return MPoly._from(p.nvars, {tuple(x - y for x, y in zip(e, m)): c for e, c in p.terms.items()})


def _gcd_nomono(a, b):
    if a.is_constant() or b.is_constant():
        return MPoly.one(a.nvars)
    # quick divisibility checks
    if len(a.terms) <= len(b.terms):
        small, big = a, b
    else:
        small, big = b, a
    if exact_divide(big, small) is not None:
        return small
    if a.is_rational() and b.is_rational():
        _, pa = a.integer_primitive()
        _, pb = b.integer_primitive()
        h = _heu_gcd(pa.terms, pb.terms, a.nvars)
        if h is not None:
            return MPoly._from(a.nvars, h)
    return prs_gcd(a, b)


# heuristic gcd over Z (Char-Geddes-Gonnet), verified by exact division

_HEU_TRIES = 6


def _maxnorm(t):
    return max(abs(c) for c in t.values())


def _heu_gcd(f, g, k):
    """gcd of primitive integer polynomials given as term dicts in k vars."""
    res = _heu_rec(f, g, k)
    if res is None:
        return None
    h = res[0]
    # primitive, positive leading coefficient
    cont = 0
    for c in h.values():
        cont = igcd(cont, c)
    lead = max(h, key=_grlex)
    if h[lead] < 0:
        cont = -cont
    return {e: c // cont for e, c in h.items()}


def _int_divide(f, g, k):
    q = _kernels.divide_terms(f, g, k)
    if q is None:
        return None
    for c in q.values():
        if type(c) is not int:
            return None
    return q


def _heu_rec(f, g, k):
    if k == 0:
        a, b = f.get((), 0), g.get((), 0)
        h = igcd(a, b)
        if h == 0:
            return None
        return {(): h}, {(): a // h}, {(): b // h}
    fc = 0
    for c in f.values():
        fc = igcd(fc, c)
    gc = 0
    for c in g.values():
        gc = igcd(gc, c)
    cg = igcd(fc, gc)
    if fc != 1:
        f = {e: c // fc for e, c in f.items()}
    if gc != 1:
        g = {e: c // gc for e, c in g.items()}
    fn, gn = _maxnorm(f), _maxnorm(g)
    lf = abs(f[max(f, key=_grlex)])
    lg = abs(g[max(g, key=_grlex)])
    bnd = 2 * min(fn, gn) + 29
    x = max(min(bnd, 99 * _isqrt(bnd)), 2 * min(fn // lf, gn // lg) + 2)
    for _ in range(_HEU_TRIES):
        ff = _eval_last(f, x)
        gg = _eval_last(g, x)
        if ff and gg:
            sub = _heu_rec(ff, gg, k - 1)
            if sub is not None:
                h, cff, cfg = sub
                h = _interpolate(h, x)
                h = _prim(h)
                cf = _int_divide(f, h, k)
                if cf is not None:
                    cgq = _int_divide(g, h, k)
                    if cgq is not None:
                        return _scale(h, cg), {e: c * (fc // cg) for e, c in cf.items()}, \
                            {e: c * (gc // cg) for e, c in cgq.items()}
                cff = _interpolate(cff, x)
                hh = _int_divide(f, cff, k)
                if hh is not None:
                    cgq = _int_divide(g, hh, k)
                    if cgq is not None:
                        return _scale(hh, cg), {e: c * (fc // cg) for e, c in cff.items()}, \
                            {e: c * (gc // cg) for e, c in cgq.items()}
                cfg = _interpolate(cfg, x)
                hh = _int_divide(g, cfg, k)
                if hh is not None:
                    cfq = _int_divide(f, hh, k)
                    if cfq is not None:
                        return _scale(hh, cg), {e: c * (fc // cg) for e, c in cfq.items()}, \
                            {e: c * (gc // cg) for e, c in cfg.items()}
        x = 73794 * x * _isqrt(_isqrt(x)) // 27011
    return None


def _isqrt(n):
    from math import isqrt
    return isqrt(n)


def _scale(h, c):
    return h if c == 1 else {e: v * c for e, v in h.items()}


def _prim(h):
    cont = 0
    for c in h.values():
        cont = igcd(cont, c)
    lead = max(h, key=_grlex)
    if h[lead] < 0:
        cont = -cont
    return {e: c // cont for e, c in h.items()}


def _eval_last(f, x):
    out = {}
    for e, c in f.items():
        key = e[:-1]
        out[key] = out.get(key, 0) + c * x ** e[-1]
    return {e: c for e, c in out.items() if c}


def _interpolate(h, x):
    """Recover a polynomial in one more variable from its value at x (symmetric digits)."""
    out = {}
    half = x // 2
    i = 0
    h = dict(h)
    while h:
        nxt = {}
        for e, c in h.items():
            d = c % x
            if d > half:
                d -= x
            if d:
                out[e + (i,)] = d
            r = (c - d) // x
            if r:
                nxt[e] = r
        h = nxt
        i += 1
    return out


# subresultant PRS over K[x_0..x_{n-2}][x_{n-1}], recursive on the variable count

def prs_gcd(a, b):
    """Exact gcd by content/primitive-part recursion with a subresultant PRS."""
    n = a.nvars
    return _prs_rec(a, b, n - 1).monic()


def _main_var(p, v):
    """Split p as sum_k c_k x_v^k; returns dense list [c_0, ..., c_d] of MPoly."""
    d = p.degree_in(v)
    parts = [dict() for _ in range(d + 1)]
    for e, c in p.terms.items():
        k = e[v]
        if k:
            e2 = list(e)
            e2[v] = 0
            parts[k][tuple(e2)] = c
        else:
            parts[0][e] = c
    return [MPoly._from(p.nvars, t) for t in parts]


def _from_main(coeffs, v, nvars):
    out = MPoly.zero(nvars)
    for k, c in enumerate(coeffs):
        if c:
            e = [0] * nvars
            e[v] = k
            out = out + c * MPoly._from(nvars, {tuple(e): 1})
    return out


def _content(coeffs, v):
    g = None
    for c in coeffs:
        if c:
            g = c.monic() if g is None else _prs_rec(g, c, v - 1).monic()
            if g.is_constant():
                return MPoly.one(c.nvars)
    return g


def _prs_rec(a, b, v):
    """gcd of a, b which only involve variables 0..v; result up to unit."""
    n = a.nvars
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if v < 0 or a.is_constant() or b.is_constant():
        return MPoly.one(n)
    A = _main_var(a, v)
    B = _main_var(b, v)
    if len(A) == 1 and len(B) == 1:
        return _prs_rec(a, b, v - 1)
    ca = _content(A, v)
    cb = _content(B, v)
    if len(A) == 1:
        return _prs_rec(a, cb, v - 1)
    if len(B) == 1:
        return _prs_rec(ca, b, v - 1)
    c = _prs_rec(ca, cb, v - 1)
    A = [exact_divide(x, ca) for x in A]
    B = [exact_divide(x, cb) for x in B]
    if len(A) < len(B):
        A, B = B, A
    G = _subresultant_last(A, B)
    if len(G) == 1:
        return c
    cg = _content(G, v)
    G = [exact_divide(x, cg) for x in G]
    return c * _from_main(G, v, n)


def _trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _prem(A, B):
    """Pseudo-remainder of dense polys with MPoly coefficients."""
    R = list(A)
    lb = B[-1]
    db = len(B) - 1
    delta = len(A) - len(B) + 1
    while len(R) - 1 >= db and R:
        lr = R[-1]
        d = len(R) - 1 - db
        R = [x * lb for x in R]
        for i, y in enumerate(B):
            R[i + d] = R[i + d] - lr * y
        R.pop()
        _trim(R)
        delta -= 1
    if delta > 0:
        f = lb ** delta
        R = [x * f for x in R]
    return R


def _subresultant_last(A, B):
    """Last nonzero element of the subresultant PRS of A, B (deg A >= deg B).

    Returns ``[1]`` when the sequence reaches a nonzero constant.
    """
    one = MPoly.one(A[0].nvars)
    g = h = one
    while True:
        delta = len(A) - len(B)
        R = _prem(A, B)
        if not R:
            return B
        if len(R) == 1:
            return [one]
        div = g * h ** delta
        if div != 1:
            R = [exact_divide(x, div) for x in R]
        A, B = B, R
        g = A[-1]
        if delta == 1:
            h = g
        elif delta > 1:
            h = exact_divide(g ** delta, h ** (delta - 1))


# -- valuations --------------------------------------------------------------

def multiplicity_in(p, delta):
    """Largest k with delta^k | p (p nonzero)."""
    k = 0
    while True:
        q = exact_divide(p, delta)
        if q is None:
            return k
        p = q
        k += 1


def factor_multiplicity(h, delta):
    """Order of h along the hypersurface delta = 0 (delta irreducible)."""
    if isinstance(h, MPoly):
        h = RatFn.from_poly(h)
    if h.is_zero():
        raise ZeroInputError("valuation of the zero function")
    if delta.is_constant():
        raise InvalidComponentError("a component must be a non-constant polynomial")
    return multiplicity_in(h.num, delta) - multiplicity_in(h.den, delta)


def strip_factor(p, delta, limit=None):
    """(k, q) with p = delta^k * q and delta not dividing q (k <= limit)."""
    k = 0
    while limit is None or k < limit:
        q = exact_divide(p, delta)
        if q is None:
            break
        p = q
        k += 1
    return k, p


# -- rational functions ------------------------------------------------------

class RatFn:
    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        if den is None:
            den = MPoly.one(num.nvars)
        if num.nvars != den.nvars:
            raise ArityError("numerator and denominator live in different rings")
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            self.num, self.den = num, MPoly.one(num.nvars)
        elif den.is_constant():
            self.num, self.den = num.scale(scalar_div(1, den.constant_value())), MPoly.one(num.nvars)
        else:
            g = gcd(num, den)
            if not g.is_constant():
                num = exact_divide(num, g)
                den = exact_divide(den, g)
            self._set_normalized(num, den)
        self._hash = None

    def _set_normalized(self, num, den):
        lc = den.lc()
        if lc != 1:
            inv = scalar_div(1, lc)
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def from_poly(cls, p):
        obj = object.__new__(cls)
        obj.num = p
        obj.den = MPoly.one(p.nvars)
        obj._hash = None
        return obj

    @classmethod
    def from_reduced(cls, num, den):
        """Build from a numerator/denominator pair already known to be coprime."""
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        obj = object.__new__(cls)
        obj._hash = None
        if num.is_zero():
            obj.num, obj.den = num, MPoly.one(num.nvars)
        elif den.is_constant():
            obj.num, obj.den = num.scale(scalar_div(1, den.constant_value())), MPoly.one(num.nvars)
        else:
            obj._set_normalized(num, den)
        return obj

    @classmethod
    def constant(cls, nvars, c):
        return cls.from_poly(MPoly.constant(nvars, c))

    @property
    def nvars(self):
        return self.num.nvars

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.den.is_constant() and self.num.is_constant()

    def _coerce(self, other):
        if isinstance(other, RatFn):
            return other
        if isinstance(other, MPoly):
            return RatFn.from_poly(other)
        if is_rational(other) or isinstance(other, CycScalar):
            return RatFn.constant(self.nvars, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            if self.den.is_constant():
                return RatFn.from_poly(self.num + o.num)
            return RatFn(self.num + o.num, self.den)
        if self.is_polynomial():
            return RatFn.from_reduced(self.num * o.den + o.num, o.den)
        if o.is_polynomial():
            return RatFn.from_reduced(o.num * self.den + self.num, self.den)
        g = gcd(self.den, o.den)
        d1 = exact_divide(self.den, g)
        d2 = exact_divide(o.den, g)
        num = self.num * d2 + o.num * d1
        den = self.den * d2
        if g.is_constant():
            return RatFn.from_reduced(num, den)
        return RatFn(num, den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn.from_reduced(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RatFn.from_poly(MPoly.zero(self.nvars))
        if self.is_polynomial() and o.is_polynomial():
            return RatFn.from_poly(self.num * o.num)
        n1, d2 = _cancel(self.num, o.den)
        n2, d1 = _cancel(o.num, self.den)
        return RatFn.from_reduced(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of the zero function")
        return RatFn.from_reduced(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, int):
            raise ValueError("rational function powers need an integer exponent")
        if k < 0:
            return self.inverse() ** (-k)
        return RatFn.from_reduced(self.num ** k, self.den ** k)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RatFn) else other
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def diff(self, i):
        dn = partial_derivative(self.num, i)
        if self.is_polynomial():
            return RatFn.from_poly(dn)
        dd = partial_derivative(self.den, i)
        return RatFn(dn * self.den - self.num * dd, self.den * self.den)

    def __repr__(self):
        from tensorquot.parsing import format_ratfn
        return f"RatFn({format_ratfn(self)!r})"

    def to_str(self, names=None):
        from tensorquot.parsing import format_ratfn
        return format_ratfn(self, names)


def _cancel(num, den):
    if den.is_constant() or num.is_constant():
        return num, den
    g = gcd(num, den)
    if g.is_constant():
        return num, den
    return exact_divide(num, g), exact_divide(den, g)


def reduce_with_hints(num, den, hints):
    """Reduce num/den when den is mostly a product of known irreducibles.

    ``hints`` are pairwise non-associate irreducible polynomials.  Their
    powers are stripped from ``den`` and cancelled against ``num`` by trial
    division; only the leftover part of ``den`` goes through a general gcd.
    """
    if num.is_zero():
        return RatFn.from_poly(num)
    rest = den
    cancelled = MPoly.one(den.nvars)
    for h in hints:
        k, rest = strip_factor(rest, h)
        if k:
            j, num = strip_factor(num, h, k)
            if k - j:
                cancelled = cancelled * h ** (k - j)
    if not rest.is_constant():
        g = gcd(num, rest)
        if not g.is_constant():
            num = exact_divide(num, g)
            rest = exact_divide(rest, g)
    return RatFn.from_reduced(num, cancelled * rest)
