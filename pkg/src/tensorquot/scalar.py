"""Exact scalars: rationals and elements of cyclotomic fields Q(zeta_N).

Rationals are plain ``int`` / :class:`fractions.Fraction`.  A
:class:`CycScalar` stores the coefficient vector of an element of Q(zeta_N)
in the power basis ``1, z, ..., z^(phi(N)-1)`` reduced modulo the N-th
cyclotomic polynomial, so two equal elements of the same field have
identical vectors.

Operator arithmetic between scalars of different conductors lifts both to
the lcm conductor.  Results whose value is rational come back as ``int`` or
``Fraction``; this keeps polynomial coefficients canonical.
"""
from fractions import Fraction
from functools import lru_cache
from math import gcd

from tensorquot._kernels import cyc_mulmod
from tensorquot.errors import ConductorError, DivisionByZero, InvalidEmbeddingError

CONDUCTOR_CAP = 360


def set_conductor_cap(cap):
    """Change the largest conductor any operation may produce; returns the old cap."""
    global CONDUCTOR_CAP
    if cap < 1:
        raise ValueError("conductor cap must be positive")
    old, CONDUCTOR_CAP = CONDUCTOR_CAP, int(cap)
    return old


def lcm(a, b):
    return a // gcd(a, b) * b


def qnorm(x):
    """Demote a Fraction with unit denominator to int."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def is_rational(x):
    return isinstance(x, (int, Fraction))


@lru_cache(maxsize=None)
def divisors(n):
    return tuple(d for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def euler_phi(n):
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def mobius(n):
    m, p, sign = n, 2, 1
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            sign = -sign
        p += 1
    if m > 1:
        sign = -sign
    return sign


def _int_poly_divexact(num, den):
    # integer polynomials, low-to-high; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num):
        raise ArithmeticError("inexact cyclotomic division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n):
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        poly = _int_poly_divexact(poly, cyclotomic_poly(d))
    return tuple(poly)


def _check_cap(n):
    if n > CONDUCTOR_CAP:
        raise ConductorError(f"conductor {n} exceeds the cap {CONDUCTOR_CAP}")


def _reduce(n, coeffs):
    """Reduce an arbitrary-length coefficient list modulo Phi_n."""
    phi = cyclotomic_poly(n)
    k = len(phi) - 1
    c = list(coeffs) + [0] * max(0, k - len(coeffs))
    for i in range(len(c) - 1, k - 1, -1):
        t = c[i]
        if t:
            base = i - k
            for j in range(k):
                if phi[j]:
                    c[base + j] -= t * phi[j]
    return tuple(qnorm(Fraction(x)) if type(x) is not int else x for x in c[:k])


@lru_cache(maxsize=None)
def _trace_table(n):
    # Tr_{Q(zeta_n)/Q}(zeta_n^i) = mu(n/g) * phi(n)/phi(n/g), g = gcd(n, i)
    out = []
    for i in range(euler_phi(n)):
        m = n // gcd(n, i)
        out.append(mobius(m) * euler_phi(n) // euler_phi(m))
    return tuple(out)


class CycScalar:
    """Element of Q(zeta_N), canonical modulo Phi_N."""

    __slots__ = ("conductor", "coeffs", "_hash")

    def __init__(self, conductor, coeffs):
        conductor = int(conductor)
        if conductor < 1:
            raise ValueError("conductor must be positive")
        _check_cap(conductor)
        self.conductor = conductor
        self.coeffs = _reduce(conductor, coeffs)
        self._hash = None

    @classmethod
    def _raw(cls, conductor, coeffs):
        obj = object.__new__(cls)
        obj.conductor = conductor
        obj.coeffs = tuple(coeffs)
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, x, conductor=1):
        k = euler_phi(conductor)
        return cls._raw(conductor, (qnorm(Fraction(x)),) + (0,) * (k - 1))

    # -- inspection -------------------------------------------------------
    def is_rational(self):
        return not any(self.coeffs[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.coeffs[0]

    def simplify(self):
        """Return the rational value if there is one, else self."""
        if self.is_rational():
            return self.coeffs[0]
        return self

    def is_zero(self):
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def trace(self):
        """Absolute trace Tr_{Q(zeta_N)/Q}."""
        return qnorm(sum(Fraction(c) * t for c, t in zip(self.coeffs, _trace_table(self.conductor))))

    def to_complex(self):
        import cmath
        z = cmath.exp(2j * cmath.pi / self.conductor)
        return sum(float(c) * z ** i for i, c in enumerate(self.coeffs))

    # -- conversions ------------------------------------------------------
    def embed(self, m):
        return cyc_embed(self, m)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        a, b = _lift(self, other)
        if a is None:
            return NotImplemented
        return _make(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycScalar._raw(self.conductor, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        a, b = _lift(self, other)
        if a is None:
            return NotImplemented
        return _make(a.conductor, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_rational(other):
            if not other:
                return 0
            return _make(self.conductor, [x * other for x in self.coeffs])
        a, b = _lift(self, other)
        if a is None:
            return NotImplemented
        n = a.conductor
        prod = cyc_mulmod(list(a.coeffs), list(b.coeffs), list(cyclotomic_poly(n)))
        return _make(n, prod)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            return CycScalar.rational(1 / Fraction(self.coeffs[0]), self.conductor)
        return CycScalar._raw(self.conductor, _poly_inverse_mod(self.coeffs, cyclotomic_poly(self.conductor)))

    def __truediv__(self, other):
        if is_rational(other):
            if not other:
                raise DivisionByZero("division by zero")
            return _make(self.conductor, [Fraction(x) / other for x in self.coeffs])
        if not isinstance(other, CycScalar):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        base = self
        if k < 0:
            base, k = self.inverse(), -k
        result = CycScalar.rational(1, self.conductor)
        while k:
            if k & 1:
                result = _as_cyc(result * base, self.conductor)
            base = _as_cyc(base * base, self.conductor)
            k >>= 1
        return result.simplify() if isinstance(result, CycScalar) else result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if is_rational(other):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycScalar):
            return NotImplemented
        if self.conductor == other.conductor:
            return self.coeffs == other.coeffs
        a, b = _lift(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coeffs[0])
            else:
                # normalized traces do not depend on the ambient conductor
                k = euler_phi(self.conductor)
                sq = _as_cyc(self * self, self.conductor)
                self._hash = hash(("cyc", Fraction(self.trace()) / k, Fraction(sq.trace()) / k))
        return self._hash

    def __repr__(self):
        from tensorquot.parsing import format_scalar
        return f"CycScalar({self.conductor}, {format_scalar(self)!r})"


def _as_cyc(x, conductor=1):
    if isinstance(x, CycScalar):
        return x
    return CycScalar.rational(x, conductor)


def _make(n, coeffs):
    coeffs = [qnorm(c) if type(c) is Fraction else c for c in coeffs]
    if not any(coeffs[1:]):
        return coeffs[0] if coeffs else 0
    return CycScalar._raw(n, coeffs)


def _lift(a, b):
    if is_rational(b):
        b = CycScalar.rational(b, a.conductor)
    elif not isinstance(b, CycScalar):
        return None, None
    if a.conductor == b.conductor:
        return a, b
    m = lcm(a.conductor, b.conductor)
    _check_cap(m)
    return cyc_embed(a, m), cyc_embed(b, m)


def _poly_inverse_mod(a, mod):
    """Inverse of a(t) modulo the irreducible mod(t) over Q (extended Euclid)."""

    def trim(p):
        p = list(p)
        while p and not p[-1]:
            p.pop()
        return p

    def divmod_poly(u, v):
        u = [Fraction(x) for x in u]
        q = [Fraction(0)] * max(len(u) - len(v) + 1, 1)
        lv = Fraction(v[-1])
        while len(u) >= len(v) and u:
            c = u[-1] / lv
            d = len(u) - len(v)
            q[d] = c
            for i, x in enumerate(v):
                u[d + i] -= c * x
            u = trim(u)
        return trim(q), u

    def sub(u, v):
        n = max(len(u), len(v))
        u = list(u) + [0] * (n - len(u))
        v = list(v) + [0] * (n - len(v))
        return trim([x - y for x, y in zip(u, v)])

    def mul(u, v):
        if not u or not v:
            return []
        out = [0] * (len(u) + len(v) - 1)
        for i, x in enumerate(u):
            for j, y in enumerate(v):
                out[i + j] += x * y
        return trim(out)

    r0, r1 = trim(mod), trim(a)
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
    c = Fraction(r1[0])
    inv = [qnorm(Fraction(x) / c) for x in s1]
    k = len(mod) - 1
    return tuple(_reduce_len(inv, mod, k))


def _reduce_len(coeffs, phi, k):
    c = list(coeffs) + [0] * max(0, k - len(coeffs))
    for i in range(len(c) - 1, k - 1, -1):
        t = c[i]
        if t:
            for j in range(k):
                c[i - k + j] -= t * phi[j]
    return [qnorm(x) if type(x) is Fraction else x for x in c[:k]]


# -- public operations -------------------------------------------------------

def zeta(n, k=1):
    """The root of unity zeta_n^k as a scalar (rational when n <= 2)."""
    n = int(n)
    _check_cap(n)
    k %= n
    c = [0] * (k + 1)
    c[k] = 1
    return CycScalar(n, c).simplify()


def cyc_embed(x, m):
    """Represent x inside Q(zeta_m); requires conductor(x) | m."""
    x = _as_cyc(x)
    m = int(m)
    if m < 1 or m % x.conductor:
        raise InvalidEmbeddingError(f"conductor {x.conductor} does not divide {m}")
    _check_cap(m)
    if m == x.conductor:
        return x
    step = m // x.conductor
    big = [0] * (step * (len(x.coeffs) - 1) + 1)
    for i, c in enumerate(x.coeffs):
        big[i * step] = c
    return CycScalar._raw(m, _reduce(m, big))


def cyc_arith(op, a, b=None):
    """Field arithmetic returning a CycScalar at the lcm conductor."""
    a = _as_cyc(a)
    if op == "inv":
        return a.inverse()
    b = _as_cyc(b)
    m = lcm(a.conductor, b.conductor)
    if op == "add":
        r = a + b
    elif op == "sub":
        r = a - b
    elif op == "mul":
        r = a * b
    else:
        raise ValueError(f"unknown operation {op!r}")
    return cyc_embed(_as_cyc(r), m) if isinstance(r, CycScalar) else CycScalar.rational(r, m)


def root_of_unity_order(a):
    """Least r >= 1 with a^r = 1, or None if a is not a root of unity."""
    if is_rational(a):
        if a == 1:
            return 1
        if a == -1:
            return 2
        return None
    if isinstance(a, CycScalar) and a.is_rational():
        return root_of_unity_order(a.coeffs[0])
    bound = lcm(2, a.conductor)
    p = a
    for r in range(1, bound + 1):
        if p == 1:
            return r
        p = p * a
    return None


def conductor_of(x):
    return x.conductor if isinstance(x, CycScalar) else 1


def scalar_div(a, b):
    """a / b for any scalars, keeping rationals exact."""
    if is_rational(a) and is_rational(b):
        if not b:
            raise DivisionByZero("division by zero")
        if type(a) is int and type(b) is int and a % b == 0:
            return a // b
        return qnorm(Fraction(a) / b)
    if is_rational(b):
        return a / b
    return _as_cyc(a) / b


def scalar_inv(a):
    return scalar_div(1, a)
