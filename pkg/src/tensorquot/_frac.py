"""Rational functions kept in partially factored form.

A value is ``coef * num * prod(f ** e for f, e in exps)`` where the factors
are polynomials believed to be irreducible or at least known in advance
(mirror forms, divisor components, leftover denominators).  Sums keep the
common factor powers outside, so valuations along a known component never
need a gcd, and conversion back to a reduced RatFn only needs trial
division plus a gcd on whatever is not a known irreducible.

Over the rationals ``num`` is kept with integer coefficients and the
content lives in ``coef``, so the heavy products and sums run on ints.
"""
from fractions import Fraction
from math import gcd as igcd

from tensorquot.polyalg import MPoly, RatFn, gcd, exact_divide, multiplicity_in, strip_factor
from tensorquot.scalar import scalar_div


def _is_rational(c):
    return type(c) is int or type(c) is Fraction


class Frac:
    __slots__ = ("num", "exps", "coef")

    def __init__(self, num, exps=None, coef=1):
        ip = num._int_part()
        if ip and ip[0] != 1:
            num = MPoly._from(num.nvars, ip[1])
            coef = coef * ip[0]
        self.num = num
        self.coef = coef
        self.exps = {f: e for f, e in (exps or {}).items() if e}

    @classmethod
    def from_ratfn(cls, h, hints=()):
        """Split hint factors out of a reduced RatFn."""
        num, den = h.num, h.den
        exps = {}
        for f in hints:
            if not num.is_constant():
                k, num = strip_factor(num, f)
                if k:
                    exps[f] = k
            if not den.is_constant():
                k, den = strip_factor(den, f)
                if k:
                    exps[f] = exps.get(f, 0) - k
        coef = 1
        if not den.is_constant():
            exps[den] = exps.get(den, 0) - 1
        elif den.constant_value() != 1:
            coef = scalar_div(1, den.constant_value())
        return cls(num, exps, coef)

    def is_zero(self):
        return self.num.is_zero() or not self.coef

    def scale(self, c):
        return Frac(self.num, self.exps, self.coef * c)

    def mul_poly(self, p):
        return Frac(self.num * p, self.exps, self.coef)

    def mul_factor(self, f, e):
        exps = dict(self.exps)
        exps[f] = exps.get(f, 0) + e
        return Frac(self.num, exps, self.coef)

    def __mul__(self, other):
        exps = dict(self.exps)
        for f, e in other.exps.items():
            exps[f] = exps.get(f, 0) + e
        return Frac(self.num * other.num, exps, self.coef * other.coef)

    def __add__(self, other):
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        keys = set(self.exps) | set(other.exps)
        common = {}
        a, b = self.num, other.num
        for f in keys:
            e1, e2 = self.exps.get(f, 0), other.exps.get(f, 0)
            e = min(e1, e2)
            common[f] = e
            if e1 > e:
                a = a * f ** (e1 - e)
            if e2 > e:
                b = b * f ** (e2 - e)
        ca, cb = self.coef, other.coef
        ia, ib = a._int_part(), b._int_part()
        if ca == cb and ia and ib and ia[0] == ib[0] == 1:
            return Frac(a + b, common, ca)
        if _is_rational(ca) and _is_rational(cb) and ia and ib:
            ca, cb = Fraction(ca) * ia[0], Fraction(cb) * ib[0]
            a, b = MPoly._from(a.nvars, ia[1]), MPoly._from(b.nvars, ib[1])
            da, db = ca.denominator, cb.denominator
            L = da * db // igcd(da, db)
            total = a.scale(ca.numerator * (L // da)) + b.scale(cb.numerator * (L // db))
            g = 0
            for c in total.terms.values():
                g = igcd(g, c)
                if g == 1:
                    break
            if g > 1:
                total = MPoly._from(total.nvars, {e: c // g for e, c in total.terms.items()})
            return Frac(total, common, Fraction(g, L) if g else 0)
        return Frac(a.scale(ca) + b.scale(cb), common)

    def valuation(self, delta, cache=None):
        """Order along delta = 0 (delta irreducible); num must be nonzero."""
        v = multiplicity_in(self.num, delta)
        for f, e in self.exps.items():
            if f == delta:
                v += e
                continue
            if cache is not None and f in cache:
                m = cache[f]
            else:
                m = multiplicity_in(f, delta)
                if cache is not None:
                    cache[f] = m
            v += e * m
        return v

    def to_ratfn(self, hints=()):
        """Reduced RatFn; factors listed in ``hints`` must be irreducible."""
        num = self.num
        nv = num.nvars
        if self.is_zero():
            return RatFn.from_poly(MPoly.zero(nv))
        hintset = set(hints)
        den_h = MPoly.one(nv)
        rest = MPoly.one(nv)
        for f, e in self.exps.items():
            if e > 0:
                num = num * f ** e
        for f, e in self.exps.items():
            if e >= 0:
                continue
            e = -e
            if f in hintset:
                j, num = strip_factor(num, f, e)
                if e - j:
                    den_h = den_h * f ** (e - j)
            else:
                rest = rest * f ** e
        if not rest.is_constant():
            g = gcd(num, rest)
            if not g.is_constant():
                num = exact_divide(num, g)
                rest = exact_divide(rest, g)
        if self.coef != 1:
            num = num.scale(self.coef)
        return RatFn.from_reduced(num, den_h * rest)
