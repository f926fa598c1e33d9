"""Text grammar for scalars, polynomials, rational functions and tensor fields.

EBNF (precedence ``^`` > ``* /`` > ``&`` > ``+ -``, left associative except
``^``)::

    expr    = amp { ("+" | "-") amp } ;
    amp     = term { "&" term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ "^" exponent ] ;
    exponent= ("-" | "+") exponent | power ;
    atom    = integer | name | "z" | frame | "(" expr ")" ;
    frame   = ("d" | "D") "(" name ")" ;

``z`` is the root of unity zeta_N for the declared conductor N.  ``d(v)``
and ``D(v)`` denote dv and the vector field d/dv.  ``a ^ k`` with an integer
``k`` is a power; ``a ^ b`` with two tensor operands is the wedge product.
Tensor products may list covariant and contravariant factors in any order;
contravariant slots are stored first.
"""
import re
from fractions import Fraction

from tensorquot.errors import ParseError, TensorQuotError
from tensorquot.scalar import CycScalar, qnorm, zeta

RESERVED = {"z", "d", "D"}

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))?", re.S)


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m.lastindex is None:          # only trailing whitespace is left
            break
        if m.group(1) is not None:
            toks.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^&()":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, text, names, conductor, allow_tensors):
        self.text = text
        self.names = tuple(names)
        self.index = {nm: i for i, nm in enumerate(self.names)}
        for nm in self.names:
            if nm in RESERVED:
                raise ParseError(f"variable name {nm!r} is reserved", text, 0)
        self.conductor = conductor
        self.allow_tensors = allow_tensors
        self.toks = _tokenize(text)
        self.i = 0

    # -- token helpers ----------------------------------------------------
    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            self.fail(f"expected {op!r}", t)
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def at(self, op):
        t = self.peek()
        return t[0] == "op" and t[1] == op

    # -- grammar ------------------------------------------------------------
    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        v = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected trailing input")
        return v

    def expr(self):
        v = self.amp()
        while self.at("+") or self.at("-"):
            tok = self.take()
            w = self.amp()
            v = self.apply(tok, v, w)
        return v

    def amp(self):
        v = self.term()
        while self.at("&"):
            tok = self.take()
            w = self.term()
            v = self.apply(tok, v, w)
        return v

    def term(self):
        v = self.unary()
        while self.at("*") or self.at("/"):
            tok = self.take()
            w = self.unary()
            v = self.apply(tok, v, w)
        return v

    def unary(self):
        if self.at("-"):
            tok = self.take()
            return self.apply(("op", "neg", tok[2]), self.unary(), None)
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.at("^"):
            tok = self.take()
            w = self.exponent()
            v = self.apply(tok, v, w)
        return v

    def exponent(self):
        if self.at("-"):
            tok = self.take()
            return self.apply(("op", "neg", tok[2]), self.exponent(), None)
        if self.at("+"):
            self.take()
            return self.exponent()
        return self.power()

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return self.const(val)
        if kind == "name":
            if val in ("d", "D") and self.at("("):
                if not self.allow_tensors:
                    self.fail("frame symbols are only allowed in tensor expressions", tok)
                self.expect("(")
                nt = self.take()
                if nt[0] != "name" or nt[1] not in self.index:
                    self.fail("expected a coordinate name", nt)
                self.expect(")")
                return self.frame(val, self.index[nt[1]])
            if val == "z":
                return self.const(zeta(self.conductor) if self.conductor > 1 else 1)
            if val not in self.index:
                self.fail(f"unknown variable {val!r}", tok)
            return self.variable(self.index[val])
        if kind == "op" and val == "(":
            v = self.expr()
            self.expect(")")
            return v
        self.fail("expected a number, name or '('", tok)

    # -- semantic actions -------------------------------------------------------
    def const(self, c):
        from tensorquot.polyalg import RatFn
        return RatFn.constant(len(self.names), c)

    def variable(self, i):
        from tensorquot.polyalg import MPoly, RatFn
        return RatFn.from_poly(MPoly.var(len(self.names), i))

    def frame(self, kind, i):
        from tensorquot.tensor import TensorField
        n = len(self.names)
        if kind == "d":
            return TensorField(0, 1, self.names, {((), (i,)): 1})
        return TensorField(1, 0, self.names, {((i,), ()): 1})

    def apply(self, tok, a, b):
        from tensorquot.polyalg import RatFn
        from tensorquot.tensor import TensorField
        op = tok[1]
        try:
            if op == "neg":
                return -a
            ta, tb = isinstance(a, TensorField), isinstance(b, TensorField)
            if op == "+":
                if ta or tb:
                    return _as_tensor(a, self.names) + _as_tensor(b, self.names)
                return a + b
            if op == "-":
                if ta or tb:
                    return _as_tensor(a, self.names) - _as_tensor(b, self.names)
                return a - b
            if op == "*":
                if ta and tb:
                    self.fail("use '&' for the tensor product", tok)
                return a * b
            if op == "/":
                if tb:
                    self.fail("cannot divide by a tensor field", tok)
                if isinstance(b, RatFn) and b.is_zero():
                    self.fail("division by zero", tok)
                return a * b.inverse()
            if op == "&":
                return _as_tensor(a, self.names).tensor(_as_tensor(b, self.names))
            if op == "^":
                if ta and tb:
                    return a.wedge(b)
                if tb:
                    self.fail("a tensor field cannot be an exponent", tok)
                k = _int_value(b)
                if k is None:
                    self.fail("exponent must be an integer", tok)
                if ta:
                    self.fail("tensor powers are not supported; use '&'", tok)
                if k < 0 and a.is_zero():
                    self.fail("division by zero", tok)
                return a ** k
        except ParseError:
            raise
        except (TensorQuotError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), self.text, tok[2]) from exc
        raise AssertionError(op)


def _int_value(v):
    from tensorquot.polyalg import RatFn
    if isinstance(v, RatFn) and v.is_constant():
        c = v.num.constant_value() if v.num else 0
        if isinstance(c, int):
            return c
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
    return None


def _as_tensor(v, names):
    from tensorquot.tensor import TensorField
    if isinstance(v, TensorField):
        return v
    return TensorField(0, 0, names, {((), ()): v} if not v.is_zero() else {})


# -- public parse API ---------------------------------------------------------

def parse_scalar(text, conductor=1):
    v = _Parser(text, (), conductor, False).parse()
    if not v.is_polynomial():
        raise ParseError("not a scalar", text, 0)
    return v.num.constant_value() if v.num else 0


def parse_ratfn(text, names, conductor=1):
    return _Parser(text, names, conductor, False).parse()


def parse_poly(text, names, conductor=1):
    v = parse_ratfn(text, names, conductor)
    if not v.is_polynomial():
        raise ParseError("expected a polynomial", text, 0)
    return v.num


def parse_tensor(text, names, conductor=1):
    v = _Parser(text, names, conductor, True).parse()
    return _as_tensor(v, tuple(names))


# -- printing -------------------------------------------------------------------

def format_rational(c):
    c = qnorm(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


def format_scalar(c):
    """Canonical text of a scalar; cyclotomic values use z = zeta_N."""
    if isinstance(c, CycScalar):
        if c.is_rational():
            return format_rational(c.coeffs[0])
        parts = []
        for i in range(len(c.coeffs) - 1, -1, -1):
            a = c.coeffs[i]
            if not a:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            parts.append(_signed_term(a, mono))
        return _join(parts)
    return format_rational(c)


def _signed_term(a, mono):
    neg = a < 0
    mag = -a if neg else a
    if mono:
        body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
    else:
        body = format_rational(mag)
    return ("-" if neg else "+", body)


def _join(parts):
    if not parts:
        return "0"
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def default_names(n, stem="x"):
    return tuple(f"{stem}{i + 1}" for i in range(n))


def _monomial(e, names):
    fac = []
    for i, k in enumerate(e):
        if k == 1:
            fac.append(names[i])
        elif k:
            fac.append(f"{names[i]}^{k}")
    return "*".join(fac)


def format_poly(p, names=None):
    if names is None:
        names = default_names(p.nvars)
    parts = []
    for e, c in p.sorted_terms():
        mono = _monomial(e, names)
        if isinstance(c, CycScalar):
            s = format_scalar(c)
            parts.append(("+", f"({s})*{mono}" if mono else f"({s})"))
        else:
            parts.append(_signed_term(c, mono))
    return _join(parts)


def _is_atomic_den(p):
    if len(p.terms) != 1:
        return False
    (e, c), = p.terms.items()
    return c == 1 and sum(1 for k in e if k) == 1


def format_ratfn(r, names=None):
    if r.is_polynomial():
        return format_poly(r.num, names)
    num = format_poly(r.num, names)
    if len(r.num.terms) > 1 or isinstance(next(iter(r.num.terms.values())), CycScalar):
        num = f"({num})"
    den = format_poly(r.den, names)
    if not _is_atomic_den(r.den):
        den = f"({den})"
    return f"{num}/{den}"


def format_tensor(t):
    names = t.names
    if not t.terms:
        return "0"
    pieces = []
    for (up, lo) in sorted(t.terms):
        coef = t.terms[(up, lo)]
        frames = [f"D({names[i]})" for i in up] + [f"d({names[j]})" for j in lo]
        fr = " & ".join(frames)
        neg = False
        if coef.is_polynomial() and len(coef.num.terms) == 1:
            (_, c), = coef.num.terms.items()
            if not isinstance(c, CycScalar) and c < 0:
                neg = True
                coef = -coef
        cs = format_ratfn(coef, names)
        if not fr:
            body = cs
        elif coef == 1:
            body = fr
        else:
            multi = len(coef.num.terms) > 1 and coef.is_polynomial()
            if multi or isinstance(next(iter(coef.num.terms.values())), CycScalar) and coef.is_polynomial():
                cs = f"({cs})"
            body = f"{cs} * {fr}"
        pieces.append(("-" if neg else "+", body))
    return _join(pieces)
