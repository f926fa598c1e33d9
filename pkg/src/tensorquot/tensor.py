"""Rational tensor fields in explicit coordinates.

A field of type (p, q) is stored as a sparse map from multi-indices
``(upper, lower)`` to nonzero RatFn coefficients: ``upper`` lists the
vector-field slots d/dy_i and ``lower`` the covector slots dy_j, with all
contravariant slots first.  Coefficients are functions of the base
variables ``names``.  By default the frame is the coordinate frame of those
variables; ``frame`` may instead hold polynomials g_1..g_n in the base
variables, in which case the slots refer to dg_k and the dual fields
d/dg_k (used for adapted charts).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import factorial

from tensorquot import linalg
from tensorquot._frac import Frac
from tensorquot.errors import (
    ArityError,
    ChartError,
    InvalidDivisorError,
    NotInvariantError,
    NotSymmetricError,
    SingularChartError,
    SingularComponentError,
    ZeroTensorError,
)
from tensorquot.polyalg import (
    MPoly,
    RatFn,
    factor_multiplicity,
    jacobian,
    linear_substitute,
    partial_derivative,
    strip_factor,
    substitute,
    substitute_poly,
)
from tensorquot.scalar import CycScalar, is_rational, scalar_div


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class TensorField:
    """A rational tensor field of type (p, q); zero coefficients are dropped."""

    __slots__ = ("p", "q", "names", "frame", "terms")

    def __init__(self, p, q, names, terms=None, frame=None):
        self.p, self.q = p, q
        self.names = tuple(names)
        n = len(self.names)
        if frame is not None:
            frame = tuple(frame)
            if len(frame) != n:
                raise ArityError("a frame needs one polynomial per coordinate")
            if all(g == MPoly.var(n, i) for i, g in enumerate(frame)):
                frame = None
        self.frame = frame
        clean = {}
        for (up, lo), c in (terms or {}).items():
            up, lo = tuple(up), tuple(lo)
            if len(up) != p or len(lo) != q:
                raise ArityError(f"multi-index {(up, lo)} does not fit type ({p},{q})")
            if any(not 0 <= i < n for i in up + lo):
                raise ArityError(f"index out of range in {(up, lo)}")
            c = _as_ratfn(c, n)
            if not c.is_zero():
                clean[(up, lo)] = c
        self.terms = clean

    # -- basics ------------------------------------------------------------------
    @property
    def nvars(self):
        return len(self.names)

    @property
    def valency(self):
        return self.p + self.q

    def chart_id(self):
        return (self.names, self.frame)

    def is_zero(self):
        return not self.terms

    def _same_chart(self, other):
        if self.chart_id() != other.chart_id():
            raise ChartError("tensor fields live on different charts")

    def _same_type(self, other):
        self._same_chart(other)
        if (self.p, self.q) != (other.p, other.q):
            raise ArityError(f"type ({self.p},{self.q}) vs ({other.p},{other.q})")

    def _new(self, terms, p=None, q=None):
        out = TensorField.__new__(TensorField)
        out.p = self.p if p is None else p
        out.q = self.q if q is None else q
        out.names, out.frame = self.names, self.frame
        out.terms = {k: v for k, v in terms.items() if not v.is_zero()}
        return out

    def coefficient(self, up, lo):
        return self.terms.get((tuple(up), tuple(lo)), RatFn.from_poly(MPoly.zero(self.nvars)))

    def __add__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        self._same_type(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return self._new(terms)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, TensorField):
            return NotImplemented
        c = _as_ratfn(c, self.nvars)
        return self._new({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return (self.chart_id() == other.chart_id() and (self.p, self.q) == (other.p, other.q)
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.p, self.q, self.names, frozenset(self.terms.items())))

    def tensor(self, other):
        self._same_chart(other)
        terms = {}
        for (ua, la), ca in self.terms.items():
            for (ub, lb), cb in other.terms.items():
                k = (ua + ub, la + lb)
                v = ca * cb
                terms[k] = terms[k] + v if k in terms else v
        return self._new(terms, self.p + other.p, self.q + other.q)

    def wedge(self, other):
        """Exterior product of the covariant parts (determinant convention).

        For skew inputs of degrees k and l this is
        (1/(k! l!)) * sum over sigma in S_{k+l} of sign(sigma) (a (x) b)^sigma,
        so dx ^ dy = dx (x) dy - dy (x) dx.
        """
        t = self.tensor(other)
        k, m = self.q, self.q + other.q
        norm = Fraction(1, factorial(k) * factorial(m - k))
        return t.antisymmetrize(scale=norm)

    def antisymmetrize(self, scale=1):
        """sum over permutations of the covariant slots with signs, times scale."""
        m = self.q
        perms = [(pm, _perm_sign(pm)) for pm in permutations(range(m))]
        terms = {}
        for (up, lo), c in self.terms.items():
            for pm, s in perms:
                k = (up, tuple(lo[pm[i]] for i in range(m)))
                v = c * (s * scale)
                terms[k] = terms[k] + v if k in terms else v
        return self._new(terms)

    def permute_lower(self, perm):
        m = self.q
        return self._new({(up, tuple(lo[perm[i]] for i in range(m))): c for (up, lo), c in self.terms.items()})

    def is_antisymmetric(self):
        """Skew in the covariant slots."""
        m = self.q
        for i in range(m - 1):
            perm = list(range(m))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            if self.permute_lower(perm) != -self:
                return False
        return True

    def is_symmetric_in(self, blocks):
        """Symmetric within consecutive blocks of covariant slots."""
        start = 0
        for size in blocks:
            for i in range(start, start + size - 1):
                perm = list(range(self.q))
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                if self.permute_lower(perm) != self:
                    return False
            start += size
        return True

    def is_regular(self):
        return is_regular(self)

    def __repr__(self):
        from tensorquot.parsing import format_tensor
        return f"TensorField({self.p}, {self.q}, {format_tensor(self)!r})"

    def to_str(self):
        from tensorquot.parsing import format_tensor
        return format_tensor(self)


def _as_ratfn(c, n):
    if isinstance(c, RatFn):
        if c.nvars != n:
            raise ArityError("coefficient lives in a different ring")
        return c
    if isinstance(c, MPoly):
        if c.nvars != n:
            raise ArityError("coefficient lives in a different ring")
        return RatFn.from_poly(c)
    if is_rational(c) or isinstance(c, CycScalar):
        return RatFn.constant(n, c)
    raise TypeError(f"cannot use {type(c).__name__} as a coefficient")


def zero_field(p, q, names, frame=None):
    return TensorField(p, q, names, {}, frame)


def coordinate_field(up, lo, names, coef=1):
    up, lo = tuple(up), tuple(lo)
    return TensorField(len(up), len(lo), names, {(up, lo): coef})


def is_regular(tau):
    """Every reduced coefficient has a constant denominator."""
    return all(c.is_polynomial() for c in tau.terms.values())


def tensor_product(a, b):
    return a.tensor(b)


# -- frame transport ------------------------------------------------------------

def _expand(terms, up_rows, lo_rows, p, q, make):
    """Distribute slot substitutions over all terms.

    ``up_rows[i]`` / ``lo_rows[j]`` list (new index, factor) pairs for old
    index i/j; ``make(coef, factors, p)`` combines a coefficient with the
    chosen factors.  Returns new-index -> accumulated value.
    """
    out = {}
    for (up, lo), c in terms.items():
        slots = [up_rows[i] for i in up] + [lo_rows[j] for j in lo]
        for choice in product(*slots):
            idx = tuple(k for k, _ in choice)
            key = (idx[:p], idx[p:])
            v = make(c, [f for _, f in choice])
            if key in out:
                out[key] = out[key] + v
            else:
                out[key] = v
    return out


def pullback_linear(tau, matrix):
    """Pull back along x -> M x (M an invertible scalar matrix)."""
    n = tau.nvars
    inv = linalg.scalar_inverse(matrix)
    lo_rows = [[(k, matrix[j][k]) for k in range(n) if matrix[j][k]] for j in range(n)]
    up_rows = [[(k, inv[k][i]) for k in range(n) if inv[k][i]] for i in range(n)]
    coef_cache = {}

    def moved(c):
        if c not in coef_cache:
            if c.is_constant():
                coef_cache[c] = c
            else:
                coef_cache[c] = RatFn.from_reduced(linear_substitute(c.num, matrix),
                                                   linear_substitute(c.den, matrix))
        return coef_cache[c]

    def make(c, factors):
        s = 1
        for f in factors:
            s = s * f
        return moved(c) * s

    if tau.frame is not None:
        raise ChartError("linear pull-back expects the coordinate frame")
    terms = _expand(tau.terms, up_rows, lo_rows, tau.p, tau.q, make)
    return tau._new(terms)


def act(g, tau):
    """Action of a group element: (g.tau) = (g^{-1})^* tau."""
    return pullback_linear(tau, linalg.scalar_inverse(g.matrix))


def is_invariant(G, tau):
    return all(pullback_linear(tau, g.matrix) == tau for g in G.generators)


def tensor_reynolds(G, tau):
    acc = zero_field(tau.p, tau.q, tau.names)
    for g in G.elements:
        acc = acc + pullback_linear(tau, g.matrix)
    return acc * Fraction(1, G.order)


def pullback_along(tau, images, target_names):
    """Pull back along the polynomial map y_i = images[i](x).

    Covector slots use the chain rule; vector slots need the map to be
    square with a nonzero Jacobian determinant.
    """
    if tau.frame is not None:
        raise ChartError("pull-back expects the coordinate frame")
    m = tau.nvars
    n = len(target_names)
    if len(images) != m:
        raise ArityError(f"{len(images)} images for {m} coordinates")
    J = jacobian(list(images), n)
    lo_rows = [[(k, RatFn.from_poly(J[j][k])) for k in range(n) if not J[j][k].is_zero()] for j in range(m)]
    up_rows = []
    if tau.p:
        if m != n:
            raise ArityError("vector fields pull back only along square maps")
        det = linalg.poly_det(J, n)
        if det.is_zero():
            raise SingularChartError("the map has a vanishing Jacobian determinant")
        adj = linalg.poly_adjugate(J, n)
        up_rows = [[(k, RatFn(adj[k][i], det)) for k in range(n) if not adj[k][i].is_zero()] for i in range(m)]
    else:
        up_rows = [[] for _ in range(m)]
    cache = {}

    def moved(c):
        if c not in cache:
            cache[c] = RatFn(substitute(c.num, list(images)).num, substitute(c.den, list(images)).num)
        return cache[c]

    def make(c, factors):
        v = moved(c)
        for f in factors:
            v = v * f
        return v

    terms = _expand(tau.terms, up_rows, lo_rows, tau.p, tau.q, make)
    return TensorField(tau.p, tau.q, target_names, terms)


# -- quotient map ----------------------------------------------------------------

def _f_side_check(chart, tau):
    if tau.names != chart.f_names or tau.frame is not None:
        raise ChartError("field does not live on the quotient chart")


def _x_side_check(chart, tau):
    if tau.names != chart.x_names or tau.frame is not None:
        raise ChartError("field does not live on the covering space chart")


def _delta_split(chart, poly):
    """poly = prod delta_l^k_l * rest with rest free of every delta_l."""
    ks = []
    for d in chart.deltas:
        if poly.is_constant():
            ks.append(0)
            continue
        k, poly = strip_factor(poly, d)
        ks.append(k)
    return ks, poly


def _compose_frac(chart, c, comp_cache):
    """c(f) for an f-side RatFn c, as a Frac over the mirror forms."""
    if c in comp_cache:
        return comp_cache[c]
    kn, n0 = _delta_split(chart, c.num)
    kd, d0 = _delta_split(chart, c.den)
    num = substitute_poly(n0, chart.invariants)
    exps = {}
    scale = 1
    for l, comp in enumerate(chart.divisor.components):
        k = kn[l] - kd[l]
        if k:
            scale = scale * comp.scale ** k if k > 0 else scale * scalar_div(1, comp.scale ** (-k))
            for h in comp.hyperplanes:
                a = chart.alphas[h]
                exps[a] = exps.get(a, 0) + k * comp.multiplicity
    if not d0.is_constant():
        dx = substitute_poly(d0, chart.invariants)
        exps[dx] = exps.get(dx, 0) - 1
    fr = Frac(num, exps, scale)
    comp_cache[c] = fr
    return fr


def pullback(chart, tau):
    """pi^* tau for an f-side field tau.

    df_i pulls back to sum_j (df_i/dx_j) dx_j and d/df_i to
    sum_j (J^{-1})_{ji} d/dx_j; coefficients are composed with f.
    Mirror factors are tracked symbolically, so reduction never needs a
    gcd unless a coefficient has poles off the reflection divisor.
    """
    _f_side_check(chart, tau)
    n = chart.dim
    J = chart.jacobian
    adj = chart.adjugate()
    inv_jscale = scalar_div(1, chart.jac_scale)
    det_exps = {}
    for a, r in zip(chart.alphas, chart.alpha_orders):
        if r > 1:
            det_exps[a] = -(r - 1)
    lo_rows = [[(k, J[j][k]) for k in range(n) if not J[j][k].is_zero()] for j in range(n)]
    up_rows = [[(k, adj[k][i]) for k in range(n) if not adj[k][i].is_zero()] for i in range(n)]
    comp_cache = {}
    out = {}
    for (up, lo), c in tau.terms.items():
        base = _compose_frac(chart, c, comp_cache)
        if up:
            exps = dict(base.exps)
            for a, e in det_exps.items():
                exps[a] = exps.get(a, 0) + e * len(up)
            base = Frac(base.num, exps, base.coef * inv_jscale ** len(up))
        slots = [up_rows[i] for i in up] + [lo_rows[j] for j in lo]
        for choice in product(*slots):
            idx = tuple(k for k, _ in choice)
            key = (idx[:tau.p], idx[tau.p:])
            num = base.num
            for _, f in choice:
                num = num * f
            v = Frac(num, base.exps, base.coef)
            out[key] = out[key] + v if key in out else v
    terms = {k: v.to_ratfn(chart.alphas) for k, v in out.items() if not v.is_zero()}
    return TensorField(tau.p, tau.q, chart.x_names, terms)


def pullback_generic(chart, tau):
    """Reference pull-back through plain substitution and gcd reduction."""
    _f_side_check(chart, tau)
    return pullback_along(tau, chart.invariants, chart.x_names)


def pushforward(chart, phi, check=True):
    """The unique f-side field whose pull-back is phi (phi G-invariant)."""
    from tensorquot.quotient import rewrite_in_invariants
    _x_side_check(chart, phi)
    if check and not is_invariant(chart.group, phi):
        raise NotInvariantError("the field is not invariant under the group")
    n = chart.dim
    J = chart.jacobian
    adj = chart.adjugate()
    inv_jscale = scalar_div(1, chart.jac_scale)
    det_exps = {a: -(r - 1) for a, r in zip(chart.alphas, chart.alpha_orders) if r > 1}
    # dx_k = sum_j adj[k][j]/det df_j ;  d/dx_k = sum_i J[i][k] d/df_i
    lo_rows = [[(j, adj[k][j]) for j in range(n) if not adj[k][j].is_zero()] for k in range(n)]
    up_rows = [[(i, J[i][k]) for i in range(n) if not J[i][k].is_zero()] for k in range(n)]
    out = {}
    for (up, lo), c in phi.terms.items():
        base = Frac.from_ratfn(c, chart.alphas)
        if lo:
            exps = dict(base.exps)
            for a, e in det_exps.items():
                exps[a] = exps.get(a, 0) + e * len(lo)
            base = Frac(base.num, exps, base.coef * inv_jscale ** len(lo))
        slots = [up_rows[i] for i in up] + [lo_rows[j] for j in lo]
        for choice in product(*slots):
            idx = tuple(k for k, _ in choice)
            key = (idx[:phi.p], idx[phi.p:])
            num = base.num
            for _, f in choice:
                num = num * f
            v = Frac(num, base.exps, base.coef)
            out[key] = out[key] + v if key in out else v
    terms = {}
    for key, v in out.items():
        if v.is_zero():
            continue
        h = v.to_ratfn(chart.alphas)
        terms[key] = rewrite_in_invariants(chart, h, check=check)
    return TensorField(phi.p, phi.q, chart.f_names, terms)


# -- frames -------------------------------------------------------------------------

def _frame_polys(tau):
    n = tau.nvars
    return list(tau.frame) if tau.frame is not None else [MPoly.var(n, i) for i in range(n)]


def _frame_change_fracs(tau, new_coords, hints=()):
    """Coefficients of tau in the frame of new_coords, as Frac values."""
    n = tau.nvars
    new_coords = list(new_coords)
    if len(new_coords) != n or any(g.nvars != n for g in new_coords):
        raise ArityError("need one new coordinate per variable, in the same ring")
    old = _frame_polys(tau)
    J_new = jacobian(new_coords, n)
    det_new = linalg.poly_det(J_new, n)
    if det_new.is_zero():
        raise SingularChartError("new coordinates have a vanishing Jacobian determinant")
    adj_new = linalg.poly_adjugate(J_new, n)
    identity_old = tau.frame is None
    if identity_old:
        A = adj_new
        B = J_new
        det_old = MPoly.one(n)
    else:
        J_old = jacobian(old, n)
        det_old = linalg.poly_det(J_old, n)
        A = _mat_mul_poly(J_old, adj_new)
        B = _mat_mul_poly(J_new, linalg.poly_adjugate(J_old, n))
    # d(old_i) = sum_j A[i][j]/det_new d(new_j); d/d(old_i) = sum_k B[k][i]/det_old d/d(new_k)
    lo_rows = [[(j, A[i][j]) for j in range(n) if not A[i][j].is_zero()] for i in range(n)]
    up_rows = [[(k, B[k][i]) for k in range(n) if not B[k][i].is_zero()] for i in range(n)]
    dn = _unit_split(det_new)
    do = _unit_split(det_old)
    out = {}
    for (up, lo), c in tau.terms.items():
        base = Frac.from_ratfn(c, hints)
        exps = dict(base.exps)
        scale = 1
        if lo and dn[1] is not None:
            exps[dn[1]] = exps.get(dn[1], 0) - len(lo)
        if lo:
            scale = scale * scalar_div(1, dn[0]) ** len(lo)
        if up and do[1] is not None:
            exps[do[1]] = exps.get(do[1], 0) - len(up)
        if up:
            scale = scale * scalar_div(1, do[0]) ** len(up)
        base = Frac(base.num, exps, base.coef * scale)
        slots = [up_rows[i] for i in up] + [lo_rows[j] for j in lo]
        for choice in product(*slots):
            idx = tuple(k for k, _ in choice)
            key = (idx[:tau.p], idx[tau.p:])
            num = base.num
            for _, f in choice:
                num = num * f
            v = Frac(num, base.exps, base.coef)
            out[key] = out[key] + v if key in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _unit_split(det):
    """(scalar, monic non-constant part or None)."""
    if det.is_constant():
        return det.constant_value(), None
    lc = det.lc()
    return lc, det.scale(scalar_div(1, lc)) if lc != 1 else det


def _mat_mul_poly(a, b):
    n = len(a)
    nv = a[0][0].nvars
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = MPoly.zero(nv)
            for k in range(n):
                if not a[i][k].is_zero() and not b[k][j].is_zero():
                    s = s + a[i][k] * b[k][j]
            row.append(s)
        out.append(row)
    return out


def frame_change(tau, new_coords, hints=()):
    """Re-express tau in the frame (d g_k, d/d g_k) of new coordinates g."""
    fr = _frame_change_fracs(tau, new_coords, hints)
    terms = {k: v.to_ratfn(hints) for k, v in fr.items()}
    return TensorField(tau.p, tau.q, tau.names, terms, frame=list(new_coords))


# -- divisors -----------------------------------------------------------------------

@dataclass
class WeilDivisorRel:
    """A divisor relative to declared components, plus a residual flag."""
    entries: list                      # (component, multiplicity), nonzero only
    residual_regular: bool
    multiplicities: dict = field(default_factory=dict)   # component -> value, zeros kept

    def multiplicity(self, component):
        return self.multiplicities.get(component, 0)

    def is_effective(self):
        return self.residual_regular and all(m >= 0 for m in self.multiplicities.values())


def _residual_regular(tau, components):
    for c in tau.terms.values():
        den = c.den
        for d in components:
            if den.is_constant():
                break
            _, den = strip_factor(den, d)
        if not den.is_constant():
            return False
    return True


def divisor_of_tensor(tau, components):
    if tau.is_zero():
        raise ZeroTensorError("the zero field has no divisor")
    comps = list(components)
    mult = {}
    for d in comps:
        mult[d] = min(factor_multiplicity(c, d) for c in tau.terms.values())
    entries = [(d, m) for d, m in mult.items() if m]
    return WeilDivisorRel(entries, _residual_regular(tau, comps), mult)


def admissible_indices(delta):
    """Indices j with d(delta)/d(f_j) not divisible by delta."""
    from tensorquot.polyalg import exact_divide
    out = []
    for j in range(delta.nvars):
        d = partial_derivative(delta, j)
        if d.is_zero():
            continue
        if d.degree() < delta.degree() or exact_divide(d, delta) is None:
            out.append(j)
    return out


def adapted_coordinates(delta, index):
    """Coordinates with f_index removed and delta appended last."""
    n = delta.nvars
    return [MPoly.var(n, i) for i in range(n) if i != index] + [delta]


def rho(tau, delta, b, index=None, hints=()):
    """min over terms of (b-1)(q'-p') + b*m in an adapted chart for delta."""
    if b < 1:
        raise InvalidDivisorError("B-divisor multiplicities must be at least 1")
    if tau.is_zero():
        raise ZeroTensorError("the zero field has no B-divisor")
    choices = admissible_indices(delta)
    if not choices:
        raise SingularComponentError("every partial derivative of the component is divisible by it")
    if index is None:
        index = choices[0]
    elif index not in choices:
        raise ChartError(f"coordinate {index} is not admissible for this component")
    n = tau.nvars
    hints = list(hints) if hints else [delta]
    if delta not in hints:
        hints = [delta] + hints
    fr = _frame_change_fracs(tau, adapted_coordinates(delta, index), hints)
    last = n - 1
    best = None
    cache = {}
    for (up, lo), v in fr.items():
        pp = sum(1 for i in up if i == last)
        qq = sum(1 for j in lo if j == last)
        m = v.valuation(delta, cache)
        mu = (b - 1) * (qq - pp) + b * m
        if best is None or mu < best:
            best = mu
    return best


def b_divisor(tau, B, extra_components=(), adapted_index=None, hints=()):
    """Divisor with multiplicities along the components of B replaced by rho.

    ``B`` lists (delta_l, b_l); ``adapted_index`` optionally maps a
    component position to the coordinate replaced in its adapted chart.
    """
    if tau.is_zero():
        raise ZeroTensorError("the zero field has no B-divisor")
    B = list(B)
    for _, b in B:
        if b < 1:
            raise InvalidDivisorError("B-divisor multiplicities must be at least 1")
    all_hints = list(hints) + [d for d, _ in B if d not in hints]
    mult = {}
    for pos, (d, b) in enumerate(B):
        idx = adapted_index.get(pos) if isinstance(adapted_index, dict) else adapted_index
        mult[d] = rho(tau, d, b, idx, all_hints)
    extra = list(extra_components)
    for d in extra:
        mult[d] = min(factor_multiplicity(c, d) for c in tau.terms.values())
    comps = [d for d, _ in B] + extra
    entries = [(d, m) for d, m in mult.items() if m]
    return WeilDivisorRel(entries, _residual_regular(tau, comps), mult)


# -- multi-symmetric fields -----------------------------------------------------------

def multisym_names(names, blocks):
    out = list(names)
    for k in range(len(blocks)):
        out += [f"w{k + 1}_{nm}" for nm in names]
    return tuple(out)


def multisym_to_function(sigma, blocks=None):
    """sigma(a)(w_1, ..., w_d) as a function of n(d+1) variables.

    ``blocks`` gives the sizes q_1..q_d of the covariant slot blocks; the
    field must be symmetric within each block.
    """
    if sigma.p:
        raise NotSymmetricError("multi-symmetric fields are covariant")
    if blocks is None:
        blocks = [sigma.q]
    blocks = list(blocks)
    if sum(blocks) != sigma.q:
        raise ArityError("block sizes must add up to the covariant valency")
    if not sigma.is_symmetric_in(blocks):
        raise NotSymmetricError("field is not symmetric within its blocks")
    n = sigma.nvars
    d = len(blocks)
    total = n * (d + 1)
    slot_block = []
    for k, size in enumerate(blocks):
        slot_block += [k] * size
    acc = RatFn.from_poly(MPoly.zero(total))
    for (_, lo), c in sigma.terms.items():
        e = [0] * total
        for s, j in enumerate(lo):
            e[n + slot_block[s] * n + j] += 1
        mono = MPoly.monomial(tuple(e))
        coef = RatFn.from_reduced(c.num.extend(total), c.den.extend(total))
        acc = acc + coef * mono
    return acc


def symmetric_power(forms, names):
    """Symmetric product of covector fields with the (1/k!) sum convention."""
    k = len(forms)
    t = forms[0]
    for f in forms[1:]:
        t = t.tensor(f)
    out = zero_field(t.p, t.q, names)
    for pm in permutations(range(k)):
        out = out + t.permute_lower(list(pm))
    return out * Fraction(1, factorial(k))
