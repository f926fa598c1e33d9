"""Quotient charts for reflection groups.

A chart is a list of homogeneous basic invariants f_1..f_n.  Besides the
Jacobian it keeps the factorization data used by the fast paths elsewhere:
the mirror forms alpha_H with their stabilizer orders r_H, the constant c_J
with det J = c_J * prod alpha_H^(r_H - 1), and for each divisor component
delta_l the constant c_l with delta_l(f) = c_l * prod_{H in orbit} alpha_H^r_l.
"""
import json
import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from tensorquot import linalg
from tensorquot.errors import (
    IncompleteGeneratorsError,
    InternalIncompletenessError,
    NotInvariantError,
    UnsupportedQuotientError,
)
from tensorquot.grouprep import (
    DEFAULT_MAX_ORDER,
    FiniteMatrixGroup,
    builtin_group,
    f_names,
    group_from_spec,
    is_reflection_group,
    parse_family,
    reflection_components,
    x_names,
)
from tensorquot.polyalg import (
    MPoly,
    RatFn,
    gcd,
    jacobian,
    linear_substitute,
    partial_derivative,
    strip_factor,
    substitute_poly,
)
from tensorquot.scalar import scalar_div


@dataclass
class DivisorComponent:
    delta: MPoly          # in the f-variables, monic
    multiplicity: int     # r_l
    witness: MPoly        # prod over the orbit of alpha_H^r_l, in the x-variables
    hyperplanes: list     # indices into QuotientChart.alphas
    scale: object         # delta(f) = scale * witness


@dataclass
class ReflectionDivisor:
    components: list

    def is_empty(self):
        return not self.components

    def as_pairs(self):
        return [(c.delta, c.multiplicity) for c in self.components]


@dataclass
class QuotientChart:
    group: FiniteMatrixGroup
    invariants: list
    degrees: list
    jacobian: list
    jac_det: MPoly
    x_names: tuple
    f_names: tuple
    alphas: list = field(default_factory=list)        # mirror forms
    alpha_orders: list = field(default_factory=list)  # r_H
    jac_scale: object = 1                             # c_J
    divisor: ReflectionDivisor = None
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return len(self.invariants)

    def powers(self):
        """Cache of products f^a in the x-variables, keyed by exponent tuple."""
        return self._cache.setdefault("powers", {})

    def adjugate(self):
        if "adj" not in self._cache:
            self._cache["adj"] = linalg.poly_adjugate(self.jacobian, self.dim)
        return self._cache["adj"]

    @property
    def deltas(self):
        return [c.delta for c in self.divisor.components]

    def chart_id(self):
        return (self.label, self.f_names)


# -- construction --------------------------------------------------------------

def _elementary(polys):
    """Elementary symmetric polynomials e_1..e_k of the given polynomials."""
    n = len(polys)
    nv = polys[0].nvars
    e = [MPoly.one(nv)] + [MPoly.zero(nv)] * n
    for p in polys:
        for k in range(n, 0, -1):
            e[k] = e[k] + e[k - 1] * p
    return e[1:]


def _family_invariants(fam):
    k, a = fam.kind, fam.args
    if k == "cyclic":
        return [MPoly.var(1, 0) ** a[0]]
    if k == "trivial":
        return [MPoly.var(a[0], i) for i in range(a[0])]
    if k == "symmetric":
        n = a[0]
        return _elementary([MPoly.var(n, i) for i in range(n)])
    if k == "wreath":
        m, n = a[0], a[-1]
        return _elementary([MPoly.var(n, i) ** m for i in range(n)])
    fa, fb = _family_invariants(a[0]), _family_invariants(a[1])
    na, nb = a[0].dim(), a[1].dim()
    return [p.extend(na + nb, 0) for p in fa] + [p.extend(na + nb, na) for p in fb]


def builtin_chart(family, max_order=DEFAULT_MAX_ORDER):
    fam = parse_family(family) if isinstance(family, str) else family
    G = builtin_group(fam, max_order)
    chart = verify_chart(G, _family_invariants(fam))
    chart.label = str(fam)
    return chart


def verify_chart(G, invariants):
    """Check that homogeneous invariants form a polynomial chart of V/G."""
    if not is_reflection_group(G):
        raise UnsupportedQuotientError("the group is not generated by pseudo-reflections")
    n = G.dim
    f = list(invariants)
    if len(f) != n:
        raise IncompleteGeneratorsError(f"need {n} invariants, got {len(f)}")
    for p in f:
        if p.nvars != n:
            raise IncompleteGeneratorsError("invariants must be polynomials in the group's variables")
        if p.is_constant() or not p.is_homogeneous():
            raise IncompleteGeneratorsError("invariants must be homogeneous of positive degree")
    for g in G.generators:
        for p in f:
            if linear_substitute(p, g.matrix) != p:
                raise NotInvariantError(f"{p.to_str(x_names(n))} is not invariant")
    degrees = [p.degree() for p in f]
    prod = 1
    for d in degrees:
        prod *= d
    if prod != G.order:
        raise IncompleteGeneratorsError(f"product of degrees {prod} differs from |G| = {G.order}")
    J = jacobian(f, n)
    det = linalg.poly_det(J, n)
    if det.is_zero():
        raise IncompleteGeneratorsError("the Jacobian determinant vanishes")
    chart = QuotientChart(G, f, degrees, J, det, x_names(n), f_names(n))
    _attach_reflection_data(chart)
    return chart


def chart_from_spec(spec, group=None):
    """Chart from JSON text/object: ``{"builtin": ...}`` or ``{"invariants": [...]}``."""
    from tensorquot.parsing import parse_poly
    if isinstance(spec, str):
        s = spec.strip()
        if not s.startswith("{"):
            return builtin_chart(s)
        spec = json.loads(s)
    if "builtin" in spec:
        return builtin_chart(spec["builtin"], spec.get("max_order", DEFAULT_MAX_ORDER))
    if group is None:
        if "group" not in spec:
            raise IncompleteGeneratorsError("an explicit chart needs a group")
        group = group_from_spec(spec["group"])
    names = x_names(group.dim)
    f = [parse_poly(str(t), names, group.conductor) for t in spec["invariants"]]
    return verify_chart(group, f)


def _attach_reflection_data(chart):
    G = chart.group
    n = chart.dim
    comps = reflection_components(G)
    alphas, orders, members = [], [], []
    for c in comps:
        idx = []
        for form in c.forms:
            idx.append(len(alphas))
            alphas.append(MPoly.linear_form(list(form)))
            orders.append(c.order)
        members.append(idx)
    chart.alphas, chart.alpha_orders = alphas, orders
    # det J = c_J * prod alpha_H^(r_H - 1)
    rest = chart.jac_det
    for a, r in zip(alphas, orders):
        k, rest = strip_factor(rest, a, r - 1)
        if k != r - 1:
            raise InternalIncompletenessError("Jacobian determinant misses a mirror factor")
    if not rest.is_constant():
        raise InternalIncompletenessError("Jacobian determinant has factors off the mirrors")
    chart.jac_scale = rest.constant_value()
    # divisor components
    dcomps = []
    for c, idx in zip(comps, members):
        w = c.witness()
        delta = _rewrite_poly(chart, w).monic()
        scale = scalar_div(substitute_poly(delta, chart.invariants).lc(), w.lc())
        if substitute_poly(delta, chart.invariants) != w.scale(scale):
            raise InternalIncompletenessError("divisor pull-back identity failed")
        dcomps.append(DivisorComponent(delta, c.order, w, idx, scale))
    chart.divisor = ReflectionDivisor(dcomps)


# -- rewriting -------------------------------------------------------------------

def _f_power(chart, a):
    cache = chart.powers()
    if a in cache:
        return cache[a]
    n = chart.dim
    if sum(a) == 0:
        res = MPoly.one(n)
    else:
        i = max(k for k in range(n) if a[k])
        b = a[:i] + (a[i] - 1,) + a[i + 1:]
        res = _f_power(chart, b) * chart.invariants[i]
    cache[a] = res
    return res


def _lead_basis(chart):
    """Leading exponents of the f_i and an exact inverse when independent."""
    if "lead" not in chart._cache:
        n = chart.dim
        lead = [f.leading_exponent() for f in chart.invariants]
        mat = [[lead[i][j] for i in range(n)] for j in range(n)]   # columns = lead_i
        inv = None
        if linalg.scalar_det(mat):
            inv = linalg.scalar_inverse(mat)
        chart._cache["lead"] = (lead, inv)
    return chart._cache["lead"]


def _subduce(chart, p):
    """Leading-term subduction; returns the f-polynomial or None on failure."""
    lead, inv = _lead_basis(chart)
    if inv is None:
        return None
    n = chart.dim
    out = {}
    # work on the integer part when there is one: with monic invariants the
    # loop then never leaves the integers
    ip = p._int_part()
    scale, terms = (ip[0], dict(ip[1])) if ip else (1, dict(p.terms))
    # lazy max-heap on grlex keys; stale entries are skipped on pop
    heap = [(-sum(t), tuple(-x for x in t)) for t in terms]
    heapq.heapify(heap)
    while terms:
        key = heapq.heappop(heap)
        e = tuple(-x for x in key[1])
        if e not in terms:
            continue
        a = []
        for i in range(n):
            s = Fraction(sum((inv[i][j] * e[j] for j in range(n)), 0))
            if s.denominator != 1 or s < 0:
                return None
            a.append(int(s))
        a = tuple(a)
        fa = _f_power(chart, a)
        c = scalar_div(terms[e], fa.lc())
        out[a] = c
        for ex, v in fa.terms.items():
            old = terms.get(ex)
            nv = -c * v if old is None else old - c * v
            if nv:
                if old is None:
                    heapq.heappush(heap, (-sum(ex), tuple(-x for x in ex)))
                terms[ex] = nv
            elif old is not None:
                del terms[ex]
        if e in terms:      # numerical safety: leading term must cancel
            return None
    if scale != 1:
        out = {a: c * scale for a, c in out.items()}
    return MPoly(n, out)


def _weighted_monomials(degrees, d):
    n = len(degrees)
    out = []

    def rec(i, rem, cur):
        if i == n:
            if rem == 0:
                out.append(tuple(cur))
            return
        for k in range(rem // degrees[i] + 1):
            cur.append(k)
            rec(i + 1, rem - k * degrees[i], cur)
            cur.pop()

    rec(0, d, [])
    return out


def _solve_linear(chart, p):
    """Degree-by-degree linear solve for the f-expression of p."""
    n = chart.dim
    result = {}
    for d, comp in sorted(p.homogeneous_components().items()):
        monos = _weighted_monomials(chart.degrees, d)
        if not monos:
            raise InternalIncompletenessError(f"no invariant monomials of degree {d}")
        images = [_f_power(chart, a) for a in monos]
        keys = sorted({e for im in images for e in im.terms} | set(comp.terms))
        cols = [[im.terms.get(k, 0) for k in keys] for im in images]
        rhs = [comp.terms.get(k, 0) for k in keys]
        sol = linalg.solve(cols, rhs)
        if sol is None:
            raise InternalIncompletenessError(f"degree {d} component is not in the span of the charts' monomials")
        for a, c in zip(monos, sol):
            if c:
                result[a] = c
    return MPoly(n, result)


def _rewrite_poly(chart, p):
    if p.is_zero():
        return MPoly.zero(chart.dim)
    q = _subduce(chart, p)
    if q is None:
        q = _solve_linear(chart, p)
    return q


def is_invariant_ratfn(G, h):
    # h is reduced, so g.h = h forces g.num = c*num and g.den = c*den
    for g in G.generators:
        den = linear_substitute(h.den, g.matrix)
        c = 1
        if den != h.den:
            c = scalar_div(den.terms.get(h.den.leading_exponent(), 0), h.den.lc())
            if not c or den != h.den.scale(c):
                return False
        num = linear_substitute(h.num, g.matrix)
        if num != (h.num if c == 1 else h.num.scale(c)):
            return False
    return True


def _strip_alphas(chart, p):
    exps = []
    for a in chart.alphas:
        k, p = strip_factor(p, a)
        exps.append(k)
    return exps, p


def rewrite_in_invariants(chart, h, check=True):
    """Express a G-invariant x-side function in the chart coordinates."""
    if isinstance(h, MPoly):
        h = RatFn.from_poly(h)
    if check and not is_invariant_ratfn(chart.group, h):
        raise NotInvariantError("function is not invariant under the group")
    if h.is_polynomial():
        return RatFn.from_poly(_rewrite_poly(chart, h.num))
    return _rewrite_fraction(chart, h.num, h.den)


def _rewrite_fraction(chart, num, den):
    """Rewrite num/den (coprime, invariant quotient) with mirror bookkeeping.

    Mirror factors are stripped from both sides; per orbit the net exponent
    is split into whole powers of the witness (giving delta powers) and a
    remainder folded back into the numerator, so every polynomial that gets
    rewritten is itself invariant.
    """
    n = chart.dim
    a_exp, num0 = _strip_alphas(chart, num)
    b_exp, den0 = _strip_alphas(chart, den)
    fnum = MPoly.one(n)
    fden = MPoly.one(n)
    scale = 1
    extra = MPoly.one(num.nvars)
    for comp in chart.divisor.components:
        idx = comp.hyperplanes
        r = comp.multiplicity
        net = {i: a_exp[i] - b_exp[i] for i in idx}
        vals = set(net.values())
        if len(vals) != 1:
            raise NotInvariantError("mirror exponents differ along an orbit")
        t = vals.pop()
        k, s = divmod(t, r)
        if s:
            for i in idx:
                extra = extra * chart.alphas[i] ** s
        if k > 0:
            fnum = fnum * comp.delta ** k
            scale = scale * scalar_div(1, comp.scale) ** k
        elif k < 0:
            fden = fden * comp.delta ** (-k)
            scale = scale * comp.scale ** (-k)
    top = _rewrite_poly(chart, num0 * extra)
    bot = _rewrite_poly(chart, den0)
    num_f = (top * fnum).scale(scale)
    den_f = bot * fden
    return _reduce_f(chart, num_f, den_f)


def _reduce_f(chart, num, den):
    from tensorquot.polyalg import reduce_with_hints
    return reduce_with_hints(num, den, chart.deltas)


# -- divisor ---------------------------------------------------------------------------

def reflection_divisor(chart):
    return chart.divisor


def is_square_free(p):
    g = p
    for i in range(p.nvars):
        d = partial_derivative(p, i)
        if d.is_zero():
            continue
        g = gcd(g, d)
        if g.is_constant():
            return True
    return g.is_constant()


def check_divisor(chart):
    """Square-freeness and pairwise coprimality of the divisor components."""
    ds = chart.deltas
    if not all(is_square_free(d) for d in ds):
        return False
    return all(gcd(a, b).is_constant() for a, b in combinations(ds, 2))


def jacobian_factor_constant(chart):
    """det J / prod alpha_H^(r_H - 1); None if that quotient is not a constant."""
    rest = chart.jac_det
    for a, r in zip(chart.alphas, chart.alpha_orders):
        k, rest = strip_factor(rest, a, r - 1)
        if k != r - 1:
            return None
    return rest.constant_value() if rest.is_constant() else None
