"""Regularity criterion for pull-backs and its corollaries.

The divisor side reads the B-divisor of an f-side field against the
reflection divisor; the direct side pulls the field back and inspects
denominators.  The two are computed independently and compared; a
disagreement is a falsification event, reported and never repaired.
"""
import random
from dataclasses import dataclass, field
from itertools import combinations

from tensorquot.errors import (
    ArityError,
    NotSymmetricError,
    PreconditionError,
    ZeroTensorError,
)
from tensorquot.grouprep import find_pseudo_reflections, reflection_components
from tensorquot.polyalg import MPoly, RatFn, substitute_poly
from tensorquot.tensor import (
    TensorField,
    b_divisor,
    divisor_of_tensor,
    is_invariant,
    is_regular,
    pullback,
    pushforward,
    tensor_reynolds,
)


@dataclass
class CriterionReport:
    divisor_criterion_holds: bool
    direct_regularity_holds: bool
    per_component: list            # (delta, r, rho)
    residual_regular: bool
    tau_regular_on_quotient: bool
    names: tuple = ()
    extra: list = field(default_factory=list)   # (component, multiplicity)

    @property
    def agree(self):
        return self.divisor_criterion_holds == self.direct_regularity_holds

    def to_dict(self):
        return {
            "divisor_criterion_holds": self.divisor_criterion_holds,
            "direct_regularity_holds": self.direct_regularity_holds,
            "agree": self.agree,
            "per_component": [
                {"delta": d.to_str(self.names), "r": r, "rho": rho} for d, r, rho in self.per_component
            ],
            "extra_components": [
                {"component": d.to_str(self.names), "multiplicity": m} for d, m in self.extra
            ],
            "residual_regular": self.residual_regular,
            "tau_regular_on_quotient": self.tau_regular_on_quotient,
        }


def check_main_theorem(chart, tau, extra_components=()):
    """Compare div_R(tau) >= 0 with regularity of pi^* tau."""
    if tau.is_zero():
        raise ZeroTensorError("the criterion needs a nonzero field")
    direct = is_regular(pullback(chart, tau))
    B = chart.divisor.as_pairs()
    extra = list(extra_components)
    bd = b_divisor(tau, B, extra)
    per = [(d, r, bd.multiplicities[d]) for d, r in B]
    extra_m = [(d, bd.multiplicities[d]) for d in extra]
    holds = all(x >= 0 for _, _, x in per) and all(m >= 0 for _, m in extra_m) and bd.residual_regular
    return CriterionReport(holds, direct, per, bd.residual_regular, is_regular(tau),
                           chart.f_names, extra_m)


def solomon_check(chart, omega):
    """For a skew covariant field: omega regular iff its pull-back is."""
    if omega.p != 0 or not omega.is_antisymmetric():
        raise NotSymmetricError("expected a skew-symmetric covariant field")
    if omega.is_zero():
        raise ZeroTensorError("the check needs a nonzero field")
    pulled = pullback(chart, omega)
    div = divisor_of_tensor(omega, chart.deltas)
    per = [(d, r, div.multiplicities[d]) for d, r in chart.divisor.as_pairs()]
    reg = is_regular(omega)
    return CriterionReport(reg, is_regular(pulled), per, div.residual_regular, reg, chart.f_names)


def skew_pushforward_check(chart, phi):
    """Push-forward of an invariant regular field skew in its covariant slots is regular."""
    if not phi.is_antisymmetric():
        raise NotSymmetricError("covariant slots must be skew-symmetric")
    if not is_regular(phi):
        raise PreconditionError("the field must be regular")
    return is_regular(pushforward(chart, phi))


def principal_stratum_check(G, phi):
    """Criterion for an invariant x-side field of a group without pseudo-reflections.

    Such a group has an empty reflection divisor and its quotient map is
    unramified in codimension one, so the divisor side asks only that the
    coefficients have no poles along any hypersurface.  That side is read
    off the denominators after removing mirror factors (there are none);
    the direct side is plain regularity of phi.
    """
    from tensorquot.errors import NotInvariantError
    from tensorquot.polyalg import strip_factor
    if find_pseudo_reflections(G):
        raise PreconditionError("the group contains pseudo-reflections; use a quotient chart")
    if phi.is_zero():
        raise ZeroTensorError("the check needs a nonzero field")
    if not is_invariant(G, phi):
        raise NotInvariantError("the field is not invariant under the group")
    forms = [MPoly.linear_form(list(f)) for c in reflection_components(G) for f in c.forms]
    residual = True
    for c in phi.terms.values():
        den = c.den
        for a in forms:
            _, den = strip_factor(den, a)
        residual = residual and den.is_constant()
    direct = is_regular(phi)
    return CriterionReport(residual, direct, [], residual, residual, phi.names)


def verify_lift(chart, phi, phi_inverse, psi, psi_inverse):
    """Commutativity of pi o phi = psi o pi with both maps invertible."""
    n = chart.dim
    for maps, nv in ((phi, n), (phi_inverse, n), (psi, n), (psi_inverse, n)):
        if len(maps) != n or any(m.nvars != nv for m in maps):
            raise ArityError("lift data must be n polynomials in n variables")
    xs = [MPoly.var(n, i) for i in range(n)]
    if [substitute_poly(p, list(phi_inverse)) for p in phi] != xs:
        return False
    if [substitute_poly(p, list(psi_inverse)) for p in psi] != xs:
        return False
    f = chart.invariants
    lhs = [substitute_poly(fi, list(phi)) for fi in f]
    rhs = [substitute_poly(p, f) for p in psi]
    return lhs == rhs


# -- random generation ---------------------------------------------------------------

def case_rng(seed, label, index):
    return random.Random(f"{seed}:{label}:{index}")


def random_poly(rng, nvars, max_degree=2, coeffs=(-2, 2)):
    """Random polynomial; every monomial of degree <= max_degree gets a coefficient."""
    from itertools import combinations_with_replacement
    while True:
        terms = {}
        for d in range(max_degree + 1):
            for combo in combinations_with_replacement(range(nvars), d):
                e = [0] * nvars
                for i in combo:
                    e[i] += 1
                c = rng.randint(*coeffs)
                if c:
                    terms[tuple(e)] = c
        if terms:
            return MPoly(nvars, terms)


def random_coefficient(rng, chart, exponent_range=(-4, 4)):
    """A product of divisor-component powers and a small random polynomial."""
    n = chart.dim
    c = RatFn.from_poly(random_poly(rng, n))
    for d in chart.deltas:
        e = rng.randint(*exponent_range)
        if e:
            c = c * RatFn.from_poly(d) ** e
    return c


def random_type(rng, max_valency=3):
    v = rng.randint(0, max_valency)
    q = rng.randint(0, v)
    return v - q, q


def random_field(rng, chart, max_valency=3, max_terms=3):
    """Random nonzero f-side field of valency <= max_valency."""
    n = chart.dim
    p, q = random_type(rng, max_valency)
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            up = tuple(rng.randrange(n) for _ in range(p))
            lo = tuple(rng.randrange(n) for _ in range(q))
            c = random_coefficient(rng, chart)
            terms[(up, lo)] = terms[(up, lo)] + c if (up, lo) in terms else c
        t = TensorField(p, q, chart.f_names, terms)
        if not t.is_zero():
            return t


def skew_basis(q, index_set, names):
    """d y_{i1} ^ ... ^ d y_{iq} expanded with the determinant convention."""
    base = TensorField(0, q, names, {((), tuple(index_set)): 1})
    return base.antisymmetrize()


def random_skew_field(rng, chart, max_valency=3, max_terms=3):
    n = chart.dim
    q = rng.randint(0, min(n, max_valency))
    subsets = list(combinations(range(n), q))
    while True:
        acc = TensorField(0, q, chart.f_names, {})
        for _ in range(rng.randint(1, max_terms)):
            s = rng.choice(subsets)
            acc = acc + skew_basis(q, s, chart.f_names) * random_coefficient(rng, chart)
        if not acc.is_zero():
            return acc


def random_invariant_skew_field(rng, chart, max_valency=3, max_terms=3, tries=50):
    """Reynolds average of a random regular x-side (tensor p, wedge q) field."""
    n = chart.dim
    names = chart.x_names
    deg = max(chart.degrees) + 1
    for _ in range(tries):
        q = rng.randint(0, min(n, max_valency))
        p = rng.randint(0, max_valency - q)
        subsets = list(combinations(range(n), q))
        acc = TensorField(p, q, names, {})
        for _ in range(rng.randint(1, max_terms)):
            up = tuple(rng.randrange(n) for _ in range(p))
            s = rng.choice(subsets)
            base = TensorField(p, q, names, {(up, s): 1}).antisymmetrize()
            acc = acc + base * random_poly(rng, n, deg)
        avg = tensor_reynolds(chart.group, acc)
        if not avg.is_zero():
            return avg
    return avg


def random_invariant_field(rng, chart, max_valency=3, max_terms=3, tries=50):
    """Invariant x-side field: a Reynolds average times witness powers."""
    n = chart.dim
    names = chart.x_names
    deg = max(chart.degrees) + 1
    for _ in range(tries):
        p, q = random_type(rng, max_valency)
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            up = tuple(rng.randrange(n) for _ in range(p))
            lo = tuple(rng.randrange(n) for _ in range(q))
            terms[(up, lo)] = random_poly(rng, n, deg)
        avg = tensor_reynolds(chart.group, TensorField(p, q, names, terms))
        if avg.is_zero():
            continue
        scale = RatFn.from_poly(MPoly.one(n))
        for comp in chart.divisor.components:
            e = rng.randint(-2, 2)
            if e:
                scale = scale * RatFn.from_poly(comp.witness) ** e
        return avg * scale
    return avg


# -- suites -----------------------------------------------------------------------------

@dataclass
class SuiteResult:
    label: str
    cases: int
    failures: list
    stats: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {"label": self.label, "cases": self.cases, "passed": self.passed,
                "stats": dict(self.stats), "failures": self.failures}


def theorem_suite(chart, count, seed=0, label=None):
    """Random f-side fields: divisor criterion vs direct regularity."""
    label = label or chart.label
    fails = []
    stats = {"criterion_true": 0}
    for i in range(count):
        rng = case_rng(seed, label, i)
        tau = random_field(rng, chart)
        rep = check_main_theorem(chart, tau)
        stats["criterion_true"] += rep.divisor_criterion_holds
        if not rep.agree:
            fails.append({"case": i, "tau": tau.to_str(), "report": rep.to_dict()})
    return SuiteResult(label, count, fails, stats)


def roundtrip_suite(chart, count, seed=0, label=None):
    label = label or chart.label
    fails = []
    for i in range(count):
        rng = case_rng(seed, "roundtrip-f:" + label, i)
        tau = random_field(rng, chart)
        if pushforward(chart, pullback(chart, tau)) != tau:
            fails.append({"case": i, "direction": "pushforward(pullback)", "tau": tau.to_str()})
        rng = case_rng(seed, "roundtrip-x:" + label, i)
        phi = random_invariant_field(rng, chart)
        if pullback(chart, pushforward(chart, phi)) != phi:
            fails.append({"case": i, "direction": "pullback(pushforward)", "phi": phi.to_str()})
    return SuiteResult(label, count, fails)


def additivity_suite(chart, count, seed=0, label=None):
    """div_R(a (x) b) = div_R(a) + div_R(b) on random pairs."""
    label = label or chart.label
    B = chart.divisor.as_pairs()
    fails = []
    for i in range(count):
        rng = case_rng(seed, "additivity:" + label, i)
        a = random_field(rng, chart)
        b = random_field(rng, chart)
        da, db = b_divisor(a, B), b_divisor(b, B)
        dab = b_divisor(a.tensor(b), B)
        for d, _ in B:
            if dab.multiplicities[d] != da.multiplicities[d] + db.multiplicities[d]:
                fails.append({"case": i, "component": d.to_str(chart.f_names)})
    return SuiteResult(label, count, fails)


def chart_independence_suite(chart, count, seed=0, label=None):
    """rho through two different admissible adapted charts agrees."""
    from tensorquot.tensor import admissible_indices, rho
    label = label or chart.label
    fails = []
    compared = 0
    for i in range(count):
        rng = case_rng(seed, "charts:" + label, i)
        tau = random_field(rng, chart)
        for d, r in chart.divisor.as_pairs():
            idx = admissible_indices(d)
            if len(idx) < 2:
                continue
            vals = [rho(tau, d, r, j, chart.deltas) for j in idx]
            compared += 1
            if len(set(vals)) != 1:
                fails.append({"case": i, "component": d.to_str(chart.f_names), "values": vals})
    return SuiteResult(label, count, fails, {"compared": compared})


def solomon_suite(chart, count, seed=0, label=None):
    label = label or chart.label
    fails = []
    for i in range(count):
        rng = case_rng(seed, "solomon:" + label, i)
        omega = random_skew_field(rng, chart)
        rep = solomon_check(chart, omega)
        if not rep.agree:
            fails.append({"case": i, "omega": omega.to_str()})
    return SuiteResult(label, count, fails)


def skew_pushforward_suite(chart, count, seed=0, label=None):
    label = label or chart.label
    fails = []
    for i in range(count):
        rng = case_rng(seed, "skewpush:" + label, i)
        phi = random_invariant_skew_field(rng, chart)
        if not skew_pushforward_check(chart, phi):
            fails.append({"case": i, "phi": phi.to_str()})
    return SuiteResult(label, count, fails)


def has_pseudo_reflections(G):
    return bool(find_pseudo_reflections(G))
