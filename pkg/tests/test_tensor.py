import random
from fractions import Fraction

import pytest
import sympy

from oracles import ratfn_to_sympy, syms
from tensorquot.criterion import case_rng, random_field, random_invariant_field
from tensorquot.errors import (
    ChartError,
    InvalidDivisorError,
    NotInvariantError,
    NotSymmetricError,
    SingularChartError,
    SingularComponentError,
    ZeroTensorError,
)
from tensorquot.parsing import parse_poly, parse_ratfn, parse_tensor
from tensorquot.polyalg import MPoly, RatFn, linear_substitute
from tensorquot.quotient import builtin_chart
from tensorquot.tensor import (
    TensorField,
    admissible_indices,
    adapted_coordinates,
    b_divisor,
    divisor_of_tensor,
    frame_change,
    is_invariant,
    is_regular,
    multisym_names,
    multisym_to_function,
    pullback,
    pullback_generic,
    pullback_linear,
    pushforward,
    rho,
    symmetric_power,
    tensor_product,
    tensor_reynolds,
)

V = ("v",)
U = ("u",)


def T(text, names):
    return parse_tensor(text, names)


def power(frame, k, names):
    return T(" & ".join([frame] * k), names) if k else T("1", names)


# -- pull-back and push-forward -----------------------------------------------------

@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_cyclic_pullback_examples(r):
    c = builtin_chart(f"cyclic({r})")
    assert pullback(c, T("d(v)", V)) == T(f"{r}*u^{r - 1} * d(u)", U)
    assert pullback(c, T("D(v)", V)) == T(f"1/({r}*u^{r - 1}) * D(u)", U)


def test_trivial_chart_pullback_is_identity():
    c = builtin_chart("trivial(2)")
    tau = T("(f1 - f2^2)/f1 * D(f2) & d(f1)", c.f_names)
    pb = pullback(c, tau)
    assert pb == T("(x1 - x2^2)/x1 * D(x2) & d(x1)", c.x_names)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_cyclic_pushforward_examples(r):
    c = builtin_chart(f"cyclic({r})")
    assert pushforward(c, T(f"{r}*u^{r - 1} * d(u)", U)) == T("d(v)", V)
    assert pushforward(c, T("u * D(u)", U)) == T(f"{r}*v * D(v)", V)


def test_pushforward_rejects_non_invariant():
    c = builtin_chart("cyclic(3)")
    with pytest.raises(NotInvariantError):
        pushforward(c, T("d(u)", U))


def chain_rule_oracle(chart, tau):
    """Pull-back of a (0,q) or (1,0) field computed with sympy matrices."""
    n = chart.dim
    xs = syms(n)
    fs = [sum(sympy.Rational(str(Fraction(c))) * sympy.prod([x ** k for x, k in zip(xs, e)])
              for e, c in f.terms.items()) for f in chart.invariants]
    J = sympy.Matrix([[sympy.diff(f, x) for x in xs] for f in fs])
    Jinv = J.inv()
    fsym = syms(n, "f")
    out = {}
    for (up, lo), c in tau.terms.items():
        coef = ratfn_to_sympy(c, fsym).subs(dict(zip(fsym, fs)), simultaneous=True)
        rows = [[(k, Jinv[k, i]) for k in range(n)] for i in up] + [[(k, J[j, k]) for k in range(n)] for j in lo]
        from itertools import product
        for choice in product(*rows):
            idx = tuple(k for k, _ in choice)
            val = coef * sympy.prod([v for _, v in choice])
            key = (idx[:tau.p], idx[tau.p:])
            out[key] = out.get(key, 0) + val
    return {k: sympy.cancel(v) for k, v in out.items() if sympy.cancel(v) != 0}


@pytest.mark.parametrize("family", ["symmetric(2)", "wreath(2,1,2)", "product(cyclic(2),cyclic(3))"])
def test_pullback_matches_sympy_chain_rule(family):
    c = builtin_chart(family)
    xs = syms(c.dim)
    for i in range(4):
        tau = random_field(case_rng(5, "oracle:" + family, i), c, max_valency=2, max_terms=2)
        pb = pullback(c, tau)
        ref = chain_rule_oracle(c, tau)
        assert set(pb.terms) == set(ref)
        for k, v in pb.terms.items():
            assert sympy.cancel(ratfn_to_sympy(v, xs) - ref[k]) == 0


@pytest.mark.parametrize("family", ["cyclic(3)", "symmetric(2)", "symmetric(3)", "wreath(2,1,2)",
                                    "product(cyclic(2),cyclic(3))"])
def test_fast_pullback_matches_generic(family):
    c = builtin_chart(family)
    for i in range(15):
        tau = random_field(case_rng(0, "generic:" + family, i), c)
        assert pullback(c, tau) == pullback_generic(c, tau)


@pytest.mark.parametrize("family", ["cyclic(4)", "symmetric(2)", "wreath(2,1,2)", "wreath(3,1,2)"])
def test_pullback_is_monoidal_and_invariant(family):
    c = builtin_chart(family)
    for i in range(8):
        rng = case_rng(1, "monoidal:" + family, i)
        a = random_field(rng, c, max_valency=2)
        b = random_field(rng, c, max_valency=1)
        pa, pb = pullback(c, a), pullback(c, b)
        assert pullback(c, a.tensor(b)) == pa.tensor(pb)
        assert is_invariant(c.group, pa)


@pytest.mark.parametrize("family", ["cyclic(3)", "symmetric(2)", "product(cyclic(2),cyclic(3))",
                                    "wreath(2,1,2)"])
def test_round_trips(family):
    c = builtin_chart(family)
    for i in range(10):
        tau = random_field(case_rng(2, "rt:" + family, i), c)
        assert pushforward(c, pullback(c, tau)) == tau
        phi = random_invariant_field(case_rng(2, "rtx:" + family, i), c)
        assert pullback(c, pushforward(c, phi)) == phi


def test_zero_field_passes_through():
    c = builtin_chart("symmetric(2)")
    z = TensorField(1, 1, c.f_names, {})
    assert pullback(c, z).is_zero()
    assert pushforward(c, TensorField(1, 1, c.x_names, {})).is_zero()


def test_linear_pullback_and_reynolds():
    c = builtin_chart("symmetric(2)")
    phi = T("x1 * d(x1) & d(x2)", c.x_names)
    swap = [[0, 1], [1, 0]]
    assert pullback_linear(phi, swap) == T("x2 * d(x2) & d(x1)", c.x_names)
    avg = tensor_reynolds(c.group, phi)
    assert avg == T("1/2*x1 * d(x1) & d(x2) + 1/2*x2 * d(x2) & d(x1)", c.x_names)
    assert is_invariant(c.group, avg)


# -- basic structure -------------------------------------------------------------------

def test_is_regular_examples():
    assert is_regular(T("u^3 * d(u)", U))
    assert not is_regular(T("1/u * d(u)", U))
    c = builtin_chart("cyclic(3)")
    tau = T("v^-3 * " + " & ".join(["d(v)"] * 7), V)
    assert is_regular(pullback(c, tau))


def test_tensor_product_examples():
    t = tensor_product(T("d(v)", V), T("d(v)", V))
    assert (t.p, t.q) == (0, 2) and t.terms == {((), (0, 0)): RatFn.constant(1, 1)}
    a = T("(v + 1) * D(v)", V)
    b = T("v^2 * d(v)", V)
    assert tensor_product(a, b) == T("(v^3 + v^2) * D(v) & d(v)", V)
    n = ("x1", "x2")
    rng = random.Random(0)
    for _ in range(20):
        a = T(f"{rng.randint(1, 4)}*x1 * d(x1) + x2 * d(x2)", n)
        b = T(f"x1^{rng.randint(0, 3)} * D(x2)", n)
        cc = T(f"{rng.randint(-3, 3)} * D(x1)", n)
        assert a.tensor(b + cc) == a.tensor(b) + a.tensor(cc)


def test_wedge_uses_determinant_convention():
    n = ("x1", "x2", "x3")
    w = T("d(x1)^d(x2)", n)
    assert w == T("d(x1)&d(x2) - d(x2)&d(x1)", n)
    w3 = T("d(x1)^d(x2)^d(x3)", n)
    assert w3.coefficient((), (0, 1, 2)) == RatFn.constant(3, 1)
    assert w3.coefficient((), (1, 0, 2)) == RatFn.constant(3, -1)
    assert w3.is_antisymmetric()


# -- divisors --------------------------------------------------------------------------

def test_divisor_examples():
    v = parse_poly("v", V)
    for m in range(-3, 4):
        for q in range(0, 3):
            tau = T(f"v^{m}", V).tensor(power("d(v)", q, V))
            assert divisor_of_tensor(tau, [v]).multiplicity(v) == m
    tau = T("v^2 * d(v) + v^5 * d(v)", V)
    assert divisor_of_tensor(tau, [v]).multiplicity(v) == 2
    tau = T("v^2 * d(v) & D(v) + v^5 * D(v) & d(v)", V)
    assert divisor_of_tensor(tau, [v]).multiplicity(v) == 2
    c = builtin_chart("cyclic(3)")
    tau = T("v^-3", V).tensor(power("d(v)", 7, V))
    assert divisor_of_tensor(tau, c.deltas).multiplicity(v) == -3
    with pytest.raises(ZeroTensorError):
        divisor_of_tensor(TensorField(0, 1, V, {}), [v])


def test_residual_flag():
    n = ("f1", "f2")
    d = parse_poly("f1^2 - 4*f2", n)
    assert divisor_of_tensor(T("1/(f1^2 - 4*f2) * d(f1)", n), [d]).residual_regular
    assert not divisor_of_tensor(T("1/((f1^2 - 4*f2)*f2) * d(f1)", n), [d]).residual_regular


@pytest.mark.parametrize("r", [2, 3, 4])
def test_bdivisor_line_formula(r):
    v = parse_poly("v", V)
    for m in range(-4, 5):
        for k in range(0, 4):
            tau = T(f"v^{m}", V).tensor(power("d(v)", k, V))
            assert b_divisor(tau, [(v, r)]).multiplicity(v) == (r - 1) * k + r * m
            tau = T(f"v^{m}", V).tensor(power("D(v)", k, V))
            assert b_divisor(tau, [(v, r)]).multiplicity(v) == (r - 1) * (-k) + r * m


def test_bdivisor_with_empty_b_is_the_divisor():
    c = builtin_chart("symmetric(2)")
    for i in range(10):
        tau = random_field(case_rng(0, "b0", i), c)
        a = b_divisor(tau, [], c.deltas)
        b = divisor_of_tensor(tau, c.deltas)
        assert a.multiplicities == b.multiplicities
        assert a.residual_regular == b.residual_regular


def test_bdivisor_errors():
    v = parse_poly("v", V)
    tau = T("d(v)", V)
    with pytest.raises(InvalidDivisorError):
        b_divisor(tau, [(v, 0)])
    with pytest.raises(SingularComponentError):
        rho(tau, MPoly.constant(1, 2), 2)
    with pytest.raises(ZeroTensorError):
        b_divisor(TensorField(0, 1, V, {}), [(v, 2)])
    n = ("f1", "f2")
    with pytest.raises(ChartError):
        rho(T("d(f1)", n), parse_poly("f1", n), 2, index=1)


def test_divisor_vs_regularity():
    c = builtin_chart("symmetric(3)")
    for i in range(40):
        tau = random_field(case_rng(0, "divreg", i), c)
        div = divisor_of_tensor(tau, c.deltas)
        assert div.is_effective() == is_regular(tau)


def test_admissible_indices_and_adapted_chart():
    n = ("f1", "f2")
    d = parse_poly("f1^2 - 4*f2", n)
    assert admissible_indices(d) == [0, 1]
    coords = adapted_coordinates(d, 0)
    assert coords == [parse_poly("f2", n), d]


def test_frame_change_examples():
    n = ("f1", "f2")
    tau = T("f1 * D(f1) & d(f2)", n)
    same = frame_change(tau, [MPoly.var(2, 0), MPoly.var(2, 1)])
    assert same.terms == tau.terms
    w = [parse_poly("2*v", V)]
    assert frame_change(T("d(v)", V), w).terms == T("1/2 * d(v)", V).terms
    assert frame_change(T("D(v)", V), w).terms == T("2 * D(v)", V).terms
    d = parse_poly("f1^2 - 4*f2", n)
    t = frame_change(T("d(f2)", n), [MPoly.var(2, 0), d])
    assert t.terms == T("1/2*f1 * d(f1) - 1/4 * d(f2)", n).terms
    with pytest.raises(SingularChartError):
        frame_change(T("d(f2)", n), [MPoly.var(2, 0), parse_poly("f1^2", n)])


def test_frame_change_round_trip():
    c = builtin_chart("symmetric(3)")
    ident = [MPoly.var(3, i) for i in range(3)]
    for i in range(10):
        tau = random_field(case_rng(0, "frames", i), c, max_valency=2)
        for d in c.deltas:
            for j in admissible_indices(d):
                there = frame_change(tau, adapted_coordinates(d, j), c.deltas)
                back = frame_change(there, ident, c.deltas)
                assert back.terms == tau.terms


def test_chart_independence_of_rho():
    for fam in ("symmetric(2)", "symmetric(3)", "wreath(2,1,2)"):
        c = builtin_chart(fam)
        for i in range(10):
            tau = random_field(case_rng(3, "rho:" + fam, i), c)
            for d, r in c.divisor.as_pairs():
                vals = {rho(tau, d, r, j, c.deltas) for j in admissible_indices(d)}
                assert len(vals) == 1


def test_additivity_of_bdivisor():
    c = builtin_chart("symmetric(3)")
    B = c.divisor.as_pairs()
    for i in range(10):
        rng = case_rng(4, "add", i)
        a, b = random_field(rng, c, 2), random_field(rng, c, 2)
        da, db, dab = b_divisor(a, B), b_divisor(b, B), b_divisor(a.tensor(b), B)
        for d, _ in B:
            assert dab.multiplicity(d) == da.multiplicity(d) + db.multiplicity(d)


def test_bdivisor_invariant_under_linear_coordinate_change():
    """Multiplicities survive an invertible linear substitution of the f-coordinates."""
    c = builtin_chart("symmetric(3)")
    A = [[1, 2, 0], [0, 1, -1], [1, 0, 1]]          # det = 3
    for i in range(10):
        tau = random_field(case_rng(6, "lin", i), c)
        moved = pullback_linear(tau, A)
        B = c.divisor.as_pairs()
        B2 = [(linear_substitute(d, A), r) for d, r in B]
        before = b_divisor(tau, B)
        after = b_divisor(moved, B2, hints=[d for d, _ in B2])
        for (d, _), (d2, _) in zip(B, B2):
            assert before.multiplicity(d) == after.multiplicity(d2)
        assert before.residual_regular == after.residual_regular


def test_bdivisor_invariant_under_frame_change():
    c = builtin_chart("symmetric(3)")
    A = [parse_poly(s, c.f_names) for s in ("f1 + f2", "f2", "f3 - 2*f1")]
    B = c.divisor.as_pairs()
    for i in range(10):
        tau = random_field(case_rng(7, "framed", i), c)
        moved = frame_change(tau, A, c.deltas)
        assert b_divisor(moved, B).multiplicities == b_divisor(tau, B).multiplicities


# -- multi-symmetric fields -----------------------------------------------------------

def test_multisym_examples():
    sigma = symmetric_power([T("d(v)", V), T("d(v)", V)], V)
    f = multisym_to_function(sigma)
    names = multisym_names(V, [2])
    assert f == parse_ratfn("w1_v^2", names)
    c = builtin_chart("cyclic(2)")
    sigma = T("1/(4*v)", V).tensor(symmetric_power([T("d(v)", V), T("d(v)", V)], V))
    g = multisym_to_function(pullback(c, sigma))
    nm = multisym_names(U, [2])
    assert g == parse_ratfn("w1_u^2", nm)
    assert linear_substitute(g.num, [[-1, 0], [0, -1]]) == g.num
    assert multisym_to_function(sigma * 3) == multisym_to_function(sigma) * 3


def test_multisym_blocks_and_errors():
    n = ("x1", "x2")
    s = symmetric_power([T("d(x1)", n), T("d(x2)", n)], n).tensor(T("x1 * d(x2)", n))
    f = multisym_to_function(s, [2, 1])
    names = multisym_names(n, [2, 1])
    assert f == parse_ratfn("x1*w1_x1*w1_x2*w2_x2", names)
    with pytest.raises(NotSymmetricError):
        multisym_to_function(T("d(x1)&d(x2)", n))
    assert not is_regular(T("1/x1 * d(x1)", n)) and \
        not multisym_to_function(T("1/x1 * d(x1)", n)).is_polynomial()
