import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorquot.criterion import (
    additivity_suite,
    case_rng,
    chart_independence_suite,
    check_main_theorem,
    principal_stratum_check,
    random_field,
    random_invariant_skew_field,
    random_skew_field,
    roundtrip_suite,
    skew_pushforward_check,
    skew_pushforward_suite,
    solomon_check,
    solomon_suite,
    theorem_suite,
    verify_lift,
)
from tensorquot.errors import (
    ArityError,
    NotInvariantError,
    NotSymmetricError,
    PreconditionError,
    ZeroTensorError,
)
from tensorquot.grouprep import builtin_group, enumerate_group
from tensorquot.parsing import parse_poly, parse_tensor
from tensorquot.quotient import builtin_chart
from tensorquot.scalar import zeta
from tensorquot.tensor import TensorField, is_regular, pullback

V, U = ("v",), ("u",)
SEVEN = " & ".join(["d(v)"] * 7)
CHEAP = ["cyclic(2)", "cyclic(3)", "cyclic(4)", "cyclic(5)", "symmetric(2)",
         "product(cyclic(2),cyclic(3))", "wreath(2,1,2)"]


def test_golden_case_regular():
    c = builtin_chart("cyclic(3)")
    rep = check_main_theorem(c, parse_tensor(f"v^-3 * {SEVEN}", V))
    assert rep.divisor_criterion_holds and rep.direct_regularity_holds and rep.agree
    assert not rep.tau_regular_on_quotient
    assert [(r, rho) for _, r, rho in rep.per_component] == [(3, 5)]


def test_golden_case_irregular():
    c = builtin_chart("cyclic(3)")
    rep = check_main_theorem(c, parse_tensor(f"v^-5 * {SEVEN}", V))
    assert not rep.divisor_criterion_holds and not rep.direct_regularity_holds
    assert [rho for _, _, rho in rep.per_component] == [-1]


def test_trivial_group_and_residual_poles():
    c = builtin_chart("trivial(2)")
    rep = check_main_theorem(c, parse_tensor("f1 * d(f2) & D(f1)", c.f_names))
    assert rep.divisor_criterion_holds and rep.direct_regularity_holds and rep.per_component == []
    c = builtin_chart("symmetric(2)")
    rep = check_main_theorem(c, parse_tensor("1/(f2 + 1) * d(f1)", c.f_names))
    assert not rep.residual_regular and not rep.divisor_criterion_holds and rep.agree


def test_extra_components_enter_the_criterion():
    c = builtin_chart("symmetric(2)")
    tau = parse_tensor("1/f2 * d(f1)", c.f_names)
    rep = check_main_theorem(c, tau, [parse_poly("f2", c.f_names)])
    assert rep.extra[0][1] == -1 and rep.residual_regular
    assert not rep.divisor_criterion_holds and rep.agree


def test_report_dict_shape():
    c = builtin_chart("symmetric(2)")
    d = check_main_theorem(c, parse_tensor("d(f1)", c.f_names)).to_dict()
    assert d["per_component"] == [{"delta": "f1^2 - 4*f2", "r": 2, "rho": 0}]
    assert d["agree"] is True
    with pytest.raises(ZeroTensorError):
        check_main_theorem(c, TensorField(0, 1, c.f_names, {}))


@pytest.mark.parametrize("family", CHEAP)
def test_theorem_suite_small(family):
    res = theorem_suite(builtin_chart(family), 15, seed=11)
    assert res.passed, res.failures
    assert 0 < res.stats["criterion_true"] < 15


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CHEAP), st.integers(0, 10 ** 6))
def test_criterion_equivalence_property(family, seed):
    c = builtin_chart(family)
    tau = random_field(case_rng(seed, "prop", 0), c)
    assert check_main_theorem(c, tau).agree


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CHEAP), st.integers(0, 10 ** 6))
def test_solomon_equivalence_property(family, seed):
    c = builtin_chart(family)
    omega = random_skew_field(case_rng(seed, "sol", 0), c)
    if omega.is_zero():
        return
    assert solomon_check(c, omega).agree


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(CHEAP), st.integers(0, 10 ** 6))
def test_skew_pushforward_property(family, seed):
    c = builtin_chart(family)
    phi = random_invariant_skew_field(case_rng(seed, "skp", 0), c)
    assert skew_pushforward_check(c, phi)


def test_other_small_suites():
    c = builtin_chart("wreath(2,1,2)")
    for suite in (roundtrip_suite, additivity_suite, solomon_suite, skew_pushforward_suite):
        res = suite(c, 8, seed=3)
        assert res.passed, (suite.__name__, res.failures)
    res = chart_independence_suite(c, 8, seed=3)
    assert res.passed and res.stats["compared"] == 8


def test_suites_are_deterministic():
    c = builtin_chart("symmetric(2)")
    a = theorem_suite(c, 10, seed=5).to_dict()
    b = theorem_suite(c, 10, seed=5).to_dict()
    assert a == b
    assert theorem_suite(c, 10, seed=6).to_dict()["stats"] is not None


# -- Solomon-type checks -----------------------------------------------------------------

def test_solomon_examples():
    c = builtin_chart("cyclic(2)")
    rep = solomon_check(c, parse_tensor("d(v)", V))
    assert rep.divisor_criterion_holds and rep.direct_regularity_holds
    rep = solomon_check(c, parse_tensor("1/v * d(v)", V))
    assert not rep.divisor_criterion_holds and not rep.direct_regularity_holds
    c = builtin_chart("symmetric(2)")
    omega = parse_tensor("d(f1)^d(f2)", c.f_names)
    pb = pullback(c, omega)
    assert pb == parse_tensor("(x1 - x2) * d(x1)^d(x2)", c.x_names)
    rep = solomon_check(c, omega)
    assert rep.agree and rep.divisor_criterion_holds


def test_solomon_rejects_non_skew():
    c = builtin_chart("symmetric(2)")
    with pytest.raises(NotSymmetricError):
        solomon_check(c, parse_tensor("d(f1)&d(f2)", c.f_names))
    with pytest.raises(NotSymmetricError):
        solomon_check(c, parse_tensor("D(f1)", c.f_names))


def test_skew_pushforward_examples():
    c = builtin_chart("cyclic(2)")
    assert skew_pushforward_check(c, parse_tensor("u * D(u)", U))
    assert skew_pushforward_check(c, parse_tensor("2*u * d(u)", U))
    t = builtin_chart("trivial(2)")
    assert skew_pushforward_check(t, parse_tensor("x1^2 * D(x2) & d(x1)^d(x2)", t.x_names))
    with pytest.raises(PreconditionError):
        skew_pushforward_check(c, parse_tensor("1/u * d(u)", U))
    with pytest.raises(NotSymmetricError):
        skew_pushforward_check(builtin_chart("symmetric(2)"),
                               parse_tensor("d(x1)&d(x1) + d(x2)&d(x2) + d(x1)&d(x2)", ("x1", "x2")))
    with pytest.raises(NotInvariantError):
        skew_pushforward_check(c, parse_tensor("d(u)", U))


def test_principal_stratum_check():
    G = enumerate_group([[[zeta(3), 0], [0, zeta(3)]]])
    n = ("x1", "x2")
    rep = principal_stratum_check(G, parse_tensor("x1^2 * d(x1) + x1*x2 * d(x2)", n))
    assert rep.agree and rep.divisor_criterion_holds
    rep = principal_stratum_check(G, parse_tensor("1/x1^3 * d(x1)&d(x1)&d(x1)", n))
    assert rep.agree and not rep.divisor_criterion_holds
    with pytest.raises(NotInvariantError):
        principal_stratum_check(G, parse_tensor("x1*x2^2 * d(x1)", n))
    with pytest.raises(PreconditionError):
        principal_stratum_check(builtin_group("symmetric(2)"), parse_tensor("d(x1)", n))


# -- lifts ---------------------------------------------------------------------------------

def polys(texts, names):
    return [parse_poly(t, names) for t in texts]


def test_verify_lift_examples():
    c = builtin_chart("symmetric(2)")
    ident_x, ident_f = polys(["x1", "x2"], c.x_names), polys(["f1", "f2"], c.f_names)
    assert verify_lift(c, ident_x, ident_x, ident_f, ident_f)
    for r in range(2, 6):
        c = builtin_chart(f"cyclic({r})")
        for k in (2, 3, -1):
            phi, phi_inv = polys([f"{k}*u"], U), polys([f"u/{k}"], U)
            psi, psi_inv = polys([f"{k ** r}*v"], V), polys([f"v/({k})^{r}"], V)
            assert verify_lift(c, phi, phi_inv, psi, psi_inv)
    c = builtin_chart("cyclic(2)")
    assert not verify_lift(c, polys(["u"], U), polys(["u"], U), polys(["v + 1"], V), polys(["v - 1"], V))
    assert not verify_lift(c, polys(["3*u"], U), polys(["u"], U), polys(["9*v"], V), polys(["v/9"], V))
    with pytest.raises(ArityError):
        verify_lift(c, polys(["u", "u"], U), polys(["u"], U), polys(["v"], V), polys(["v"], V))


def test_verify_lift_swap_on_symmetric():
    c = builtin_chart("symmetric(2)")
    sw = polys(["x2", "x1"], c.x_names)
    idf = polys(["f1", "f2"], c.f_names)
    assert verify_lift(c, sw, sw, idf, idf)
    neg = polys(["-x1", "-x2"], c.x_names)
    psi = polys(["-f1", "f2"], c.f_names)
    assert verify_lift(c, neg, neg, psi, psi)
    assert not verify_lift(c, neg, neg, idf, idf)


def test_regularity_direct_examples():
    c = builtin_chart("cyclic(3)")
    assert is_regular(pullback(c, parse_tensor(f"v^-3 * {SEVEN}", V)))
    assert not is_regular(pullback(c, parse_tensor(f"v^-5 * {SEVEN}", V)))
