import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plpo.orders import (
    OrderParams,
    aux_gt,
    aux_gt_bounded,
    lpo_gt,
    plpo_gt,
    plpo_gt_bounded,
)
from plpo.replay import replay
from plpo.terms import FunctionSymbol, Signature, Var, apply_subst, parse_term

from conftest import load
from oracles import random_signature, random_term, related_pair


def setup(name):
    trs = load(name)
    params = OrderParams.from_trs(trs)
    return trs, params, (lambda text: parse_term(text, trs.signature))


def labels(cert):
    return [c.case_label for c in cert.children]


def test_aux_cases():
    trs, p, t = setup("r_prp")
    c = aux_gt(t("s(;x)"), Var("x"), p)
    assert c.case_label == "Def1-Case1"
    c = aux_gt(t("f(s(;x);y)"), Var("x"), p)
    assert c.case_label == "Def1-Case2"
    assert c.children[0].case_label == "Def1-Case1"
    # a safe argument of a defined symbol is out of reach
    _, p1, t1 = setup("r_pr")
    assert aux_gt(t1("f(;x,y)"), Var("x"), p1) is None


def test_aux_case3_umr():
    trs, p, t = setup("r_umr")
    c = aux_gt(t("f(s(;x),s(;y);)"), t("P(x,y;)"), p)
    assert c.case_label == "Def1-Case3"
    replay(c, p)


def _chain():
    symbols = (
        FunctionSymbol("0", 0, 0, "constructor"),
        FunctionSymbol("s", 0, 1, "constructor"),
        FunctionSymbol("g3", 1, 0),
        FunctionSymbol("g2", 1, 0),
        FunctionSymbol("g1", 1, 0),
        FunctionSymbol("f", 1, 0),
    )
    sig = Signature(symbols)
    p = OrderParams({"0": 0, "s": 0, "g3": 1, "g2": 2, "g1": 3, "f": 4})
    return p, parse_term("f(s(;x);)", sig), parse_term("g1(g2(g3(x;););)", sig)


def test_bounded_aux_chain():
    p, s, t = _chain()
    assert aux_gt(s, t, p) is not None
    assert aux_gt_bounded(s, t, 2, p) is None
    assert aux_gt_bounded(s, t, 3, p) is None
    assert aux_gt_bounded(s, t, 4, p) is not None
    assert plpo_gt_bounded(s, t, 2, p) is None
    assert plpo_gt_bounded(s, t, 4, p) is not None


def test_bound_validated():
    p, s, t = _chain()
    with pytest.raises(ValueError):
        aux_gt_bounded(s, t, 1, p)
    with pytest.raises(ValueError):
        plpo_gt_bounded(s, t, 0, p)


def test_bounded_base_case():
    trs, p, t = setup("r_pr")
    c = plpo_gt_bounded(t("s(;x)"), Var("x"), 2, p)
    assert c is not None and c.bound == 2
    replay(c, p)
    assert aux_gt_bounded(t("s(;x)"), Var("x"), 2, p) is not None


def test_case4_primitive_recursion():
    trs, p, t = setup("r_pr")
    c = plpo_gt(t("f(;s(;x),y)"), t("f(;x,y)"), p)
    assert c.case_label == "Def2-Case4"


def test_case5_with_case3_inside():
    trs, p, t = setup("r_prp")
    c = plpo_gt(t("f(s(;x);y)"), t("f(x;P(x;y))"), p)
    assert c.case_label == "Def2-Case5"
    assert c.children[-1].case_label == "Def2-Case3"
    assert c.children[-1].rhs == t("P(x;y)")


def test_case3_over_two_case5():
    trs, p, t = setup("r_umr")
    c = plpo_gt(t("f(s(;x),s(;y);)"), t("h(x,y;f(x,P(x,y;);),f(s(;x),y;))"), p)
    assert c.case_label == "Def2-Case3"
    assert labels(c)[-2:] == ["Def2-Case5", "Def2-Case5"]


def test_simple_nested_recursion():
    trs, p, t = setup("r_snr")
    c = plpo_gt(t("f(s(;x);y)"), t("h(x;y,f(x;P(x;y,f(x;y))))"), p)
    assert c is not None and c.case_label == "Def2-Case3"
    replay(c, p)


def test_ackermann_lpo():
    trs, p, t = setup("ackermann")
    rule = trs.rules[2]
    c = lpo_gt(rule.lhs, rule.rhs, p)
    assert c is not None
    replay(c, p)
    assert plpo_gt(rule.lhs, rule.rhs, p) is None


def test_permutation_extension():
    sig = Signature((
        FunctionSymbol("0", 0, 0, "constructor"),
        FunctionSymbol("s", 0, 1, "constructor"),
        FunctionSymbol("f", 0, 2),
    ))
    s, t = parse_term("f(;s(;x),y)", sig), parse_term("f(;y,x)", sig)
    plain = OrderParams({"0": 0, "s": 0, "f": 1})
    assert plpo_gt(s, t, plain) is None
    perm = OrderParams({"0": 0, "s": 0, "f": 1}, permutation_extension=True)
    c = plpo_gt(s, t, perm)
    assert c is not None and c.case_label.startswith("Def2-Case4-perm")
    replay(c, perm)


def test_separation_override_changes_outcome():
    trs, p, t = setup("r_pr")
    s, u = t("f(;s(;x),y)"), t("g(;x)")
    assert plpo_gt(s, u, p) is not None
    # a normal argument of g must be reached by the auxiliary relation, which
    # cannot descend into the safe arguments of f
    moved = OrderParams(p.rank, p.lex_set, False, {"g": (True,)})
    c = plpo_gt(s, u, moved)
    assert c is None


def _random_case(seed):
    rng = random.Random(seed)
    sig, params = random_signature(rng)
    s, t = related_pair(rng, sig)
    return sig, params, s, t


@given(st.integers(0, 10**9))
def test_irreflexive(seed):
    rng = random.Random(seed)
    sig, params = random_signature(rng)
    u = random_term(rng, sig, 3)
    assert plpo_gt(u, u, params) is None
    assert lpo_gt(u, u, params) is None
    assert aux_gt(u, u, params) is None


@given(st.integers(0, 10**9))
def test_inclusions_and_replay(seed):
    sig, params, s, t = _random_case(seed)
    a = aux_gt(s, t, params)
    g = plpo_gt(s, t, params)
    l = lpo_gt(s, t, params)
    if a is not None:
        assert g is not None
        replay(a, params)
    if g is not None:
        assert l is not None
        replay(g, params)
        b = plpo_gt_bounded(s, t, max(2, t.size), params)
        assert b is not None
        replay(b, params)
    if l is not None:
        replay(l, params)


@settings(max_examples=60)
@given(st.integers(0, 10**9))
def test_bounded_monotone_in_budget(seed):
    sig, params, s, t = _random_case(seed)
    seen = False
    for ell in range(2, 7):
        held = plpo_gt_bounded(s, t, ell, params) is not None
        assert held or not seen
        seen = seen or held
    if seen:
        assert plpo_gt(s, t, params) is not None


@settings(max_examples=60)
@given(st.integers(0, 10**9))
def test_lpo_stable_under_ground_instances(seed):
    rng = random.Random(seed)
    sig, params = random_signature(rng)
    s, t = related_pair(rng, sig)
    if lpo_gt(s, t, params) is None:
        return
    sub = {v: random_term(rng, sig, 2, variables=()) for v in ("x", "y", "z")}
    assert lpo_gt(apply_subst(s, sub), apply_subst(t, sub), params) is not None
