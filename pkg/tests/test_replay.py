import random
from dataclasses import replace

import pytest

from plpo.orders import EQUIV, OrderParams, plpo_gt
from plpo.replay import CertificateError, is_valid, replay
from plpo.terms import parse_term

from conftest import load
from oracles import by_judgment, emitted_certificates, mutants

FIXTURES = ["r_pr", "r_prp", "r_umr", "r_snr", "gsnr1", "ackermann"]


@pytest.fixture(scope="module")
def groups():
    systems = []
    for name in FIXTURES:
        trs = load(name)
        systems.append((trs, OrderParams.from_trs(trs)))
    certs = emitted_certificates(systems, random.Random(7), random_pairs=300)
    return certs, by_judgment(certs)


def test_every_emitted_certificate_replays(groups):
    certs, _ = groups
    assert certs
    for cert, params in certs:
        replay(cert, params)


def test_all_judgments_present(groups):
    _, g = groups
    assert set(g) == {"AUX", "AUX_BOUNDED", "PLPO", "PLPO_BOUNDED", "LPO", "EQUIV"}


@pytest.mark.parametrize("judgment", ["AUX", "AUX_BOUNDED", "PLPO", "PLPO_BOUNDED", "LPO", "EQUIV"])
def test_mutants_rejected(groups, judgment, seed):
    _, g = groups
    rng = random.Random(seed)
    pool = g[judgment]
    probes = 0
    for k, (cert, params) in enumerate(rng.sample(pool, min(len(pool), 20))):
        for bad in mutants(cert, rng, count=1 if len(pool) >= 20 else 20 // len(pool) + 1, start=k):
            assert not is_valid(bad, params), bad.format()
            probes += 1
    assert probes >= 20


def test_bound_tampering():
    trs = load("r_prp")
    p = OrderParams.from_trs(trs)
    s = parse_term("f(s(;x);y)", trs.signature)
    t = parse_term("h(x;y,f(x;P(x;y)))", trs.signature)
    from plpo.orders import plpo_gt_bounded
    cert = plpo_gt_bounded(s, t, 6, p)
    replay(cert, p)
    with pytest.raises(CertificateError):
        replay(replace(cert, bound=None), p)
    with pytest.raises(CertificateError):
        replay(replace(cert, judgment="PLPO"), p)


def test_params_matter():
    trs = load("r_prp")
    p = OrderParams.from_trs(trs)
    rule = trs.rules[1]
    cert = plpo_gt(rule.lhs, rule.rhs, p)
    replay(cert, p)
    flat = OrderParams({k: 0 for k in p.rank}, p.lex_set)
    assert not is_valid(cert, flat)
    no_lex = OrderParams(p.rank, frozenset())
    assert not is_valid(cert, no_lex)


def test_equiv_leaf_checked():
    trs = load("r_pr")
    p = OrderParams.from_trs(trs)
    cert = plpo_gt(parse_term("f(;0,y)", trs.signature), parse_term("y", trs.signature), p)
    leaf = cert.children[0]
    assert leaf.judgment == EQUIV
    bad = replace(cert, children=(replace(leaf, rhs=parse_term("0", trs.signature)),))
    assert not is_valid(bad, p)
