"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL line."""

import itertools
import random
import time

import pytest

from plpo.compiler import Comp, PrimRec, Proj, Prp, Snr, Succ, Umr, Zero, compile_program, crosscheck
from plpo.interpretation import EvalBudget, Overflow, derive_params, f_m, f_m_iter, f_mn
from plpo.orders import OrderParams, aux_gt, lpo_gt, plpo_gt, plpo_gt_bounded
from plpo.orientation import SearchSpace, check_trs, search_lpo, search_orientation
from plpo.replay import is_valid
from plpo.rewriting import derivation_length, termination_probe
from plpo.terms import parse_term

from conftest import load
from oracles import brute_dl, brute_f, brute_fmn, by_judgment, emitted_certificates, mutants, random_signature, related_pair

ADD = PrimRec(Proj(1, 1), Comp(Succ(), (Proj(3, 3),)))
MUL = PrimRec(Zero(1), Comp(ADD, (Proj(3, 3), Proj(3, 2))))
PRP = Prp(Proj(1, 1), Comp(Succ(), (Proj(3, 3),)), Comp(Succ(), (Proj(2, 2),)))
UMR = Umr(Proj(1, 1), Comp(Succ(), (Proj(2, 2),)), Proj(1, 1), Proj(2, 2), Comp(ADD, (Proj(4, 3), Proj(4, 4))))
SNR = Snr(Proj(1, 1), Comp(Succ(), (Proj(3, 3),)), Proj(3, 3))
COMPILED = {"add": ADD, "mul": MUL, "prp": PRP, "umr": UMR, "snr": SNR}
EXAMPLES = ["r_pr", "r_prp", "r_umr", "r_snr"]


@pytest.fixture
def verdict(capsys):
    def emit(criterion: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
        assert ok, detail

    return emit


def _labels(cert):
    return [c.case_label for c in cert.children]


def test_criterion_1_golden_orientations(verdict):
    start = time.perf_counter()
    problems = []
    results = {}
    for name in EXAMPLES:
        trs = load(name)
        result = check_trs(trs, OrderParams.from_trs(trs))
        results[name] = result
        if not result.oriented:
            problems.append(f"{name} not oriented")
    if not problems:
        # Example 1: rule 1 by Case 3; rule 2 by Case 3 over a Case-4 recursive call
        pr = [c for _, c in results["r_pr"].per_rule]
        if not (pr[0].case_label == "Def2-Case3" and pr[1].case_label == "Def2-Case3"
                and _labels(pr[1])[-1] == "Def2-Case4"):
            problems.append("r_pr labels")
        # Example 2: Case 3, inner Case 5 whose parameter is handled by Case 3
        prp = results["r_prp"].per_rule[1][1]
        inner = prp.children[-1]
        if not (prp.case_label == "Def2-Case3" and inner.case_label == "Def2-Case5"
                and inner.children[-1].case_label == "Def2-Case3"):
            problems.append("r_prp labels")
        # Example 3: Case 3 over two Case-5 subproofs
        umr = results["r_umr"].per_rule[2][1]
        if not (umr.case_label == "Def2-Case3" and _labels(umr)[-2:] == ["Def2-Case5", "Def2-Case5"]):
            problems.append("r_umr labels")
        # Example 4: Case 3, Case 5, Case 3 for the parameter, Case 5 for the inner call
        snr = results["r_snr"].per_rule[1][1]
        call = snr.children[-1]
        param = call.children[-1]
        if not (snr.case_label == "Def2-Case3" and call.case_label == "Def2-Case5"
                and param.case_label == "Def2-Case3" and param.children[-1].case_label == "Def2-Case5"):
            problems.append("r_snr labels")
    elapsed = time.perf_counter() - start
    if elapsed >= 1.0:
        problems.append(f"took {elapsed:.2f}s")
    verdict(1, not problems, f"4 systems oriented with expected case labels in {elapsed:.3f}s {problems or ''}")


def test_criterion_2_negative_results(verdict):
    start = time.perf_counter()
    outcome = {}
    for name in ("ackermann", "gsnr2", "gsnr1"):
        trs = load(name)
        outcome[name] = search_orientation(trs, SearchSpace.full()) is not None
        outcome[name + ":lpo"] = search_lpo(trs) is not None
    elapsed = time.perf_counter() - start
    ok = (
        outcome == {"ackermann": False, "ackermann:lpo": True, "gsnr2": False, "gsnr2:lpo": True,
                    "gsnr1": True, "gsnr1:lpo": True}
        and elapsed < 300
    )
    verdict(2, ok, f"PLPO search {outcome}, {elapsed:.1f}s")


def test_criterion_3_inclusions(verdict, seed):
    rng = random.Random(seed)
    pairs = violations = 0
    signatures = 0
    counts = {"aux": 0, "plpo": 0, "lpo": 0}
    while pairs < 10_000:
        sig, params = random_signature(rng, n_defined=rng.randint(2, 4))
        signatures += 1
        for _ in range(500):
            s, t = related_pair(rng, sig, depth=rng.randint(2, 3))
            pairs += 1
            a, g, l = aux_gt(s, t, params), plpo_gt(s, t, params), lpo_gt(s, t, params)
            counts["aux"] += a is not None
            counts["plpo"] += g is not None
            counts["lpo"] += l is not None
            if a is not None and g is None:
                violations += 1
            if g is not None:
                if l is None:
                    violations += 1
                if plpo_gt_bounded(s, t, max(2, t.size), params) is None:
                    violations += 1
    ok = violations == 0 and signatures >= 3 and pairs >= 10_000
    verdict(3, ok, f"{pairs} pairs over {signatures} signatures, holds {counts}, {violations} violations")


def test_criterion_4_interpretation(verdict):
    bits = 10**6
    failures = []
    for d in (2, 3):
        for x in range(17):
            if f_m(0, x, d) != d ** (x + 1):
                failures.append(f"F0({x}) d={d}")
    for m in range(3):
        for xs in ([0], [3], [1, 2], [0, 0, 0]):
            if f_mn(m, 0, xs, 2) != 0:
                failures.append("F_m,0")
    small = EvalBudget(20_000)
    points = 0
    for m in range(3):
        for d in (2, 3):
            for x in range(6):
                for y in range(6):
                    a, b = f_m(m, x, d, small), f_m(m, x + y, d, small)
                    if isinstance(a, Overflow) or isinstance(b, Overflow):
                        continue
                    points += 1
                    if not (a > x and (y == 0 or b > a) and a + y <= b):
                        failures.append(f"monotone m={m} x={x} y={y} d={d}")
    lemma = sampled = 0
    grid = [xs for k in (1, 2, 3) for xs in itertools.product(range(4), repeat=k)]
    for m in range(3):
        for d in (2, 3, 4):
            for n in range(1, 4):
                for xs in grid:
                    sampled += 1
                    left = f_mn(m, n, xs, d, EvalBudget(bits))
                    right = f_m_iter(m + 1, n, sum(xs), d, EvalBudget(bits))
                    if isinstance(left, Overflow) or isinstance(right, Overflow):
                        continue
                    lemma += 1
                    if left > right:
                        failures.append(f"lemma m={m} n={n} xs={xs}")
    brute = 0
    for m in range(3):
        for d in (2, 3):
            for x in range(4):
                expected = brute_f(m, x, d, 4096)
                got = f_m(m, x, d, EvalBudget(4096))
                brute += 1
                if (expected is None) != isinstance(got, Overflow) or (expected is not None and got != expected):
                    failures.append(f"brute F m={m} x={x} d={d}")
            for n in range(4):
                for xs in ([0], [1, 0]):
                    expected = brute_fmn(m, n, xs, d, 4096)
                    got = f_mn(m, n, xs, d, EvalBudget(4096))
                    brute += 1
                    if (expected is None) != isinstance(got, Overflow) or (expected is not None and got != expected):
                        failures.append(f"brute Fmn m={m} n={n} xs={xs} d={d}")
    ok = not failures and points > 0 and lemma > 0
    verdict(4, ok, f"{points} monotonicity points, lemma evaluable at {lemma}/{sampled} points, {brute} brute-force matches {failures[:3]}")


def test_criterion_5_termination_probe(verdict):
    start = time.perf_counter()
    systems = {name: load(name) for name in EXAMPLES}
    systems.update({name: compile_program(p).trs for name, p in COMPILED.items()})
    bad = []
    edges = terms = 0
    for name, trs in systems.items():
        report = termination_probe(trs, 7)
        terms += report.terms
        edges += report.edges_checked
        if not report.ok or report.edges_checked == 0:
            bad.append(name)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 120
    verdict(5, ok, f"{len(systems)} systems, {terms} start terms, {edges} edges decrease, {elapsed:.1f}s {bad or ''}")


def test_criterion_6_derivation_lengths(verdict):
    trs = load("r_pr")
    got = []
    for n in range(7):
        t = parse_term("f(;" + "s(;" * n + "0" + ")" * n + ",0)", trs.signature)
        got.append((derivation_length(t, trs).max_length, brute_dl(t, trs)))
    p = derive_params(trs)
    ok = got == [(n + 1, n + 1) for n in range(7)] and (p.ell, p.K, p.d) == (6, 2, 26)
    verdict(6, ok, f"lengths {[a for a, _ in got]}, oracle {[b for _, b in got]}, ell={p.ell}, K={p.K}, d={p.d}")


def test_criterion_7_schema_closure(verdict):
    start = time.perf_counter()
    bad = []
    checked = 0
    for name, program in COMPILED.items():
        system = compile_program(program)
        if not check_trs(system.trs, system.params).oriented:
            bad.append(f"{name} not oriented")
        bound = 4 if name == "snr" else 5
        for args in itertools.product(range(bound + 1), repeat=program.arity):
            checked += 1
            if not crosscheck(program, args, system):
                bad.append(f"{name}{args}")
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 120
    verdict(7, ok, f"5 fixtures oriented, {checked} argument tuples agree, {elapsed:.1f}s {bad[:3]}")


def test_criterion_8_certificate_replay(verdict, seed):
    systems = []
    for name in EXAMPLES + ["gsnr1", "ackermann"]:
        trs = load(name)
        systems.append((trs, OrderParams.from_trs(trs)))
    for program in COMPILED.values():
        system = compile_program(program)
        systems.append((system.trs, system.params))
    rng = random.Random(seed)
    certs = emitted_certificates(systems, rng, random_pairs=400)
    valid = sum(is_valid(c, p) for c, p in certs)
    groups = by_judgment(certs)
    rejected = {}
    for judgment, pool in sorted(groups.items()):
        sample = rng.sample(pool, min(20, len(pool)))
        probes = []
        k = 0
        while len(probes) < 20:
            cert, params = sample[k % len(sample)]
            probes.extend((bad, params) for bad in mutants(cert, rng, count=1, start=k))
            k += 1
        rejected[judgment] = sum(not is_valid(bad, params) for bad, params in probes)
    ok = valid == len(certs) and all(v == 20 for v in rejected.values()) and len(rejected) == 6
    verdict(8, ok, f"{valid}/{len(certs)} certificates replay; mutants rejected per class {rejected}")
