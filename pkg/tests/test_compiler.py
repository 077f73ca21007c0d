import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plpo.compiler import (
    Comp,
    PrimRec,
    ProgramError,
    Proj,
    Prp,
    Snr,
    Stub,
    Succ,
    Umr,
    Zero,
    compile_program,
    crosscheck,
    decode_numeral,
    eval_oracle,
    numeral,
    parse_schema,
    run_compiled,
)
from plpo.orientation import check_trs
from plpo.replay import replay
from plpo.terms import print_term

ADD = PrimRec(Proj(1, 1), Comp(Succ(), (Proj(3, 3),)))
MUL = PrimRec(Zero(1), Comp(ADD, (Proj(3, 3), Proj(3, 2))))
INC = Comp(Succ(), (Proj(3, 3),))
PRP = Prp(Proj(1, 1), INC, Proj(2, 2))
UMR = Umr(Proj(1, 1), Comp(Succ(), (Proj(2, 2),)), Proj(1, 1), Proj(2, 2), Comp(ADD, (Proj(4, 3), Proj(4, 4))))
SNR = Snr(Proj(1, 1), INC, Proj(3, 3))


def oriented(system):
    result = check_trs(system.trs, system.params)
    for _, cert in result.per_rule:
        if cert is not None:
            replay(cert, system.params)
    return result.oriented


def test_eval_oracle_examples():
    assert eval_oracle(ADD, (2, 3)) == 5
    assert eval_oracle(MUL, (3, 4)) == 12
    assert eval_oracle(PRP, (3, 4)) == 7
    assert eval_oracle(Zero(2), (9, 9)) == 0
    # f(x, y) = y + 2^x - 1
    assert [eval_oracle(SNR, (x, 3)) for x in range(4)] == [3, 4, 6, 10]


def test_umr_by_hand():
    # f(0,y) = y; f(x+1,0) = f(x,x) + 1; f(x+1,y+1) = f(x,y) + f(x+1,y)
    def ref(x, y):
        if x == 0:
            return y
        if y == 0:
            return ref(x - 1, x - 1) + 1
        return ref(x - 1, y - 1) + ref(x, y - 1)

    for x, y in itertools.product(range(4), repeat=2):
        assert eval_oracle(UMR, (x, y)) == ref(x, y)


def test_compile_addition():
    system = compile_program(ADD)
    assert oriented(system)
    assert run_compiled(system, (2, 3)) == 5


def test_compile_zero():
    system = compile_program(Zero(2))
    assert len(system.trs.rules) == 1
    assert str(system.trs.rules[0]) == "f(;x1,x2) -> 0"
    assert oriented(system)
    assert system.params.rank["f"] > system.params.rank["0"]


def test_compile_snr_with_stubs():
    system = compile_program(Snr(Stub("g", 1), Stub("h", 3), Stub("P", 3)))
    assert oriented(system)
    rules = [str(r) for r in system.trs.rules]
    assert "f(0;y) -> g(;y)" in rules
    assert "f(s(;x);y) -> h'(x;y,f(x;P'(x;y,f(x;y))))" in rules
    assert "h'(x1;x2,x3) -> h(;x1,x2,x3)" in rules
    assert "P'(x1;x2,x3) -> P(;x1,x2,x3)" in rules
    assert len(rules) == 4
    assert system.trs.signature["f"].lex


@pytest.mark.parametrize("program, bound", [
    (ADD, 5), (MUL, 5), (PRP, 5), (UMR, 5), (SNR, 4),
    (Comp(MUL, (Proj(2, 2), Proj(2, 1))), 3),
    (Prp(Zero(1), Comp(ADD, (Proj(3, 2), Proj(3, 3))), Comp(Succ(), (Proj(2, 2),))), 3),
])
def test_crosscheck(program, bound):
    system = compile_program(program)
    assert oriented(system)
    for args in itertools.product(range(bound + 1), repeat=program.arity):
        assert crosscheck(program, args, system), args


def test_all_zero_arguments():
    for program in (ADD, MUL, PRP, UMR, SNR, Zero(3), Proj(3, 2)):
        assert crosscheck(program, (0,) * program.arity)


def test_subprograms_are_shared():
    square = Comp(MUL, (Proj(1, 1), Proj(1, 1)))
    system = compile_program(square)
    # mul appears once however many times it is referenced
    names = [f.name for f in system.trs.signature]
    assert len(names) == len(set(names))
    assert run_compiled(system, (4,)) == 16


@pytest.mark.parametrize("bad", [
    Proj(2, 3),
    Comp(ADD, (Proj(1, 1),)),
    Comp(ADD, (Proj(1, 1), Proj(2, 1))),
    PrimRec(Proj(1, 1), Proj(2, 1)),
    Prp(Proj(1, 1), INC, Proj(3, 3)),
    Comp(PRP, (Proj(2, 1), Proj(2, 2))),
])
def test_invalid_programs(bad):
    with pytest.raises(ProgramError):
        compile_program(bad)


def test_numerals():
    assert decode_numeral(numeral(4)) == 4
    assert print_term(numeral(2)) == "s(;s(;0))"
    with pytest.raises(ValueError):
        decode_numeral(compile_program(ADD).trs.rules[0].lhs)


def test_parse_schema():
    text = """
    # arithmetic
    def add = primrec(proj(1,1), comp(succ; proj(3,3)))
    def mul = primrec(zero(1), comp(add; proj(3,3), proj(3,2)))
    def twice = snr(proj(1,1), comp(succ; proj(3,3)), proj(3,3))
    def u = umr(proj(1,1), comp(succ; proj(2,2)), proj(1,1), proj(2,2), comp(add; proj(4,3), proj(4,4)))
    def q = prp(stub(g,1), stub(h,3), stub(p,2))
    """
    defs = parse_schema(text)
    assert list(defs) == ["add", "mul", "twice", "u", "q"]
    assert defs["add"] == ADD
    assert defs["mul"] == MUL
    assert defs["twice"] == SNR
    assert defs["u"] == UMR
    assert defs["q"] == Prp(Stub("g", 1), Stub("h", 3), Stub("p", 2))


@pytest.mark.parametrize("text", [
    "def a = nope(1)",
    "def a = proj(1,2)",
    "def a = comp(succ; b)",
    "def a = proj(1,1)\ndef a = proj(1,1)",
    "a = proj(1,1)",
    "def a = proj(1,1",
])
def test_parse_schema_errors(text):
    with pytest.raises(ProgramError):
        parse_schema(text)


@settings(max_examples=25)
@given(st.sampled_from([ADD, MUL, PRP, UMR]), st.integers(0, 3), st.integers(0, 3))
def test_random_crosscheck(program, x, y):
    assert crosscheck(program, (x, y))
