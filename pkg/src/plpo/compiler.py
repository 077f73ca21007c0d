"""Compile primitive recursive programs into PLPO-orientable rewrite systems.

Plain programs (initial functions, composition, primitive recursion) use
safe argument positions only.  The schemas PRP, UMR and SNR compile to a
lexicographic recursion symbol ``f`` whose calls to the component
programs go through primed wrapper symbols that move arguments from the
normal/safe split back into safe-only positions.

Symbol names are derived from the subprogram path: the main symbol is
``f`` and the i-th component of the program named ``n`` is ``n_i``.
Structurally identical subprograms share one compiled symbol.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .orders import OrderParams
from .rewriting import normalize
from .terms import (
    CONSTRUCTOR,
    DEFINED,
    App,
    FunctionSymbol,
    Rule,
    Signature,
    Term,
    Trs,
    Var,
)


class ProgramError(ValueError):
    """Arity mismatch or malformed program description."""


class EvalLimit(RuntimeError):
    """The direct evaluator exceeded its step budget."""


# ---------------------------------------------------------------------------
# programs


class Program:
    __slots__ = ()

    @property
    def arity(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Zero(Program):
    k: int

    @property
    def arity(self):
        return self.k


@dataclass(frozen=True)
class Succ(Program):
    @property
    def arity(self):
        return 1


@dataclass(frozen=True)
class Proj(Program):
    k: int
    j: int  # 1-based

    @property
    def arity(self):
        return self.k


@dataclass(frozen=True)
class Comp(Program):
    h: Program
    gs: tuple[Program, ...]

    @property
    def arity(self):
        return self.gs[0].arity


@dataclass(frozen=True)
class PrimRec(Program):
    """f(0, ys) = g(ys);  f(x+1, ys) = h(x, ys, f(x, ys))."""

    g: Program
    h: Program

    @property
    def arity(self):
        return self.g.arity + 1


@dataclass(frozen=True)
class Prp(Program):
    """f(0, y) = g(y);  f(x+1, y) = h(x, y, f(x, p(x, y)))."""

    g: Program
    h: Program
    p: Program

    @property
    def arity(self):
        return 2


@dataclass(frozen=True)
class Umr(Program):
    """f(0, y) = g0(y);  f(x+1, 0) = g1(x, f(x, q(x)));
    f(x+1, y+1) = h(x, y, f(x, p(x, y)), f(x+1, y))."""

    g0: Program
    g1: Program
    q: Program
    p: Program
    h: Program

    @property
    def arity(self):
        return 2


@dataclass(frozen=True)
class Snr(Program):
    """f(0, y) = g(y);  f(x+1, y) = h(x, y, f(x, p(x, y, f(x, y))))."""

    g: Program
    h: Program
    p: Program

    @property
    def arity(self):
        return 2


@dataclass(frozen=True)
class Stub(Program):
    """An uninterpreted function symbol with no rules."""

    name: str
    k: int

    @property
    def arity(self):
        return self.k


SCHEMAS = (Prp, Umr, Snr)

_SCHEMA_ARITIES = {
    Prp: {"g": 1, "h": 3, "p": 2},
    Umr: {"g0": 1, "g1": 2, "q": 1, "p": 2, "h": 4},
    Snr: {"g": 1, "h": 3, "p": 3},
}


def components(p: Program) -> tuple[Program, ...]:
    if isinstance(p, Comp):
        return (p.h,) + tuple(p.gs)
    if isinstance(p, PrimRec):
        return (p.g, p.h)
    if isinstance(p, Prp) or isinstance(p, Snr):
        return (p.g, p.h, p.p)
    if isinstance(p, Umr):
        return (p.g0, p.g1, p.q, p.p, p.h)
    return ()


def validate(p: Program, top: bool = True) -> None:
    """Raise :class:`ProgramError` unless ``p`` is arity consistent."""
    if isinstance(p, Zero):
        if p.k < 0:
            raise ProgramError("zero: negative arity")
    elif isinstance(p, Proj):
        if not 1 <= p.j <= p.k:
            raise ProgramError(f"proj({p.k},{p.j}): index out of range")
    elif isinstance(p, Stub):
        if p.k < 0 or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", p.name):
            raise ProgramError(f"bad stub {p.name}/{p.k}")
    elif isinstance(p, Comp):
        if not p.gs:
            raise ProgramError("comp needs at least one inner function")
        ks = {g.arity for g in p.gs}
        if len(ks) != 1:
            raise ProgramError(f"comp: inner functions have arities {sorted(ks)}")
        if p.h.arity != len(p.gs):
            raise ProgramError(f"comp: outer function has arity {p.h.arity}, expected {len(p.gs)}")
    elif isinstance(p, PrimRec):
        if p.h.arity != p.g.arity + 2:
            raise ProgramError(
                f"primrec: step function has arity {p.h.arity}, expected {p.g.arity + 2}"
            )
    elif isinstance(p, SCHEMAS):
        # recursion results sit in normal positions, so these cannot feed safe-only callers
        if not top:
            raise ProgramError(f"{type(p).__name__.lower()} is only supported as the main program")
        for field, want in _SCHEMA_ARITIES[type(p)].items():
            got = getattr(p, field).arity
            if got != want:
                raise ProgramError(f"{type(p).__name__.lower()}: {field} has arity {got}, expected {want}")
    elif not isinstance(p, Succ):
        raise ProgramError(f"not a program: {p!r}")
    for c in components(p):
        validate(c, top=False)


# ---------------------------------------------------------------------------
# direct evaluation


def eval_oracle(p: Program, args: Sequence[int], max_steps: int = 10_000_000) -> int:
    """Evaluate ``p`` from its defining equations, without rewriting."""
    validate(p)
    if len(args) != p.arity:
        raise ProgramError(f"program has arity {p.arity}, got {len(args)} arguments")
    budget = [max_steps]

    def tick():
        budget[0] -= 1
        if budget[0] < 0:
            raise EvalLimit(f"evaluation exceeded {max_steps} steps")

    @lru_cache(maxsize=None)
    def ev(q: Program, xs: tuple[int, ...]) -> int:
        tick()
        if isinstance(q, Zero):
            return 0
        if isinstance(q, Succ):
            return xs[0] + 1
        if isinstance(q, Proj):
            return xs[q.j - 1]
        if isinstance(q, Stub):
            raise ProgramError(f"cannot evaluate stub {q.name}")
        if isinstance(q, Comp):
            return ev(q.h, tuple(ev(g, xs) for g in q.gs))
        if isinstance(q, PrimRec):
            acc = ev(q.g, xs[1:])
            for i in range(xs[0]):
                acc = ev(q.h, (i,) + xs[1:] + (acc,))
            return acc
        x, y = xs
        if x == 0:
            return ev(q.g0 if isinstance(q, Umr) else q.g, (y,))
        if isinstance(q, Prp):
            return ev(q.h, (x - 1, y, ev(q, (x - 1, ev(q.p, (x - 1, y))))))
        if isinstance(q, Snr):
            inner = ev(q, (x - 1, y))
            return ev(q.h, (x - 1, y, ev(q, (x - 1, ev(q.p, (x - 1, y, inner))))))
        if y == 0:
            return ev(q.g1, (x - 1, ev(q, (x - 1, ev(q.q, (x - 1,))))))
        return ev(q.h, (x - 1, y - 1, ev(q, (x - 1, ev(q.p, (x - 1, y - 1)))), ev(q, (x, y - 1))))

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 100_000))
    try:
        return ev(p, tuple(args))
    except RecursionError as exc:
        raise EvalLimit("evaluation exceeded the recursion depth") from exc
    finally:
        sys.setrecursionlimit(limit)


# ---------------------------------------------------------------------------
# compilation

ZERO = FunctionSymbol("0", 0, 0, CONSTRUCTOR)
SUCC = FunctionSymbol("s", 0, 1, CONSTRUCTOR)


@dataclass
class CompiledSystem:
    trs: Trs
    main_symbol: FunctionSymbol
    params: OrderParams


class _Compiler:
    def __init__(self):
        self.symbols: dict[str, FunctionSymbol] = {"0": ZERO, "s": SUCC}
        self.rules: list[Rule] = []
        self.strict: list[tuple[str, str]] = []
        self.done: dict[Program, FunctionSymbol] = {}
        self.wrappers: dict[tuple[str, int], FunctionSymbol] = {}

    def declare(self, name, k, l, lex=False) -> FunctionSymbol:
        if name in self.symbols:
            raise ProgramError(f"symbol {name} declared twice")
        f = FunctionSymbol(name, k, l, DEFINED, lex)
        self.symbols[name] = f
        return f

    def above(self, f: FunctionSymbol, *gs: FunctionSymbol) -> None:
        for g in gs:
            if (f.name, g.name) not in self.strict:
                self.strict.append((f.name, g.name))

    def rule(self, lhs: App, rhs: Term) -> None:
        self.rules.append(Rule(lhs, rhs))

    def safe_only(self, p: Program, name: str) -> FunctionSymbol:
        """Compile ``p`` to a symbol whose positions are all safe."""
        hit = self.done.get(p)
        if hit is not None:
            return hit
        if isinstance(p, Stub):
            f = self.symbols.get(p.name)
            if f is None:
                f = self.declare(p.name, 0, p.k)
            elif f.arity != p.k or f.normal_arity:
                raise ProgramError(f"stub {p.name} used with two arities")
            self.done[p] = f
            return f
        xs = [Var(f"x{i}") for i in range(1, p.arity + 1)]
        f = self.declare(name, 0, p.arity)
        self.done[p] = f
        if isinstance(p, Zero):
            self.rule(App(f, (), xs), App(ZERO))
            self.above(f, ZERO)
        elif isinstance(p, Succ):
            self.rule(App(f, (), xs), App(SUCC, (), xs))
            self.above(f, SUCC)
        elif isinstance(p, Proj):
            self.rule(App(f, (), xs), xs[p.j - 1])
        elif isinstance(p, Comp):
            h = self.safe_only(p.h, f"{name}_0")
            gs = [self.safe_only(g, f"{name}_{i}") for i, g in enumerate(p.gs, start=1)]
            self.rule(App(f, (), xs), App(h, (), [App(g, (), xs) for g in gs]))
            self.above(f, h, *gs)
        elif isinstance(p, PrimRec):
            g = self.safe_only(p.g, f"{name}_0")
            h = self.safe_only(p.h, f"{name}_1")
            x, ys = Var("x"), xs[1:]
            self.rule(App(f, (), [App(ZERO)] + ys), App(g, (), ys))
            self.rule(
                App(f, (), [App(SUCC, (), [x])] + ys),
                App(h, (), [x] + ys + [App(f, (), [x] + ys)]),
            )
            self.above(f, g, h)
        else:
            raise ProgramError(f"{type(p).__name__.lower()} is only supported as the main program")
        return f

    def wrapper(self, inner: FunctionSymbol, k: int) -> FunctionSymbol:
        """inner'(x1..xk; rest) -> inner(; x1..xk, rest) with inner' above inner."""
        hit = self.wrappers.get((inner.name, k))
        if hit is not None:
            return hit
        w = self.declare(inner.name + "'", k, inner.arity - k)
        self.wrappers[(inner.name, k)] = w
        xs = [Var(f"x{i}") for i in range(1, inner.arity + 1)]
        self.rule(App(w, xs[:k], xs[k:]), App(inner, (), xs))
        self.above(w, inner)
        return w

    def schema(self, p: Program, name: str) -> FunctionSymbol:
        x, y = Var("x"), Var("y")
        zero = App(ZERO)

        def s(t):
            return App(SUCC, (), [t])

        if isinstance(p, Umr):
            # both recursion arguments are normal, as in the unnested multiple recursion example
            f = self.declare(name, 2, 0, lex=True)
            g0 = self.wrapper(self.safe_only(p.g0, f"{name}_0"), 1)
            g1 = self.wrapper(self.safe_only(p.g1, f"{name}_1"), 1)
            q = self.wrapper(self.safe_only(p.q, f"{name}_2"), 1)
            pp = self.wrapper(self.safe_only(p.p, f"{name}_3"), 2)
            h = self.wrapper(self.safe_only(p.h, f"{name}_4"), 2)
            self.rule(App(f, [zero, y]), App(g0, [y]))
            self.rule(App(f, [s(x), zero]), App(g1, [x], [App(f, [x, App(q, [x])])]))
            self.rule(
                App(f, [s(x), s(y)]),
                App(h, [x, y], [App(f, [x, App(pp, [x, y])]), App(f, [s(x), y])]),
            )
            self.above(f, g0, g1, q, pp, h)
            return f
        # PRP and SNR: f(x; y), g(; y), wrappers P'(x; y[, z]) and h'(x; y, z)
        f = self.declare(name, 1, 1, lex=True)
        g = self.safe_only(p.g, f"{name}_0")
        h = self.wrapper(self.safe_only(p.h, f"{name}_1"), 1)
        pp = self.wrapper(self.safe_only(p.p, f"{name}_2"), 1)
        self.rule(App(f, [zero], [y]), App(g, (), [y]))
        if isinstance(p, Prp):
            arg = App(pp, [x], [y])
        else:
            arg = App(pp, [x], [y, App(f, [x], [y])])
        self.rule(App(f, [s(x)], [y]), App(h, [x], [y, App(f, [x], [arg])]))
        self.above(f, g, pp, h)
        return f

    def build(self) -> Trs:
        return Trs(Signature(tuple(self.symbols.values())), tuple(self.strict), (), tuple(self.rules))


def compile_program(p: Program, name: str = "f") -> CompiledSystem:
    """Compile ``p`` into a rewrite system whose main symbol is ``name``."""
    validate(p)
    c = _Compiler()
    if isinstance(p, SCHEMAS):
        main = c.schema(p, name)
    else:
        main = c.safe_only(p, name)
    trs = c.build()
    return CompiledSystem(trs, trs.signature[main.name], OrderParams.from_trs(trs))


compile = compile_program  # noqa: A001  (the public operation name)


def numeral(n: int) -> Term:
    t: Term = App(ZERO)
    for _ in range(n):
        t = App(SUCC, (), [t])
    return t


def decode_numeral(t: Term) -> int:
    """The number denoted by s^n(0); anything else raises ``ValueError``."""
    n = 0
    while isinstance(t, App) and t.symbol.name == "s" and t.symbol.arity == 1:
        n += 1
        t = t.args[0]
    if not (isinstance(t, App) and t.symbol.name == "0" and t.symbol.arity == 0):
        raise ValueError(f"normal form is not a numeral: {t}")
    return n


def main_term(system: CompiledSystem, args: Sequence[int]) -> App:
    f = system.main_symbol
    if len(args) != f.arity:
        raise ProgramError(f"{f.name} takes {f.arity} arguments, got {len(args)}")
    ns = [numeral(a) for a in args]
    return App(f, ns[: f.normal_arity], ns[f.normal_arity:])


def run_compiled(system: CompiledSystem, args: Sequence[int], max_steps: int = 1_000_000) -> int:
    return decode_numeral(normalize(main_term(system, args), system.trs, max_steps))


def crosscheck(
    p: Program, args: Sequence[int], system: CompiledSystem | None = None, max_steps: int = 1_000_000
) -> bool:
    """True iff the compiled system and the direct evaluator agree on ``args``."""
    if system is None:
        system = compile_program(p)
    return run_compiled(system, args, max_steps) == eval_oracle(p, args)


# ---------------------------------------------------------------------------
# schema files

_DEF = re.compile(r"^def\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)$")
_TOK = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),;]))")


class _ExprParser:
    def __init__(self, text: str, env: dict[str, Program], lineno: int):
        self.toks: list[str] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOK.match(text, pos)
            if not m or m.end() == pos:
                raise ProgramError(f"line {lineno}: unexpected character {text[pos]!r}")
            self.toks.append(m.group(m.lastgroup))
            pos = m.end()
        self.i = 0
        self.env = env
        self.lineno = lineno

    def error(self, msg):
        return ProgramError(f"line {self.lineno}: {msg}")

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        tok = self.peek()
        if tok is None or (want is not None and tok != want):
            raise self.error(f"expected {want or 'a token'}, found {tok or 'end of line'}")
        self.i += 1
        return tok

    def number(self) -> int:
        tok = self.take()
        if not tok.isdigit():
            raise self.error(f"expected a number, found {tok}")
        return int(tok)

    def expr(self) -> Program:
        tok = self.take()
        if tok == "succ":
            return Succ()
        if tok == "zero":
            self.take("(")
            k = self.number()
            self.take(")")
            return Zero(k)
        if tok == "proj":
            self.take("(")
            k = self.number()
            self.take(",")
            j = self.number()
            self.take(")")
            return Proj(k, j)
        if tok == "stub":
            self.take("(")
            name = self.take()
            self.take(",")
            k = self.number()
            self.take(")")
            return Stub(name, k)
        if tok == "comp":
            self.take("(")
            h = self.expr()
            self.take(";")
            gs = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                gs.append(self.expr())
            self.take(")")
            return Comp(h, tuple(gs))
        arity = {"primrec": 2, "prp": 3, "snr": 3, "umr": 5}.get(tok)
        if arity is not None:
            self.take("(")
            parts = [self.expr()]
            for _ in range(arity - 1):
                self.take(",")
                parts.append(self.expr())
            self.take(")")
            return {"primrec": PrimRec, "prp": Prp, "snr": Snr, "umr": Umr}[tok](*parts)
        if tok in self.env:
            return self.env[tok]
        raise self.error(f"unknown name {tok}")

    def parse(self) -> Program:
        p = self.expr()
        if self.peek() is not None:
            raise self.error(f"trailing input {self.peek()}")
        return p


def parse_schema(text: str) -> dict[str, Program]:
    """Parse ``def name = expr`` lines; later definitions may use earlier ones."""
    env: dict[str, Program] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _DEF.match(line)
        if not m:
            raise ProgramError(f"line {lineno}: expected 'def name = expr'")
        name, body = m.groups()
        if name in env:
            raise ProgramError(f"line {lineno}: {name} defined twice")
        p = _ExprParser(body, env, lineno).parse()
        validate(p)
        env[name] = p
    if not env:
        raise ProgramError("schema file defines nothing")
    return env
