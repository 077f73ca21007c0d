"""Terms with normal/safe argument separation, signatures and rewrite systems.

A function symbol ``f`` with ``k`` normal and ``l`` safe positions is written
``f(t1,...,tk ; u1,...,ul)``.  Identifiers that are not declared in the
signature are variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

CONSTRUCTOR = "constructor"
DEFINED = "defined"


class TrsError(ValueError):
    """Raised for malformed TRS text or ill-formed systems."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    normal_arity: int
    safe_arity: int
    kind: str = DEFINED
    lex: bool = False

    def __post_init__(self):
        if self.kind not in (CONSTRUCTOR, DEFINED):
            raise TrsError(f"unknown symbol kind {self.kind!r}")
        if self.lex and self.kind != DEFINED:
            raise TrsError(f"constructor {self.name} cannot be lexicographic")
        if self.normal_arity < 0 or self.safe_arity < 0:
            raise TrsError(f"negative arity for {self.name}")

    @property
    def arity(self) -> int:
        return self.normal_arity + self.safe_arity

    @property
    def is_constructor(self) -> bool:
        return self.kind == CONSTRUCTOR

    @property
    def is_defined(self) -> bool:
        return self.kind == DEFINED


class Term:
    """Base class of :class:`Var` and :class:`App`.  Instances are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_term(self)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("var", name)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    @property
    def size(self) -> int:
        return 1

    @property
    def is_ground(self) -> bool:
        return False


class App(Term):
    __slots__ = ("symbol", "normal", "safe", "args", "_hash", "_size", "_ground")

    def __init__(self, symbol: FunctionSymbol, normal: Sequence[Term] = (), safe: Sequence[Term] = ()):
        normal = tuple(normal)
        safe = tuple(safe)
        if len(normal) != symbol.normal_arity or len(safe) != symbol.safe_arity:
            raise TrsError(
                f"{symbol.name} expects {symbol.normal_arity};{symbol.safe_arity} arguments, "
                f"got {len(normal)};{len(safe)}"
            )
        args = normal + safe
        size = 1
        ground = True
        for a in args:
            size += a._size if type(a) is App else 1
            ground = ground and a.is_ground
        set_ = object.__setattr__
        set_(self, "symbol", symbol)
        set_(self, "normal", normal)
        set_(self, "safe", safe)
        set_(self, "args", args)
        set_(self, "_hash", hash((symbol.name, symbol.normal_arity, args)))
        set_(self, "_size", size)
        set_(self, "_ground", ground)

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and (self.symbol is other.symbol or self.symbol == other.symbol)
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({print_term(self)!r})"

    @property
    def size(self) -> int:
        return self._size

    @property
    def is_ground(self) -> bool:
        return self._ground

    def replace_args(self, args: Sequence[Term]) -> App:
        k = self.symbol.normal_arity
        return App(self.symbol, args[:k], args[k:])


def term_size(t: Term) -> int:
    """Number of nodes of ``t``; a variable counts as one node."""
    return t.size


def variables(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
        return
    for a in t.args:
        yield from variables(a)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def equiv(s: Term, t: Term, rank: Mapping[str, int] | None = None) -> bool:
    """Term equivalence induced by equal symbol ranks.

    Without a rank map only identical symbols are equivalent.
    """
    if isinstance(s, Var) or isinstance(t, Var):
        return s == t
    f, g = s.symbol, t.symbol
    if f.name != g.name:
        if rank is None or rank.get(f.name) != rank.get(g.name):
            return False
    if f.normal_arity != g.normal_arity or f.safe_arity != g.safe_arity:
        return False
    return all(equiv(a, b, rank) for a, b in zip(s.args, t.args))


def apply_subst(t: Term, subst: Mapping[str, Term], ground: bool = False) -> Term:
    """Simultaneously replace variables by their images.

    With ``ground=True`` an unmapped variable raises :class:`KeyError`.
    """
    if isinstance(t, Var):
        if t.name in subst:
            return subst[t.name]
        if ground:
            raise KeyError(f"variable {t.name} is not mapped by the substitution")
        return t
    if t.is_ground:
        return t
    return App(
        t.symbol,
        [apply_subst(a, subst, ground) for a in t.normal],
        [apply_subst(a, subst, ground) for a in t.safe],
    )


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    f = t.symbol
    if f.arity == 0:
        return f.name
    normal = ",".join(print_term(a) for a in t.normal)
    safe = ",".join(print_term(a) for a in t.safe)
    return f"{f.name}({normal};{safe})"


@dataclass(frozen=True)
class Rule:
    lhs: App
    rhs: Term

    def __post_init__(self):
        if not isinstance(self.lhs, App):
            raise TrsError("left-hand side of a rule must not be a variable")
        if not self.lhs.symbol.is_defined:
            raise TrsError(f"root of left-hand side {self.lhs} is not a defined symbol")
        missing = set(variables(self.rhs)) - set(variables(self.lhs))
        if missing:
            raise TrsError(f"rule {self}: right-hand side variables {sorted(missing)} not in left-hand side")

    def __str__(self):
        return f"{print_term(self.lhs)} -> {print_term(self.rhs)}"


@dataclass(frozen=True)
class Signature:
    symbols: tuple[FunctionSymbol, ...]
    _by_name: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        by_name = {}
        for f in self.symbols:
            if f.name in by_name:
                raise TrsError(f"symbol {f.name} declared twice")
            by_name[f.name] = f
        object.__setattr__(self, "_by_name", by_name)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __getitem__(self, name: str) -> FunctionSymbol:
        return self._by_name[name]

    def __iter__(self) -> Iterator[FunctionSymbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def get(self, name: str) -> FunctionSymbol | None:
        return self._by_name.get(name)

    @property
    def constructors(self) -> list[FunctionSymbol]:
        return [f for f in self.symbols if f.is_constructor]

    @property
    def defined(self) -> list[FunctionSymbol]:
        return [f for f in self.symbols if f.is_defined]

    def check(self) -> None:
        if not any(f.is_constructor and f.arity == 0 for f in self.symbols):
            raise TrsError("signature must contain a constructor constant")


@dataclass(frozen=True)
class Trs:
    signature: Signature
    strict: tuple[tuple[str, str], ...] = ()
    equal: tuple[tuple[str, str], ...] = ()
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        self.signature.check()
        for a, b in self.strict + self.equal:
            for name in (a, b):
                if name not in self.signature:
                    raise TrsError(f"precedence mentions undeclared symbol {name}")
        for rule in self.rules:
            for t in (rule.lhs, rule.rhs):
                for sub in subterms(t):
                    if isinstance(sub, App) and self.signature.get(sub.symbol.name) != sub.symbol:
                        raise TrsError(f"rule {rule} uses symbol {sub.symbol.name} not in signature")
        # raises on a strict cycle
        self.ranks()

    def ranks(self) -> dict[str, int]:
        return canonical_ranks([f.name for f in self.signature], self.strict, self.equal)

    def to_text(self) -> str:
        lines = ["signature"]
        for f in self.signature:
            kind = f.kind + (" lex" if f.lex else "")
            lines.append(f"  {f.name} : {kind} {f.normal_arity};{f.safe_arity}")
        lines.append("precedence")
        lines.extend(f"  {a} > {b}" for a, b in self.strict)
        lines.extend(f"  {a} = {b}" for a, b in self.equal)
        lines.append("rules")
        lines.extend(f"  {rule}" for rule in self.rules)
        return "\n".join(lines) + "\n"


def canonical_ranks(
    names: Sequence[str],
    strict: Iterable[tuple[str, str]],
    equal: Iterable[tuple[str, str]] = (),
) -> dict[str, int]:
    """Minimal consecutive ranks compatible with a quasi-order given by edges.

    Symbols in one strongly connected component of the ``>=`` graph share a
    rank; a strict edge inside a component is a cycle and rejected.  The rank
    of a component is the length of the longest strict chain below it.
    """
    strict = list(strict)
    graph: dict[str, set[str]] = {n: set() for n in names}
    for a, b in strict:
        graph[a].add(b)
    for a, b in equal:
        graph[a].add(b)
        graph[b].add(a)

    comp = _strongly_connected(names, graph)
    for a, b in strict:
        if comp[a] == comp[b]:
            raise TrsError(f"strict precedence cycle through {a} > {b}")

    below: dict[int, set[int]] = {}
    for a in names:
        for b in graph[a]:
            if comp[a] != comp[b]:
                below.setdefault(comp[a], set()).add(comp[b])

    height: dict[int, int] = {}

    def h(c: int) -> int:
        if c not in height:
            height[c] = 1 + max((h(d) for d in below.get(c, ())), default=-1)
        return height[c]

    return {n: h(comp[n]) for n in names}


def _strongly_connected(names: Sequence[str], graph: Mapping[str, set[str]]) -> dict[str, int]:
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set[str] = set()
    comp: dict[str, int] = {}
    counter = 0

    def visit(v: str) -> None:
        nonlocal counter
        index[v] = low[v] = counter
        counter += 1
        stack.append(v)
        on_stack.add(v)
        for w in sorted(graph[v]):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            cid = len(set(comp.values()))
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp[w] = cid
                if w == v:
                    break

    for v in names:
        if v not in index:
            visit(v)
    return comp


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z0-9_'^]+)|(?P<punct>[(),;]))")
_IDENT = re.compile(r"^[A-Za-z0-9_'^]+$")


class _TermParser:
    def __init__(self, text: str, signature: Signature, line: int | None, offset: int):
        self.text = text
        self.signature = signature
        self.line = line
        self.offset = offset
        self.pos = 0

    def error(self, message: str, pos: int | None = None) -> TrsError:
        col = (self.pos if pos is None else pos) + self.offset + 1
        return TrsError(message, self.line, col)

    def peek(self) -> tuple[str, str, int] | None:
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            rest = self.text[self.pos:]
            if rest.strip():
                raise self.error(f"unexpected character {rest.strip()[0]!r}", self.pos + len(rest) - len(rest.lstrip()))
            return None
        kind = "ident" if m.group("ident") else "punct"
        return kind, m.group(kind), m.start(kind)

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of term", len(self.text))
        m = _TOKEN.match(self.text, self.pos)
        self.pos = m.end()
        return tok

    def expect(self, punct: str) -> None:
        kind, value, pos = self.take()
        if kind != "punct" or value != punct:
            raise self.error(f"expected {punct!r}, found {value!r}", pos)

    def parse(self) -> Term:
        t = self.term()
        tok = self.peek()
        if tok is not None:
            raise self.error(f"trailing input {tok[1]!r}", tok[2])
        return t

    def term(self) -> Term:
        kind, name, pos = self.take()
        if kind != "ident":
            raise self.error(f"expected identifier, found {name!r}", pos)
        symbol = self.signature.get(name)
        tok = self.peek()
        has_args = tok is not None and tok[1] == "("
        if symbol is None:
            if has_args:
                raise self.error(f"undeclared symbol {name} used with arguments", pos)
            return Var(name)
        if not has_args:
            if symbol.arity != 0:
                raise self.error(
                    f"{name} expects {symbol.normal_arity};{symbol.safe_arity} arguments", pos
                )
            return App(symbol)
        self.take()
        groups: list[list[Term]] = [[]]
        tok = self.peek()
        if tok is not None and tok[1] == ")":
            self.take()
        else:
            while True:
                tok = self.peek()
                if tok is not None and tok[1] == ";":
                    if len(groups) == 2:
                        raise self.error("second ';' in argument list", tok[2])
                    self.take()
                    groups.append([])
                    continue
                if tok is not None and tok[1] == ")":
                    self.take()
                    break
                groups[-1].append(self.term())
                kind2, value, pos2 = self.take()
                if value == ")":
                    break
                if value == ";":
                    if len(groups) == 2:
                        raise self.error("second ';' in argument list", pos2)
                    groups.append([])
                    continue
                if value != ",":
                    raise self.error(f"expected ',' ';' or ')', found {value!r}", pos2)
        if len(groups) == 2:
            normal, safe = groups
        elif symbol.safe_arity == 0:
            normal, safe = groups[0], []
        elif symbol.normal_arity == 0:
            normal, safe = [], groups[0]
        else:
            raise self.error(f"{name} has normal and safe positions; separate them with ';'", pos)
        if len(normal) != symbol.normal_arity or len(safe) != symbol.safe_arity:
            raise self.error(
                f"arity mismatch for {name}: expected {symbol.normal_arity};{symbol.safe_arity}, "
                f"got {len(normal)};{len(safe)}",
                pos,
            )
        return App(symbol, normal, safe)


def parse_term(text: str, signature: Signature, line: int | None = None, offset: int = 0) -> Term:
    return _TermParser(text, signature, line, offset).parse()


_SIG_LINE = re.compile(
    r"^(?P<name>[A-Za-z0-9_'^]+)\s*:\s*(?P<kind>constructor|defined)(?P<lex>\s+lex)?\s+(?P<k>\d+)\s*;\s*(?P<l>\d+)$"
)


def parse_trs(text: str) -> Trs:
    """Parse the line-oriented TRS format into a validated :class:`Trs`."""
    section = None
    symbols: list[FunctionSymbol] = []
    strict: list[tuple[str, str]] = []
    equal: list[tuple[str, str]] = []
    pending_rules: list[tuple[int, str, int]] = []
    pending_prec: list[tuple[int, str, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        stripped = content.strip()
        if not stripped:
            continue
        indent = len(content) - len(content.lstrip())
        if stripped in ("signature", "precedence", "rules"):
            section = stripped
            continue
        if section is None:
            raise TrsError(f"expected a section header, found {stripped!r}", lineno, indent + 1)
        if section == "signature":
            m = _SIG_LINE.match(stripped)
            if not m:
                raise TrsError(f"malformed signature entry {stripped!r}", lineno, indent + 1)
            try:
                symbols.append(
                    FunctionSymbol(
                        m["name"], int(m["k"]), int(m["l"]),
                        m["kind"], bool(m["lex"]),
                    )
                )
            except TrsError as e:
                raise TrsError(str(e), lineno, indent + 1) from None
        elif section == "precedence":
            pending_prec.append((lineno, stripped, indent))
        else:
            pending_rules.append((lineno, content, 0))

    try:
        signature = Signature(tuple(symbols))
        signature.check()
    except TrsError as e:
        raise TrsError(str(e)) from None

    for lineno, entry, indent in pending_prec:
        m = re.match(r"^([A-Za-z0-9_'^]+)\s*([>=])\s*(.+)$", entry)
        if not m:
            raise TrsError(f"malformed precedence entry {entry!r}", lineno, indent + 1)
        left, op, rest = m.groups()
        rights = [r for r in re.split(r"[,\s]+", rest.strip()) if r]
        for name in [left, *rights]:
            if not _IDENT.match(name):
                raise TrsError(f"malformed symbol name {name!r}", lineno, indent + 1)
            if name not in signature:
                raise TrsError(f"precedence mentions undeclared symbol {name}", lineno, indent + 1)
        for right in rights:
            (strict if op == ">" else equal).append((left, right))

    try:
        canonical_ranks([f.name for f in signature], strict, equal)
    except TrsError as e:
        raise TrsError(str(e)) from None

    rules: list[Rule] = []
    for lineno, content, _ in pending_rules:
        if content.count("->") != 1:
            raise TrsError("a rule needs exactly one '->'", lineno, len(content) - len(content.lstrip()) + 1)
        arrow = content.index("->")
        lhs = parse_term(content[:arrow], signature, lineno, 0)
        rhs = parse_term(content[arrow + 2:], signature, lineno, arrow + 2)
        try:
            rules.append(Rule(lhs, rhs))
        except TrsError as e:
            raise TrsError(str(e), lineno) from None

    return Trs(signature, tuple(strict), tuple(equal), tuple(rules))


def numeral(n: int, zero: FunctionSymbol, succ: FunctionSymbol) -> Term:
    """The ground term s^n(0)."""
    t: Term = App(zero)
    for _ in range(n):
        t = App(succ, [t], []) if succ.normal_arity else App(succ, [], [t])
    return t
