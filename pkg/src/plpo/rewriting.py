"""Full rewriting over ground terms, derivation lengths and normalisation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .terms import App, FunctionSymbol, Rule, Term, Trs, Var, apply_subst, print_term, variables

DEFAULT_MAX_TERMS = 2_000_000
DEFAULT_MAX_DEPTH = 100_000


class StepLimit(RuntimeError):
    """Normalisation did not finish within the step budget."""


@dataclass(frozen=True)
class RewriteStep:
    source: Term
    target: Term
    rule_index: int
    position: tuple[int, ...]


@dataclass
class DerivationReport:
    start: Term
    max_length: int | None
    explored: int
    status: str = "ok"  # "ok", "cycle" or "limit"
    cycle: tuple = ()
    limit: str | None = None

    @property
    def terminating(self) -> bool:
        return self.status == "ok"


def match(pattern: Term, term: Term, subst: dict) -> dict | None:
    if isinstance(pattern, Var):
        bound = subst.get(pattern.name)
        if bound is None:
            subst[pattern.name] = term
            return subst
        return subst if bound == term else None
    if not isinstance(term, App) or term.symbol.name != pattern.symbol.name:
        return None
    for p, t in zip(pattern.args, term.args):
        if match(p, t, subst) is None:
            return None
    return subst


class RewriteGraph:
    """Lazily explored rewrite graph with memoised derivation lengths."""

    def __init__(self, trs: Trs):
        self.trs = trs
        self.by_root: dict[str, list[tuple[int, Rule]]] = {}
        for i, rule in enumerate(trs.rules):
            self.by_root.setdefault(rule.lhs.symbol.name, []).append((i, rule))
        self._kids: dict[Term, list[tuple[Term, bool]]] = {}
        self._kinds: dict[tuple[int, str], str] = {}
        self._plans: dict[Term, tuple] = {}
        self._rsteps: dict[Term, tuple[Term, ...]] = {}
        # any ground constant stands in for an erased argument
        self.filler = App(next(f for f in trs.signature.constructors if f.arity == 0))
        self.lengths: dict[Term, int] = {}

    def root_steps(self, t: App) -> Iterator[tuple[int, Term]]:
        for i, rule in self.by_root.get(t.symbol.name, ()):
            subst = match(rule.lhs, t, {})
            if subst is not None:
                yield i, apply_subst(rule.rhs, subst, ground=True)

    def steps(self, t: Term, position: tuple[int, ...] = ()) -> Iterator[RewriteStep]:
        if not isinstance(t, App):
            return
        for i, target in self.root_steps(t):
            yield RewriteStep(t, target, i, position)
        args = t.args
        for j, a in enumerate(args):
            for step in self.steps(a, position + (j,)):
                new_args = args[:j] + (step.target,) + args[j + 1:]
                yield RewriteStep(t, t.replace_args(new_args), step.rule_index, step.position)

    # ------------------------------------------------------------------
    # Longest derivations.  Three exchange facts keep the explored graph
    # small without changing any length:
    #   * a term whose root can never be rewritten has dl = sum over its
    #     arguments, since the arguments rewrite independently;
    #   * a step inside a subterm bound to a variable that every viable
    #     rule copies at least once can be postponed past the root step,
    #     where it is still available in each copy;
    #   * a subterm bound to a variable that every viable rule erases can
    #     have all its steps moved to the front, so its length adds up.
    # A subterm at a position where every viable rule needs a constructor
    # must itself be rewritten at its root first, so the same facts apply
    # to it recursively.  Anything else is explored step by step.

    def _var_kind(self, rule: Rule, name: str) -> str:
        key = (id(rule), name)
        hit = self._kinds.get(key)
        if hit is None:
            lhs_vars = [v for v in variables(rule.lhs)]
            if lhs_vars.count(name) != 1:
                hit = "mixed"
            elif name in set(variables(rule.rhs)):
                hit = "copied"
            else:
                hit = "erased"
            self._kinds[key] = hit
        return hit

    def viable(self, t: App) -> list[Rule]:
        """Rules that might still fire at the root of ``t``.

        A rule is ruled out by a constructor clash along a path of
        constructors below the root; such a clash can never disappear
        without rewriting the root itself.
        """
        return [r for _, r in self.by_root.get(t.symbol.name, ()) if not _clash(r.lhs.args, t.args)]

    def _plan(self, t: App):
        """(stuck, entries) for a term whose root has rules.

        ``stuck`` means the root can never fire.  ``entries`` lists
        (path, mode) with mode "dead", "all" or "fire" for the argument
        positions whose steps must be considered.
        """
        hit = self._plans.get(t)
        if hit is not None:
            return hit
        rules = self.viable(t)
        entries: list[tuple[tuple[int, ...], str]] = []
        stuck = not rules
        if not stuck:
            for i, a in enumerate(t.args):
                if self._walk(a, [(r.lhs.args[i], r) for r in rules], (i,), entries):
                    stuck = True
                    break
        hit = self._plans[t] = (stuck, tuple(entries))
        return hit

    def _walk(self, sub: Term, pats: list, path: tuple[int, ...], out: list) -> bool:
        """Classify ``sub`` against the viable patterns; True when it blocks the root.

        Each entry of ``pats`` is a pair (pattern, rule); a variable pattern
        is replaced by how that rule treats the variable.
        """
        pats = [(self._var_kind(r, p.name) if isinstance(p, Var) else p, r) for p, r in pats]
        kinds = {p for p, _ in pats if isinstance(p, str)}
        shapes = [p for p, _ in pats if not isinstance(p, str)]
        if not shapes:
            if kinds == {"copied"}:
                return False
            out.append((path, "dead" if kinds == {"erased"} else "all"))
            return False
        if kinds - {"copied"} or not all(p.symbol.is_constructor for p in shapes):
            out.append((path, "all"))
            return False
        # every viable rule either copies this subterm or needs a constructor here
        strict = not kinds
        if sub.symbol.is_constructor:
            for j, a in enumerate(sub.args):
                inner = [(p if isinstance(p, str) else p.args[j], r) for p, r in pats]
                if self._walk(a, inner, path + (j,), out):
                    return True
            return False
        if sub.symbol.name not in self.by_root or self._plan(sub)[0]:
            # it can never fire, so it never becomes the constructor some rules need
            return strict
        out.append((path, "fire" if strict else "fire-or-copy"))
        return False

    def _find_dead(self, t: App) -> tuple[int, ...] | None:
        """A front-loadable erased subterm of ``t``, searched along must-fire chains."""
        if t.symbol.name not in self.by_root:
            return None
        stuck, entries = self._plan(t)
        if stuck:
            return None
        for path, mode in entries:
            sub = _at(t, path)
            if mode == "dead" and sub != self.filler:
                rest = _replace(t, path, self.filler)
                if [id(r) for r in self.viable(rest)] == [id(r) for r in self.viable(t)]:
                    return path
            elif mode == "fire":
                inner = self._find_dead(sub)
                if inner is not None:
                    return path + inner
        return None

    def _restricted(self, t: App) -> tuple[Term, ...]:
        """Successors of ``t`` worth exploring: root steps and unpostponable inner steps."""
        hit = self._rsteps.get(t)
        if hit is not None:
            return hit
        out = dict.fromkeys(target for _, target in self.root_steps(t))
        stuck, entries = self._plan(t)
        if not stuck:
            for path, mode in entries:
                sub = _at(t, path)
                if mode in ("fire", "fire-or-copy"):
                    targets = self._restricted(sub)
                else:
                    targets = [step.target for step in self.steps(sub)]
                for v in targets:
                    out.setdefault(_replace(t, path, v))
        hit = self._rsteps[t] = tuple(out)
        return hit

    def children(self, t: App) -> list[tuple[Term, bool]]:
        """Pairs (term, is_argument) from which dl(t) is computed.

        dl(t) is the larger of the sum over arguments (derivations that
        never rewrite at the root) and one plus the best restricted
        successor.  A front-loadable erased subterm X instead gives
        dl(t) = dl(X) + dl(t with X replaced by a constant).
        """
        hit = self._kids.get(t)
        if hit is not None:
            return hit
        out: list[tuple[Term, bool]] = [(a, True) for a in t.args]
        if t.symbol.name in self.by_root:
            path = self._find_dead(t)
            if path is not None:
                out = [(_at(t, path), True), (_replace(t, path, self.filler), True)]
            elif not self._plan(t)[0]:
                out.extend((v, False) for v in self._restricted(t))
        self._kids[t] = out
        return out

    def edges(self) -> Iterator[tuple[Term, Term]]:
        """Rewrite edges examined by the longest-path search."""
        for s, kids in self._kids.items():
            for t, is_arg in kids:
                if not is_arg:
                    yield s, t

    def derivation_length(
        self, start: Term, max_terms: int = DEFAULT_MAX_TERMS, max_depth: int = DEFAULT_MAX_DEPTH
    ) -> DerivationReport:
        """Longest rewrite sequence from ``start``; cycles and limits are reported."""
        lengths = self.lengths
        if start in lengths:
            return DerivationReport(start, lengths[start], len(lengths))
        on_path: dict[Term, int] = {start: 0}
        path = [start]
        # frame: [term, child iterator, argument sum, best step, pending child kind]
        stack = [[start, iter(self.children(start)), 0, 0, None]]
        while stack:
            frame = stack[-1]
            pushed = False
            for nxt, is_arg in frame[1]:
                if nxt in lengths:
                    if is_arg:
                        frame[2] += lengths[nxt]
                    else:
                        frame[3] = max(frame[3], lengths[nxt] + 1)
                    continue
                if nxt in on_path:
                    cycle = tuple(path[on_path[nxt]:])
                    return DerivationReport(start, None, len(lengths), "cycle", cycle)
                if len(path) >= max_depth:
                    return DerivationReport(start, None, len(lengths), "limit", limit="max_depth")
                if len(lengths) + len(path) >= max_terms:
                    return DerivationReport(start, None, len(lengths), "limit", limit="max_terms")
                frame[4] = is_arg
                on_path[nxt] = len(path)
                path.append(nxt)
                stack.append([nxt, iter(self.children(nxt)), 0, 0, None])
                pushed = True
                break
            if pushed:
                continue
            node = frame[0]
            value = max(frame[2], frame[3])
            lengths[node] = value
            stack.pop()
            path.pop()
            del on_path[node]
            if stack:
                parent = stack[-1]
                if parent[4]:
                    parent[2] += value
                else:
                    parent[3] = max(parent[3], value + 1)
        return DerivationReport(start, lengths[start], len(lengths))


def _clash(patterns, terms) -> bool:
    for p, t in zip(patterns, terms):
        if isinstance(p, Var) or not t.symbol.is_constructor:
            continue
        if p.symbol.name != t.symbol.name or _clash(p.args, t.args):
            return True
    return False


def _at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        t = t.args[i]
    return t


def _replace(t: App, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    args = t.args
    return t.replace_args(args[:i] + (_replace(args[i], path[1:], new),) + args[i + 1:])


def successors(t: Term, trs: Trs) -> list[RewriteStep]:
    """All one-step rewrites of ground ``t``, position-major then by rule index."""
    if not t.is_ground:
        raise ValueError("successors expects a ground term")
    return list(RewriteGraph(trs).steps(t))


def derivation_length(
    t: Term, trs: Trs, max_terms: int = DEFAULT_MAX_TERMS, max_depth: int = DEFAULT_MAX_DEPTH
) -> DerivationReport:
    if not t.is_ground:
        raise ValueError("derivation_length expects a ground term")
    return RewriteGraph(trs).derivation_length(t, max_terms, max_depth)


def ground_terms(symbols: list[FunctionSymbol], size: int) -> list[Term]:
    """All ground terms of exactly ``size`` nodes, sorted by printed form."""
    table: dict[int, list[Term]] = {}
    for n in range(1, size + 1):
        out = []
        for f in symbols:
            a = f.arity
            if a == 0:
                if n == 1:
                    out.append(App(f))
                continue
            for parts in _compositions(n - 1, a):
                for args in itertools.product(*(table[p] for p in parts)):
                    out.append(App(f, args[: f.normal_arity], args[f.normal_arity:]))
        table[n] = out
    return sorted(table.get(size, []), key=print_term)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass
class ProbeReport:
    size_bound: int
    terms: int = 0
    max_length: int = 0
    longest: Term | None = None
    nonterminating: list = field(default_factory=list)  # DerivationReport with status "cycle"
    limited: list = field(default_factory=list)  # DerivationReport with status "limit"
    edges_checked: int = 0
    edge_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.nonterminating or self.limited or self.edge_violations)


def termination_probe(
    trs: Trs,
    size_bound: int,
    max_terms: int = DEFAULT_MAX_TERMS,
    max_depth: int = DEFAULT_MAX_DEPTH,
    check_edges: bool = True,
) -> ProbeReport:
    """Run derivation_length on every ground term up to ``size_bound`` nodes.

    Terms are visited by size, then by printed form.  With ``check_edges``
    every explored edge s -> t is checked for dl(s) > dl(t).
    """
    graph = RewriteGraph(trs)
    report = ProbeReport(size_bound)
    symbols = list(trs.signature)
    for n in range(1, size_bound + 1):
        for t in ground_terms(symbols, n):
            report.terms += 1
            r = graph.derivation_length(t, max_terms, max_depth)
            if r.status == "cycle":
                report.nonterminating.append(r)
            elif r.status == "limit":
                report.limited.append(r)
            elif r.max_length > report.max_length:
                report.max_length = r.max_length
                report.longest = t
    if check_edges:
        for s, t in graph.edges():
            if s in graph.lengths and t in graph.lengths:
                report.edges_checked += 1
                if not graph.lengths[s] > graph.lengths[t]:
                    report.edge_violations.append((s, t))
    return report


def normalize(t: Term, trs: Trs, max_steps: int = 1_000_000) -> Term:
    """Leftmost-innermost normal form; raises :class:`StepLimit` past ``max_steps``."""
    if not t.is_ground:
        raise ValueError("normalize expects a ground term")
    graph = RewriteGraph(trs)
    cache: dict[Term, Term] = {}
    steps = 0

    def nf(u: Term) -> Term:
        nonlocal steps
        hit = cache.get(u)
        if hit is not None:
            return hit
        v = u
        while True:
            args = tuple(nf(a) for a in v.args)
            if args != v.args:
                v = v.replace_args(args)
            nxt = next(graph.root_steps(v), None)
            if nxt is None:
                break
            steps += 1
            if steps > max_steps:
                raise StepLimit(f"no normal form within {max_steps} steps")
            v = nxt[1]
        cache[u] = v
        return v

    return nf(t)
