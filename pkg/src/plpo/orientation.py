"""Compatibility checks and exhaustive parameter search.

The search enumerates candidates in a fixed order: the rank vector (symbols
in declaration order) is most significant, then lexicographic membership of
the defined symbols, then the separation mask of every symbol.  Masks are
enumerated with ``False`` (safe) before ``True`` (normal).  Only rank vectors
whose values form an initial segment ``0..r`` are visited: compressing a rank
map never changes a comparison and yields a lexicographically smaller vector,
so the first orienting candidate is always of that shape.

Enumeration uses conflict-directed backjumping.  A failing rule is explained
by the set of search variables its failure depends on; every candidate that
agrees on those variables fails the same way, so the enumeration skips
directly past them.  The result is the same as plain enumeration.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .orders import Certificate, LpoProver, OrderParams, Prover, apply_mask
from .terms import App, FunctionSymbol, Rule, Signature, Term, Trs, Var, subterms


class SearchTimeout(RuntimeError):
    """The time budget ran out before the space was exhausted."""


@dataclass
class OrientationResult:
    oriented: bool
    per_rule: list  # (Rule, Certificate | None)
    params: OrderParams
    candidates: int = 0

    @property
    def count(self) -> int:
        return sum(1 for _, c in self.per_rule if c is not None)


@dataclass(frozen=True)
class SearchSpace:
    vary_rank: bool = True
    vary_lex: bool = True
    vary_separation: bool = True
    max_rank: int | None = None
    constructor_separation: bool = True

    @classmethod
    def full(cls) -> SearchSpace:
        return cls()


def validate_params(trs: Trs, params: OrderParams) -> list[str]:
    """Return a list of human-readable violations (empty when consistent)."""
    out = []
    sig = trs.signature
    for f in sig:
        if f.name not in params.rank:
            out.append(f"no rank for {f.name}")
    for a, b in trs.strict:
        if a in params.rank and b in params.rank and not params.rank[a] > params.rank[b]:
            out.append(f"precedence {a} > {b} but rank({a})={params.rank[a]} <= rank({b})={params.rank[b]}")
    for a, b in trs.equal:
        if a in params.rank and b in params.rank and params.rank[a] != params.rank[b]:
            out.append(f"precedence {a} = {b} but ranks differ")
    for name in sorted(params.lex_set):
        f = sig.get(name)
        if f is None:
            out.append(f"lexicographic symbol {name} not in signature")
        elif not f.is_defined:
            out.append(f"lexicographic symbol {name} is a constructor")
    for name, mask in (params.separation or {}).items():
        f = sig.get(name)
        if f is None:
            out.append(f"separation given for unknown symbol {name}")
        elif len(mask) != f.arity:
            out.append(f"separation mask for {name} has {len(mask)} positions, arity is {f.arity}")
    return out


def _ordered_rules(trs: Trs) -> list[tuple[int, Rule]]:
    return sorted(enumerate(trs.rules), key=lambda ir: ir[1].rhs.size)


def check_trs(trs: Trs, params: OrderParams, validate: bool = True) -> OrientationResult:
    if validate:
        problems = validate_params(trs, params)
        if problems:
            raise ValueError("inconsistent parameters: " + "; ".join(problems))
    prover = Prover(params)
    per_rule = [(rule, prover.gt(rule.lhs, rule.rhs)) for rule in trs.rules]
    return OrientationResult(all(c is not None for _, c in per_rule), per_rule, params)


class _Explainer:
    """Boolean PLPO evaluator for one candidate that also explains its answers.

    Every result comes with a bitmask of search variables such that any
    candidate agreeing on those variables yields the same answer.  Failure
    explanations drive the backjumps of :func:`search_orientation`.
    """

    def __init__(self, rank, lex, sep, rank_bit, lex_bit, sep_bit, permutation_extension):
        self.rank = rank
        self.lex = lex
        self.sep = sep
        self.rank_bit = rank_bit
        self.lex_bit = lex_bit
        self.sep_bit = sep_bit
        self.perm = permutation_extension
        self._memo: dict = {}

    def _split(self, t: App):
        mask = self.sep.get(t.symbol.name)
        if mask is None:
            return t.normal, t.safe
        return apply_mask(t.args, mask)

    def _normal_flags(self, t: App) -> tuple:
        mask = self.sep.get(t.symbol.name)
        if mask is None:
            f = t.symbol
            return (True,) * f.normal_arity + (False,) * f.safe_arity
        return mask

    def _rank_cmp(self, f: str, g: str):
        bits = 0 if f == g else self.rank_bit.get(f, 0) | self.rank_bit.get(g, 0)
        return self.rank[f] - self.rank[g], bits

    def equiv(self, s: Term, t: Term):
        if s is t:
            return True, 0
        if isinstance(s, Var) or isinstance(t, Var):
            return s == t, 0
        if len(s.args) != len(t.args):
            return False, 0
        key = ("eq", s, t)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        f, g = s.symbol.name, t.symbol.name
        diff, why = self._rank_cmp(f, g)
        if diff != 0:
            out = (False, why)
        else:
            if f == g:
                xs, ys = s.args, t.args
            else:
                why |= self.sep_bit.get(f, 0) | self.sep_bit.get(g, 0)
                sn, ss = self._split(s)
                tn, ts = self._split(t)
                xs, ys = sn + ss, tn + ts
                if len(sn) != len(tn):
                    self._memo[key] = (False, why)
                    return False, why
            out = (True, why)
            for a, b in zip(xs, ys):
                ok, r = self.equiv(a, b)
                if not ok:
                    out = (False, (why if f != g else 0) | r)
                    break
                out = (True, out[1] | r)
        self._memo[key] = out
        return out

    def aux_ge(self, s, t, ell):
        ok, r1 = self.equiv(s, t)
        if ok:
            return True, r1
        ok, r2 = self.aux(s, t, ell)
        return ok, (r2 if ok else r1 | r2)

    def aux(self, s: Term, t: Term, ell):
        if not isinstance(s, App) or (ell is not None and ell < 1):
            return False, 0
        key = ("aux", s, t, ell)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._aux(s, t, ell)
            self._memo[key] = hit
        return hit

    def _aux(self, s: App, t: Term, ell):
        f = s.symbol
        if f.is_constructor:
            why = 0
            for a in s.args:
                ok, r = self.aux_ge(a, t, ell)
                if ok:
                    return True, r
                why |= r
            return False, why
        # some normal argument dominates t
        flags = self._normal_flags(s)
        sbit = self.sep_bit.get(f.name, 0)
        fail_all = 0
        fail_normal = 0
        safe_hit = False
        for a, is_normal in zip(s.args, flags):
            if not is_normal and not sbit:
                continue
            ok, r = self.aux_ge(a, t, ell)
            if ok:
                if is_normal:
                    return True, r | sbit
                safe_hit = True
            else:
                fail_all |= r
                if is_normal:
                    fail_normal |= r
        case2 = fail_normal | sbit if safe_hit else _smaller(fail_all, fail_normal | sbit)
        if not isinstance(t, App):
            return False, case2
        diff, why = self._rank_cmp(f.name, t.symbol.name)
        if diff <= 0:
            return False, case2 | why
        inner = None if ell is None else ell - 1
        for b in t.args:
            ok, r = self.aux(s, b, inner)
            if not ok:
                return False, case2 | r
            why |= r
        return True, why

    def ge(self, s, t):
        ok, r1 = self.equiv(s, t)
        if ok:
            return True, r1
        ok, r2 = self.gt(s, t)
        return ok, (r2 if ok else r1 | r2)

    def gt(self, s: Term, t: Term, ell=None):
        if not isinstance(s, App):
            return False, 0
        key = ("gt", s, t)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._gt(s, t)
            self._memo[key] = hit
        return hit

    def _gt(self, s: App, t: Term):
        ok, why = self.aux(s, t, None)
        if ok:
            return True, why
        for a in s.args:
            ok, r = self.ge(a, t)
            if ok:
                return True, r
            why |= r
        f = s.symbol
        if not isinstance(t, App) or not f.is_defined:
            return False, why
        g = t.symbol
        diff, rbits = self._rank_cmp(f.name, g.name)
        if diff > 0:
            ok, r = self._case3(s, t)
            return (True, r | rbits) if ok else (False, why | r | rbits)
        if diff < 0:
            return False, why | rbits
        why |= rbits
        lbit = self.lex_bit.get(f.name, 0)
        if f.name in self.lex:
            ok, r = self._case5(s, t)
        else:
            ok, r = self._case4(s, t)
        return (True, r | rbits | lbit) if ok else (False, why | r | lbit)

    def _case3(self, s, t):
        gbit = self.sep_bit.get(t.symbol.name, 0)
        why = 0
        for b, is_normal in zip(t.args, self._normal_flags(t)):
            ok, rg = self.gt(s, b)
            if not ok:
                return False, rg
            ok, ra = self.aux(s, b, None)
            if ok:
                why |= ra
            elif is_normal:
                return False, ra | gbit
            else:
                why |= rg | gbit
        return True, why

    def _case4(self, s, t):
        f, g = s.symbol.name, t.symbol.name
        if f == g and not self.perm:
            why = 0
            strict_any = False
            strict_safe = False
            for a, b, is_normal in zip(s.args, t.args, self._normal_flags(s)):
                ok, r = self.ge(a, b)
                if not ok:
                    return False, r
                why |= r
                eq, _ = self.equiv(a, b)
                if not eq:
                    strict_any = True
                    if not is_normal:
                        strict_safe = True
            if strict_safe:
                return True, why | self.sep_bit.get(f, 0)
            if not strict_any:
                return False, why
            return False, why | self.sep_bit.get(f, 0)
        # general route: explanation covers both separations
        bits = self.sep_bit.get(f, 0) | self.sep_bit.get(g, 0)
        sn, ss = self._split(s)
        tn, ts = self._split(t)
        if len(sn) != len(tn) or len(ss) != len(ts):
            return False, bits
        why = bits
        for a, b in zip(sn, tn):
            ok, r = self.ge(a, b)
            if not ok:
                return False, bits | r
            why |= r
        perms = itertools.permutations(range(len(ts))) if self.perm else [tuple(range(len(ts)))]
        fail = 0
        for perm in perms:
            acc = 0
            strict = False
            for a, j in zip(ss, perm):
                ok, r = self.ge(a, ts[j])
                acc |= r
                if not ok:
                    break
                if not self.equiv(a, ts[j])[0]:
                    strict = True
            else:
                if strict:
                    return True, why | acc
            fail |= acc
        return False, why | fail

    def _case5(self, s, t):
        bits = self.sep_bit.get(s.symbol.name, 0) | self.sep_bit.get(t.symbol.name, 0)
        sn, _ = self._split(s)
        tn, ts = self._split(t)
        why = bits
        for i0 in range(min(len(sn), len(tn))):
            ok, r = self.gt(sn[i0], tn[i0])
            why |= r
            if ok:
                rest_ok = True
                for b in tn[i0 + 1:]:
                    ok2, r2 = self.aux(s, b, None)
                    why |= r2
                    if not ok2:
                        rest_ok = False
                        break
                if rest_ok:
                    for b in ts:
                        ok2, r2 = self.gt(s, b)
                        why |= r2
                        if not ok2:
                            rest_ok = False
                            break
                if rest_ok:
                    return True, why
            eq, r = self.equiv(sn[i0], tn[i0])
            why |= r
            if not eq:
                break
        return False, why


def _smaller(a: int, b: int) -> int:
    return a if a.bit_length() <= b.bit_length() else b

def _search_order(trs: Trs) -> list[FunctionSymbol]:
    seen: dict[str, FunctionSymbol] = {}
    for rule in trs.rules:
        seen.setdefault(rule.lhs.symbol.name, rule.lhs.symbol)
    for rule in trs.rules:
        for t in (rule.lhs, rule.rhs):
            for sub in subterms(t):
                if isinstance(sub, App):
                    seen.setdefault(sub.symbol.name, sub.symbol)
    for f in trs.signature:
        seen.setdefault(f.name, f)
    return list(seen.values())


def _masks(arity: int) -> list[tuple[bool, ...]]:
    return list(itertools.product((False, True), repeat=arity))


def search_orientation(
    trs: Trs,
    space: SearchSpace = SearchSpace(),
    timeout: float | None = None,
    permutation_extension: bool = False,
) -> OrientationResult | None:
    """First orienting candidate in enumeration order, or ``None`` if none exists.

    Raises :class:`SearchTimeout` when ``timeout`` seconds elapse first.
    """
    deadline = None if timeout is None else time.monotonic() + timeout
    symbols = list(trs.signature)
    n = len(symbols)
    max_rank = n if space.max_rank is None else space.max_rank

    domains: list[list] = []
    rank_var: dict[str, int] = {}
    lex_var: dict[str, int] = {}
    sep_var: dict[str, int] = {}
    fixed_rank = trs.ranks()
    fixed_lex = {f.name for f in symbols if f.lex}

    if space.vary_rank:
        for f in symbols:
            rank_var[f.name] = len(domains)
            domains.append(list(range(max(1, max_rank))))
    # defined-then-appearance order puts the symbols every conflict mentions first
    order = _search_order(trs)
    if space.vary_lex:
        for f in order:
            if f.is_defined:
                lex_var[f.name] = len(domains)
                domains.append([False, True])
    if space.vary_separation:
        for f in order:
            if f.arity == 0 or (f.is_constructor and not space.constructor_separation):
                continue
            sep_var[f.name] = len(domains)
            domains.append(_masks(f.arity))

    rank_bit = {name: 1 << v for name, v in rank_var.items()}
    lex_bit = {name: 1 << v for name, v in lex_var.items()}
    sep_bit = {name: 1 << v for name, v in sep_var.items()}
    rank_slots = [rank_var[f.name] for f in symbols] if space.vary_rank else []
    rules = _ordered_rules(trs)
    values = [0] * len(domains)
    candidates = 0

    def advance(i: int) -> bool:
        while i >= 0:
            values[i] += 1
            if values[i] < len(domains[i]):
                for j in range(i + 1, len(values)):
                    values[j] = 0
                return True
            values[i] = 0
            i -= 1
        return False

    def bad_rank_prefix() -> int | None:
        seen: set[int] = set()
        top = -1
        for pos, v in enumerate(rank_slots):
            r = values[v]
            seen.add(r)
            top = max(top, r)
            if (top + 1 - len(seen)) > len(rank_slots) - pos - 1:
                return v
        return None

    while True:
        if deadline is not None and time.monotonic() > deadline:
            raise SearchTimeout(f"search timed out after {candidates} candidates")
        bad = bad_rank_prefix()
        if bad is not None:
            if not advance(bad):
                return None
            continue
        candidates += 1
        rank = {name: values[v] for name, v in rank_var.items()} if rank_var else fixed_rank
        lex = {name for name, v in lex_var.items() if domains[v][values[v]]} if lex_var else fixed_lex
        sep = {name: domains[v][values[v]] for name, v in sep_var.items()}

        conflict = None
        for _, rule in rules:
            view = _Explainer(rank, lex, sep, rank_bit, lex_bit, sep_bit, permutation_extension)
            ok, why = view.gt(rule.lhs, rule.rhs)
            if not ok:
                conflict = why
                break
        if conflict is None:
            params = OrderParams(rank, frozenset(lex), permutation_extension, sep or None)
            result = check_trs(trs, params, validate=False)
            if not result.oriented:
                raise AssertionError("search evaluator and prover disagree")
            result.candidates = candidates
            return result
        if not conflict or not advance(conflict.bit_length() - 1):
            return None


def reseparate(trs: Trs, separation) -> Trs:
    """Rebuild ``trs`` with every symbol's positions split by ``separation``.

    Positions keep their declared order within the normal and safe groups.
    """
    if not separation:
        return trs
    new_syms = {}
    for f in trs.signature:
        mask = separation.get(f.name)
        if mask is None:
            new_syms[f.name] = f
        else:
            k = sum(1 for m in mask if m)
            new_syms[f.name] = FunctionSymbol(f.name, k, f.arity - k, f.kind, f.lex)

    def conv(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        args = [conv(a) for a in t.args]
        mask = separation.get(t.symbol.name)
        if mask is None:
            k = t.symbol.normal_arity
            return App(new_syms[t.symbol.name], args[:k], args[k:])
        normal, safe = apply_mask(tuple(args), mask)
        return App(new_syms[t.symbol.name], normal, safe)

    rules = tuple(Rule(conv(r.lhs), conv(r.rhs)) for r in trs.rules)
    sig = Signature(tuple(new_syms[f.name] for f in trs.signature))
    return Trs(sig, trs.strict, trs.equal, rules)


def check_lpo(trs: Trs, params: OrderParams) -> OrientationResult:
    """R within the lexicographic path order over the same ranks (separation ignored)."""
    prover = LpoProver(params)
    per_rule = [(rule, prover.gt(rule.lhs, rule.rhs)) for rule in trs.rules]
    return OrientationResult(all(c is not None for _, c in per_rule), per_rule, params)


def search_lpo(trs: Trs, max_rank: int | None = None, timeout: float | None = None) -> OrientationResult | None:
    """First dense rank vector (declaration order) under which the LPO orients ``trs``."""
    deadline = None if timeout is None else time.monotonic() + timeout
    names = [f.name for f in trs.signature]
    top = len(names) if max_rank is None else max_rank
    candidates = 0
    for values in itertools.product(range(max(1, top)), repeat=len(names)):
        if set(values) != set(range(max(values) + 1)):
            continue
        if deadline is not None and time.monotonic() > deadline:
            raise SearchTimeout(f"search timed out after {candidates} candidates")
        candidates += 1
        result = check_lpo(trs, OrderParams(dict(zip(names, values))))
        if result.oriented:
            result.candidates = candidates
            return result
    return None
