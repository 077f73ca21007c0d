"""Decision procedures for the predicative lexicographic path order.

Every procedure returns a :class:`Certificate` when the relation holds and
``None`` otherwise.  Cases are tried in definitional order and the first one
that succeeds is recorded, so certificates are deterministic.

Bounded variants thread a budget ``ell`` through the auxiliary relation: its
third case (the precedence descent) checks the arguments of the right-hand
side at ``ell - 1``, and at budget 0 nothing holds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .terms import App, Term, Trs, Var, print_term

AUX = "AUX"
AUX_BOUNDED = "AUX_BOUNDED"
PLPO = "PLPO"
PLPO_BOUNDED = "PLPO_BOUNDED"
LPO = "LPO"
EQUIV = "EQUIV"

JUDGMENTS = (AUX, AUX_BOUNDED, PLPO, PLPO_BOUNDED, LPO, EQUIV)


@dataclass(frozen=True)
class OrderParams:
    """Precedence ranks, lexicographic symbols and optional re-separation.

    ``separation`` maps a symbol name to a mask over its argument positions
    (declared order, normal ones first); ``True`` marks a normal position.
    Symbols missing from the mask keep their declared split.
    """

    rank: Mapping[str, int]
    lex_set: frozenset = frozenset()
    permutation_extension: bool = False
    separation: Mapping[str, tuple] | None = None

    @classmethod
    def from_trs(cls, trs: Trs, permutation_extension: bool = False) -> OrderParams:
        lex = frozenset(f.name for f in trs.signature if f.lex)
        return cls(trs.ranks(), lex, permutation_extension)

    def rank_of(self, name: str) -> int:
        return self.rank[name]

    def is_lex(self, name: str) -> bool:
        return name in self.lex_set

    def split(self, t: App) -> tuple[tuple[Term, ...], tuple[Term, ...]]:
        if self.separation is not None:
            mask = self.separation.get(t.symbol.name)
            if mask is not None:
                return apply_mask(t.args, mask)
        return t.normal, t.safe


def apply_mask(args: tuple[Term, ...], mask: tuple) -> tuple[tuple[Term, ...], tuple[Term, ...]]:
    normal = tuple(a for a, m in zip(args, mask) if m)
    safe = tuple(a for a, m in zip(args, mask) if not m)
    return normal, safe


@dataclass(frozen=True)
class Certificate:
    judgment: str
    lhs: Term
    rhs: Term
    case_label: str
    children: tuple = field(default=())
    bound: int | None = None

    def to_dict(self) -> dict:
        d = {
            "judgment": self.judgment,
            "case": self.case_label,
            "lhs": print_term(self.lhs),
            "rhs": print_term(self.rhs),
        }
        if self.bound is not None:
            d["bound"] = self.bound
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d

    def format(self, indent: int = 0) -> str:
        rel = {EQUIV: "~"}.get(self.judgment, ">")
        head = self.judgment if self.bound is None else f"{self.judgment}[{self.bound}]"
        lines = [f"{'  ' * indent}{head} {self.case_label}: {print_term(self.lhs)} {rel} {print_term(self.rhs)}"]
        lines.extend(c.format(indent + 1) for c in self.children)
        return "\n".join(lines)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


class Prover:
    """One query context: memo tables live as long as the prover."""

    def __init__(self, params, bound: int | None = None):
        self.params = params
        self.bound = bound
        self._aux_memo: dict = {}
        self._gt_memo: dict = {}
        self._eq_memo: dict = {}

    # term equivalence under the rank map and current separation
    def equiv(self, s: Term, t: Term) -> bool:
        if s is t:
            return True
        if isinstance(s, Var) or isinstance(t, Var):
            return s == t
        key = (s, t)
        hit = self._eq_memo.get(key)
        if hit is None:
            hit = self._equiv(s, t)
            self._eq_memo[key] = hit
        return hit

    def _equiv(self, s: App, t: App) -> bool:
        p = self.params
        if p.rank_of(s.symbol.name) != p.rank_of(t.symbol.name):
            return False
        sn, ss = p.split(s)
        tn, ts = p.split(t)
        if len(sn) != len(tn) or len(ss) != len(ts):
            return False
        return all(self.equiv(a, b) for a, b in zip(sn + ss, tn + ts))

    def _equiv_cert(self, s: Term, t: Term) -> Certificate:
        return Certificate(EQUIV, s, t, "Equiv")

    # auxiliary relation, unbounded when ell is None
    def aux(self, s: Term, t: Term, ell: int | None = None) -> Certificate | None:
        if not isinstance(s, App):
            return None
        if ell is not None and ell < 1:
            return None
        key = (s, t, ell)
        if key in self._aux_memo:
            return self._aux_memo[key]
        cert = self._aux(s, t, ell)
        self._aux_memo[key] = cert
        return cert

    def aux_ge(self, s: Term, t: Term, ell: int | None) -> Certificate | None:
        if self.equiv(s, t):
            return self._equiv_cert(s, t)
        return self.aux(s, t, ell)

    def _aux(self, s: App, t: Term, ell: int | None) -> Certificate | None:
        p = self.params
        judgment = AUX if ell is None else AUX_BOUNDED
        f = s.symbol
        normal, safe = p.split(s)
        if f.is_constructor:
            for si in normal + safe:
                c = self.aux_ge(si, t, ell)
                if c is not None:
                    return Certificate(judgment, s, t, "Def1-Case1", (c,), ell)
            return None
        for si in normal:
            c = self.aux_ge(si, t, ell)
            if c is not None:
                return Certificate(judgment, s, t, "Def1-Case2", (c,), ell)
        if isinstance(t, App) and p.rank_of(f.name) > p.rank_of(t.symbol.name):
            inner = None if ell is None else ell - 1
            children = []
            tn, ts = p.split(t)
            for tj in tn + ts:
                c = self.aux(s, tj, inner)
                if c is None:
                    return None
                children.append(c)
            return Certificate(judgment, s, t, "Def1-Case3", tuple(children), ell)
        return None

    # the path order itself; aux uses are bounded by self.bound
    def gt(self, s: Term, t: Term) -> Certificate | None:
        if not isinstance(s, App):
            return None
        key = (s, t)
        if key in self._gt_memo:
            return self._gt_memo[key]
        cert = self._gt(s, t)
        self._gt_memo[key] = cert
        return cert

    def ge(self, s: Term, t: Term) -> Certificate | None:
        if self.equiv(s, t):
            return self._equiv_cert(s, t)
        return self.gt(s, t)

    def _gt(self, s: App, t: Term) -> Certificate | None:
        p = self.params
        ell = self.bound
        judgment = PLPO if ell is None else PLPO_BOUNDED

        def cert(label, children):
            return Certificate(judgment, s, t, label, tuple(children), ell)

        c = self.aux(s, t, ell)
        if c is not None:
            return cert("Def2-Case1", [c])

        sn, ss = p.split(s)
        for si in sn + ss:
            c = self.ge(si, t)
            if c is not None:
                return cert("Def2-Case2", [c])

        f = s.symbol
        if not isinstance(t, App) or not f.is_defined:
            return None
        rf, rg = p.rank_of(f.name), p.rank_of(t.symbol.name)
        tn, ts = p.split(t)

        if rf > rg:
            children = []
            for tj in tn:
                c = self.aux(s, tj, ell)
                if c is None:
                    break
                children.append(c)
            else:
                for tj in ts:
                    c = self.gt(s, tj)
                    if c is None:
                        break
                    children.append(c)
                else:
                    return cert("Def2-Case3", children)
            return None

        if rf != rg:
            return None

        if not p.is_lex(f.name):
            if len(sn) != len(tn) or len(ss) != len(ts):
                return None
            normal_children = []
            for a, b in zip(sn, tn):
                c = self.ge(a, b)
                if c is None:
                    return None
                normal_children.append(c)
            perms = (
                itertools.permutations(range(len(ts)))
                if p.permutation_extension
                else [tuple(range(len(ts)))]
            )
            for perm in perms:
                safe_children = []
                for a, j in zip(ss, perm):
                    c = self.ge(a, ts[j])
                    if c is None:
                        break
                    safe_children.append(c)
                else:
                    if any(c.judgment != EQUIV for c in safe_children):
                        label = "Def2-Case4"
                        if perm != tuple(range(len(ts))):
                            label += "-perm(" + ",".join(str(j + 1) for j in perm) + ")"
                        return cert(label, normal_children + safe_children)
            return None

        # lexicographic case: search i0 left to right
        prefix = []
        for i0 in range(min(len(sn), len(tn))):
            head = self.gt(sn[i0], tn[i0])
            if head is not None:
                rest = []
                for tj in tn[i0 + 1:]:
                    c = self.aux(s, tj, ell)
                    if c is None:
                        break
                    rest.append(c)
                else:
                    for tj in ts:
                        c = self.gt(s, tj)
                        if c is None:
                            break
                        rest.append(c)
                    else:
                        return cert("Def2-Case5", prefix + [head] + rest)
            if not self.equiv(sn[i0], tn[i0]):
                break
            prefix.append(self._equiv_cert(sn[i0], tn[i0]))
        return None


class LpoProver:
    """Lexicographic path order over the same ranks, ignoring separation."""

    def __init__(self, params):
        self.params = params
        self._memo: dict = {}
        self._eq_memo: dict = {}

    def equiv(self, s: Term, t: Term) -> bool:
        if s is t:
            return True
        if isinstance(s, Var) or isinstance(t, Var):
            return s == t
        key = (s, t)
        hit = self._eq_memo.get(key)
        if hit is None:
            p = self.params
            hit = (
                p.rank_of(s.symbol.name) == p.rank_of(t.symbol.name)
                and len(s.args) == len(t.args)
                and all(self.equiv(a, b) for a, b in zip(s.args, t.args))
            )
            self._eq_memo[key] = hit
        return hit

    def ge(self, s: Term, t: Term) -> Certificate | None:
        if self.equiv(s, t):
            return Certificate(EQUIV, s, t, "Equiv")
        return self.gt(s, t)

    def gt(self, s: Term, t: Term) -> Certificate | None:
        if not isinstance(s, App):
            return None
        key = (s, t)
        if key not in self._memo:
            self._memo[key] = self._gt(s, t)
        return self._memo[key]

    def _gt(self, s: App, t: Term) -> Certificate | None:
        for si in s.args:
            c = self.ge(si, t)
            if c is not None:
                return Certificate(LPO, s, t, "LPO-Case1", (c,))
        if not isinstance(t, App):
            return None
        p = self.params
        rf, rg = p.rank_of(s.symbol.name), p.rank_of(t.symbol.name)
        if rf > rg:
            children = []
            for tj in t.args:
                c = self.gt(s, tj)
                if c is None:
                    return None
                children.append(c)
            return Certificate(LPO, s, t, "LPO-Case2", tuple(children))
        if rf == rg:
            prefix = []
            for i0 in range(min(len(s.args), len(t.args))):
                head = self.gt(s.args[i0], t.args[i0])
                if head is not None:
                    rest = []
                    for tj in t.args[i0 + 1:]:
                        c = self.gt(s, tj)
                        if c is None:
                            break
                        rest.append(c)
                    else:
                        return Certificate(LPO, s, t, "LPO-Case3", tuple(prefix + [head] + rest))
                if not self.equiv(s.args[i0], t.args[i0]):
                    break
                prefix.append(Certificate(EQUIV, s.args[i0], t.args[i0], "Equiv"))
        return None


def _check_bound(ell: int) -> None:
    if ell < 2:
        raise ValueError(f"bound must be at least 2, got {ell}")


def aux_gt(s: Term, t: Term, params: OrderParams) -> Certificate | None:
    return Prover(params).aux(s, t)


def aux_gt_bounded(s: Term, t: Term, ell: int, params: OrderParams) -> Certificate | None:
    _check_bound(ell)
    return Prover(params).aux(s, t, ell)


def plpo_gt(s: Term, t: Term, params: OrderParams) -> Certificate | None:
    return Prover(params).gt(s, t)


def plpo_gt_bounded(s: Term, t: Term, ell: int, params: OrderParams) -> Certificate | None:
    _check_bound(ell)
    return Prover(params, bound=ell).gt(s, t)


def lpo_gt(s: Term, t: Term, params: OrderParams) -> Certificate | None:
    return LpoProver(params).gt(s, t)
