"""Fast-growing functions and the primitive recursive interpretation of terms.

All arithmetic is exact.  Any intermediate value whose bit length exceeds the
budget produces an :class:`Overflow` result instead of a number; iteration
counts are checked against the same budget before any iteration starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .terms import App, Term, Trs, Var, print_term

DEFAULT_MAX_BITS = 1_000_000


@dataclass(frozen=True)
class EvalBudget:
    max_bits: int = DEFAULT_MAX_BITS


@dataclass(frozen=True)
class Overflow:
    """A value that would exceed ``max_bits`` bits."""

    max_bits: int
    where: str = ""

    def __str__(self):
        at = f" at {self.where}" if self.where else ""
        return f"exceeds {self.max_bits}-bit budget{at}"


class _Exceeded(Exception):
    pass


def _check(value: int, budget: EvalBudget) -> int:
    if value.bit_length() > budget.max_bits:
        raise _Exceeded
    return value


def _power(d: int, e: int, budget: EvalBudget) -> int:
    """d ** e, refusing to build a number beyond the budget."""
    if e == 0:
        return 1
    lower = e * (d.bit_length() - 1) + 1
    if lower > budget.max_bits:
        raise _Exceeded
    return _check(d ** e, budget)


def _f(m: int, x: int, d: int, budget: EvalBudget) -> int:
    if m == 0:
        return _power(d, x + 1, budget)
    return _iterate(m - 1, d * (1 + x), x, d, budget)


def _iterate(m: int, times: int, x: int, d: int, budget: EvalBudget) -> int:
    _check(times, budget)
    # F_m(y) > y, so a huge count always overflows long before it is used up
    for _ in range(times):
        x = _f(m, x, d, budget)
    return x


def _require_base(d: int) -> None:
    if d < 2:
        raise ValueError(f"base d must be at least 2, got {d}")


def f_m(m: int, x: int, d: int, budget: EvalBudget = EvalBudget()) -> int | Overflow:
    """F_0(x) = d^(x+1);  F_{m+1}(x) = F_m iterated d(1+x) times on x."""
    _require_base(d)
    try:
        return _f(m, x, d, budget)
    except _Exceeded:
        return Overflow(budget.max_bits)


def f_m_iter(m: int, times: int, x: int, d: int, budget: EvalBudget = EvalBudget()) -> int | Overflow:
    """F_m applied ``times`` times to x."""
    _require_base(d)
    try:
        return _iterate(m, times, x, d, budget)
    except _Exceeded:
        return Overflow(budget.max_bits)


def _f_mn(m: int, n: int, xs: Sequence[int], d: int, budget: EvalBudget) -> int:
    k = len(xs)
    value = 0
    for i in range(n):
        if i < k:
            value = _iterate(m, value + d * (1 + xs[i]), sum(xs[: i + 1]), d, budget)
        else:
            value = _iterate(m, value + d, sum(xs), d, budget)
    return value


def f_mn(m: int, n: int, xs: Sequence[int], d: int, budget: EvalBudget = EvalBudget()) -> int | Overflow:
    """The k-ary function F_{m,n} on ``xs`` (k >= 1)."""
    _require_base(d)
    if len(xs) == 0:
        raise ValueError("F_{m,n} needs at least one argument")
    try:
        return _f_mn(m, n, list(xs), d, budget)
    except _Exceeded:
        return Overflow(budget.max_bits)


@dataclass(frozen=True)
class InterpParams:
    ell: int
    d: int
    K: int
    rank: Mapping[str, int] = field(default_factory=dict)


def derive_params(trs: Trs) -> InterpParams:
    """Budget, arity constant and base for which rewrite steps decrease I."""
    sizes = [r.rhs.size for r in trs.rules]
    ell = max([2] + sizes)
    K = max([2] + [f.normal_arity for f in trs.signature])
    d = max(
        [f.arity + 1 for f in trs.signature]
        + [ell * (K + 2) + 2]
        + [s + 1 for s in sizes]
    )
    return InterpParams(ell, d, K, trs.ranks())


def _j(t: App, n: int, normal_values: list[int], params: InterpParams, budget: EvalBudget) -> int:
    m = params.rank[t.symbol.name] + params.ell
    # symbols without normal arguments use the k <= n branch with an empty sum
    return _f_mn(m, n, normal_values, params.d, budget)


def _interpret(t: Term, params: InterpParams, budget: EvalBudget, trail: list) -> int:
    if isinstance(t, Var):
        raise ValueError(f"cannot interpret non-ground term (variable {t.name})")
    trail.append(t)
    normal = [_interpret(a, params, budget, trail) for a in t.normal]
    safe = [_interpret(a, params, budget, trail) for a in t.safe]
    exponent = _j(t, params.K + 1, normal, params, budget)
    value = _check(_power(params.d, exponent, budget) * (sum(safe) + 1), budget)
    trail.pop()
    return value


def interpret(t: Term, params: InterpParams, budget: EvalBudget = EvalBudget()) -> int | Overflow:
    """I(t) = d^(J_{K+1}(t)) * (sum of I over safe arguments + 1)."""
    if not t.is_ground:
        raise ValueError("interpretation is defined on ground terms only")
    trail: list = []
    try:
        return _interpret(t, params, budget, trail)
    except _Exceeded:
        where = print_term(trail[-1]) if trail else ""
        return Overflow(budget.max_bits, where)


def j_value(t: App, n: int, params: InterpParams, budget: EvalBudget = EvalBudget()) -> int | Overflow:
    """J_n(t): F_{rank+ell, n} on the interpretations of the normal arguments."""
    if not t.is_ground:
        raise ValueError("interpretation is defined on ground terms only")
    trail: list = []
    try:
        normal = [_interpret(a, params, budget, trail) for a in t.normal]
        return _j(t, n, normal, params, budget)
    except _Exceeded:
        return Overflow(budget.max_bits, print_term(trail[-1]) if trail else print_term(t))
