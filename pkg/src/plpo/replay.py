"""Independent certificate checker.

The checker never searches: it re-tests the side conditions of the case
named at each node and requires the children to be exactly the sub-proofs
that case calls for.  It shares no code with the decision procedures.
"""

from __future__ import annotations

import re

from .orders import AUX, AUX_BOUNDED, EQUIV, LPO, PLPO, PLPO_BOUNDED, Certificate
from .terms import App, Term, Var


class CertificateError(ValueError):
    pass


_PERM = re.compile(r"^Def2-Case4-perm\(([0-9,]+)\)$")


class _Checker:
    def __init__(self, params):
        self.rank = params.rank
        self.lex = set(params.lex_set)
        self.perm_ok = params.permutation_extension
        self.sep = params.separation or {}

    def parts(self, t: App):
        mask = self.sep.get(t.symbol.name)
        flat = list(t.normal) + list(t.safe)
        if mask is None:
            return list(t.normal), list(t.safe)
        return [a for a, m in zip(flat, mask) if m], [a for a, m in zip(flat, mask) if not m]

    def same_rank(self, s: App, t: App) -> bool:
        return self.rank[s.symbol.name] == self.rank[t.symbol.name]

    def above(self, s: App, t: App) -> bool:
        return self.rank[s.symbol.name] > self.rank[t.symbol.name]

    def equivalent(self, s: Term, t: Term, flat: bool) -> bool:
        if isinstance(s, Var) or isinstance(t, Var):
            return isinstance(s, Var) and isinstance(t, Var) and s.name == t.name
        if not self.same_rank(s, t):
            return False
        if flat:
            xs, ys = list(s.args), list(t.args)
        else:
            sn, ss = self.parts(s)
            tn, ts = self.parts(t)
            if len(sn) != len(tn) or len(ss) != len(ts):
                return False
            xs, ys = sn + ss, tn + ts
        return len(xs) == len(ys) and all(self.equivalent(a, b, flat) for a, b in zip(xs, ys))

    # ------------------------------------------------------------------
    def fail(self, cert: Certificate, why: str):
        raise CertificateError(f"{cert.judgment} {cert.case_label}: {why}")

    def expect(self, cert, cond: bool, why: str):
        if not cond:
            self.fail(cert, why)

    def child(self, parent, c, judgments, lhs, rhs, bound, flat=False):
        self.expect(parent, isinstance(c, Certificate), "child is not a certificate")
        self.expect(parent, c.judgment in judgments, f"child judgment {c.judgment} not in {judgments}")
        self.expect(parent, c.lhs == lhs and c.rhs == rhs, f"child compares {c.lhs} with {c.rhs}")
        if c.judgment != EQUIV:
            self.expect(parent, c.bound == bound, "child bound mismatch")
        self.check(c, flat)

    def check(self, cert: Certificate, flat: bool = False) -> None:
        j = cert.judgment
        if j == EQUIV:
            self.expect(cert, cert.case_label == "Equiv", "unknown label")
            self.expect(cert, not cert.children, "equivalence takes no children")
            self.expect(cert, self.equivalent(cert.lhs, cert.rhs, flat), "terms are not equivalent")
            return
        self.expect(cert, isinstance(cert.lhs, App), "left side is a variable")
        if j in (AUX, AUX_BOUNDED):
            self.check_aux(cert)
        elif j in (PLPO, PLPO_BOUNDED):
            self.check_plpo(cert)
        elif j == LPO:
            self.check_lpo(cert)
        else:
            self.fail(cert, "unknown judgment")

    def check_aux(self, cert):
        s, t, b, kids = cert.lhs, cert.rhs, cert.bound, cert.children
        if cert.judgment == AUX:
            self.expect(cert, b is None, "unbounded judgment carries a bound")
        else:
            self.expect(cert, isinstance(b, int) and b >= 1, "budget exhausted")
        sn, ss = self.parts(s)
        label = cert.case_label
        if label in ("Def1-Case1", "Def1-Case2"):
            if label == "Def1-Case1":
                self.expect(cert, s.symbol.is_constructor, "root is not a constructor")
                pool = sn + ss
            else:
                self.expect(cert, s.symbol.is_defined, "root is not defined")
                pool = sn
            self.expect(cert, len(kids) == 1, "exactly one child expected")
            c = kids[0]
            self.expect(cert, any(c.lhs == a for a in pool), "child is not about an eligible argument")
            self.child(cert, c, (EQUIV, cert.judgment), c.lhs, t, b)
        elif label == "Def1-Case3":
            self.expect(cert, s.symbol.is_defined, "root is not defined")
            self.expect(cert, isinstance(t, App), "right side is a variable")
            self.expect(cert, self.above(s, t), "precedence does not decrease")
            tn, ts = self.parts(t)
            args = tn + ts
            self.expect(cert, len(kids) == len(args), "one child per argument expected")
            inner = None if b is None else b - 1
            for c, tj in zip(kids, args):
                self.child(cert, c, (cert.judgment,), s, tj, inner)
        else:
            self.fail(cert, "unknown label")

    def check_plpo(self, cert):
        s, t, b, kids = cert.lhs, cert.rhs, cert.bound, cert.children
        if cert.judgment == PLPO:
            self.expect(cert, b is None, "unbounded judgment carries a bound")
            aux = AUX
        else:
            self.expect(cert, isinstance(b, int) and b >= 2, "bound below 2")
            aux = AUX_BOUNDED
        me = cert.judgment
        sn, ss = self.parts(s)
        label = cert.case_label
        if label == "Def2-Case1":
            self.expect(cert, len(kids) == 1, "exactly one child expected")
            self.child(cert, kids[0], (aux,), s, t, b)
            return
        if label == "Def2-Case2":
            self.expect(cert, len(kids) == 1, "exactly one child expected")
            c = kids[0]
            self.expect(cert, any(c.lhs == a for a in sn + ss), "child is not about an argument")
            self.child(cert, c, (EQUIV, me), c.lhs, t, b)
            return
        self.expect(cert, s.symbol.is_defined, "root is not defined")
        self.expect(cert, isinstance(t, App), "right side is a variable")
        tn, ts = self.parts(t)
        if label == "Def2-Case3":
            self.expect(cert, self.above(s, t), "precedence does not decrease")
            self.expect(cert, len(kids) == len(tn) + len(ts), "one child per argument expected")
            for c, tj in zip(kids[: len(tn)], tn):
                self.child(cert, c, (aux,), s, tj, b)
            for c, tj in zip(kids[len(tn):], ts):
                self.child(cert, c, (me,), s, tj, b)
            return
        if label == "Def2-Case4" or _PERM.match(label):
            self.expect(cert, s.symbol.name not in self.lex, "root is lexicographic")
            self.expect(cert, self.same_rank(s, t), "roots are not equivalent")
            self.expect(cert, len(sn) == len(tn) and len(ss) == len(ts), "arities differ")
            perm = list(range(len(ts)))
            m = _PERM.match(label)
            if m:
                self.expect(cert, self.perm_ok, "permutation extension disabled")
                perm = [int(x) - 1 for x in m.group(1).split(",")]
                self.expect(cert, sorted(perm) == list(range(len(ts))), "not a permutation")
                self.expect(cert, perm != list(range(len(ts))), "identity must use the plain label")
            self.expect(cert, len(kids) == len(sn) + len(ss), "one child per position expected")
            for c, a, bb in zip(kids, sn, tn):
                self.child(cert, c, (EQUIV, me), a, bb, b)
            safe_kids = kids[len(sn):]
            for c, a, j in zip(safe_kids, ss, perm):
                self.child(cert, c, (EQUIV, me), a, ts[j], b)
            self.expect(cert, any(c.judgment == me for c in safe_kids), "safe tuple does not decrease")
            return
        if label == "Def2-Case5":
            self.expect(cert, s.symbol.name in self.lex, "root is not lexicographic")
            self.expect(cert, self.same_rank(s, t), "roots are not equivalent")
            self.expect(cert, len(kids) == len(tn) + len(ts), "wrong number of children")
            i0 = next((i for i, c in enumerate(kids) if c.judgment != EQUIV), None)
            self.expect(cert, i0 is not None and i0 < min(len(sn), len(tn)), "no decreasing position")
            for i in range(i0):
                self.child(cert, kids[i], (EQUIV,), sn[i], tn[i], b)
            self.child(cert, kids[i0], (me,), sn[i0], tn[i0], b)
            for c, tj in zip(kids[i0 + 1: len(tn)], tn[i0 + 1:]):
                self.child(cert, c, (aux,), s, tj, b)
            for c, tj in zip(kids[len(tn):], ts):
                self.child(cert, c, (me,), s, tj, b)
            return
        self.fail(cert, "unknown label")

    def check_lpo(self, cert):
        s, t, kids = cert.lhs, cert.rhs, cert.children
        self.expect(cert, cert.bound is None, "LPO takes no bound")
        label = cert.case_label
        if label == "LPO-Case1":
            self.expect(cert, len(kids) == 1, "exactly one child expected")
            c = kids[0]
            self.expect(cert, any(c.lhs == a for a in s.args), "child is not about an argument")
            self.child(cert, c, (EQUIV, LPO), c.lhs, t, None, flat=True)
            return
        self.expect(cert, isinstance(t, App), "right side is a variable")
        if label == "LPO-Case2":
            self.expect(cert, self.above(s, t), "precedence does not decrease")
            self.expect(cert, len(kids) == len(t.args), "one child per argument expected")
            for c, tj in zip(kids, t.args):
                self.child(cert, c, (LPO,), s, tj, None, flat=True)
            return
        if label == "LPO-Case3":
            self.expect(cert, self.same_rank(s, t), "roots are not equivalent")
            self.expect(cert, len(kids) == len(t.args), "wrong number of children")
            i0 = next((i for i, c in enumerate(kids) if c.judgment != EQUIV), None)
            self.expect(cert, i0 is not None and i0 < min(len(s.args), len(t.args)), "no decreasing position")
            for i in range(i0):
                self.child(cert, kids[i], (EQUIV,), s.args[i], t.args[i], None, flat=True)
            self.child(cert, kids[i0], (LPO,), s.args[i0], t.args[i0], None, flat=True)
            for c, tj in zip(kids[i0 + 1:], t.args[i0 + 1:]):
                self.child(cert, c, (LPO,), s, tj, None, flat=True)
            return
        self.fail(cert, "unknown label")


def replay(cert: Certificate, params) -> None:
    """Raise :class:`CertificateError` unless ``cert`` is a valid proof."""
    _Checker(params).check(cert, flat=cert.judgment == LPO)


def is_valid(cert: Certificate, params) -> bool:
    try:
        replay(cert, params)
    except (CertificateError, KeyError, AttributeError, TypeError):
        return False
    return True
