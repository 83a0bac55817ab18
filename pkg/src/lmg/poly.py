"""Span-based memoizing recognizer for non-combinatorial, left-binding,
non-left-recursive grammars.

In such grammars every argument value is a word that was already read from
some text, so it can be stored as a triple ``(text, l, r)`` instead of as a
word.  ``text`` is ``None`` for the input and a literal word for words that
occur in the grammar itself.  A call ``[A](values)`` at position ``i`` of a
text returns the sorted ends ``j`` such that ``A(values)`` derives
``text[i:j]``; calls are memoized, so the table holds polynomially many
entries in the input length.

A slash ``B(..)/x`` with ``x`` bound to ``(t, l, r)`` holds when ``r`` is an
end of ``[B](..)`` on ``t`` at ``l``: the numerator re-reads the span where
the word of ``x`` was found.  When ``x`` is the next unsplit variable of a
left-hand side vector, each such end below the vector's right edge splits
off a prefix.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional

from .analysis import Eligibility, analyze, engine_eligibility
from .core import Derivation, Grammar, NonterminalPred, Quant, Slash, TerminalPred, Var

Value = tuple  # (text, l, r); text is None for the input or a literal word
_IN_PROGRESS = object()


class NotEligible(Exception):
    def __init__(self, reasons):
        super().__init__("grammar not eligible for the span-based engine: " + "; ".join(reasons))
        self.reasons = list(reasons)


class DynamicLeftRecursion(Exception):
    def __init__(self, key):
        head, _, pos, _ = key
        super().__init__(f"{head} re-entered at position {pos} with the same arguments")
        self.key = key


@dataclass
class PolyResult:
    accepted: bool
    stats: dict
    derivation: Optional[Derivation] = None


def _literal(word) -> Value:
    word = tuple(word)
    return (word, 0, len(word))


def check_eligible(g: Grammar) -> None:
    verdict, reasons = engine_eligibility(analyze(g))
    if verdict is not Eligibility.POLY:
        raise NotEligible(reasons)


class PolySession:
    """Memo table for one input.  Assumes an eligible grammar."""

    def __init__(self, g: Grammar, tokens):
        self.g = g
        self.tokens = tuple(tokens)
        self.memo: dict = {}
        self.calls = 0
        self._by_head: dict[str, list[int]] = {}
        for i, r in enumerate(g.rules):
            self._by_head.setdefault(r.head, []).append(i)

    def stats(self) -> dict:
        return {"memo_entries": len(self.memo), "calls": self.calls}

    def text(self, t) -> tuple:
        return self.tokens if t is None else t

    def word(self, v: Value) -> tuple:
        return self.text(v[0])[v[1]:v[2]]

    # -- calls -----------------------------------------------------------------
    def call(self, head: str, t, i: int, values: tuple) -> tuple[int, ...]:
        self.calls += 1
        key = (head, t, i, values)
        hit = self.memo.get(key)
        if hit is _IN_PROGRESS:
            raise DynamicLeftRecursion(key)
        if hit is not None:
            return hit
        self.memo[key] = _IN_PROGRESS
        ends: set[int] = set()
        try:
            for ridx in self._by_head.get(head, ()):
                ends.update(self.eval_rule_body(ridx, i, values, t))
        except BaseException:
            del self.memo[key]
            raise
        result = tuple(sorted(ends))
        self.memo[key] = result
        return result

    def eval_rule_body(self, rule_index: int, i: int, args: tuple, t=None) -> tuple[int, ...]:
        """Ends reachable by reading the body of one rule from ``i``."""
        return tuple(sorted({s[0] for s in self.eval_rule_states(rule_index, i, args, t)[-1]}))

    def initial_state(self, rule_index: int, i: int, args: tuple):
        rule = self.g.rules[rule_index]
        binding, pending = {}, {}
        for vec, v in zip(rule.patterns, args):
            if not vec:
                if v[1] != v[2]:
                    return None
            elif len(vec) == 1:
                binding[vec[0]] = v
            else:
                pending[vec[0]] = (vec, 0, v)
        return (i, tuple(sorted(binding.items())), tuple(sorted(pending.items())))

    def eval_rule_states(self, rule_index: int, i: int, args: tuple, t=None) -> list[set]:
        """State sets before each item and after the last one.

        A state is ``(position, binding, pending)``: bound variables with
        their values, and for each partly split vector its next variable
        mapped to ``(vector, index, remaining value)``.
        """
        rule = self.g.rules[rule_index]
        first = self.initial_state(rule_index, i, args)
        layers = [{first} if first is not None else set()]
        for item in rule.rhs:
            nxt = set()
            for state in layers[-1]:
                for new, _ in self.step(item, t, state):
                    nxt.add(new)
            layers.append(nxt)
        return layers

    def _value(self, term, binding: dict) -> Value:
        if len(term) == 1 and isinstance(term[0], Var):
            return binding[term[0].name]
        if any(isinstance(s, Var) for s in term):
            raise NotEligible([f"composite argument {term!r}"])
        return _literal(s.token for s in term)

    def step(self, item, t, state):
        """Successor states of ``state`` across ``item``, each with the call it used.

        The call is ``(head, text, start, values, end)`` or ``None`` for a
        terminal.
        """
        k, bound, pend = state
        binding = dict(bound)
        text = self.text(t)
        out = []
        if isinstance(item, TerminalPred):
            if text[k:k + 1] == (item.token,):
                out.append(((k + 1, bound, pend), None))
        elif isinstance(item, NonterminalPred):
            vals = tuple(self._value(a, binding) for a in item.args)
            for e in self.call(item.head, t, k, vals):
                out.append(((e, bound, pend), (item.head, t, k, vals, e)))
        elif isinstance(item, Quant):
            body = item.body
            for e, used in self._ends(body, t, k, binding):
                b = tuple(sorted({**binding, item.var: (t, k, e)}.items()))
                out.append(((e, b, pend), used))
        else:
            den = item.denominator
            pending = dict(pend)
            if len(den) == 1 and isinstance(den[0], Var) and den[0].name in pending:
                var = den[0].name
                vec, idx, (vt, l, r) = pending.pop(var)
                for e, used in self._ends(item.numerator, vt, l, binding):
                    if e > r:
                        continue
                    b = {**binding, var: (vt, l, e)}
                    p = dict(pending)
                    if idx + 1 == len(vec) - 1:
                        b[vec[-1]] = (vt, e, r)
                    else:
                        p[vec[idx + 1]] = (vec, idx + 1, (vt, e, r))
                    out.append(((k, tuple(sorted(b.items())), tuple(sorted(p.items()))), used))
            else:
                vt, l, r = self._value(den, binding)
                for e, used in self._ends(item.numerator, vt, l, binding):
                    if e == r:
                        out.append(((k, bound, pend), used))
        return out

    def _ends(self, pred, t, k, binding):
        if isinstance(pred, TerminalPred):
            if self.text(t)[k:k + 1] == (pred.token,):
                return [(k + 1, None)]
            return []
        vals = tuple(self._value(a, binding) for a in pred.args)
        return [(e, (pred.head, t, k, vals, e)) for e in self.call(pred.head, t, k, vals)]

    # -- derivations -------------------------------------------------------------
    def extract(self, head: str, t, i: int, values: tuple, end: int,
                anchored: bool = True) -> Optional[Derivation]:
        """One derivation of ``head(values)`` over ``text[i:end]``, guided by the memo."""
        if end not in self.call(head, t, i, values):
            return None
        for ridx in self._by_head.get(head, ()):
            rule = self.g.rules[ridx]
            first = self.initial_state(ridx, i, values)
            if first is None:
                continue
            path = self._path(rule.rhs, 0, t, first, end, set())
            if path is None:
                continue
            kids, marks = [], [i]
            state = first
            for item, (state, used) in zip(rule.rhs, path):
                marks.append(state[0])
                if used is None:
                    kids.append(None)
                    continue
                c_head, c_t, c_i, c_vals, c_end = used
                under_slash = isinstance(item, Slash)
                kids.append(self.extract(c_head, c_t, c_i, c_vals, c_end,
                                         anchored and not under_slash))
            final = dict(state[1])
            binding = tuple(sorted((v, self.word(val)) for v, val in final.items()))
            text = self.text(t)
            return Derivation(ridx, head, tuple(self.word(v) for v in values), binding,
                              tuple(kids), tuple(m - i for m in marks), text[i:end],
                              (i, end) if anchored and t is None else None)
        return None

    def _path(self, rhs, idx, t, state, end, dead):
        if idx == len(rhs):
            return [] if state[0] == end else None
        if (idx, state) in dead:
            return None
        for new, used in self.step(rhs[idx], t, state):
            rest = self._path(rhs, idx + 1, t, new, end, dead)
            if rest is not None:
                return [(new, used)] + rest
        dead.add((idx, state))
        return None


def _deep(fn):
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)
    return fn()


def recognize_poly(g: Grammar, tokens, check: bool = True) -> PolyResult:
    if check:
        check_eligible(g)
    session = PolySession(g, tokens)
    ends = _deep(lambda: session.call(g.start, None, 0, ()))
    return PolyResult(len(session.tokens) in ends, session.stats())


def parse_poly(g: Grammar, tokens, check: bool = True) -> PolyResult:
    """Recognize, and on success extract one derivation."""
    if check:
        check_eligible(g)
    session = PolySession(g, tokens)
    n = len(session.tokens)
    tree = _deep(lambda: session.extract(g.start, None, 0, (), n))
    return PolyResult(tree is not None, session.stats(), tree)


def extract_one_derivation(g: Grammar, tokens) -> Optional[Derivation]:
    return parse_poly(g, tokens).derivation
