"""Backtracking recognizer and parser for unrestricted grammars.

Arguments are terminal words.  Items are processed strictly left to right
against a text (the input, or the word of a slash denominator), and every
recognition call ``[A](args)`` at a position is memoized.

Grammars outside the left-binding fragment are still handled:

* a left-hand side vector that cannot be split lazily by its slash items is
  split every possible way when the rule is entered;
* a quantifier variable used before its quantifier is read is guessed among
  the substrings of the remaining text, and the guess is checked when the
  quantifier is reached.

Unrestricted grammars are Turing complete, so recognition runs under step
and depth limits, and re-entering a call that is still in progress is
reported as left recursion instead of looping.
"""
from __future__ import annotations

import enum
import itertools
import sys
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .core import (Derivation, Grammar, NonterminalPred, Quant, Rule, Slash, TerminalPred, Var,
                   Word, item_uses, quantifier_order_ok, term_vars, term_word)

_IN_PROGRESS = object()


class Outcome(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    LIMIT_EXCEEDED = "limit-exceeded"


@dataclass(frozen=True)
class Limits:
    max_steps: int = 10**7
    max_depth: int = 10**4
    max_trees: int = 64

    def __post_init__(self):
        if min(self.max_steps, self.max_depth, self.max_trees) <= 0:
            raise ValueError("limits must be positive")


class LimitExceeded(Exception):
    def __init__(self, which: str, detail: str = ""):
        super().__init__(f"{which} limit exceeded" + (f": {detail}" if detail else ""))
        self.which = which
        self.detail = detail


class LeftRecursion(LimitExceeded):
    def __init__(self, key):
        head, args, _, pos = key
        shown = ", ".join(" ".join(a) or "eps" for a in args)
        super().__init__("left-recursion", f"{head}({shown}) re-entered at position {pos}")
        self.key = key


@dataclass
class Recognition:
    outcome: Outcome
    stats: dict = field(default_factory=dict)
    limit: Optional[str] = None
    detail: str = ""

    @property
    def accepted(self) -> bool:
        return self.outcome is Outcome.ACCEPT


@dataclass
class ParseResult(Recognition):
    derivations: list[Derivation] = field(default_factory=list)


@dataclass
class _Plan:
    rule: Rule
    live: bool
    modes: list[str]  # per pattern: eps, single, lazy, eager


def _vector_is_lazy(rule: Rule, vec: tuple[str, ...]) -> bool:
    slash_at = []
    for v in vec[:-1]:
        hits = [t for t, item in enumerate(rule.rhs) if v in item_uses(item)]
        if len(hits) != 1:
            return False
        item = rule.rhs[hits[0]]
        if not (isinstance(item, Slash) and item.denominator == (Var(v),)):
            return False
        slash_at.append(hits[0])
    if slash_at != sorted(slash_at):
        return False
    last = vec[-1]
    return all(t > slash_at[-1] for t, item in enumerate(rule.rhs) if last in item_uses(item))


def plan_rule(rule: Rule) -> _Plan:
    modes = []
    for vec in rule.patterns:
        if not vec:
            modes.append("eps")
        elif len(vec) == 1:
            modes.append("single")
        else:
            modes.append("lazy" if _vector_is_lazy(rule, vec) else "eager")
    return _Plan(rule, quantifier_order_ok(rule), modes)


def _splits(word: Word, parts: int) -> Iterator[tuple[Word, ...]]:
    for cut in itertools.combinations_with_replacement(range(len(word) + 1), parts - 1):
        bounds = (0, *cut, len(word))
        yield tuple(word[bounds[i]:bounds[i + 1]] for i in range(parts))


class GeneralSession:
    """One recognition run over one input; owns its memo table."""

    def __init__(self, g: Grammar, tokens, limits: Limits = Limits(), memoize: bool = True,
                 build_trees: bool = False):
        self.g = g
        self.tokens = tuple(tokens)
        self.limits = limits
        self.memoize = memoize
        self.build_trees = build_trees
        self.plans = [plan_rule(r) for r in g.rules]
        self.by_head: dict[str, list[int]] = {}
        for i, plan in enumerate(self.plans):
            if plan.live:
                self.by_head.setdefault(plan.rule.head, []).append(i)
        self.texts: list[Word] = [self.tokens]
        self._text_ids: dict[Word, int] = {}
        self.memo: dict = {}
        self._active: set = set()
        self.steps = 0
        self.memo_hits = 0

    def text_id(self, word: Word) -> int:
        tid = self._text_ids.get(word)
        if tid is None:
            tid = self._text_ids[word] = len(self.texts)
            self.texts.append(word)
        return tid

    def stats(self) -> dict:
        return {"steps": self.steps, "memo_hits": self.memo_hits, "memo_entries": len(self.memo)}

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.limits.max_steps:
            raise LimitExceeded("max_steps", str(self.limits.max_steps))

    # -- calls ---------------------------------------------------------------
    def derive(self, head: str, args: tuple[Word, ...], tid: int, pos: int,
               depth: int = 0) -> dict[int, list]:
        """End positions ``j`` with ``head(args)`` deriving ``text[pos:j]``.

        Each end maps to derivations (or to ``[None]`` when not building
        trees).
        """
        key = (head, args, tid, pos)
        if self.memoize:
            hit = self.memo.get(key)
            if hit is _IN_PROGRESS:
                raise LeftRecursion(key)
            if hit is not None:
                self.memo_hits += 1
                return hit
            self.memo[key] = _IN_PROGRESS
        elif key in self._active:
            raise LeftRecursion(key)
        if depth > self.limits.max_depth:
            raise LimitExceeded("max_depth", str(self.limits.max_depth))
        self._active.add(key)
        results: dict[int, list] = {}
        try:
            for ridx in self.by_head.get(head, ()):
                for end, binding, kids, marks in self._activate(ridx, args, tid, pos, depth):
                    found = results.setdefault(end, [])
                    if not self.build_trees:
                        if not found:
                            found.append(None)
                        continue
                    if len(found) >= self.limits.max_trees:
                        continue
                    d = Derivation(ridx, head, args, tuple(sorted(binding.items())),
                                   tuple(kids), tuple(m - pos for m in marks),
                                   self.texts[tid][pos:end], (pos, end) if tid == 0 else None)
                    if d not in found:
                        found.append(d)
        finally:
            self._active.discard(key)
        if self.memoize:
            self.memo[key] = results
        return results

    def _activate(self, ridx, args, tid, pos, depth):
        plan = self.plans[ridx]
        if len(args) != len(plan.modes):
            return
        binding: dict[str, Word] = {}
        pending: dict[str, tuple] = {}
        eager = []
        for vec, mode, arg in zip(plan.rule.patterns, plan.modes, args):
            if mode == "eps":
                if arg:
                    return
            elif mode == "single":
                binding[vec[0]] = arg
            elif mode == "lazy":
                pending[vec[0]] = (vec, 0, arg)
            else:
                eager.append([dict(zip(vec, parts)) for parts in _splits(arg, len(vec))])
        for combo in itertools.product(*eager):
            b = dict(binding)
            for part in combo:
                b.update(part)
            yield from self._items(plan.rule, 0, tid, pos, b, pending, [], [pos], depth)

    # -- items ---------------------------------------------------------------
    def _items(self, rule, t, tid, k, binding, pending, kids, marks, depth):
        if t == len(rule.rhs):
            yield k, binding, kids, marks
            return
        self._tick()
        item = rule.rhs[t]
        text = self.texts[tid]

        for v in item_uses(item):
            if v in binding or v in pending:
                continue
            # a quantifier variable read before its quantifier: guess its word
            seen = set()
            for a in range(k, len(text) + 1):
                for b in range(a, len(text) + 1):
                    guess = text[a:b]
                    if guess in seen:
                        continue
                    seen.add(guess)
                    yield from self._items(rule, t, tid, k, {**binding, v: guess}, pending,
                                           kids, marks, depth)
            return

        def go(k2, binding2, pending2, child):
            return self._items(rule, t + 1, tid, k2, binding2, pending2, kids + [child],
                               marks + [k2], depth)

        if isinstance(item, TerminalPred):
            if text[k:k + 1] == (item.token,):
                yield from go(k + 1, binding, pending, None)
        elif isinstance(item, NonterminalPred):
            args = tuple(term_word(a, binding) for a in item.args)
            for end, trees in list(self.derive(item.head, args, tid, k, depth + 1).items()):
                for tree in trees:
                    yield from go(end, binding, pending, tree)
        elif isinstance(item, Quant):
            body = item.body
            if isinstance(body, TerminalPred):
                found = {k + 1: [None]} if text[k:k + 1] == (body.token,) else {}
            else:
                args = tuple(term_word(a, binding) for a in body.args)
                found = self.derive(body.head, args, tid, k, depth + 1)
            for end, trees in list(found.items()):
                word = text[k:end]
                if item.var in binding and binding[item.var] != word:
                    continue
                for tree in trees:
                    yield from go(end, {**binding, item.var: word}, pending, tree)
        else:
            for binding2, pending2, trees in self.resolve_slash(item, binding, pending, depth):
                for tree in trees:
                    yield from go(k, binding2, pending2, tree)

    def numerator_ends(self, pred, word: Word, depth: int = 0) -> dict[int, list]:
        """Prefix lengths of ``word`` derivable from ``pred`` (read as its own text)."""
        if isinstance(pred, TerminalPred):
            return {1: [None]} if word[:1] == (pred.token,) else {}
        return self.derive(pred.head, tuple(pred.args), self.text_id(word), 0, depth + 1)

    def resolve_slash(self, item: Slash, binding: dict, pending: dict, depth: int = 0) -> list:
        """Continuations ``(binding, pending, trees)`` after the slash item ``item``.

        ``pending`` maps the next unsplit variable of each lazily split
        vector to ``(vector, index, unconsumed suffix)``.
        """
        num = item.numerator
        if isinstance(num, NonterminalPred):
            if any(v not in binding for t in num.args for v in term_vars(t)):
                return []
            num = NonterminalPred(num.head, tuple(term_word(a, binding) for a in num.args))
        den = item.denominator
        if len(den) == 1 and isinstance(den[0], Var) and den[0].name not in binding:
            var = den[0].name
            if var not in pending:
                return []
            vec, idx, suffix = pending[var]
            out = []
            for end, trees in sorted(self.numerator_ends(num, suffix, depth).items()):
                b = {**binding, var: suffix[:end]}
                p = dict(pending)
                del p[var]
                rest = suffix[end:]
                if idx + 1 == len(vec) - 1:
                    b[vec[-1]] = rest
                else:
                    p[vec[idx + 1]] = (vec, idx + 1, rest)
                out.append((b, p, trees))
            return out
        if any(isinstance(s, Var) and s.name not in binding for s in den):
            return []
        word = term_word(den, binding)
        trees = self.numerator_ends(num, word, depth).get(len(word))
        return [(binding, pending, trees)] if trees else []


def _deep(fn):
    """Run ``fn`` with room for deep recursion."""
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)
    return fn()


def recognize_general(g: Grammar, tokens, limits: Limits = Limits(),
                      memoize: bool = True) -> Recognition:
    session = GeneralSession(g, tokens, limits, memoize=memoize)
    try:
        ends = _deep(lambda: session.derive(g.start, (), 0, 0))
    except LimitExceeded as exc:
        return Recognition(Outcome.LIMIT_EXCEEDED, session.stats(), exc.which, exc.detail)
    ok = len(session.tokens) in ends
    return Recognition(Outcome.ACCEPT if ok else Outcome.REJECT, session.stats())


def parse_general(g: Grammar, tokens, limits: Limits = Limits(),
                  memoize: bool = True) -> ParseResult:
    session = GeneralSession(g, tokens, limits, memoize=memoize, build_trees=True)
    try:
        ends = _deep(lambda: session.derive(g.start, (), 0, 0))
    except LimitExceeded as exc:
        return ParseResult(Outcome.LIMIT_EXCEEDED, session.stats(), exc.which, exc.detail)
    trees = ends.get(len(session.tokens), [])
    outcome = Outcome.ACCEPT if trees else Outcome.REJECT
    return ParseResult(outcome, session.stats(), derivations=list(trees))
