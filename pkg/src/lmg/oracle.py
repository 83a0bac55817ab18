"""Brute-force derivability, straight from the inference rules.

Goals are ``(head, args, word)``: does the instantiated predicate
``head(args)`` derive ``word``?  A goal is expanded by trying every rule for
``head``, every way of splitting each argument word over the rule's
left-hand side vectors, and every way of cutting ``word`` into the segments
consumed by the input-consuming items.  Quantifier variables take the
segment their item consumes.  Slash items consume nothing; their numerator
must derive the denominator's word.

Search uses path-based cycle pruning (a minimal derivation never repeats a
goal along a branch), so left-recursive grammars are fine.  Results are
cached only when they cannot depend on where in the search they were
computed.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .core import (Derivation, Grammar, Quant, Slash, TerminalPred, Word, anchor, item_predicate,
                   quantifier_order_ok, term_word)

Goal = tuple[str, tuple[Word, ...], Word]
_INF = float("inf")


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class Budget:
    max_derivation_depth: int = 64
    max_steps: int = 2_000_000

    def __post_init__(self):
        if self.max_derivation_depth <= 0 or self.max_steps <= 0:
            raise ValueError("budget limits must be positive")


class BudgetExhaustedError(Exception):
    pass


def _splits(word: Word, parts: int) -> Iterator[tuple[Word, ...]]:
    if parts == 1:
        yield (word,)
        return
    for cut in itertools.combinations_with_replacement(range(len(word) + 1), parts - 1):
        bounds = (0, *cut, len(word))
        yield tuple(word[bounds[i]:bounds[i + 1]] for i in range(parts))


def _lhs_bindings(patterns, args) -> Iterator[dict[str, Word]]:
    options = []
    for pattern, arg in zip(patterns, args):
        if not pattern:
            if arg:
                return
            options.append([{}])
        else:
            options.append([dict(zip(pattern, parts)) for parts in _splits(arg, len(pattern))])
    for combo in itertools.product(*options):
        out: dict[str, Word] = {}
        for part in combo:
            out.update(part)
        yield out


def _is_terminal_width(item) -> Optional[str]:
    pred = item_predicate(item)
    if isinstance(pred, TerminalPred) and not isinstance(item, Slash):
        return pred.token
    return None


@dataclass
class _Instance:
    rule: int
    binding: dict[str, Word]
    cuts: tuple[int, ...]
    obligations: list[Optional[Goal]]


class Oracle:
    def __init__(self, g: Grammar):
        self.g = g
        self.by_head: dict[str, list[int]] = {}
        for i, r in enumerate(g.rules):
            if quantifier_order_ok(r):
                self.by_head.setdefault(r.head, []).append(i)
        self.known: dict[Goal, bool] = {}
        self._trees: dict[Goal, list[Derivation]] = {}
        self.steps = 0

    # -- expansion ---------------------------------------------------------
    def instances(self, goal: Goal) -> Iterator[_Instance]:
        head, args, word = goal
        for ridx in self.by_head.get(head, ()):
            rule = self.g.rules[ridx]
            if len(rule.patterns) != len(args):
                continue
            consuming = [i for i, it in enumerate(rule.rhs) if not isinstance(it, Slash)]
            for lhs in _lhs_bindings(rule.patterns, args):
                for bounds in self._segmentations(rule, consuming, word, 0, 0):
                    yield self._instance(ridx, rule, lhs, consuming, bounds, word)

    def _segmentations(self, rule, consuming, word, k, pos) -> Iterator[tuple[int, ...]]:
        if k == len(consuming):
            if pos == len(word):
                yield ()
            return
        tok = _is_terminal_width(rule.rhs[consuming[k]])
        ends: Iterable[int]
        if tok is not None:
            ends = (pos + 1,) if word[pos:pos + 1] == (tok,) else ()
        elif k == len(consuming) - 1:
            ends = (len(word),)
        else:
            ends = range(pos, len(word) + 1)
        for end in ends:
            for rest in self._segmentations(rule, consuming, word, k + 1, end):
                yield (end, *rest)

    def _instance(self, ridx, rule, lhs, consuming, bounds, word) -> Optional[_Instance]:
        binding = dict(lhs)
        seg = {}
        start = 0
        for i, end in zip(consuming, bounds):
            seg[i] = word[start:end]
            start = end
            item = rule.rhs[i]
            if isinstance(item, Quant):
                binding[item.var] = seg[i]
        cuts = [0]
        obligations: list[Optional[Goal]] = []
        for i, item in enumerate(rule.rhs):
            pred = item_predicate(item)
            if isinstance(item, Slash):
                target = term_word(item.denominator, binding)
                cuts.append(cuts[-1])
            else:
                target = seg[i]
                cuts.append(cuts[-1] + len(target))
            if isinstance(pred, TerminalPred):
                if target != (pred.token,):
                    return None
                obligations.append(None)
            else:
                args = tuple(term_word(t, binding) for t in pred.args)
                obligations.append((pred.head, args, target))
        return _Instance(ridx, binding, tuple(cuts), obligations)

    # -- recognition -------------------------------------------------------
    def derives(self, head: str, args: tuple[Word, ...], word: Word,
                budget: Budget = Budget()) -> Answer:
        self._budget = budget
        self._stack: dict[Goal, int] = {}
        self.steps = 0
        try:
            found, complete, _ = self._solve((head, tuple(args), tuple(word)))
        except BudgetExhaustedError:
            return Answer.BUDGET_EXHAUSTED
        if found:
            return Answer.YES
        return Answer.NO if complete else Answer.BUDGET_EXHAUSTED

    def _solve(self, goal: Goal) -> tuple[bool, bool, float]:
        if goal in self.known:
            return self.known[goal], True, _INF
        if goal in self._stack:
            return False, True, self._stack[goal]
        depth = len(self._stack)
        if depth >= self._budget.max_derivation_depth:
            return False, False, _INF
        self.steps += 1
        if self.steps > self._budget.max_steps:
            raise BudgetExhaustedError
        self._stack[goal] = depth
        complete, low = True, _INF
        try:
            for inst in self.instances(goal):
                if inst is None:
                    continue
                ok = True
                for sub in inst.obligations:
                    if sub is None:
                        continue
                    found, c, lo = self._solve(sub)
                    complete, low = complete and c, min(low, lo)
                    if not found:
                        ok = False
                        break
                if ok:
                    self.known[goal] = True
                    return True, True, _INF
        finally:
            del self._stack[goal]
        if complete and low >= depth:
            self.known[goal] = False
            low = _INF
        return False, complete, low

    # -- derivation enumeration -------------------------------------------
    def derivations(self, head: str, args: tuple[Word, ...], word: Word,
                    budget: Budget = Budget(), limit: int = 64) -> list[Derivation]:
        """All derivations with no goal repeated along a branch (at most ``limit``)."""
        self._budget = budget
        self._stack = {}
        self.steps = 0
        if limit != getattr(self, "_limit", limit):
            self._trees.clear()
        self._limit = limit
        trees, _ = self._enumerate((head, tuple(args), tuple(word)))
        return [anchor(self.g, t, 0) for t in trees]

    def _enumerate(self, goal: Goal) -> tuple[list[Derivation], float]:
        if goal in self._trees:
            return self._trees[goal], _INF
        if goal in self._stack:
            return [], self._stack[goal]
        depth = len(self._stack)
        if depth >= self._budget.max_derivation_depth:
            raise BudgetExhaustedError
        self.steps += 1
        if self.steps > self._budget.max_steps:
            raise BudgetExhaustedError
        self._stack[goal] = depth
        low = _INF
        out: list[Derivation] = []
        try:
            for inst in self.instances(goal):
                if inst is None:
                    continue
                options = []
                for sub in inst.obligations:
                    if sub is None:
                        options.append([None])
                        continue
                    trees, lo = self._enumerate(sub)
                    low = min(low, lo)
                    options.append(trees)
                    if not trees:
                        break
                else:
                    binding = tuple(sorted(inst.binding.items()))
                    for combo in itertools.product(*options):
                        out.append(Derivation(inst.rule, goal[0], goal[1], binding, combo,
                                              inst.cuts, goal[2]))
                        if len(out) >= self._limit:
                            break
                if len(out) >= self._limit:
                    break
        finally:
            del self._stack[goal]
        if low >= depth:
            self._trees[goal] = out
            low = _INF
        return out, low


def language_upto(g: Grammar, alphabet: Iterable[str], maxlen: int,
                  budget: Budget = Budget()) -> tuple[set[Word], set[Word]]:
    """Words of length at most ``maxlen`` derivable from the start symbol.

    Returns ``(accepted, exhausted)``; the second set holds words the budget
    could not decide.
    """
    oracle = Oracle(g)
    alphabet = sorted(set(alphabet))
    accepted, exhausted = set(), set()
    for n in range(maxlen + 1):
        for word in itertools.product(alphabet, repeat=n):
            ans = oracle.derives(g.start, (), word, budget)
            if ans is Answer.YES:
                accepted.add(word)
            elif ans is Answer.BUDGET_EXHAUSTED:
                exhausted.add(word)
    return accepted, exhausted


def derives(g: Grammar, head: str, args: tuple[Word, ...], word: Word,
            budget: Budget = Budget()) -> Answer:
    return Oracle(g).derives(head, args, word, budget)


def replay(g: Grammar, d: Derivation, tokens=None) -> bool:
    """Check that ``d`` is a well-formed derivation of its own word.

    With ``tokens`` the root must also be anchored: its span covers
    ``tokens`` and every node outside a slash numerator sits at its offset.
    """
    if tokens is not None:
        tokens = tuple(tokens)
        if d.word != tokens or d.span != (0, len(tokens)):
            return False
        return _replay(g, d, 0)
    return _replay(g, d, None)


def _replay(g: Grammar, d: Derivation, start: Optional[int]) -> bool:
    if not (isinstance(d, Derivation) and 0 <= d.rule < len(g.rules)):
        return False
    rule = g.rules[d.rule]
    if rule.head != d.head or len(rule.patterns) != len(d.args):
        return False
    if not quantifier_order_ok(rule):
        return False
    binding = dict(d.binding)
    if set(binding) != set(rule.lhs_variables()) | set(rule.binders()):
        return False
    for vec, arg in zip(rule.patterns, d.args):
        if tuple(itertools.chain.from_iterable(binding[v] for v in vec)) != arg:
            return False
    n = len(rule.rhs)
    if len(d.children) != n or len(d.cuts) != n + 1:
        return False
    if d.cuts[0] != 0 or d.cuts[-1] != len(d.word) or list(d.cuts) != sorted(d.cuts):
        return False
    want_span = None if start is None else (start, start + len(d.word))
    if d.span != want_span:
        return False
    for t, item in enumerate(rule.rhs):
        seg = d.word[d.cuts[t]:d.cuts[t + 1]]
        child = d.children[t]
        if isinstance(item, Slash):
            if seg:
                return False
            target, child_start = term_word(item.denominator, binding), None
        else:
            target = seg
            child_start = None if start is None else start + d.cuts[t]
            if isinstance(item, Quant) and binding[item.var] != seg:
                return False
        pred = item_predicate(item)
        if isinstance(pred, TerminalPred):
            if target != (pred.token,) or child is not None:
                return False
            continue
        if not isinstance(child, Derivation) or child.head != pred.head or child.word != target:
            return False
        if child.args != tuple(term_word(a, binding) for a in pred.args):
            return False
        if not _replay(g, child, child_start):
            return False
    return True
