"""Grammar and derivation transformations.

* ``backbone_grammar`` erases arguments, re-inserts slashed material at the
  slash and replaces each quantifier item by a placeholder that derives the
  empty word.  The result is context-free.
* ``backbone_tree`` applies the same projection to a derivation.
* ``intersect`` builds a grammar for the intersection of two languages: it
  reads a word with the first start symbol, binds it, and has the second
  start symbol derive the bound word through a slash.
* ``cf_parse`` and ``cf_memo_recognize`` are reference context-free
  recognizers used to check the above.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (Derivation, Grammar, NonterminalPred, Quant, Rule, Slash, TerminalPred, Var,
                   Word, item_predicate)

Symbol = TerminalPred | NonterminalPred


@dataclass(frozen=True)
class CFGrammar:
    start: str
    rules: tuple[tuple[str, tuple[Symbol, ...]], ...]

    @property
    def nonterminals(self) -> set[str]:
        out = {self.start}
        for head, body in self.rules:
            out.add(head)
            out.update(s.head for s in body if isinstance(s, NonterminalPred))
        return out

    @property
    def terminals(self) -> set[str]:
        return {s.token for _, body in self.rules for s in body if isinstance(s, TerminalPred)}

    def productions(self, head: str) -> list[tuple[Symbol, ...]]:
        return [body for h, body in self.rules if h == head]

    def to_lmg(self) -> Grammar:
        mu = {nt: 0 for nt in self.nonterminals}
        return Grammar(mu, self.start, tuple(Rule(h, (), body) for h, body in self.rules))

    @classmethod
    def from_lmg(cls, g: Grammar) -> "CFGrammar":
        """The grammar itself, if it is nullary and uses only plain predicates."""
        rules = []
        for r in g.rules:
            if r.patterns or any(isinstance(i, (Quant, Slash)) or
                                 (isinstance(i, NonterminalPred) and i.args) for i in r.rhs):
                raise ValueError(f"rule {r.head} is not context-free")
            rules.append((r.head, tuple(r.rhs)))
        return cls(g.start, tuple(rules))


def _placeholder_names(g: Grammar) -> dict[str, str]:
    """Placeholder nonterminal for each quantified predicate symbol."""
    taken = set(g.mu) | g.terminals()
    names: dict[str, str] = {}
    for r in g.rules:
        for item in r.rhs:
            if not isinstance(item, Quant):
                continue
            body = item.body
            key = _placeholder_key(item)
            if key in names:
                continue
            stem = body.head if isinstance(body, NonterminalPred) else re.sub(r"\W", "_", body.token)
            name = "X_" + stem
            while name in taken:
                name += "'"
            taken.add(name)
            names[key] = name
    return names


def _placeholder_key(item: Quant) -> str:
    body = item.body
    return body.head if isinstance(body, NonterminalPred) else '"' + body.token


def _project(pred) -> Symbol:
    if isinstance(pred, TerminalPred):
        return pred
    return NonterminalPred(pred.head, ())


def backbone_grammar(g: Grammar) -> CFGrammar:
    names = _placeholder_names(g)
    rules: list[tuple[str, tuple[Symbol, ...]]] = []
    for r in g.rules:
        body = []
        for item in r.rhs:
            if isinstance(item, Quant):
                body.append(NonterminalPred(names[_placeholder_key(item)], ()))
            else:
                body.append(_project(item_predicate(item)))
        rules.append((r.head, tuple(body)))
    rules.extend((name, ()) for name in names.values())
    reachable = {g.start}
    frontier = [g.start]
    while frontier:
        head = frontier.pop()
        for h, body in rules:
            if h != head:
                continue
            for s in body:
                if isinstance(s, NonterminalPred) and s.head not in reachable:
                    reachable.add(s.head)
                    frontier.append(s.head)
    kept = list(dict.fromkeys(rule for rule in rules if rule[0] in reachable))
    return CFGrammar(g.start, tuple(kept))


@dataclass(frozen=True)
class BackboneTree:
    """A context-free parse tree.  Terminal leaves have ``terminal`` set.

    Placeholder nodes carry the quantified sub-derivation they stand for in
    ``annotation``; it is not part of the tree proper.
    """
    label: str
    children: tuple["BackboneTree", ...] = ()
    terminal: bool = False
    annotation: Optional[Derivation] = field(default=None, compare=False)

    def leaves(self) -> Word:
        if self.terminal:
            return (self.label,)
        return tuple(tok for c in self.children for tok in c.leaves())


def backbone_tree(g: Grammar, d: Derivation) -> BackboneTree:
    names = _placeholder_names(g)
    return _tree(g, d, names)


def _tree(g: Grammar, d: Derivation, names) -> BackboneTree:
    rule = g.rules[d.rule]
    kids = []
    for item, child in zip(rule.rhs, d.children):
        if isinstance(item, Quant):
            kids.append(BackboneTree(names[_placeholder_key(item)], annotation=child))
            continue
        pred = item_predicate(item)
        if isinstance(pred, TerminalPred):
            kids.append(BackboneTree(pred.token, terminal=True))
        else:
            kids.append(_tree(g, child, names))
    return BackboneTree(d.head, tuple(kids))


def is_parse_tree(cfg: CFGrammar, tree: BackboneTree, root: Optional[str] = None) -> bool:
    """Every inner node expands by a production of ``cfg``."""
    if root is not None and (tree.terminal or tree.label != root):
        return False
    if tree.terminal:
        return True
    body = tuple(TerminalPred(c.label) if c.terminal else NonterminalPred(c.label, ())
                 for c in tree.children)
    if body not in cfg.productions(tree.label):
        return False
    return all(is_parse_tree(cfg, c) for c in tree.children)


def _rename(g: Grammar, suffix: str) -> tuple[dict[str, str], list[Rule]]:
    names = {nt: nt + suffix for nt in g.mu}

    def pred(p):
        if isinstance(p, TerminalPred):
            return p
        return NonterminalPred(names[p.head], p.args)

    rules = []
    for r in g.rules:
        rhs = []
        for item in r.rhs:
            if isinstance(item, Quant):
                rhs.append(Quant(item.var, pred(item.body)))
            elif isinstance(item, Slash):
                rhs.append(Slash(pred(item.numerator), item.denominator))
            else:
                rhs.append(pred(item))
        rules.append(Rule(names[r.head], r.patterns, tuple(rhs)))
    return names, rules


def intersect(g1: Grammar, g2: Grammar) -> Grammar:
    """Grammar for ``L(g1) & L(g2)``; nonterminals get the suffixes 1 and 2."""
    names1, rules1 = _rename(g1, "1")
    names2, rules2 = _rename(g2, "2")
    mu = {names1[k]: v for k, v in g1.mu.items()}
    mu.update({names2[k]: v for k, v in g2.mu.items()})
    start = "S"
    while start in mu:
        start += "'"
    mu[start] = 0
    taken = set(mu) | g1.terminals() | g2.terminals()
    var = "x"
    while var in taken:
        var += "'"
    glue = Rule(start, (), (Quant(var, NonterminalPred(names1[g1.start], ())),
                            Slash(NonterminalPred(names2[g2.start], ()), (Var(var),))))
    return Grammar(mu, start, (glue, *rules1, *rules2))


# -- reference context-free recognizers -------------------------------------------
def cf_parse(cfg: CFGrammar, tokens: Iterable[str]) -> bool:
    """Earley recognition."""
    tokens = tuple(tokens)
    prods = {}
    for head, body in cfg.rules:
        prods.setdefault(head, []).append(body)
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for head, body in cfg.rules:
            if head not in nullable and all(isinstance(s, NonterminalPred) and s.head in nullable
                                             for s in body):
                nullable.add(head)
                changed = True
    n = len(tokens)
    chart: list[set] = [set() for _ in range(n + 1)]
    goal = "\0start"
    chart[0].add((goal, (NonterminalPred(cfg.start, ()),), 0, 0))
    for i in range(n + 1):
        agenda = list(chart[i])
        while agenda:
            head, body, dot, origin = agenda.pop()
            if dot < len(body):
                sym = body[dot]
                if isinstance(sym, TerminalPred):
                    if i < n and tokens[i] == sym.token:
                        chart[i + 1].add((head, body, dot + 1, origin))
                    continue
                new = [(sym.head, b, 0, i) for b in prods.get(sym.head, ())]
                if sym.head in nullable:
                    new.append((head, body, dot + 1, origin))
            else:
                new = [(h, b, d + 1, o) for h, b, d, o in list(chart[origin])
                       if d < len(b) and isinstance(b[d], NonterminalPred) and b[d].head == head]
            for st in new:
                if st not in chart[i]:
                    chart[i].add(st)
                    agenda.append(st)
    return any(h == goal and d == 1 for h, _, d, _ in chart[n])


def cf_memo_recognize(cfg: CFGrammar, tokens: Iterable[str]) -> tuple[bool, int]:
    """Memoizing recursive descent; returns ``(accepted, memo entries)``.

    Each call ``(A, i)`` returns the set of ends; rule bodies are read left
    to right over sets of positions.  Left-recursive grammars are not
    supported.
    """
    tokens = tuple(tokens)
    memo: dict[tuple[str, int], frozenset[int]] = {}
    active: set[tuple[str, int]] = set()

    def call(head: str, i: int) -> frozenset[int]:
        key = (head, i)
        if key in memo:
            return memo[key]
        if key in active:
            raise ValueError(f"left recursion on {head} at {i}")
        active.add(key)
        ends: set[int] = set()
        for h, body in cfg.rules:
            if h != head:
                continue
            here = {i}
            for sym in body:
                nxt: set[int] = set()
                for k in sorted(here):
                    if isinstance(sym, TerminalPred):
                        if tokens[k:k + 1] == (sym.token,):
                            nxt.add(k + 1)
                    else:
                        nxt.update(call(sym.head, k))
                here = nxt
            ends |= here
        active.discard(key)
        memo[key] = frozenset(ends)
        return memo[key]

    ok = len(tokens) in call(cfg.start, 0)
    return ok, len(memo)
