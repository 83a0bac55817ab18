"""Grammar model for literal movement grammars.

A grammar is a start symbol, a similarity type ``mu`` (nonterminal -> arity)
and an ordered tuple of rules.  Rules have a left-hand side made of variable
vectors and a right-hand side made of items: plain predicates, quantifier
items ``x:A(...)`` and slash items ``A(...)/t``.

Everything here is immutable; the engines and analyses share one grammar
object freely.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Optional, Union

Word = tuple[str, ...]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Sym:
    """A terminal symbol occurring inside a term."""

    token: str

    def __str__(self) -> str:
        return repr(self.token)


Term = tuple[Union[Var, Sym], ...]


@dataclass(frozen=True)
class TerminalPred:
    token: str


@dataclass(frozen=True)
class NonterminalPred:
    head: str
    args: tuple[Term, ...] = ()


Predicate = Union[TerminalPred, NonterminalPred]


@dataclass(frozen=True)
class Quant:
    var: str
    body: Predicate


@dataclass(frozen=True)
class Slash:
    numerator: Predicate
    denominator: Term


Item = Union[TerminalPred, NonterminalPred, Quant, Slash]


@dataclass(frozen=True)
class Rule:
    head: str
    patterns: tuple[tuple[str, ...], ...]
    rhs: tuple[Item, ...]

    def lhs_variables(self) -> list[str]:
        return [v for pattern in self.patterns for v in pattern]

    def binders(self) -> list[str]:
        return [item.var for item in self.rhs if isinstance(item, Quant)]


@dataclass(frozen=True)
class Grammar:
    mu: Mapping[str, int]
    start: str
    rules: tuple[Rule, ...]

    def rules_for(self, head: str) -> list[int]:
        return [i for i, r in enumerate(self.rules) if r.head == head]

    def label(self, index: int) -> str:
        """Human-readable rule name ``HEAD#k`` (k counts rules of HEAD from 1)."""
        head = self.rules[index].head
        k = sum(1 for r in self.rules[: index + 1] if r.head == head)
        return f"{head}#{k}"

    def terminals(self) -> set[str]:
        out: set[str] = set()
        for rule in self.rules:
            for item in rule.rhs:
                for pred in item_predicates(item):
                    if isinstance(pred, TerminalPred):
                        out.add(pred.token)
                    else:
                        out.update(s.token for t in pred.args for s in t if isinstance(s, Sym))
                if isinstance(item, Slash):
                    out.update(s.token for s in item.denominator if isinstance(s, Sym))
        return out


def item_predicates(item: Item) -> tuple[Predicate, ...]:
    """The predicate an item mentions (body of a quantifier, numerator of a slash)."""
    if isinstance(item, Quant):
        return (item.body,)
    if isinstance(item, Slash):
        return (item.numerator,)
    return (item,)


def item_predicate(item: Item) -> Predicate:
    return item_predicates(item)[0]


def term_vars(term: Term) -> Iterator[str]:
    for s in term:
        if isinstance(s, Var):
            yield s.name


def item_uses(item: Item) -> list[str]:
    """Variables an item reads, in textual order (a quantifier binder is not a use)."""
    used: list[str] = []
    pred = item_predicate(item)
    if isinstance(pred, NonterminalPred):
        for t in pred.args:
            used.extend(term_vars(t))
    if isinstance(item, Slash):
        used.extend(term_vars(item.denominator))
    return used


def is_literal(term: Term) -> bool:
    return all(isinstance(s, Sym) for s in term)


def literal_word(term: Term) -> Word:
    return tuple(s.token for s in term)  # type: ignore[union-attr]


def quantifier_order_ok(rule: Rule) -> bool:
    """True when quantifier dependencies are acyclic.

    A quantifier item can only be eliminated once its body is closed, so a
    rule whose binders depend on each other cyclically (``x:B(y) y:C(x)``)
    never derives anything.
    """
    binders = {item.var: item for item in rule.rhs if isinstance(item, Quant)}
    deps = {x: {v for v in item_uses(q) if v in binders} for x, q in binders.items()}
    state: dict[str, int] = {}

    def visit(x: str) -> bool:
        if state.get(x) == 1:
            return False
        if state.get(x) == 2:
            return True
        state[x] = 1
        ok = all(visit(y) for y in deps[x])
        state[x] = 2
        return ok

    return all(visit(x) for x in binders)


# ---------------------------------------------------------------------------
# symbol table

@dataclass(frozen=True)
class SymbolTable:
    nonterminals: tuple[str, ...]
    terminals: tuple[str, ...]
    variables: tuple[str, ...]

    @classmethod
    def of(cls, g: Grammar) -> "SymbolTable":
        nts = set(g.mu) | {g.start} | {r.head for r in g.rules}
        for rule in g.rules:
            for item in rule.rhs:
                pred = item_predicate(item)
                if isinstance(pred, NonterminalPred):
                    nts.add(pred.head)
        variables = set()
        for rule in g.rules:
            variables.update(rule.lhs_variables())
            variables.update(rule.binders())
            for item in rule.rhs:
                variables.update(item_uses(item))
        return cls(tuple(sorted(nts)), tuple(sorted(g.terminals())), tuple(sorted(variables)))

    def id_of(self, kind: str, name: str) -> int:
        return getattr(self, kind).index(name)

    def name_of(self, kind: str, ident: int) -> str:
        return getattr(self, kind)[ident]

    def clashes(self) -> list[tuple[str, str, str]]:
        spaces = (("nonterminal", self.nonterminals), ("terminal", self.terminals),
                  ("variable", self.variables))
        out = []
        for i, (k1, s1) in enumerate(spaces):
            for k2, s2 in spaces[i + 1:]:
                out.extend((name, k1, k2) for name in sorted(set(s1) & set(s2)))
        return out


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Diagnostic:
    rule: Optional[int]
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        where = f"rule {self.rule}" if self.rule is not None else "grammar"
        return f"{self.severity}: {where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def __iter__(self):
        return iter(self.diagnostics)

    def __len__(self) -> int:
        return len(self.diagnostics)


def _check_predicate(g: Grammar, pred: Predicate, idx: int, out: list[Diagnostic]) -> None:
    if isinstance(pred, TerminalPred):
        return
    if pred.head not in g.mu:
        out.append(Diagnostic(idx, f"nonterminal {pred.head} has no arity"))
    elif len(pred.args) != g.mu[pred.head]:
        out.append(Diagnostic(
            idx, f"arity mismatch for {pred.head}: expected {g.mu[pred.head]}, got {len(pred.args)}"))


def validate_grammar(g: Grammar) -> ValidationReport:
    out: list[Diagnostic] = []
    if g.mu.get(g.start, 0) != 0:
        out.append(Diagnostic(None, "start symbol must be nullary"))
    for name, k1, k2 in SymbolTable.of(g).clashes():
        out.append(Diagnostic(None, f"{name!r} is used both as {k1} and {k2}"))

    for idx, rule in enumerate(g.rules):
        if rule.head not in g.mu:
            out.append(Diagnostic(idx, f"nonterminal {rule.head} has no arity"))
        elif len(rule.patterns) != g.mu[rule.head]:
            out.append(Diagnostic(
                idx, f"arity mismatch for {rule.head}: expected {g.mu[rule.head]}, "
                     f"got {len(rule.patterns)}"))
        lhs = rule.lhs_variables()
        seen: set[str] = set()
        for v in lhs:
            if v in seen:
                out.append(Diagnostic(idx, f"repeated variable {v} in left-hand side"))
            seen.add(v)

        binders: set[str] = set()
        for item in rule.rhs:
            for pred in item_predicates(item):
                _check_predicate(g, pred, idx, out)
            if isinstance(item, Quant):
                if item.var in seen:
                    out.append(Diagnostic(idx, f"quantifier variable {item.var} shadows a "
                                               f"left-hand side variable"))
                elif item.var in binders:
                    out.append(Diagnostic(idx, f"variable {item.var} is bound by more than "
                                               f"one quantifier"))
                binders.add(item.var)

        reported: set[str] = set()
        for item in rule.rhs:
            for v in item_uses(item):
                if v not in seen and v not in binders and v not in reported:
                    out.append(Diagnostic(idx, f"unbound variable {v}"))
                    reported.add(v)
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# instantiation

def substitute_term(term: Term, assignment: Mapping[str, Word]) -> Term:
    out: list[Union[Var, Sym]] = []
    for s in term:
        if isinstance(s, Var) and s.name in assignment:
            out.extend(Sym(t) for t in assignment[s.name])
        else:
            out.append(s)
    return tuple(out)


def substitute_predicate(pred: Predicate, assignment: Mapping[str, Word]) -> Predicate:
    if isinstance(pred, TerminalPred):
        return pred
    return NonterminalPred(pred.head, tuple(substitute_term(t, assignment) for t in pred.args))


def substitute_item(item: Item, assignment: Mapping[str, Word]) -> Item:
    if isinstance(item, Quant):
        return Quant(item.var, substitute_predicate(item.body, assignment))
    if isinstance(item, Slash):
        return Slash(substitute_predicate(item.numerator, assignment),
                     substitute_term(item.denominator, assignment))
    return substitute_predicate(item, assignment)


def term_word(term: Term, assignment: Mapping[str, Word]) -> Word:
    """Evaluate a term to a terminal word; every variable must be assigned."""
    out: list[str] = []
    for s in term:
        if isinstance(s, Var):
            out.extend(assignment[s.name])
        else:
            out.append(s.token)
    return tuple(out)


@dataclass(frozen=True)
class InstantiatedRule:
    head: str
    args: tuple[Word, ...]
    rhs: tuple[Item, ...]


def instantiate(rule: Rule, assignment: Mapping[str, Word]) -> InstantiatedRule:
    """Substitute terminal words for the left-hand side variables of ``rule``.

    Quantifier-bound variables are left in place; they are only given a value
    when the quantifier item is eliminated.
    """
    lhs = rule.lhs_variables()
    missing = [v for v in lhs if v not in assignment]
    if missing:
        raise ValueError(f"missing assignment for {', '.join(missing)}")
    lhs_only = {v: tuple(assignment[v]) for v in lhs}
    args = tuple(tuple(t for v in pattern for t in lhs_only[v]) for pattern in rule.patterns)
    return InstantiatedRule(rule.head, args, tuple(substitute_item(i, lhs_only) for i in rule.rhs))


# ---------------------------------------------------------------------------
# derivations

@dataclass(frozen=True)
class Derivation:
    """One rule application and the derivations of its obligations.

    ``children`` is aligned with the rule's right-hand side: ``None`` for items
    whose predicate is a terminal, a sub-derivation otherwise.  ``cuts`` has one
    entry per item boundary, as offsets into ``word``; slash items are
    zero-width.  ``span`` locates ``word`` in the input, or is ``None`` for
    material recognized from a slash denominator rather than from the input.
    """

    rule: int
    head: str
    args: tuple[Word, ...]
    binding: tuple[tuple[str, Word], ...]
    children: tuple[Optional["Derivation"], ...]
    cuts: tuple[int, ...]
    word: Word
    span: Optional[tuple[int, int]] = field(default=None)

    def bindings(self) -> dict[str, Word]:
        return dict(self.binding)

    def nodes(self) -> Iterator["Derivation"]:
        yield self
        for child in self.children:
            if child is not None:
                yield from child.nodes()

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


def anchor(g: Grammar, d: Derivation, start: Optional[int]) -> Derivation:
    """Give ``d`` input spans starting at ``start``; slash material stays detached."""
    rule = g.rules[d.rule]
    children = []
    for k, (item, child) in enumerate(zip(rule.rhs, d.children)):
        if child is None:
            children.append(None)
        elif isinstance(item, Slash) or start is None:
            children.append(anchor(g, child, None))
        else:
            children.append(anchor(g, child, start + d.cuts[k]))
    span = None if start is None else (start, start + len(d.word))
    return replace(d, children=tuple(children), span=span)
