"""The ``.lmg`` text format.

::

    # a^n b^n c^n
    start S;
    S() -> x:A() B(x) ;
    A() -> "a" A() ;
    A() -> ;
    B(x y) -> "a"/x "b" B(y) "c" ;
    B() -> ;

Nonterminals start with an uppercase letter, variables with a lowercase one,
terminals are double-quoted.  Arguments are comma separated; inside an
argument, variables and terminals are separated by spaces.  ``eps`` (or
``ε``) is the empty argument.  ``X()`` means the single empty argument when
``X`` has arity 1 elsewhere in the file, and no arguments otherwise.  A slash
denominator is one variable, one quoted terminal, ``eps``, or a parenthesized
sequence of quoted terminals.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .core import (Grammar, Item, NonterminalPred, Predicate, Quant, Rule, Slash, Sym,
                   Term, TerminalPred, Var)


class GrammarSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->|→)
  | (?P<punct>[(),:/;])
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<eps>ε)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise GrammarSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "string":
            toks.append(_Tok("string", re.sub(r"\\(.)", r"\1", value[1:-1]), line, col))
        elif kind == "eps" or (kind == "ident" and value == "eps"):
            toks.append(_Tok("eps", value, line, col))
        elif kind == "ident":
            toks.append(_Tok("ident", value, line, col))
        elif kind in ("arrow", "punct"):
            toks.append(_Tok(value if kind == "punct" else "->", value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# raw syntax, before arities are known
@dataclass
class _RawPred:
    head: str
    args: Optional[list[list]]  # None: written without parentheses
    tok: _Tok


@dataclass
class _RawRule:
    lhs: _RawPred
    rhs: list  # of (kind, payload)
    tok: _Tok


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise GrammarSyntaxError(f"expected {what}, found {found!r}", tok.line, tok.col)
        return tok

    def error(self, message: str, tok: Optional[_Tok] = None) -> GrammarSyntaxError:
        tok = tok or self.peek()
        return GrammarSyntaxError(message, tok.line, tok.col)

    def parse(self) -> tuple[Optional[_Tok], list[_RawRule]]:
        start = None
        rules = []
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "ident" and tok.text == "start" and self.peek(1).kind == "ident":
                self.next()
                if start is not None:
                    raise self.error("duplicate start declaration", tok)
                start = self.expect("ident", "start symbol")
                if not start.text[0].isupper():
                    raise self.error("start symbol must be a nonterminal", start)
                self.expect(";", "';'")
            else:
                rules.append(self.rule())
        return start, rules

    def rule(self) -> _RawRule:
        tok = self.peek()
        if tok.kind != "ident" or not tok.text[0].isupper():
            raise self.error(f"expected a rule head, found {tok.text or 'end of input'!r}")
        lhs = self.predicate(lhs=True)
        self.expect("->", "'->'")
        rhs = []
        while self.peek().kind != ";":
            if self.peek().kind == "eof":
                raise self.error("expected ';' at end of rule")
            if self.peek().kind == "eps" or self.peek().text == "eps":
                self.next()  # an explicit empty body
                continue
            rhs.append(self.item())
        self.next()
        return _RawRule(lhs, rhs, tok)

    def item(self):
        tok = self.peek()
        if tok.kind == "ident" and tok.text[0].islower():
            if self.peek(1).kind != ":":
                raise self.error(f"variable {tok.text} can only occur inside arguments", tok)
            self.next()
            self.next()
            body = self.predicate()
            if self.peek().kind == "/":
                raise self.error("a quantifier item cannot carry a slash")
            return ("quant", (tok.text, body))
        pred = self.predicate()
        if self.peek().kind == "/":
            self.next()
            return ("slash", (pred, self.denominator()))
        return ("pred", pred)

    def denominator(self) -> list:
        tok = self.next()
        if tok.kind == "ident" and tok.text[0].islower():
            return [("var", tok.text)]
        if tok.kind == "string":
            return [("sym", tok.text)]
        if tok.kind == "eps":
            return []
        if tok.kind == "(":
            out = []
            while self.peek().kind == "string":
                out.append(("sym", self.next().text))
            if self.peek().kind != ")":
                raise self.error("slash denominators must be a single variable or a "
                                 "sequence of quoted terminals")
            self.next()
            return out
        raise self.error("expected a slash denominator", tok)

    def predicate(self, lhs: bool = False) -> _RawPred:
        tok = self.next()
        if tok.kind == "string":
            if lhs:
                raise self.error("a rule head must be a nonterminal", tok)
            return _RawPred("", None, tok)
        if tok.kind != "ident" or not tok.text[0].isupper():
            raise self.error(f"expected a predicate, found {tok.text or 'end of input'!r}", tok)
        if self.peek().kind != "(":
            return _RawPred(tok.text, None, tok)
        self.next()
        args: list[list] = []
        if self.peek().kind == ")":
            self.next()
            return _RawPred(tok.text, args, tok)
        while True:
            args.append(self.term(lhs))
            sep = self.next()
            if sep.kind == ")":
                break
            if sep.kind != ",":
                raise self.error(f"expected ',' or ')', found {sep.text or 'end of input'!r}", sep)
        return _RawPred(tok.text, args, tok)

    def term(self, lhs: bool) -> list:
        if self.peek().kind == "eps":
            self.next()
            return []
        out = []
        while True:
            tok = self.peek()
            if tok.kind == "ident" and tok.text[0].islower():
                out.append(("var", tok.text))
            elif tok.kind == "string" and not lhs:
                out.append(("sym", tok.text))
            elif tok.kind == "string":
                raise self.error("terminals are not allowed in left-hand side patterns", tok)
            elif tok.kind == "ident":
                raise self.error(f"nonterminal {tok.text} cannot occur inside an argument", tok)
            else:
                break
            self.next()
        if not out:
            raise self.error("empty argument; write eps for the empty word")
        return out


def _preds_of(raw: _RawRule):
    yield raw.lhs
    for kind, payload in raw.rhs:
        if kind == "pred":
            yield payload
        elif kind == "quant":
            yield payload[1]
        else:
            yield payload[0]


def _resolve_arities(raw_rules: list[_RawRule], start: Optional[str]) -> dict[str, int]:
    mu: dict[str, int] = {}
    first: dict[str, _RawPred] = {}
    for raw in raw_rules:
        for p in _preds_of(raw):
            if not p.head:
                continue
            if p.args is None or p.args:
                n = 0 if p.args is None else len(p.args)
                if p.head in mu and mu[p.head] != n:
                    ref = first[p.head]
                    raise GrammarSyntaxError(
                        f"arity mismatch for {p.head}: {n} here, {mu[p.head]} at "
                        f"{ref.tok.line}:{ref.tok.col}", p.tok.line, p.tok.col)
                mu.setdefault(p.head, n)
                first.setdefault(p.head, p)
    for raw in raw_rules:
        for p in _preds_of(raw):
            if p.head and p.args == [] and mu.get(p.head, 0) > 1:
                raise GrammarSyntaxError(
                    f"arity mismatch for {p.head}: 0 here, {mu[p.head]} elsewhere",
                    p.tok.line, p.tok.col)
            if p.head:
                mu.setdefault(p.head, 0)
    if start is not None:
        mu.setdefault(start, 0)
    return mu


def _term(raw: list) -> Term:
    return tuple(Var(x) if kind == "var" else Sym(x) for kind, x in raw)


def _build_pred(p: _RawPred, mu: dict[str, int]) -> Predicate:
    if not p.head:
        return TerminalPred(p.tok.text)
    args = p.args or []
    if not args and mu[p.head] == 1:
        args = [[]]
    return NonterminalPred(p.head, tuple(_term(a) for a in args))


@dataclass(frozen=True)
class SourceGrammar:
    text: str
    grammar: Grammar
    positions: tuple[tuple[int, int], ...]  # (line, column) per rule


def parse_source(text: str) -> SourceGrammar:
    start_tok, raw_rules = _Parser(text).parse()
    if start_tok is None and not raw_rules:
        raise GrammarSyntaxError("empty grammar: no start declaration and no rules", 1, 1)
    start = start_tok.text if start_tok else raw_rules[0].lhs.head
    mu = _resolve_arities(raw_rules, start)
    rules = []
    for raw in raw_rules:
        lhs = _build_pred(raw.lhs, mu)
        assert isinstance(lhs, NonterminalPred)
        patterns = tuple(tuple(s.name for s in t) for t in lhs.args)  # type: ignore[union-attr]
        rhs: list[Item] = []
        for kind, payload in raw.rhs:
            if kind == "pred":
                rhs.append(_build_pred(payload, mu))
            elif kind == "quant":
                rhs.append(Quant(payload[0], _build_pred(payload[1], mu)))
            else:
                rhs.append(Slash(_build_pred(payload[0], mu), _term(payload[1])))
        rules.append(Rule(lhs.head, patterns, tuple(rhs)))
    grammar = Grammar(mu, start, tuple(rules))
    return SourceGrammar(text, grammar, tuple((r.tok.line, r.tok.col) for r in raw_rules))


def parse_grammar(text: str) -> Grammar:
    return parse_source(text).grammar


def load_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


# ---------------------------------------------------------------------------
# printing

def _quote(token: str) -> str:
    return '"' + token.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_term(term: Term) -> str:
    if not term:
        return "eps"
    return " ".join(s.name if isinstance(s, Var) else _quote(s.token) for s in term)


def format_predicate(pred: Predicate) -> str:
    if isinstance(pred, TerminalPred):
        return _quote(pred.token)
    return f"{pred.head}({', '.join(format_term(t) for t in pred.args)})"


def format_item(item: Item) -> str:
    if isinstance(item, Quant):
        return f"{item.var}:{format_predicate(item.body)}"
    if isinstance(item, Slash):
        den = item.denominator
        if len(den) == 1 or not den:
            d = format_term(den)
        else:
            d = "(" + " ".join(_quote(s.token) for s in den) + ")"  # type: ignore[union-attr]
        return f"{format_predicate(item.numerator)}/{d}"
    return format_predicate(item)


def format_rule(rule: Rule) -> str:
    lhs = ", ".join(" ".join(p) if p else "eps" for p in rule.patterns)
    body = " ".join(format_item(i) for i in rule.rhs)
    return f"{rule.head}({lhs}) -> {body + ' ' if body else ''};"


def print_grammar(g: Grammar) -> str:
    lines = [f"start {g.start};"]
    lines.extend(format_rule(r) for r in g.rules)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# input tokenization

def tokenize(text: str, mode: str = "words") -> tuple[str, ...]:
    if mode == "words":
        return tuple(text.split())
    if mode == "chars":
        return tuple(c for c in text if not c.isspace())
    raise ValueError(f"unknown tokenization mode {mode!r}")
