"""Static classification of grammars.

Three restrictions together make a grammar tractable for the span-based
memoizing recognizer in :mod:`lmg.poly`:

* non-combinatorial: nonterminal arguments on right-hand sides are single
  variables (we also admit literal terminal words, reported separately);
* left-binding: variables are bound before use when reading a rule left to
  right, and multi-variable left-hand side vectors are split by slash items
  in order;
* no left recursion, which is undecidable in general, so we only ever claim
  ``PROVABLY_FREE`` or ``POSSIBLY_RECURSIVE``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import (Grammar, NonterminalPred, Quant, Slash, Var, is_literal,
                   item_predicate, item_uses)


@dataclass(frozen=True)
class Offender:
    rule: int
    label: str
    detail: str

    def __str__(self) -> str:
        return f"{self.label}: {self.detail}"


@dataclass(frozen=True)
class NonCombinatorial:
    ok: bool
    offenders: tuple[Offender, ...]
    literal_args: tuple[Offender, ...]


@dataclass(frozen=True)
class LeftBinding:
    ok: bool
    cond1: tuple[Offender, ...]
    cond2: tuple[Offender, ...]


class Verdict(enum.Enum):
    PROVABLY_FREE = "provably-free"
    POSSIBLY_RECURSIVE = "possibly-recursive"


@dataclass(frozen=True)
class LeftRecursion:
    verdict: Verdict
    witness: tuple[str, ...]
    nullable: frozenset[str] = field(default=frozenset())


@dataclass(frozen=True)
class Profile:
    m: int
    p: int

    @property
    def time_exponent(self) -> int:
        return 1 + self.m + 2 * self.p

    @property
    def space_exponent(self) -> int:
        return 2 + 2 * self.p


@dataclass(frozen=True)
class AnalysisReport:
    non_combinatorial: NonCombinatorial
    left_binding: LeftBinding
    left_recursion: LeftRecursion
    profile: Profile


class Eligibility(enum.Enum):
    POLY = "poly"
    GENERAL_ONLY = "general"


def check_non_combinatorial(g: Grammar) -> NonCombinatorial:
    offenders, literals = [], []
    for idx, rule in enumerate(g.rules):
        for pos, item in enumerate(rule.rhs, 1):
            pred = item_predicate(item)
            if not isinstance(pred, NonterminalPred):
                continue
            for argno, term in enumerate(pred.args, 1):
                where = f"item {pos} {pred.head} argument {argno}"
                if len(term) == 1 and isinstance(term[0], Var):
                    continue
                if is_literal(term):
                    literals.append(Offender(idx, g.label(idx), f"{where} is a literal"))
                else:
                    offenders.append(Offender(idx, g.label(idx), f"{where} is a composite term"))
    return NonCombinatorial(not offenders, tuple(offenders), tuple(literals))


def check_left_binding(g: Grammar) -> LeftBinding:
    """Check both left-binding conditions rule by rule.

    Condition 1 covers quantifier-bound variables.  Everything about
    multi-variable vectors (including use of a vector variable before the
    vector has been split) is reported under condition 2.  The last variable
    of a vector counts as bound as soon as the slash item for the one before
    it has been passed.
    """
    cond1: list[Offender] = []
    cond2: list[Offender] = []
    for idx, rule in enumerate(g.rules):
        label = g.label(idx)
        bound = {p[0] for p in rule.patterns if len(p) == 1}
        vectors = [p for p in rule.patterns if len(p) > 1]
        prefix_of = {v: (n, k) for n, vec in enumerate(vectors) for k, v in enumerate(vec[:-1])}
        vector_of = {v: " ".join(vec) for vec in vectors for v in vec}
        progress = [0] * len(vectors)

        for vec in vectors:
            for v in vec[:-1]:
                hits = [item for item in rule.rhs if v in item_uses(item)]
                defining = [item for item in hits if isinstance(item, Slash)
                            and item.denominator == (Var(v),)]
                if len(hits) != 1 or len(defining) != 1:
                    cond2.append(Offender(idx, label, f"{v} must occur exactly once, as the "
                                                      f"denominator of a slash item"))

        for pos, item in enumerate(rule.rhs, 1):
            defines = None
            uses = item_uses(item)
            if isinstance(item, Slash) and len(item.denominator) == 1:
                den = item.denominator[0]
                if isinstance(den, Var) and den.name in prefix_of and den.name not in bound:
                    defines = den.name
                    uses = item_uses(item.numerator)
            for v in uses:
                if v in bound:
                    continue
                if v in vector_of:
                    cond2.append(Offender(idx, label, f"item {pos} uses {v} before the "
                                                      f"vector {vector_of[v]} is split"))
                else:
                    cond1.append(Offender(idx, label, f"item {pos} uses {v} before it is bound"))
            if defines is not None:
                n, k = prefix_of[defines]
                if progress[n] == k:
                    bound.add(defines)
                    progress[n] += 1
                    if progress[n] == len(vectors[n]) - 1:
                        bound.add(vectors[n][-1])
                else:
                    cond2.append(Offender(idx, label, f"item {pos} splits off {defines} out of "
                                                      f"order in vector {' '.join(vectors[n])}"))
            if isinstance(item, Quant):
                bound.add(item.var)
    return LeftBinding(not cond1 and not cond2, tuple(cond1), tuple(cond2))


def nullable_nonterminals(g: Grammar) -> frozenset[str]:
    """Nonterminals that may derive the empty word when arguments are ignored."""
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for rule in g.rules:
            if rule.head in nullable:
                continue
            if all(_item_nullable(item, nullable) for item in rule.rhs):
                nullable.add(rule.head)
                changed = True
    return frozenset(nullable)


def _item_nullable(item, nullable) -> bool:
    if isinstance(item, Slash):
        return True
    pred = item_predicate(item)
    return isinstance(pred, NonterminalPred) and pred.head in nullable


def call_edges(g: Grammar, nullable=None) -> dict[str, dict[str, set[str]]]:
    """Call graph with edges labelled ``left``, ``slash`` or ``consuming``.

    ``left``: the callee is reached at the caller's position (only nullable
    items before it).  ``slash``: a slash numerator, which is recognized
    against some other stretch of text.  ``consuming``: everything else.
    """
    if nullable is None:
        nullable = nullable_nonterminals(g)
    edges: dict[str, dict[str, set[str]]] = {}
    for rule in g.rules:
        out = edges.setdefault(rule.head, {})
        at_start = True
        for item in rule.rhs:
            pred = item_predicate(item)
            if isinstance(pred, NonterminalPred):
                kind = "slash" if isinstance(item, Slash) else "left" if at_start else "consuming"
                out.setdefault(pred.head, set()).add(kind)
            at_start = at_start and _item_nullable(item, nullable)
    return edges


def _find_path(adj: dict[str, set[str]], src: str, dst: str) -> list[str] | None:
    prev = {src: src}
    todo = [src]
    while todo:
        node = todo.pop(0)
        for nxt in sorted(adj.get(node, ())):
            if nxt not in prev:
                prev[nxt] = node
                if nxt == dst:
                    path = [dst]
                    while path[-1] != src:
                        path.append(prev[path[-1]])
                    return path[::-1]
                todo.append(nxt)
    return None


def check_left_recursion(g: Grammar) -> LeftRecursion:
    """Conservative left-recursion test.

    Flags a cycle of ``left`` edges, and any cycle through a ``slash`` edge:
    a slash restarts recognition elsewhere in the text, so a cycle through one
    can revisit the same memo key even if it consumes input on the way.
    """
    nullable = nullable_nonterminals(g)
    edges = call_edges(g, nullable)
    left = {a: {b for b, kinds in out.items() if "left" in kinds} for a, out in edges.items()}
    full = {a: set(out) for a, out in edges.items()}
    for a in sorted(left):
        if a in left[a]:
            return LeftRecursion(Verdict.POSSIBLY_RECURSIVE, (a, a), nullable)
        for b in sorted(left[a]):
            back = _find_path(left, b, a)
            if back:
                return LeftRecursion(Verdict.POSSIBLY_RECURSIVE, (a, *back), nullable)
    for a in sorted(edges):
        for b in sorted(edges[a]):
            if "slash" not in edges[a][b]:
                continue
            back = [a] if a == b else _find_path(full, b, a)
            if back:
                return LeftRecursion(Verdict.POSSIBLY_RECURSIVE, (a, *back), nullable)
    return LeftRecursion(Verdict.PROVABLY_FREE, (), nullable)


def complexity_profile(g: Grammar) -> Profile:
    m = max((len(r.rhs) for r in g.rules), default=0)
    p = max(g.mu.values(), default=0)
    return Profile(m, p)


def analyze(g: Grammar) -> AnalysisReport:
    return AnalysisReport(check_non_combinatorial(g), check_left_binding(g),
                          check_left_recursion(g), complexity_profile(g))


def engine_eligibility(report: AnalysisReport) -> tuple[Eligibility, list[str]]:
    reasons = []
    nc = report.non_combinatorial
    if not nc.ok:
        labels = sorted({o.label for o in nc.offenders})
        reasons.append(f"combinatorial {', '.join(lbl.split('#')[0] for lbl in labels)} rule "
                       f"({', '.join(labels)})")
    lb = report.left_binding
    if not lb.ok:
        conds = [str(i) for i, offs in ((1, lb.cond1), (2, lb.cond2)) if offs]
        reasons.append(f"not left-binding (condition {' and '.join(conds)})")
    lr = report.left_recursion
    if lr.verdict is not Verdict.PROVABLY_FREE:
        reasons.append(f"possible left recursion ({' -> '.join(lr.witness)})")
    return (Eligibility.GENERAL_ONLY if reasons else Eligibility.POLY), reasons


# ---------------------------------------------------------------------------
# report output

def _yes(flag: bool) -> str:
    return "yes" if flag else "NO"


def summary_line(report: AnalysisReport) -> str:
    nc, lb, lr, prof = (report.non_combinatorial, report.left_binding,
                        report.left_recursion, report.profile)
    parts = []
    nc_text = _yes(nc.ok)
    if not nc.ok:
        labels = sorted({o.label for o in nc.offenders})
        nc_text += f" (rule {', '.join(labels)})"
    parts.append(f"non-combinatorial: {nc_text}")
    lb_text = _yes(lb.ok)
    if not lb.ok:
        conds = [str(i) for i, offs in ((1, lb.cond1), (2, lb.cond2)) if offs]
        lb_text += f" (condition {', '.join(conds)})"
    parts.append(f"left-binding: {lb_text}")
    lr_text = lr.verdict.value
    if lr.witness:
        lr_text += f" ({' -> '.join(lr.witness)})"
    parts.append(f"left-recursion: {lr_text}")
    eligible, _ = engine_eligibility(report)
    parts.append(f"eligible: {eligible.value}")
    parts.append(f"m={prof.m} p={prof.p}")
    return "; ".join(parts)


def format_report(report: AnalysisReport) -> str:
    lines = [summary_line(report)]
    for o in report.non_combinatorial.offenders:
        lines.append(f"  combinatorial: {o}")
    for o in report.non_combinatorial.literal_args:
        lines.append(f"  literal argument: {o}")
    for o in report.left_binding.cond1:
        lines.append(f"  left-binding condition 1: {o}")
    for o in report.left_binding.cond2:
        lines.append(f"  left-binding condition 2: {o}")
    prof = report.profile
    lines.append(f"  time exponent {prof.time_exponent}, space exponent {prof.space_exponent}")
    _, reasons = engine_eligibility(report)
    for r in reasons:
        lines.append(f"  general only: {r}")
    return "\n".join(lines)


def report_record(report: AnalysisReport) -> dict[str, str]:
    nc, lb, lr, prof = (report.non_combinatorial, report.left_binding,
                        report.left_recursion, report.profile)
    eligible, _ = engine_eligibility(report)

    def labels(offs):
        return ",".join(sorted({o.label for o in offs})) or "-"

    return {
        "record": "analysis",
        "non_combinatorial": str(nc.ok).lower(),
        "combinatorial_rules": labels(nc.offenders),
        "literal_arg_rules": labels(nc.literal_args),
        "left_binding": str(lb.ok).lower(),
        "cond1_rules": labels(lb.cond1),
        "cond2_rules": labels(lb.cond2),
        "left_recursion": lr.verdict.value,
        "witness": ">".join(lr.witness) or "-",
        "eligible": eligible.value,
        "m": str(prof.m),
        "p": str(prof.p),
        "time_exponent": str(prof.time_exponent),
        "space_exponent": str(prof.space_exponent),
    }
