"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import random
import time

from lmg.analysis import (Verdict, analyze, check_left_binding, check_left_recursion,
                          check_non_combinatorial)
from lmg.core import NonterminalPred, TerminalPred
from lmg.general import Outcome, parse_general, recognize_general
from lmg.oracle import Answer, Oracle, language_upto, replay
from lmg.poly import PolySession, parse_poly, recognize_poly
from lmg.syntax import parse_grammar, print_grammar
from lmg.transform import (CFGrammar, backbone_grammar, backbone_tree, cf_memo_recognize, cf_parse,
                           intersect, is_parse_tree)

from conftest import all_fixture_paths, load, random_cfg, record_criterion, words

DUTCH_POSITIVE = [
    "dat jan marie kuste",
    "jan kuste marie",
    "kuste jan marie",
    "dat marie jan fred anne hoorde helpen overtuigen",
    "marie zag fred anne kussen",
]

# scrambled orders; each one is checked against the oracle below
DUTCH_NEGATIVE = [
    "dat kuste jan marie",
    "marie fred zag anne kussen",
    "marie zag fred kussen anne",
    "dat marie jan fred anne overtuigen helpen hoorde",
    "dat marie jan fred hoorde anne helpen overtuigen",
    "jan marie kuste",
    "dat jan kuste marie",
    "kuste dat jan marie",
    "marie zag fred anne",
    "dat jan marie zag kussen",
]


def is_anbncn(w):
    n = len(w) // 3
    return w == ("a",) * n + ("b",) * n + ("c",) * n


def test_criterion_1_example_language():
    g = load("anbncn")
    start = time.perf_counter()
    candidates = list(words("abc", 9))
    expected = {w for w in candidates if is_anbncn(w)}
    oracle_lang, exhausted = language_upto(g, "abc", 9)
    general_lang = {w for w in candidates if recognize_general(g, w).outcome is Outcome.ACCEPT}
    poly_lang = {w for w in candidates if recognize_poly(g, w).accepted}
    elapsed = time.perf_counter() - start
    ok = (not exhausted and oracle_lang == general_lang == poly_lang == expected and elapsed < 60)
    record_criterion(1, "a^n b^n c^n up to length 9 on three engines", ok,
                     f"{len(candidates)} words, {len(expected)} accepted, {elapsed:.1f}s")
    assert ok


def test_criterion_2_dutch():
    g = load("dutch")
    start = time.perf_counter()
    oracle = Oracle(g)
    positive = [recognize_general(g, s.split()).outcome is Outcome.ACCEPT for s in DUTCH_POSITIVE]
    confirmed = [oracle.derives("S", (), tuple(s.split())) is Answer.NO for s in DUTCH_NEGATIVE]
    negative = [recognize_general(g, s.split()).outcome is Outcome.REJECT for s in DUTCH_NEGATIVE]
    elapsed = time.perf_counter() - start
    ok = all(positive) and all(confirmed) and all(negative) and elapsed < 10
    record_criterion(2, "Dutch sentences accepted, scrambled ones rejected", ok,
                     f"{sum(positive)}/5 accepted, {sum(negative)}/10 rejected "
                     f"({sum(confirmed)}/10 oracle-confirmed), {elapsed:.2f}s")
    assert ok


def test_criterion_3_classification():
    anbncn, dutch = load("anbncn"), load("dutch")
    checks = {
        "anbncn non-combinatorial": check_non_combinatorial(anbncn).ok,
        "dutch offender VP#1": [o.label for o in check_non_combinatorial(dutch).offenders] == ["VP#1"],
        "both left-binding": check_left_binding(anbncn).ok and check_left_binding(dutch).ok,
        "left-binding example rule": check_left_binding(load("left_binding")).ok,
    }
    for name, cond in (("a", 1), ("b", 2), ("c", 2)):
        lb = check_left_binding(load(f"not_left_binding_{name}"))
        failed = {c for c, offs in ((1, lb.cond1), (2, lb.cond2)) if offs}
        checks[f"counterexample ({name}) fails condition {cond}"] = failed == {cond}
    checks["hidden left recursion flagged"] = (
        check_left_recursion(load("left_recursive")).verdict is Verdict.POSSIBLY_RECURSIVE)
    ok = all(checks.values())
    failing = [k for k, v in checks.items() if not v]
    record_criterion(3, "classification of the example grammars", ok,
                     f"{sum(checks.values())}/{len(checks)} checks" +
                     (f"; failing: {', '.join(failing)}" if failing else ""))
    assert ok


def test_criterion_4_backbone():
    g = load("anbncn")
    cf = backbone_grammar(g)
    nt = lambda name: NonterminalPred(name, ())  # noqa: E731
    fig4 = {("S", (nt("XP"), nt("B"))), ("B", (TerminalPred("a"), TerminalPred("b"), nt("B"),
                                               TerminalPred("c"))),
            ("B", ()), ("XP", ())}
    placeholders = [h for h, body in cf.rules if h not in g.mu]
    renamed = set()
    if len(placeholders) == 1:
        p = placeholders[0]
        for head, body in cf.rules:
            renamed.add(("XP" if head == p else head,
                         tuple(nt("XP") if isinstance(s, NonterminalPred) and s.head == p else s
                               for s in body)))
    iso = renamed == fig4 and len(cf.rules) == 4
    yields = {}
    for n in (1, 2, 3):
        word = "a" * n + "b" * n + "c" * n
        d = parse_general(g, word).derivations[0]
        tree = backbone_tree(g, d)
        yields[n] = "".join(tree.leaves()) == "ab" * n + "c" * n and is_parse_tree(cf, tree, "S")
    fig1 = "".join(backbone_tree(g, parse_general(g, "aabbcc").derivations[0]).leaves())
    ok = iso and all(yields.values()) and fig1 == "ababcc"
    record_criterion(4, "backbone grammar and trees", ok,
                     f"isomorphic={iso}, aabbcc -> {fig1}, (ab)^n c^n for n=1..3: "
                     f"{all(yields.values())}")
    assert ok


def _language(g, maxlen=8):
    cfg = CFGrammar.from_lmg(g)
    return {w for w in words("ab", maxlen) if cf_parse(cfg, w)}


def _rich_cfg(rng):
    """A random grammar with at least four words of length 8 or less."""
    while True:
        g = random_cfg(rng)
        if len(_language(g)) >= 4:
            return g


def _intersection_matches(g1, g2, alphabet, maxlen):
    g = intersect(g1, g2)
    c1, c2 = CFGrammar.from_lmg(g1), CFGrammar.from_lmg(g2)
    for w in words(alphabet, maxlen):
        if recognize_poly(g, w).accepted != (cf_parse(c1, w) and cf_parse(c2, w)):
            return False
    return True


def test_criterion_5_intersection():
    rng = random.Random(1995)
    pairs = [(_rich_cfg(rng), _rich_cfg(rng)) for _ in range(20)]
    results = [_intersection_matches(g1, g2, "ab", 8) for g1, g2 in pairs]
    nonempty = sum(1 for g1, g2 in pairs if _language(g1) & _language(g2))
    named = _intersection_matches(load("cfg_anbn_cstar"), load("cfg_astar_bncn"), "abc", 8)
    ok = all(results) and named
    record_criterion(5, "intersection equals set intersection up to length 8", ok,
                     f"{sum(results)}/20 random pairs ({nonempty} with non-empty intersection), "
                     f"a^n b^n c* with a* b^n c^n: {named}")
    assert ok


def test_criterion_6_complexity():
    g = load("anbncn")
    report = analyze(g)
    exponent = report.profile.time_exponent
    rules = len(g.rules)
    start = time.perf_counter()
    entries, times, agree = {}, {}, True
    for n in (8, 16, 32, 64):
        word = "a" * n + "b" * n + "c" * n
        best = None
        for _ in range(3):
            t0 = time.perf_counter()
            res = recognize_poly(g, word)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        entries[n], times[n] = res.stats["memo_entries"], best
        agree &= res.accepted == (recognize_general(g, word).outcome is Outcome.ACCEPT)
    c = entries[8] / (8 ** 3 * rules)
    space_ok = all(entries[n] <= c * n ** 3 * rules for n in entries)
    bound = 2 ** exponent * 1.25
    ratio = times[64] / times[32]
    elapsed = time.perf_counter() - start
    ok = space_ok and ratio <= bound and agree and elapsed < 120
    record_criterion(6, "growth laws on a^n b^n c^n, n = 8..64", ok,
                     f"memo {entries}, time(64)/time(32) = {ratio:.2f} <= {bound:.0f}, "
                     f"engines agree={agree}, {elapsed:.2f}s")
    assert ok


def test_criterion_7_nullary_degeneration():
    g = load("dyck")
    cfg = CFGrammar.from_lmg(g)
    inputs = ["", "ab", "aabbab", "aabb", "abba"]
    pairs = []
    for s in inputs:
        session = PolySession(g, s)
        session.call(g.start, None, 0, ())
        pairs.append((len(session.memo), cf_memo_recognize(cfg, s)[1]))
    ok = all(a == b for a, b in pairs)
    record_criterion(7, "nullary grammar memo matches context-free recursive descent", ok,
                     f"(lmg, cf) entries per input: {pairs}")
    assert ok


def test_criterion_8_round_trip_and_replay():
    paths = all_fixture_paths()
    round_trips = [parse_grammar(print_grammar(parse_grammar(p.read_text(encoding="utf-8"))))
                   == parse_grammar(p.read_text(encoding="utf-8")) for p in paths]
    emitted = []
    anbncn = load("anbncn")
    for w in words("abc", 6):
        emitted += [(anbncn, w, d) for d in parse_general(anbncn, w).derivations]
        d = parse_poly(anbncn, w).derivation
        if d is not None:
            emitted.append((anbncn, w, d))
    for name in ("dutch", "dutch_vfin"):
        g = load(name)
        for s in DUTCH_POSITIVE:
            emitted += [(g, tuple(s.split()), d) for d in parse_general(g, s.split()).derivations]
    for name, alphabet, maxlen in (("left_binding", "bcd", 5), ("dyck", "ab", 6),
                                   ("not_left_binding_a", "ab", 3)):
        g = load(name)
        for w in words(alphabet, maxlen):
            emitted += [(g, w, d) for d in parse_general(g, w).derivations]
    both = intersect(load("cfg_anbn_cstar"), load("cfg_astar_bncn"))
    for w in [(), tuple("abc"), tuple("aabbcc")]:
        emitted.append((both, w, parse_poly(both, w).derivation))
    replayed = [d is not None and replay(g, d, w) and d.word == w for g, w, d in emitted]
    ok = all(round_trips) and all(replayed)
    record_criterion(8, "round trip of fixtures and replay of derivations", ok,
                     f"{sum(round_trips)}/{len(round_trips)} fixtures, "
                     f"{sum(replayed)}/{len(replayed)} derivations")
    assert ok
