import random

import pytest

from lmg.core import NonterminalPred, Slash, TerminalPred, Var
from lmg.general import GeneralSession, Limits, Outcome, parse_general, recognize_general
from lmg.oracle import Answer, Oracle, replay
from lmg.syntax import parse_grammar
from lmg.transform import CFGrammar, cf_parse, intersect

from conftest import load, random_cfg, words

DUTCH_ACCEPT = [
    "marie zag fred anne kussen",
    "dat marie jan fred anne hoorde helpen overtuigen",
    "dat jan marie kuste",
    "jan kuste marie",
    "kuste jan marie",
]


@pytest.mark.parametrize("sentence", DUTCH_ACCEPT)
def test_dutch_sentences_accept(dutch, sentence):
    assert recognize_general(dutch, sentence.split()).outcome is Outcome.ACCEPT


def test_verb_before_subordinate_clause_is_rejected(dutch):
    res = recognize_general(dutch, "dat kuste jan marie".split())
    assert res.outcome is Outcome.REJECT
    assert set(res.stats) >= {"steps", "memo_hits"}


def test_example_parse_matches_fig1(anbncn):
    res = parse_general(anbncn, "aabbcc")
    assert res.outcome is Outcome.ACCEPT
    (d,) = res.derivations
    assert d.bindings() == {"x": tuple("aa")}
    assert [n.head for n in d.children[0].nodes()] == ["A", "A", "A"]
    b_steps = [n for n in d.children[1].nodes() if n.head == "B" and n.children]
    assert [n.args for n in b_steps] == [(tuple("aa"),), (tuple("a"),)]
    assert d == Oracle(anbncn).derivations("S", (), tuple("aabbcc"))[0]


def test_single_b_step_for_abc(anbncn):
    (d,) = parse_general(anbncn, "abc").derivations
    assert sum(1 for n in d.nodes() if n.head == "B" and n.children) == 1


def test_reject_gives_no_derivations(anbncn):
    res = parse_general(anbncn, "abcabc")
    assert res.outcome is Outcome.REJECT and res.derivations == []


@pytest.mark.parametrize("sentence", DUTCH_ACCEPT)
def test_dutch_derivations_replay(dutch, sentence):
    tokens = tuple(sentence.split())
    trees = parse_general(dutch, tokens).derivations
    assert trees and len(set(trees)) == len(trees)
    for d in trees:
        assert replay(dutch, d, tokens)
        assert d.word == tokens


def test_slash_items_never_advance(dutch):
    rules = dutch.rules
    for d in parse_general(dutch, "marie zag fred anne kussen".split()).derivations:
        for node in d.nodes():
            for k, item in enumerate(rules[node.rule].rhs):
                if isinstance(item, Slash):
                    assert node.cuts[k] == node.cuts[k + 1]
                    if node.children[k] is not None:
                        assert node.children[k].span is None


def test_fig5_v_prime_chain_fills_traces(dutch):
    """zag is moved out of the verb cluster; V' fills its trace and the NP traces."""
    tokens = "marie zag fred anne kussen".split()
    trees = parse_general(dutch, tokens).derivations
    chains = []
    for d in trees:
        vps = [n for n in d.nodes() if n.head == "V'"]
        chains.append([(dutch.label(n.rule), n.args) for n in vps])
    expected = [("V'#6", (("zag",), ("fred", "anne"))), ("V'#3", ((), ("anne",)))]
    assert expected in chains


def test_memoization_does_not_change_verdicts(anbncn, dutch):
    for w in words("abc", 6):
        assert (recognize_general(anbncn, w).outcome ==
                recognize_general(anbncn, w, memoize=False).outcome)
    for s in DUTCH_ACCEPT + ["dat kuste jan marie", "marie zag fred kussen anne"]:
        assert (recognize_general(dutch, s.split()).outcome ==
                recognize_general(dutch, s.split(), memoize=False).outcome)


def test_step_and_depth_limits(anbncn):
    res = recognize_general(anbncn, "aaabbbccc", Limits(max_steps=5))
    assert res.outcome is Outcome.LIMIT_EXCEEDED and res.limit == "max_steps"
    res = recognize_general(anbncn, "aaabbbccc", Limits(max_depth=2))
    assert res.outcome is Outcome.LIMIT_EXCEEDED and res.limit == "max_depth"
    with pytest.raises(ValueError):
        Limits(max_trees=0)


def test_tree_limit_caps_ambiguity():
    g = parse_grammar('S -> A B ; A -> "a" ; A -> ; B -> "a" ; B -> ;')
    assert len(parse_general(g, "a").derivations) == 2
    assert len(parse_general(g, "a", Limits(max_trees=1)).derivations) == 1


def test_left_recursion_is_reported_not_looped():
    res = recognize_general(load("left_recursive"), "a")
    assert res.outcome is Outcome.LIMIT_EXCEEDED
    assert res.limit == "left-recursion"
    assert "A(eps)" in res.detail
    res = recognize_general(parse_grammar('S -> S "a" ; S -> "b" ;'), "ba", memoize=False)
    assert res.limit == "left-recursion"


def test_quantifier_used_before_binding_is_guessed():
    g = load("not_left_binding_a")
    accepted = {w for w in words("ab", 4) if recognize_general(g, w).outcome is Outcome.ACCEPT}
    assert accepted == {("b", "a")}


def test_resolve_slash_splits_pending_vector(anbncn):
    session = GeneralSession(anbncn, "abc")
    item = Slash(TerminalPred("a"), (Var("x"),))
    pending = {"x": (("x", "y"), 0, tuple("aab"))}
    (cont,) = session.resolve_slash(item, {}, pending)
    binding, rest, trees = cont
    assert binding == {"x": ("a",), "y": ("a", "b")}
    assert rest == {} and trees == [None]
    assert session.resolve_slash(Slash(TerminalPred("a"), (Var("z"),)), {}, pending) == []


def test_resolve_slash_checks_bound_denominator(dutch):
    session = GeneralSession(dutch, "marie zag".split())
    item = Slash(NonterminalPred("VR", ()), (Var("v"),))
    assert len(session.resolve_slash(item, {"v": ("zag",)}, {})) == 1
    assert session.resolve_slash(item, {"v": ("kuste",)}, {}) == []


def test_intersection_glue_slash_checks_second_grammar():
    g = intersect(load("cfg_anbn_cstar"), load("cfg_astar_bncn"))
    session = GeneralSession(g, "abc")
    glue = g.rules[0].rhs[1]
    assert len(session.resolve_slash(glue, {"x": tuple("abc")}, {})) == 1
    assert session.resolve_slash(glue, {"x": tuple("abcc")}, {}) == []


ORACLE_CASES = [
    ("anbncn", "abc", 7),
    ("left_binding", "bcd", 5),
    ("not_left_binding_a", "ab", 5),
    ("cfg_anbn_cstar", "abc", 6),
    ("cfg_astar_bncn", "abc", 6),
    ("dyck", "ab", 8),
    ("dutch", ("dat", "jan", "marie", "fred", "kuste", "zag", "kussen", "sliep"), 3),
    ("dutch", ("dat", "jan", "marie", "kuste", "zag", "kussen"), 5),
    ("dutch_vfin", ("jan", "marie", "kuste", "kussen", "zag"), 5),
]


@pytest.mark.parametrize("name, alphabet, maxlen", ORACLE_CASES)
def test_agrees_with_oracle(name, alphabet, maxlen):
    g = load(name)
    oracle = Oracle(g)
    for w in words(alphabet, maxlen):
        res = recognize_general(g, w)
        ans = oracle.derives(g.start, (), w)
        if res.outcome is Outcome.LIMIT_EXCEEDED or ans is Answer.BUDGET_EXHAUSTED:
            continue
        assert (res.outcome is Outcome.ACCEPT) == (ans is Answer.YES), w


def test_agrees_with_context_free_recognizer_on_random_grammars():
    rng = random.Random(20240611)
    for _ in range(12):
        g = random_cfg(rng)
        cfg = CFGrammar.from_lmg(g)
        for w in words("ab", 8):
            assert (recognize_general(g, w).outcome is Outcome.ACCEPT) == cf_parse(cfg, w)
