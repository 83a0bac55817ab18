import pytest

from lmg.core import (Derivation, Grammar, NonterminalPred, Quant, Rule, Slash, Sym, SymbolTable,
                      TerminalPred, Var, anchor, instantiate, item_uses, quantifier_order_ok,
                      term_word, validate_grammar)
from lmg.syntax import parse_grammar


def messages(text):
    return [d.message for d in validate_grammar(parse_grammar(text))]


def test_fixture_grammars_validate(anbncn, dutch):
    assert validate_grammar(anbncn).ok
    assert validate_grammar(dutch).ok


def test_start_must_be_nullary():
    g = Grammar({"S": 1}, "S", (Rule("S", (("x",),), ()),))
    assert "start symbol must be nullary" in [d.message for d in validate_grammar(g)]


def test_arity_mismatch_is_reported():
    g = Grammar({"S": 0, "A": 1}, "S", (Rule("S", (), (NonterminalPred("A", ()),)),))
    assert messages_of(g) == ["arity mismatch for A: expected 1, got 0"]


def messages_of(g):
    return [d.message for d in validate_grammar(g)]


def test_undeclared_nonterminal():
    g = Grammar({"S": 0}, "S", (Rule("S", (), (NonterminalPred("B", ()),)),))
    assert messages_of(g) == ["nonterminal B has no arity"]


def test_repeated_lhs_variable():
    assert messages("S -> A(eps) ; A(x x) -> ;") == ["repeated variable x in left-hand side"]


def test_unbound_variable():
    assert messages('S -> A(y) ; A(x) -> ;') == ["unbound variable y"]


def test_quantifier_shadowing_and_rebinding():
    assert messages('S -> A(eps) ; A(x) -> x:"a" ;') == [
        "quantifier variable x shadows a left-hand side variable"]
    assert messages('S -> x:"a" x:"b" ;') == ["variable x is bound by more than one quantifier"]


def test_name_clash_between_kinds():
    g = Grammar({"S": 0}, "S", (Rule("S", (), (Quant("a", TerminalPred("a")),)),))
    assert messages_of(g) == ["'a' is used both as terminal and variable"]


def test_symbol_table_ids_round_trip(anbncn):
    table = SymbolTable.of(anbncn)
    assert table.nonterminals == ("A", "B", "S")
    assert table.terminals == ("a", "b", "c")
    for name in table.variables:
        assert table.name_of("variables", table.id_of("variables", name)) == name


def test_instantiate_substitutes_lhs_only(anbncn):
    rule = anbncn.rules[3]  # B(x y) -> "a"/x "b" B(y) "c"
    inst = instantiate(rule, {"x": ("a",), "y": ("a", "a")})
    assert inst.args == (("a", "a", "a"),)
    assert inst.rhs[0] == Slash(TerminalPred("a"), (Sym("a"),))
    assert inst.rhs[2] == NonterminalPred("B", ((Sym("a"), Sym("a")),))


def test_instantiate_keeps_quantifier_variables():
    g = parse_grammar('S -> A(eps) ; A(y) -> x:B() C(x, y) ; B -> "b" ; C(u, v) -> ;')
    inst = instantiate(g.rules[1], {"y": ("q",)})
    assert inst.rhs[1] == NonterminalPred("C", ((Var("x"),), (Sym("q"),)))


def test_instantiate_requires_all_lhs_variables(anbncn):
    with pytest.raises(ValueError, match="missing assignment for y"):
        instantiate(anbncn.rules[3], {"x": ("a",)})


def test_term_word_concatenates():
    term = (Var("x"), Sym("b"), Var("y"))
    assert term_word(term, {"x": ("a",), "y": ()}) == ("a", "b")


def test_item_uses_excludes_binder_but_includes_denominator():
    item = Quant("x", NonterminalPred("B", ((Var("y"),),)))
    assert item_uses(item) == ["y"]
    assert item_uses(Slash(NonterminalPred("C", ((Var("v"),),)), (Var("x"),))) == ["v", "x"]


def test_cyclic_quantifiers_are_detected():
    g = parse_grammar('S -> x:B(y) y:C(x) ; B(u) -> "b" ; C(u) -> "c" ;')
    assert not quantifier_order_ok(g.rules[0])
    assert quantifier_order_ok(parse_grammar('S -> x:B(eps) ; B(u) -> ;').rules[0])


def test_anchor_detaches_slash_material(anbncn):
    # B(a) -> "a"/x "b" B(eps) "c" with x=a, y=eps over "bc"
    leaf = Derivation(4, "B", ((),), (), (), (0,), ())
    slash_child = None
    d = Derivation(3, "B", (("a",),), (("x", ("a",)), ("y", ())),
                   (slash_child, None, leaf, None), (0, 0, 1, 1, 2), ("b", "c"))
    placed = anchor(anbncn, d, 5)
    assert placed.span == (5, 7)
    assert placed.children[2].span == (6, 6)
    assert d.size() == 2
