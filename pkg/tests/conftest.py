import itertools
from pathlib import Path

import pytest

from lmg.syntax import load_grammar

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.lmg"


def load(name: str):
    return load_grammar(fixture_path(name))


def all_fixture_paths() -> list[Path]:
    return sorted(FIXTURES.glob("*.lmg"))


def words(alphabet, maxlen: int):
    for n in range(maxlen + 1):
        yield from itertools.product(alphabet, repeat=n)


@pytest.fixture
def anbncn():
    return load("anbncn")


@pytest.fixture
def dutch():
    return load("dutch")


def random_cfg(rng, nonterminals=("S", "A", "B"), alphabet=("a", "b"),
               allow_left_recursion=False, tag=""):
    """A small random context-free grammar written as a nullary grammar."""
    from lmg.analysis import Verdict, check_left_recursion
    from lmg.core import Grammar, NonterminalPred, Rule, TerminalPred

    while True:
        rules = []
        for nt in nonterminals:
            for _ in range(rng.randint(1, 3)):
                body = []
                for _ in range(rng.randint(0, 3)):
                    if rng.random() < 0.55:
                        body.append(TerminalPred(rng.choice(alphabet)))
                    else:
                        body.append(NonterminalPred(rng.choice(nonterminals), ()))
                rules.append(Rule(nt, (), tuple(body)))
        g = Grammar({nt: 0 for nt in nonterminals}, nonterminals[0], tuple(rules))
        if allow_left_recursion or check_left_recursion(g).verdict is Verdict.PROVABLY_FREE:
            return g


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
