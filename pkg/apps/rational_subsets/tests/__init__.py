from pathlib import Path

from apps.rational_subsets.bs_automata import BsAutomaton
from apps.rational_subsets.group_core import GeneratorWord, GroupContext

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'

GENERATORS = ('a', 'a^-1', 't', 't^-1')


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def random_bs_automaton(rng, nstates: int, q: int = 2, max_out: int = 2) -> BsAutomaton:
    """Normalized automaton with 1..max_out single-generator edges per state, s0 initial, last state final."""
    states = tuple(f"s{index}" for index in range(nstates))
    edges = set()
    for src in states:
        for _ in range(rng.randint(1, max_out)):
            edges.add((src, GeneratorWord.from_text(rng.choice(GENERATORS)), rng.choice(states)))
    ordered = tuple(sorted(edges, key=lambda edge: (edge[0], edge[1].to_text(), edge[2])))
    return BsAutomaton(GroupContext(q), states, ordered, states[0], states[-1])
