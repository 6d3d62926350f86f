"""
Reduction from DFA intersection nonemptiness to identity membership.

Given DFAs D_0..D_{n-1} over a common alphabet, reduce() builds a BS
automaton that accepts the identity iff some word is accepted by all of
them. The tape of the automaton (the base-q digits of r) is split into n
tracks, cell x belonging to track x mod n:

- writing phase: for each i, move to any cell of track i and write
  1 f(w_i) 1 on that track, where w_i is accepted by D_i and f encodes a
  symbol as its index in binary
- final phase: move to any cell of track 0, subtract 1..1 (one digit per
  track), then any number of blocks g..g, then 1..1 again
- move anywhere and stop

DFA file format:

    dfa alphabet=x,y
    state s0 initial
    state s1 final
    edge s0 s1 x

Design Decision: track residues in the travel states
- Travel states go{i}_r{j} carry the cell residue j so that writing track i
  starts only from a cell of that track
"""

import logging
from dataclasses import dataclass
from functools import reduce as fold
from typing import Dict, List, Optional, Sequence, Tuple

from .automata_kit import Dfa, intersect, shortest_word
from .bs_automata import BsAutomaton, Edge
from .exceptions import AutomatonFormatError, InvalidArgumentError
from .group_core import GeneratorWord, GroupContext

logger = logging.getLogger(__name__)


# =============================================================================
# Instances
# =============================================================================

@dataclass(frozen=True)
class DfaInstance:
    alphabet: Tuple[str, ...]
    dfas: Tuple[Dfa, ...]

    def __post_init__(self):
        if len(self.alphabet) < 2:
            raise InvalidArgumentError("The alphabet needs at least two symbols")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidArgumentError("Duplicate alphabet symbols")
        if not self.dfas:
            raise InvalidArgumentError("An instance needs at least one DFA")
        for dfa in self.dfas:
            if dfa.alphabet != frozenset(self.alphabet):
                raise InvalidArgumentError("DFAs must share the alphabet")

    @classmethod
    def from_texts(cls, texts: Sequence[str]) -> 'DfaInstance':
        parsed = [parse_dfa(text) for text in texts]
        if not parsed:
            raise InvalidArgumentError("An instance needs at least one DFA")
        alphabet = parsed[0][0]
        return cls(alphabet, tuple(dfa for _, dfa in parsed))

    def common_word(self) -> Optional[Tuple[str, ...]]:
        """Shortest word accepted by every DFA, from the product automaton."""
        return shortest_word(fold(intersect, self.dfas))


def parse_dfa(text: str) -> Tuple[Tuple[str, ...], Dfa]:
    """Returns the declared symbol order and the (total) DFA."""
    alphabet: Optional[Tuple[str, ...]] = None
    states: List[str] = []
    initial = None
    finals = set()
    delta: Dict[str, Dict[str, str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if alphabet is None:
            if len(parts) != 2 or parts[0] != 'dfa' or not parts[1].startswith('alphabet='):
                raise AutomatonFormatError("First line must be 'dfa alphabet=<syms>'", line=number)
            alphabet = tuple(symbol for symbol in parts[1][len('alphabet='):].split(',') if symbol)
            continue
        if parts[0] == 'state':
            if len(parts) < 2 or parts[1] in delta:
                raise AutomatonFormatError("State line needs a new name", line=number)
            name = parts[1]
            for flag in parts[2:]:
                if flag == 'initial':
                    if initial is not None:
                        raise AutomatonFormatError("A DFA has exactly one initial state", line=number)
                    initial = name
                elif flag == 'final':
                    finals.add(name)
                else:
                    raise AutomatonFormatError(f"Unknown state flag {flag}", line=number)
            states.append(name)
            delta[name] = {}
        elif parts[0] == 'edge':
            if len(parts) != 4:
                raise AutomatonFormatError("Edge line must be 'edge <src> <dst> <symbol>'", line=number)
            src, dst, symbol = parts[1:]
            if src not in delta or dst not in delta:
                raise AutomatonFormatError(f"Unknown state in edge {src} -> {dst}", line=number)
            if symbol not in alphabet:
                raise AutomatonFormatError(f"Symbol {symbol!r} not in the alphabet", line=number)
            if symbol in delta[src]:
                raise AutomatonFormatError(f"Second {symbol!r}-edge from {src}", line=number)
            delta[src][symbol] = dst
        else:
            raise AutomatonFormatError(f"Unknown keyword {parts[0]}", line=number)
    if alphabet is None:
        raise AutomatonFormatError("Empty DFA file")
    if initial is None:
        raise AutomatonFormatError("DFA needs an initial state")
    for state in states:
        missing = [symbol for symbol in alphabet if symbol not in delta[state]]
        if missing:
            raise AutomatonFormatError(f"DFA is not total: {state} has no edge for {missing[0]!r}")
    return alphabet, Dfa(frozenset(states), frozenset(alphabet), delta, initial, frozenset(finals))


# =============================================================================
# Reduction
# =============================================================================

def symbol_code(alphabet: Sequence[str], symbol: str) -> Tuple[int, ...]:
    """Index of symbol in binary, width ceil(log2 |alphabet|)."""
    width = max(1, (len(alphabet) - 1).bit_length())
    index = alphabet.index(symbol)
    return tuple((index >> shift) & 1 for shift in reversed(range(width)))


def _write(digit: int, n: int) -> Tuple[str, ...]:
    return ('a',) * digit + ('t',) * n


def _remove(digit: int, n: int) -> Tuple[str, ...]:
    return (('a^-1',) * digit + ('t',)) * n


def _travel(n: int, name) -> List[Edge]:
    right, left = GeneratorWord(('t',)), GeneratorWord(('t^-1',))
    edges = []
    for residue in range(n):
        edges.append((name(residue), right, name((residue + 1) % n)))
        edges.append((name(residue), left, name((residue - 1) % n)))
    return edges


def travel_state(track: int, residue: int) -> str:
    return f"go{track}_r{residue}"


def seek_state(residue: int) -> str:
    return f"seek_r{residue}"


def write_state(track: int, state) -> str:
    return f"w{track}_{state}"


REMOVE_STATE = 'rm'
DONE_STATE = 'done'


def reduce(inst: DfaInstance, ctx: GroupContext) -> BsAutomaton:
    """BS automaton accepting the identity iff the DFAs of inst share a word."""
    n = len(inst.dfas)
    q = ctx.q
    states: List[str] = []
    edges: List[Edge] = []

    for track in range(n):
        states.extend(travel_state(track, residue) for residue in range(n))
        edges.extend(_travel(n, lambda residue, track=track: travel_state(track, residue)))
    states.extend(seek_state(residue) for residue in range(n))
    edges.extend(_travel(n, seek_state))

    for track, dfa in enumerate(inst.dfas):
        after = travel_state(track + 1, track) if track + 1 < n else seek_state(track)
        dfa_states = sorted(dfa.states, key=str)
        states.extend(write_state(track, state) for state in dfa_states)
        edges.append((travel_state(track, track), GeneratorWord(_write(1, n)), write_state(track, dfa.initial)))
        for state in dfa_states:
            for symbol in inst.alphabet:
                label = sum((_write(digit, n) for digit in symbol_code(inst.alphabet, symbol)), ())
                edges.append((write_state(track, state), GeneratorWord(label), write_state(track, dfa.delta[state][symbol])))
            if state in dfa.finals:
                edges.append((write_state(track, state), GeneratorWord(_write(1, n)), after))

    states.extend([REMOVE_STATE, DONE_STATE])
    edges.append((seek_state(0), GeneratorWord(_remove(1, n)), REMOVE_STATE))
    for digit in range(q):
        edges.append((REMOVE_STATE, GeneratorWord(_remove(digit, n)), REMOVE_STATE))
    edges.append((REMOVE_STATE, GeneratorWord(_remove(1, n)), DONE_STATE))
    edges.append((DONE_STATE, GeneratorWord(('t',)), DONE_STATE))
    edges.append((DONE_STATE, GeneratorWord(('t^-1',)), DONE_STATE))

    logger.info(f"Reduced {n} DFAs over {len(inst.alphabet)} symbols to {len(states)} states, {len(edges)} edges")
    return BsAutomaton(ctx, tuple(states), tuple(edges), travel_state(0, 0), DONE_STATE)


# =============================================================================
# Witnesses
# =============================================================================

@dataclass(frozen=True)
class HardnessWitness:
    word: Tuple[str, ...]
    run: Tuple[Edge, ...]
    subtrahend: int


def _edge(a: BsAutomaton, src: str, label: Sequence[str], dst: str) -> Edge:
    edge = (src, GeneratorWord(tuple(label)), dst)
    if edge not in a.out_edges[src]:
        raise InvalidArgumentError(f"No edge {src} -{edge[1]}-> {dst} in the reduction")
    return edge


def witness_run(a: BsAutomaton, inst: DfaInstance, word: Sequence[str]) -> HardnessWitness:
    """
    The identity run of reduce(inst) for a word accepted by every DFA.

    Track i is written starting at cell i, the final phase starts at cell 0
    and the run ends by walking back to cell 0.
    """
    n = len(inst.dfas)
    word = tuple(word)
    for dfa in inst.dfas:
        if not dfa.accepts(word):
            raise InvalidArgumentError(f"Word {' '.join(word)!r} is not accepted by every DFA")
    digits = (1,) + sum((symbol_code(inst.alphabet, symbol) for symbol in word), ()) + (1,)
    run: List[Edge] = []
    for track, dfa in enumerate(inst.dfas):
        if track > 0:
            # from cell (track - 1) + n * len(digits) back to cell track
            position = track - 1 + n * len(digits)
            while position > track:
                run.append(_edge(a, travel_state(track, position % n), ('t^-1',), travel_state(track, (position - 1) % n)))
                position -= 1
        run.append(_edge(a, travel_state(track, track), _write(1, n), write_state(track, dfa.initial)))
        state = dfa.initial
        for symbol in word:
            label = sum((_write(digit, n) for digit in symbol_code(inst.alphabet, symbol)), ())
            nxt = dfa.delta[state][symbol]
            run.append(_edge(a, write_state(track, state), label, write_state(track, nxt)))
            state = nxt
        after = travel_state(track + 1, track) if track + 1 < n else seek_state(track)
        run.append(_edge(a, write_state(track, state), _write(1, n), after))

    position = n - 1 + n * len(digits)
    while position > 0:
        run.append(_edge(a, seek_state(position % n), ('t^-1',), seek_state((position - 1) % n)))
        position -= 1
    run.append(_edge(a, seek_state(0), _remove(1, n), REMOVE_STATE))
    for digit in digits[1:-1]:
        run.append(_edge(a, REMOVE_STATE, _remove(digit, n), REMOVE_STATE))
    run.append(_edge(a, REMOVE_STATE, _remove(1, n), DONE_STATE))
    for _ in range(n * len(digits)):
        run.append(_edge(a, DONE_STATE, ('t^-1',), DONE_STATE))
    return HardnessWitness(word, tuple(run), final_phase_subtrahend(a, run))


def final_phase_subtrahend(a: BsAutomaton, run: Sequence[Edge]) -> int:
    """The integer subtracted by the removal edges of a run, relative to their first cell."""
    ctx = a.ctx
    element = ctx.identity()
    start = None
    removed = ctx.identity()
    for src, label, dst in run:
        step = ctx.eval_word(label)
        if dst in (REMOVE_STATE, DONE_STATE) and src != DONE_STATE:
            if start is None:
                start = element.cursor
            removed = ctx.multiply(removed, step)
        element = ctx.multiply(element, step)
    if start is None:
        raise InvalidArgumentError("Run has no final phase")
    value = -removed.value(ctx.q)
    if value.denominator != 1:
        raise InvalidArgumentError("Removal edges subtract a non-integer")
    return int(value)


def matches_block_pattern(value: int, n: int, q: int) -> bool:
    """Base-q digits form blocks of n equal digits, the outer blocks all 1."""
    digits = []
    while value > 0:
        value, digit = divmod(value, q)
        digits.append(digit)
    if not digits or len(digits) % n:
        return False
    blocks = [digits[i:i + n] for i in range(0, len(digits), n)]
    if any(len(set(block)) != 1 for block in blocks):
        return False
    return blocks[0][0] == 1 and blocks[-1][0] == 1
