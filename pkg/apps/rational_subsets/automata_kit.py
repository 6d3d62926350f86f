"""
Finite automata and letter-aligned transducers over arbitrary hashable alphabets.

Design Decision: Immutable automata, canonical minimal DFAs
- Nfa keeps transitions as (state, symbol or EPSILON, state) triples
- Dfa is total; determinize_minimize renumbers states 0..n-1 breadth-first
  in a fixed symbol order, so minimal DFAs of equal languages compare equal
- Complement is always taken against an explicit universe

Lazily explored automata (build_nfa / build_dfa) are bounded by
settings.BS_STATE_LIMIT and raise StateLimitExceeded beyond it.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Tuple

import networkx as nx
from django.conf import settings

from .exceptions import (
    AlphabetMismatchError,
    AutomatonFormatError,
    InvalidArgumentError,
    StateLimitExceeded,
)

logger = logging.getLogger(__name__)

EPSILON = None
BLANK = '□'

Word = Tuple[Hashable, ...]


def symbol_key(symbol: Any):
    """Total order on mixed symbols: integers, then strings, then the rest by repr."""
    if isinstance(symbol, int):
        return (0, symbol, '')
    if isinstance(symbol, str):
        return (1, 0, symbol)
    return (2, 0, repr(symbol))


def sorted_symbols(symbols: Iterable[Hashable]) -> List[Hashable]:
    return sorted(symbols, key=symbol_key)


def word_key(word: Word):
    """Length-lexicographic order."""
    return (len(word), tuple(symbol_key(symbol) for symbol in word))


def _state_limit(limit: Optional[int]) -> int:
    return limit if limit is not None else settings.BS_STATE_LIMIT


# =============================================================================
# Nondeterministic automata
# =============================================================================

@dataclass(frozen=True)
class Nfa:
    states: FrozenSet[Hashable]
    alphabet: FrozenSet[Hashable]
    transitions: FrozenSet[Tuple[Hashable, Optional[Hashable], Hashable]]
    initials: FrozenSet[Hashable]
    finals: FrozenSet[Hashable]

    def __post_init__(self):
        for src, symbol, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise InvalidArgumentError(f"Transition {src!r} -> {dst!r} uses an undeclared state")
            if symbol is not EPSILON and symbol not in self.alphabet:
                raise AlphabetMismatchError(f"Transition symbol {symbol!r} not in alphabet")
        if not self.initials <= self.states or not self.finals <= self.states:
            raise InvalidArgumentError("Initial and final states must be declared states")

    @classmethod
    def build(cls, states, alphabet, transitions, initials, finals) -> 'Nfa':
        return cls(
            frozenset(states),
            frozenset(alphabet),
            frozenset(transitions),
            frozenset(initials),
            frozenset(finals),
        )

    @cached_property
    def moves(self) -> Dict[Hashable, Dict[Optional[Hashable], FrozenSet[Hashable]]]:
        table: Dict[Hashable, Dict[Optional[Hashable], set]] = {state: {} for state in self.states}
        for src, symbol, dst in self.transitions:
            table[src].setdefault(symbol, set()).add(dst)
        return {
            state: {symbol: frozenset(dsts) for symbol, dsts in row.items()}
            for state, row in table.items()
        }

    @cached_property
    def has_epsilon(self) -> bool:
        return any(symbol is EPSILON for _, symbol, _ in self.transitions)

    def closure(self, states: Iterable[Hashable]) -> FrozenSet[Hashable]:
        """Epsilon closure."""
        result = set(states)
        if not self.has_epsilon:
            return frozenset(result)
        stack = list(result)
        while stack:
            state = stack.pop()
            for nxt in self.moves[state].get(EPSILON, ()):
                if nxt not in result:
                    result.add(nxt)
                    stack.append(nxt)
        return frozenset(result)

    def step(self, states: Iterable[Hashable], symbol: Hashable) -> FrozenSet[Hashable]:
        targets = set()
        for state in states:
            targets.update(self.moves[state].get(symbol, ()))
        return self.closure(targets)

    def accepts(self, word: Iterable[Hashable]) -> bool:
        current = self.closure(self.initials)
        for symbol in word:
            current = self.step(current, symbol)
            if not current:
                return False
        return bool(current & self.finals)

    def trim(self) -> 'Nfa':
        """Keep only states on some path from an initial to a final state."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.states)
        graph.add_edges_from((src, dst) for src, _, dst in self.transitions)
        reachable = set(self.initials)
        for state in self.initials:
            reachable |= nx.descendants(graph, state)
        productive = set(self.finals)
        for state in self.finals:
            productive |= nx.ancestors(graph, state)
        useful = reachable & productive
        return Nfa.build(
            useful,
            self.alphabet,
            [(src, symbol, dst) for src, symbol, dst in self.transitions if src in useful and dst in useful],
            self.initials & useful,
            self.finals & useful,
        )

    def to_text(self) -> str:
        names = {state: index for index, state in enumerate(sorted(self.states, key=symbol_key))}
        lines = [
            'nfa',
            'alphabet: ' + ' '.join(str(symbol) for symbol in sorted_symbols(self.alphabet)),
            'states: ' + ' '.join(str(index) for index in sorted(names.values())),
            'initial: ' + ' '.join(str(names[state]) for state in sorted(self.initials, key=names.get)),
            'final: ' + ' '.join(str(names[state]) for state in sorted(self.finals, key=names.get)),
        ]
        rows = sorted(
            (names[src], 'eps' if symbol is EPSILON else str(symbol), names[dst])
            for src, symbol, dst in self.transitions
        )
        lines.extend(f"{src} {symbol} {dst}" for src, symbol, dst in rows)
        return '\n'.join(lines) + '\n'


# =============================================================================
# Deterministic automata
# =============================================================================

@dataclass(frozen=True)
class Dfa:
    """Total DFA; delta[state][symbol] is the unique successor."""
    states: FrozenSet[Hashable]
    alphabet: FrozenSet[Hashable]
    delta: Dict[Hashable, Dict[Hashable, Hashable]] = field(hash=False)
    initial: Hashable = 0
    finals: FrozenSet[Hashable] = frozenset()

    def __post_init__(self):
        if self.initial not in self.states:
            raise InvalidArgumentError("Initial state must be a declared state")
        for state in self.states:
            row = self.delta.get(state)
            if row is None or len(row) != len(self.alphabet):
                raise InvalidArgumentError(f"DFA is not total at state {state!r}")

    def next(self, state: Hashable, symbol: Hashable) -> Hashable:
        return self.delta[state][symbol]

    def run(self, word: Iterable[Hashable]) -> Optional[Hashable]:
        state = self.initial
        for symbol in word:
            row = self.delta[state]
            if symbol not in row:
                return None
            state = row[symbol]
        return state

    def accepts(self, word: Iterable[Hashable]) -> bool:
        state = self.run(word)
        return state is not None and state in self.finals

    @cached_property
    def distance_to_final(self) -> Dict[Hashable, int]:
        """Shortest number of steps from each live state to a final state."""
        reverse: Dict[Hashable, set] = {state: set() for state in self.states}
        for src, row in self.delta.items():
            for dst in row.values():
                reverse[dst].add(src)
        distance = {state: 0 for state in self.finals}
        queue = deque(self.finals)
        while queue:
            state = queue.popleft()
            for prev in reverse[state]:
                if prev not in distance:
                    distance[prev] = distance[state] + 1
                    queue.append(prev)
        return distance

    @property
    def live_states(self) -> FrozenSet[Hashable]:
        return frozenset(self.distance_to_final)

    def to_nfa(self, trim: bool = True) -> Nfa:
        keep = self.live_states | {self.initial} if trim else self.states
        transitions = [
            (src, symbol, dst)
            for src, row in self.delta.items() if src in keep
            for symbol, dst in row.items() if dst in keep and (not trim or dst in self.live_states)
        ]
        return Nfa.build(keep, self.alphabet, transitions, {self.initial}, self.finals & keep)

    def to_text(self) -> str:
        """Stable dump: states renumbered breadth-first, rows sorted."""
        lines = [
            'dfa',
            'alphabet: ' + ' '.join(str(symbol) for symbol in sorted_symbols(self.alphabet)),
            'states: ' + ' '.join(str(state) for state in sorted(self.states, key=symbol_key)),
            f'initial: {self.initial}',
            'final: ' + ' '.join(str(state) for state in sorted(self.finals, key=symbol_key)),
        ]
        for state in sorted(self.states, key=symbol_key):
            for symbol in sorted_symbols(self.alphabet):
                lines.append(f"{state} {symbol} {self.delta[state][symbol]}")
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'Dfa':
        """Parse a dump written by to_text (integer states, string symbols)."""
        header: Dict[str, List[str]] = {}
        rows = []
        lines = [line.strip() for line in text.splitlines()]
        lines = [line for line in lines if line and not line.startswith('#')]
        if not lines or lines[0] != 'dfa':
            raise AutomatonFormatError("DFA dump must start with 'dfa'")
        for number, line in enumerate(lines[1:], start=2):
            if ':' in line:
                key, _, value = line.partition(':')
                header[key.strip()] = value.split()
                continue
            parts = line.split()
            if len(parts) != 3:
                raise AutomatonFormatError(f"Bad transition row: {line!r}", line=number)
            rows.append(parts)
        try:
            states = [int(state) for state in header['states']]
            initial = int(header['initial'][0])
            finals = [int(state) for state in header.get('final', [])]
            alphabet = header['alphabet']
        except (KeyError, IndexError, ValueError) as exc:
            raise AutomatonFormatError(f"Bad DFA header: {exc}")
        delta: Dict[int, Dict[str, int]] = {state: {} for state in states}
        for src, symbol, dst in rows:
            try:
                delta[int(src)][symbol] = int(dst)
            except (KeyError, ValueError):
                raise AutomatonFormatError(f"Bad transition row: {src} {symbol} {dst}")
        return cls(frozenset(states), frozenset(alphabet), delta, initial, frozenset(finals))


# =============================================================================
# Lazy construction
# =============================================================================

def build_nfa(
    alphabet: Iterable[Hashable],
    initials: Iterable[Hashable],
    moves: Callable[[Hashable], Iterable[Tuple[Optional[Hashable], Hashable]]],
    is_final: Callable[[Hashable], bool],
    limit: Optional[int] = None,
    name: str = 'automaton',
    extend_alphabet: bool = False,
) -> Nfa:
    """
    Explore the states reachable from the initials.

    moves(state) yields (symbol or EPSILON, next_state). With extend_alphabet
    the alphabet is widened by every symbol that occurs.
    """
    limit = _state_limit(limit)
    alphabet = set(alphabet)
    initials = list(dict.fromkeys(initials))
    seen = set(initials)
    queue = deque(initials)
    transitions = []
    while queue:
        state = queue.popleft()
        for symbol, nxt in moves(state):
            if symbol is not EPSILON and extend_alphabet:
                alphabet.add(symbol)
            transitions.append((state, symbol, nxt))
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > limit:
                    raise StateLimitExceeded(f"{name} exceeded {limit} states")
                queue.append(nxt)
    finals = [state for state in seen if is_final(state)]
    logger.debug(f"Built {name}: {len(seen)} states, {len(transitions)} transitions")
    return Nfa.build(seen, alphabet, transitions, initials, finals)


_SINK = ('__sink__',)


def build_dfa(
    alphabet: Iterable[Hashable],
    initial: Hashable,
    step: Callable[[Hashable, Hashable], Optional[Hashable]],
    is_final: Callable[[Hashable], bool],
    limit: Optional[int] = None,
) -> Dfa:
    """Minimal DFA explored from initial; step returns None for the dead state."""
    limit = _state_limit(limit)
    symbols = sorted_symbols(set(alphabet))
    delta: Dict[Hashable, Dict[Hashable, Hashable]] = {}
    seen = {initial}
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        row = {}
        for symbol in symbols:
            nxt = _SINK if state == _SINK else step(state, symbol)
            if nxt is None:
                nxt = _SINK
            row[symbol] = nxt
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > limit:
                    raise StateLimitExceeded(f"DFA construction exceeded {limit} states")
                queue.append(nxt)
        delta[state] = row
    finals = frozenset(state for state in seen if state != _SINK and is_final(state))
    return minimize(Dfa(frozenset(seen), frozenset(symbols), delta, initial, finals))


def relabel(nfa: Nfa, mapping: Callable[[Hashable], Optional[Hashable]], alphabet: Iterable[Hashable]) -> Nfa:
    """Apply a letter-to-letter (or letter-to-epsilon) morphism to the transitions."""
    transitions = [
        (src, EPSILON if symbol is EPSILON else mapping(symbol), dst)
        for src, symbol, dst in nfa.transitions
    ]
    return Nfa.build(nfa.states, alphabet, transitions, nfa.initials, nfa.finals)


# =============================================================================
# Determinization and minimization
# =============================================================================

def determinize(nfa: Nfa, alphabet: Optional[Iterable[Hashable]] = None, limit: Optional[int] = None) -> Dfa:
    """Subset construction; the empty subset is the sink."""
    limit = _state_limit(limit)
    alphabet = frozenset(alphabet) if alphabet is not None else nfa.alphabet
    if not nfa.alphabet <= alphabet:
        raise AlphabetMismatchError("NFA uses symbols outside the requested alphabet")
    symbols = sorted_symbols(alphabet)
    start = nfa.closure(nfa.initials)
    index = {start: 0}
    queue = deque([start])
    delta: Dict[int, Dict[Hashable, int]] = {}
    while queue:
        subset = queue.popleft()
        gathered: Dict[Hashable, set] = {}
        for state in subset:
            for symbol, dsts in nfa.moves[state].items():
                if symbol is not EPSILON:
                    gathered.setdefault(symbol, set()).update(dsts)
        row = {}
        for symbol in symbols:
            target = nfa.closure(gathered.get(symbol, ()))
            if target not in index:
                index[target] = len(index)
                if len(index) > limit:
                    raise StateLimitExceeded(f"Subset construction exceeded {limit} states")
                queue.append(target)
            row[symbol] = index[target]
        delta[index[subset]] = row
    finals = frozenset(number for subset, number in index.items() if subset & nfa.finals)
    return Dfa(frozenset(index.values()), alphabet, delta, 0, finals)


def minimize(dfa: Dfa) -> Dfa:
    """Moore partition refinement, then canonical breadth-first numbering."""
    symbols = sorted_symbols(dfa.alphabet)

    reachable = {dfa.initial}
    queue = deque([dfa.initial])
    while queue:
        state = queue.popleft()
        for symbol in symbols:
            nxt = dfa.delta[state][symbol]
            if nxt not in reachable:
                reachable.add(nxt)
                queue.append(nxt)

    block = {state: int(state in dfa.finals) for state in reachable}
    count = len(set(block.values()))
    while True:
        signatures: Dict[Tuple, int] = {}
        refined = {}
        for state in reachable:
            signature = (block[state],) + tuple(block[dfa.delta[state][symbol]] for symbol in symbols)
            refined[state] = signatures.setdefault(signature, len(signatures))
        block = refined
        if len(signatures) == count:
            break
        count = len(signatures)

    representative = {}
    for state in reachable:
        representative.setdefault(block[state], state)
    numbering = {block[dfa.initial]: 0}
    queue = deque([block[dfa.initial]])
    delta: Dict[int, Dict[Hashable, int]] = {}
    while queue:
        current = queue.popleft()
        state = representative[current]
        row = {}
        for symbol in symbols:
            target = block[dfa.delta[state][symbol]]
            if target not in numbering:
                numbering[target] = len(numbering)
                queue.append(target)
            row[symbol] = numbering[target]
        delta[numbering[current]] = row
    finals = frozenset(numbering[block[state]] for state in reachable if state in dfa.finals)
    return Dfa(frozenset(numbering.values()), dfa.alphabet, delta, 0, finals)


def determinize_minimize(nfa: Nfa, alphabet: Optional[Iterable[Hashable]] = None) -> Dfa:
    return minimize(determinize(nfa, alphabet))


def as_dfa(automaton) -> Dfa:
    if isinstance(automaton, Dfa):
        return automaton
    return determinize(automaton)


# =============================================================================
# Boolean algebra
# =============================================================================

def _product(a: Dfa, b: Dfa, accept: Callable[[bool, bool], bool]) -> Dfa:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError("Automata have different alphabets")
    symbols = sorted_symbols(a.alphabet)
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    delta = {}
    while queue:
        pair = queue.popleft()
        row = {}
        for symbol in symbols:
            nxt = (a.delta[pair[0]][symbol], b.delta[pair[1]][symbol])
            row[symbol] = nxt
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
        delta[pair] = row
    finals = frozenset(pair for pair in seen if accept(pair[0] in a.finals, pair[1] in b.finals))
    return minimize(Dfa(frozenset(seen), a.alphabet, delta, start, finals))


def union(a: Dfa, b: Dfa) -> Dfa:
    return _product(a, b, lambda x, y: x or y)


def intersect(a: Dfa, b: Dfa) -> Dfa:
    return _product(a, b, lambda x, y: x and y)


def difference(a: Dfa, b: Dfa) -> Dfa:
    return _product(a, b, lambda x, y: x and not y)


def complement(a: Dfa, universe: Dfa) -> Dfa:
    """universe minus L(a)."""
    return difference(universe, a)


BOOLEAN_OPS = {
    'union': union,
    'intersect': intersect,
    'difference': difference,
}


def boolean_ops(a: Dfa, b: Dfa, op: str) -> Dfa:
    if op not in BOOLEAN_OPS:
        raise InvalidArgumentError(f"Unknown boolean operation: {op}")
    return BOOLEAN_OPS[op](a, b)


def empty_dfa(alphabet: Iterable[Hashable]) -> Dfa:
    alphabet = frozenset(alphabet)
    return Dfa(frozenset({0}), alphabet, {0: {symbol: 0 for symbol in alphabet}}, 0, frozenset())


# =============================================================================
# Queries
# =============================================================================

def shortest_word(automaton) -> Optional[Word]:
    """Minimum-length accepted word, ties broken lexicographically."""
    dfa = as_dfa(automaton)
    if dfa.initial in dfa.finals:
        return ()
    symbols = sorted_symbols(dfa.alphabet)
    parent = {dfa.initial: None}
    queue = deque([dfa.initial])
    while queue:
        state = queue.popleft()
        for symbol in symbols:
            nxt = dfa.delta[state][symbol]
            if nxt in parent:
                continue
            parent[nxt] = (state, symbol)
            if nxt in dfa.finals:
                word = []
                cursor = nxt
                while parent[cursor] is not None:
                    cursor, letter = parent[cursor]
                    word.append(letter)
                return tuple(reversed(word))
            queue.append(nxt)
    return None


def is_empty(automaton) -> bool:
    return shortest_word(automaton) is None


def inclusion_witness(a: Dfa, b: Dfa) -> Optional[Word]:
    """Shortest word of L(a) outside L(b), or None when L(a) is included."""
    return shortest_word(difference(a, b))


def inclusion(a: Dfa, b: Dfa) -> bool:
    return inclusion_witness(a, b) is None


def equivalence(a: Dfa, b: Dfa) -> bool:
    return inclusion(a, b) and inclusion(b, a)


def iter_words(automaton, max_len: int) -> Iterator[Word]:
    """Accepted words of length <= max_len, depth first, pruned by distance to acceptance."""
    dfa = as_dfa(automaton)
    distance = dfa.distance_to_final
    symbols = sorted_symbols(dfa.alphabet)
    if dfa.initial not in distance or distance[dfa.initial] > max_len:
        return
    stack = [(dfa.initial, ())]
    while stack:
        state, word = stack.pop()
        if state in dfa.finals:
            yield word
        if len(word) == max_len:
            continue
        remaining = max_len - len(word) - 1
        for symbol in reversed(symbols):
            nxt = dfa.delta[state][symbol]
            if distance.get(nxt, max_len + 1) <= remaining:
                stack.append((nxt, word + (symbol,)))


def enumerate_words(automaton, max_len: int) -> List[Word]:
    """All accepted words of length <= max_len in length-lexicographic order."""
    if max_len < 0:
        raise InvalidArgumentError("max_len must be >= 0")
    return sorted(iter_words(automaton, max_len), key=word_key)


# =============================================================================
# Transducers
# =============================================================================

@dataclass(frozen=True)
class Transducer:
    """NFA over pairs (input, output); BLANK on either side pads that tape."""
    nfa: Nfa

    @classmethod
    def build(cls, states, transitions, initials, finals) -> 'Transducer':
        transitions = list(transitions)
        alphabet = {symbol for _, symbol, _ in transitions if symbol is not EPSILON}
        for symbol in alphabet:
            if not (isinstance(symbol, tuple) and len(symbol) == 2):
                raise InvalidArgumentError(f"Transducer symbol must be a pair, got {symbol!r}")
            if symbol == (BLANK, BLANK):
                raise InvalidArgumentError("A transducer step cannot pad both tapes")
        return cls(Nfa.build(states, alphabet, transitions, initials, finals))

    @property
    def input_alphabet(self) -> FrozenSet[Hashable]:
        return frozenset(x for x, _ in self.nfa.alphabet if x != BLANK)

    @property
    def output_alphabet(self) -> FrozenSet[Hashable]:
        return frozenset(y for _, y in self.nfa.alphabet if y != BLANK)

    def relates(self, source: Word, target: Word) -> bool:
        """Brute-force check that (source, target) is in the relation."""
        start = [(state, 0, 0) for state in self.nfa.initials]
        seen = set(start)
        stack = list(start)
        while stack:
            state, i, j = stack.pop()
            if state in self.nfa.finals and i == len(source) and j == len(target):
                return True
            for symbol, dsts in self.nfa.moves[state].items():
                if symbol is EPSILON:
                    ni, nj = i, j
                else:
                    x, y = symbol
                    ni, nj = i, j
                    if x != BLANK:
                        if i >= len(source) or source[i] != x:
                            continue
                        ni = i + 1
                    if y != BLANK:
                        if j >= len(target) or target[j] != y:
                            continue
                        nj = j + 1
                for dst in dsts:
                    config = (dst, ni, nj)
                    if config not in seen:
                        seen.add(config)
                        stack.append(config)
        return False


def apply_transducer(transducer: Transducer, language: Dfa, output_alphabet: Optional[Iterable[Hashable]] = None) -> Dfa:
    """Minimal DFA for {v | (u, v) in T for some u in L}."""
    if not transducer.input_alphabet <= language.alphabet:
        raise AlphabetMismatchError("Transducer input symbols are not in the language alphabet")
    nfa = transducer.nfa

    def moves(config):
        t_state, l_state = config
        for symbol, dsts in nfa.moves[t_state].items():
            if symbol is EPSILON:
                out, l_next = EPSILON, l_state
            else:
                x, y = symbol
                l_next = l_state if x == BLANK else language.delta[l_state][x]
                out = EPSILON if y == BLANK else y
            for dst in dsts:
                yield out, (dst, l_next)

    alphabet = frozenset(output_alphabet) if output_alphabet is not None else transducer.output_alphabet
    image = build_nfa(
        alphabet,
        [(state, language.initial) for state in nfa.initials],
        moves,
        lambda config: config[0] in nfa.finals and config[1] in language.finals,
        name='transducer image',
    )
    return determinize_minimize(image, alphabet)
