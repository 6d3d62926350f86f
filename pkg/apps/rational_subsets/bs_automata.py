"""
Automata over BS(1,q): file format, edge normalization, split moves, runs and state views.

File format:

    bs q=2
    state p0 initial final
    state p1
    edge p0 p1 a
    edge p0 p0 t^-1

Labels are generator words; '1' is the identity label and '#' starts a comment.

Design Decision: one initial and one final state
- Extra initial or final states are joined to a fresh state by identity edges
  at parse time; normalize_edges eliminates those edges again
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .exceptions import AutomatonFormatError, GeneratorWordError, InvalidArgumentError, NotAPathError
from .group_core import GeneratorWord, GroupContext, GroupElement
from .pe_regular import Column
from .pointed_expansion import make_token

logger = logging.getLogger(__name__)

Edge = Tuple[str, GeneratorWord, str]
Move = Tuple[int, int]  # (digit added at the current position, position change)
MoveEdge = Tuple[str, Move, str]

VARIANTS = ('all', 'returning', 'returning_left')


@dataclass(frozen=True)
class BsAutomaton:
    ctx: GroupContext
    states: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    initial: str
    final: str

    def __post_init__(self):
        known = set(self.states)
        for src, _, dst in self.edges:
            if src not in known or dst not in known:
                raise AutomatonFormatError(f"Edge {src} -> {dst} uses an unknown state")
        if self.initial not in known or self.final not in known:
            raise AutomatonFormatError("Initial and final states must be declared")

    @cached_property
    def out_edges(self) -> Dict[str, List[Edge]]:
        table = {state: [] for state in self.states}
        for edge in self.edges:
            table[edge[0]].append(edge)
        return table

    @property
    def is_normalized(self) -> bool:
        return all(len(label) == 1 for _, label, _ in self.edges)

    # -------------------------------------------------------------------------
    # Text format
    # -------------------------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> 'BsAutomaton':
        return parse_bs_automaton(text)

    def to_text(self) -> str:
        lines = [f"bs q={self.ctx.q}"]
        for state in self.states:
            flags = [flag for flag, on in (('initial', state == self.initial), ('final', state == self.final)) if on]
            lines.append(' '.join(['state', state] + flags))
        for src, label, dst in self.edges:
            lines.append(f"edge {src} {dst} {label}")
        return '\n'.join(lines) + '\n'


def parse_bs_automaton(text: str) -> BsAutomaton:
    ctx = None
    states: List[str] = []
    initials: List[str] = []
    finals: List[str] = []
    edges: List[Edge] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if ctx is None:
            if len(parts) != 2 or parts[0] != 'bs' or not parts[1].startswith('q='):
                raise AutomatonFormatError("First line must be 'bs q=<int>'", line=number)
            try:
                ctx = GroupContext(int(parts[1][2:]))
            except ValueError:
                raise AutomatonFormatError(f"Bad base: {parts[1]}", line=number)
            continue
        keyword = parts[0]
        if keyword == 'state':
            if len(parts) < 2:
                raise AutomatonFormatError("State line needs a name", line=number)
            name, flags = parts[1], parts[2:]
            if name in states:
                raise AutomatonFormatError(f"Duplicate state {name}", line=number)
            for flag in flags:
                if flag not in ('initial', 'final'):
                    raise AutomatonFormatError(f"Unknown state flag {flag}", line=number)
            states.append(name)
            if 'initial' in flags:
                initials.append(name)
            if 'final' in flags:
                finals.append(name)
        elif keyword == 'edge':
            if len(parts) < 4:
                raise AutomatonFormatError("Edge line needs source, target and label", line=number)
            src, dst, label_text = parts[1], parts[2], ' '.join(parts[3:])
            for state in (src, dst):
                if state not in states:
                    raise AutomatonFormatError(f"Unknown state {state}", line=number)
            try:
                label = GeneratorWord.from_text(label_text)
            except GeneratorWordError as exc:
                raise AutomatonFormatError(f"Bad label {label_text!r}: {exc}", line=number)
            edges.append((src, label, dst))
        else:
            raise AutomatonFormatError(f"Unknown keyword {keyword}", line=number)

    if ctx is None:
        raise AutomatonFormatError("Empty automaton file")
    if not initials or not finals:
        raise AutomatonFormatError("Automaton needs an initial and a final state")

    initial = _join(initials, '__initial', states, edges, outgoing=True)
    final = _join(finals, '__final', states, edges, outgoing=False)
    return BsAutomaton(ctx, tuple(sorted(states)), tuple(edges), initial, final)


def _fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name = '_' + name
    return name


def _join(marked: List[str], base: str, states: List[str], edges: List[Edge], outgoing: bool) -> str:
    """Single representative for several initial (or final) states via identity edges."""
    if len(marked) == 1:
        return marked[0]
    fresh = _fresh_name(base, set(states))
    states.append(fresh)
    identity = GeneratorWord()
    for state in marked:
        edges.append((fresh, identity, state) if outgoing else (state, identity, fresh))
    return fresh


# =============================================================================
# Normalization
# =============================================================================

def normalize_edges(a: BsAutomaton) -> BsAutomaton:
    """
    Every edge labeled by a single generator.

    Word labels become chains through fresh states; identity labels become
    epsilon edges that are then eliminated. When the identity is accepted
    only through epsilon edges, a t t^-1 detour keeps it accepted.
    """
    taken = set(a.states)
    states = list(a.states)
    letter_edges: List[Edge] = []
    epsilon: Dict[str, set] = defaultdict(set)

    for index, (src, label, dst) in enumerate(a.edges):
        if len(label) == 0:
            epsilon[src].add(dst)
            continue
        chain = [src]
        for position in range(len(label) - 1):
            fresh = _fresh_name(f"{src}.{index}.{position}", taken)
            taken.add(fresh)
            states.append(fresh)
            chain.append(fresh)
        chain.append(dst)
        for position, token in enumerate(label.tokens):
            letter_edges.append((chain[position], GeneratorWord((token,)), chain[position + 1]))

    if epsilon:
        closure = {state: _reach(state, epsilon) for state in states}
        by_source: Dict[str, List[Edge]] = defaultdict(list)
        for edge in letter_edges:
            by_source[edge[0]].append(edge)
        eliminated = set()
        for state in states:
            for via in closure[state]:
                for _, label, target in by_source[via]:
                    for landing in closure[target]:
                        eliminated.add((state, label, landing))
        letter_edges = sorted(eliminated, key=lambda edge: (edge[0], edge[1].tokens, edge[2]))
        if a.final in closure[a.initial] and a.initial != a.final:
            detour = _fresh_name('__identity', taken)
            states.append(detour)
            letter_edges.append((a.initial, GeneratorWord(('t',)), detour))
            letter_edges.append((detour, GeneratorWord(('t^-1',)), a.final))

    normalized = _trim(a.ctx, states, letter_edges, a.initial, a.final)
    logger.debug(f"Normalized automaton: {len(normalized.states)} states, {len(normalized.edges)} edges")
    return normalized


def _reach(state: str, epsilon: Dict[str, set]) -> FrozenSet[str]:
    seen = {state}
    stack = [state]
    while stack:
        current = stack.pop()
        for nxt in epsilon.get(current, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def _trim(ctx: GroupContext, states: Sequence[str], edges: Sequence[Edge], initial: str, final: str) -> BsAutomaton:
    """Drop states that lie on no initial-to-final path."""
    graph = nx.DiGraph()
    graph.add_nodes_from(states)
    graph.add_edges_from((src, dst) for src, _, dst in edges)
    useful = (nx.descendants(graph, initial) | {initial}) & (nx.ancestors(graph, final) | {final})
    useful |= {initial, final}
    kept = tuple(edge for edge in edges if edge[0] in useful and edge[2] in useful)
    return BsAutomaton(ctx, tuple(sorted(useful)), kept, initial, final)


# =============================================================================
# Split moves
# =============================================================================

@dataclass(frozen=True)
class MoveAutomaton:
    """Automaton whose every step adds a digit at the current position and moves by +-1."""
    ctx: GroupContext
    states: Tuple[str, ...]
    original: FrozenSet[str]
    edges: Tuple[MoveEdge, ...]
    initial: str
    final: str

    @cached_property
    def out_moves(self) -> Dict[str, Tuple[Tuple[int, int, str], ...]]:
        """state -> sorted (digit, move, target) triples."""
        table: Dict[str, set] = {state: set() for state in self.states}
        for src, (digit, move), dst in self.edges:
            table[src].add((digit, move, dst))
        return {state: tuple(sorted(moves)) for state, moves in table.items()}

    @cached_property
    def up_targets(self) -> Tuple[str, ...]:
        """States entered by a +1 move."""
        return tuple(sorted({dst for _, (_, move), dst in self.edges if move == 1}))


def split_moves(a: BsAutomaton) -> MoveAutomaton:
    """a becomes (1,+1)(0,-1) through a fresh state; t and t^-1 become (0,+-1)."""
    if not a.is_normalized:
        raise InvalidArgumentError("split_moves needs a normalized automaton")
    taken = set(a.states)
    states = list(a.states)
    edges: List[MoveEdge] = []
    for index, (src, label, dst) in enumerate(a.edges):
        token = label.tokens[0]
        if token in ('t', 't^-1'):
            edges.append((src, (0, 1 if token == 't' else -1), dst))
            continue
        fresh = _fresh_name(f"{src}^{index}", taken)
        taken.add(fresh)
        states.append(fresh)
        edges.append((src, (1 if token == 'a' else -1, 1), fresh))
        edges.append((fresh, (0, -1), dst))
    return MoveAutomaton(a.ctx, tuple(states), frozenset(a.states), tuple(edges), a.initial, a.final)


# =============================================================================
# Runs
# =============================================================================

@dataclass(frozen=True)
class RunMetrics:
    production: GroupElement
    pos: int
    pmax: int
    pmin: int
    thickness: int

    @property
    def is_returning(self) -> bool:
        return self.pos == 0

    @property
    def is_returning_left(self) -> bool:
        return self.pos == 0 and self.pmin == 0


@dataclass(frozen=True)
class RunRecord:
    edges: Tuple[Edge, ...]
    metrics: RunMetrics

    def label_word(self) -> GeneratorWord:
        word = GeneratorWord()
        for _, label, _ in self.edges:
            word = word + label
        return word


def run_metrics(a: BsAutomaton, run: Sequence[Edge], start: Optional[str] = None) -> RunMetrics:
    """Production, final position, extreme positions and thickness of a path."""
    known = set(a.edges)
    state = start
    element = a.ctx.identity()
    visits = Counter({0: 1})
    pmax = pmin = 0
    for edge in run:
        if edge not in known:
            raise NotAPathError(f"{edge[0]} -{edge[1]}-> {edge[2]} is not an edge")
        if state is not None and edge[0] != state:
            raise NotAPathError(f"Edge from {edge[0]} does not continue at {state}")
        state = edge[2]
        element = a.ctx.multiply(element, a.ctx.eval_word(edge[1]))
        visits[element.cursor] += 1
        pmax = max(pmax, element.cursor)
        pmin = min(pmin, element.cursor)
    return RunMetrics(element, element.cursor, pmax, pmin, max(visits.values()))


def _passes(variant: str, pos: int, pmin: int) -> bool:
    if variant == 'all':
        return True
    if variant == 'returning':
        return pos == 0
    return pos == 0 and pmin == 0


def enumerate_runs(
    a: BsAutomaton,
    start: str,
    end: str,
    max_len: int,
    variant: str = 'all',
    max_thickness: Optional[int] = None,
) -> Iterator[RunRecord]:
    """Every run start -> end of at most max_len edges passing the variant and thickness filters."""
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"Unknown run variant: {variant}")
    ctx = a.ctx
    images = {edge: ctx.eval_word(edge[1]) for edge in a.edges}
    visits = Counter({0: 1})

    def walk(state, edges, element, pmin, pmax):
        if state == end and _passes(variant, element.cursor, pmin):
            metrics = RunMetrics(element, element.cursor, pmax, pmin, max(visits.values()))
            yield RunRecord(edges, metrics)
        if len(edges) == max_len:
            return
        for edge in a.out_edges[state]:
            nxt = ctx.multiply(element, images[edge])
            position = nxt.cursor
            visits[position] += 1
            if max_thickness is None or visits[position] <= max_thickness:
                yield from walk(edge[2], edges + (edge,), nxt, min(pmin, position), max(pmax, position))
            visits[position] -= 1

    if max_thickness is not None and max_thickness < 1:
        return
    yield from walk(start, (), ctx.identity(), 0, 0)


# =============================================================================
# State views
# =============================================================================

@dataclass(frozen=True)
class StateView:
    sign: str
    columns: Tuple[Column, ...]

    def symbols(self) -> Tuple:
        return (self.sign,) + self.columns

    def to_text(self, order: Sequence[str]) -> str:
        return sv_text(self.symbols(), order)


def sv_text(symbols: Sequence, order: Sequence[str]) -> str:
    """Render sign and columns; unvisited states carry a '~' bar."""
    parts = []
    for symbol in symbols:
        if isinstance(symbol, Column):
            block = ' '.join(state if state in symbol.states else f"~{state}" for state in order)
            parts.append(f"{make_token(symbol.value, symbol.radix, symbol.cursor)}[{block}]")
        else:
            parts.append(str(symbol))
    return ' '.join(parts)


def state_view(a: BsAutomaton, run: Sequence[Edge], start: Optional[str] = None) -> StateView:
    """
    sv of a run of a normalized automaton.

    Positions are those visited by the split run (an a-step also touches the
    position above), extended upward to the top nonzero digit of the production.
    """
    if not a.is_normalized:
        raise InvalidArgumentError("state_view needs a normalized automaton")
    metrics = run_metrics(a, run, start)
    first = start if start is not None else (run[0][0] if run else a.initial)
    position = 0
    visited: Dict[int, set] = defaultdict(set)
    visited[0].add(first)
    span = {0}
    for _, label, dst in run:
        token = label.tokens[0]
        if token in ('a', 'a^-1'):
            span.add(position + 1)
        else:
            position += 1 if token == 't' else -1
        visited[position].add(dst)
        span.add(position)

    q = a.ctx.q
    production = metrics.production
    digits: Dict[int, int] = {}
    magnitude, place = abs(production.num), -production.exp
    while magnitude:
        magnitude, digit = divmod(magnitude, q)
        if digit:
            digits[place] = digit
        place += 1
    high = max(max(span), max(digits, default=0))
    low = min(span)
    columns = tuple(
        Column(digits.get(pos, 0), pos == 0, pos == production.cursor, frozenset(visited.get(pos, ())))
        for pos in range(high, low - 1, -1)
    )
    return StateView('-' if production.num < 0 else '+', columns)
