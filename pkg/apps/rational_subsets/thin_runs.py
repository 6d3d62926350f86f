"""
Languages of k-thin runs read column by column.

A run of a split-move automaton never stays at a position, so the run is a
two-way walk over the digit positions. Reading the positions from the top
down, the automaton state between two columns is the crossing sequence of
the run over that boundary: an ordered tuple of (direction, state) pairs,
where UP entries arrive at the upper column and DOWN entries arrive at the
lower one. Each column guesses whether it holds the start (radix) and the
end (cursor), simulates every visit of the run to that column in time
order, and emits the sum of the digits added there together with the
original states seen.

Thickness counts visits by original states; visits by the fresh states of
split a-edges are bounded by the same k, which every k-thin run satisfies.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, FrozenSet, Iterator, Optional, Tuple

from django.conf import settings

from .automata_kit import Dfa, build_nfa, determinize_minimize, relabel
from .bs_automata import VARIANTS, MoveAutomaton
from .exceptions import InvalidArgumentError, StateLimitExceeded
from .group_core import GroupContext
from .pe_regular import Column, PeSet, normalize_columns, strip_zero_padding
from .pointed_expansion import SIGNS, make_token, token_alphabet

logger = logging.getLogger(__name__)

UP = 1
DOWN = -1

Crossing = Tuple[Tuple[int, str], ...]
Outcome = Tuple[int, FrozenSet[str], Crossing]


@dataclass(frozen=True)
class ThinRunLang:
    """sv language of the k-thin runs start -> end of one variant."""
    ctx: GroupContext
    variant: str
    start: str
    end: str
    k: int
    columns: Dfa
    dfa: Dfa

    @property
    def is_empty(self) -> bool:
        return self.dfa.initial not in self.dfa.live_states


def _column_outcomes(
    ma: MoveAutomaton,
    k: int,
    upper: Crossing,
    started: bool,
    ended: bool,
    is_start: bool,
    is_end: bool,
    start: str,
    end: str,
    tick: Callable[[], None],
) -> Iterator[Outcome]:
    """
    Every way the run can behave at one column.

    upper is the crossing sequence above the column; started / ended tell
    whether the start / end positions lie above it. Yields (digit sum,
    original states visited, crossing sequence below). tick is called once per
    simulation step.
    """
    moves = ma.out_moves
    original = ma.original
    seen_outcomes = set()

    def enter(state, counts, visited):
        own, fresh = counts
        if state in original:
            if own == k:
                return None
            return (own + 1, fresh), visited | {state}
        if fresh == k:
            return None
        return (own, fresh + 1), visited

    # location: 'above', 'below' or a state name for a visit at this column
    stack = []
    if is_start:
        entered = enter(start, (0, 0), frozenset())
        if entered is not None:
            stack.append((0, ('at', start), (), 0) + entered)
    elif started:
        stack.append((0, ('above', None), (), 0, (0, 0), frozenset()))
    else:
        stack.append((0, ('below', None), (), 0, (0, 0), frozenset()))

    while stack:
        tick()
        index, (where, state), lower, value, counts, visited = stack.pop()
        exhausted = index == len(upper)

        if where == 'at':
            if is_end and state == end and exhausted:
                outcome = (value, visited, lower)
                if outcome not in seen_outcomes:
                    seen_outcomes.add(outcome)
                    yield outcome
            for digit, move, target in moves[state]:
                if move == UP:
                    if not exhausted and upper[index] == (UP, target):
                        stack.append((index + 1, ('above', None), lower, value + digit, counts, visited))
                else:
                    stack.append((index, ('below', None), lower + ((DOWN, target),), value + digit, counts, visited))

        elif where == 'above':
            if exhausted:
                if ended and sum(counts):
                    outcome = (value, visited, lower)
                    if outcome not in seen_outcomes:
                        seen_outcomes.add(outcome)
                        yield outcome
                continue
            direction, target = upper[index]
            if direction != DOWN:
                continue
            entered = enter(target, counts, visited)
            if entered is not None:
                stack.append((index + 1, ('at', target), lower, value) + entered)

        else:
            if exhausted and not ended and not is_end and sum(counts):
                outcome = (value, visited, lower)
                if outcome not in seen_outcomes:
                    seen_outcomes.add(outcome)
                    yield outcome
            for target in ma.up_targets:
                entered = enter(target, counts, visited)
                if entered is not None:
                    stack.append((index, ('at', target), lower + ((UP, target),), value) + entered)


def thin_run_columns(
    ma: MoveAutomaton,
    start: str,
    end: str,
    k: int,
    variant: str = 'all',
    work_limit: Optional[int] = None,
) -> Dfa:
    """
    Minimal DFA of raw column words (digit sums, markers, visited states) of k-thin runs.

    The column simulations together may take at most work_limit steps
    (settings.BS_THIN_RUN_WORK_LIMIT by default); beyond that the
    construction stops with StateLimitExceeded.
    """
    if k < 1:
        raise InvalidArgumentError("Thickness k must be >= 1")
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"Unknown run variant: {variant}")
    for state in (start, end):
        if state not in ma.states:
            raise InvalidArgumentError(f"Unknown state {state}")
    same_column = variant in ('returning', 'returning_left')
    limit = work_limit if work_limit is not None else settings.BS_THIN_RUN_WORK_LIMIT
    steps = 0

    def tick():
        nonlocal steps
        steps += 1
        if steps > limit:
            raise StateLimitExceeded(
                f"Thin runs {start}->{end} (k={k}, {variant}) exceeded {limit} simulation steps; lower the thickness"
            )

    @lru_cache(maxsize=None)
    def outcomes(upper, started, ended, is_start, is_end):
        return tuple(_column_outcomes(ma, k, upper, started, ended, is_start, is_end, start, end, tick))

    def moves(state):
        upper, started, ended = state
        for is_start in ((False,) if started else (False, True)):
            for is_end in ((False,) if ended else (False, True)):
                if same_column and is_start != is_end:
                    continue
                for value, visited, lower in outcomes(upper, started, ended, is_start, is_end):
                    if variant == 'returning_left' and is_start and lower:
                        continue
                    symbol = Column(value, is_start, is_end, visited)
                    yield symbol, (lower, started or is_start, ended or is_end)

    nfa = build_nfa(
        (),
        [((), False, False)],
        moves,
        lambda state: state == ((), True, True),
        name=f"thin runs {start}->{end} k={k} {variant}",
        extend_alphabet=True,
    )
    columns = determinize_minimize(nfa)
    logger.debug(f"Thin-run columns {start}->{end} ({variant}, k={k}): {len(nfa.states)} crossing states, {len(columns.states)} DFA states, {steps} steps")
    return columns


def thin_run_automaton(
    ma: MoveAutomaton,
    start: str,
    end: str,
    k: int,
    variant: str = 'all',
    work_limit: Optional[int] = None,
) -> ThinRunLang:
    """State views of the k-thin runs start -> end of the given variant."""
    columns = thin_run_columns(ma, start, end, k, variant, work_limit)
    views = normalize_columns(ma.ctx, columns, keep_states=True)
    return ThinRunLang(ma.ctx, variant, start, end, k, columns, views)


def _erase_states(symbol):
    if symbol in SIGNS:
        return symbol
    return make_token(symbol.value, symbol.radix, symbol.cursor)


def sv_to_pe(lang: ThinRunLang) -> PeSet:
    """Erase the state blocks and canonicalize."""
    ctx = lang.ctx
    alphabet = token_alphabet(ctx.q)
    projected = determinize_minimize(relabel(lang.dfa.to_nfa(), _erase_states, alphabet), alphabet)
    return PeSet.from_language(ctx, strip_zero_padding(ctx, projected))


def pe_of_columns(ctx: GroupContext, columns: Dfa) -> PeSet:
    """Canonical PeSet of the values of raw column words."""
    return PeSet.from_language(ctx, strip_zero_padding(ctx, normalize_columns(ctx, columns)))
