"""
Compile Engine for BS(1,q) automata.

Turns a BsAutomaton into the PeSet of its accepted subset.

Pipeline:
- normalize: single-generator edges, no identity edges
- split: every step moves the cursor by one position
- cycles: for each original state p, the integers produced by k-thin
  returning-left cycles at p, and the submonoid they generate
- combine: k-thin accepting runs, with one cycle-star integer added at a
  column visited by p, for every p in turn

Design Decision: Exact Frobenius refinement
- The cycle integers up to the bound B are materialized and closed under
  addition, so the exceptional set stops at the exact Frobenius number
- B above settings.BS_MATERIALIZATION_LIMIT fails with BudgetExceeded

Results are sound for every k: each accepted element is produced by an
accepting run. Completeness needs k = thickness_bound(|Q|).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from django.conf import settings
from sympy import factorint

from .automata_kit import EPSILON, Dfa, build_nfa, determinize_minimize, iter_words
from .bs_automata import BsAutomaton, MoveAutomaton, normalize_edges, split_moves
from .exceptions import BudgetExceeded, EmptyCycleSet, InvalidArgumentError
from .group_core import GroupContext
from .pe_regular import (
    Column,
    PeSet,
    above,
    at_most,
    boolean,
    divisible,
    finite_integers,
    integer_digits,
    singleton,
)
from .pointed_expansion import SIGNS, decode_tokens, split_token
from .thin_runs import pe_of_columns, sv_to_pe, thin_run_automaton, thin_run_columns

logger = logging.getLogger(__name__)

SIGN_CASES = ('nonneg', 'nonpos', 'mixed')


def thickness_bound(nstates: int) -> int:
    """|Q| + 2|Q|^2: every accepting run decomposes into a run this thin plus left cycles."""
    if nstates < 1:
        raise InvalidArgumentError("Automaton needs at least one state")
    return nstates + 2 * nstates ** 2


def run_length_bounds(n: int, k: int) -> Tuple[int, int, int]:
    """(shortest left-run length, magnitude exponent, four-runs bound) = (k(n^2+1), 2k(n^2+1), 3k(n^2+1))."""
    if n < 1 or k < 1:
        raise InvalidArgumentError("n and k must be >= 1")
    base = k * (n * n + 1)
    return base, 2 * base, 3 * base


@dataclass(frozen=True)
class IntCycleSet:
    """The submonoid S* generated by the returning-left cycle integers S at one state."""
    state: Optional[str]
    k: Optional[int]
    sign_case: str
    gcd: int
    bound: int
    frobenius: int
    exceptional: Tuple[int, ...]
    pe_set: PeSet

    def as_stats(self) -> Dict[str, Any]:
        return {
            'sign_case': self.sign_case,
            'gcd': self.gcd,
            'bound': self.bound,
            'frobenius': self.frobenius,
            'exceptional': len(self.exceptional),
            'states': self.pe_set.state_count,
        }


def representable(generators: List[int], limit: int) -> bytearray:
    """table[n] = 1 iff n in [0, limit] is a sum of generators."""
    table = bytearray(limit + 1)
    table[0] = 1
    steps = sorted({g for g in generators if 0 < g <= limit})
    for n in range(1, limit + 1):
        for step in steps:
            if step > n:
                break
            if table[n - step]:
                table[n] = 1
                break
    return table


def _gcd_with_witnesses(ctx: GroupContext, nonzero: PeSet, sample: int) -> Tuple[int, List[int]]:
    """gcd(S) from the prime factors of one member, with members witnessing each exponent."""
    gcd = 1
    witnesses = []
    for prime, exponent in sorted(factorint(sample).items()):
        power = 0
        while power < exponent:
            outside = boolean(nonzero, divisible(ctx, prime ** (power + 1), 'all'), 'difference')
            witness = outside.shortest_member()
            if witness is not None:
                witnesses.append(abs(witness.num))
                break
            power += 1
        gcd *= prime ** power
    return gcd, witnesses


def star_of_integer_set(
    ctx: GroupContext,
    members: PeSet,
    limit: Optional[int] = None,
    state: Optional[str] = None,
    k: Optional[int] = None,
) -> IntCycleSet:
    """
    pe(S*) for a PE-regular set S of integers.

    Raises EmptyCycleSet when S has no nonzero member.
    """
    limit = settings.BS_MATERIALIZATION_LIMIT if limit is None else limit
    zero = singleton(ctx, ctx.identity())
    nonzero = boolean(members, zero, 'difference')
    sample = nonzero.shortest_member()
    if sample is None:
        raise EmptyCycleSet(f"No nonzero cycle integer at {state}", state=state)

    positives = boolean(members, above(ctx, 0), 'intersect')
    negatives = boolean(members, above(ctx, 0, negative=True), 'intersect')
    has_positive, has_negative = not positives.is_empty(), not negatives.is_empty()

    gcd, witnesses = _gcd_with_witnesses(ctx, nonzero, abs(sample.num))

    if has_positive and has_negative:
        logger.debug(f"Cycle set at {state}: mixed signs, gcd={gcd}")
        return IntCycleSet(state, k, 'mixed', gcd, 0, 0, (), divisible(ctx, gcd, 'all'))

    negative = has_negative
    bound = max([abs(sample.num)] + witnesses) ** 2
    if bound > limit:
        raise BudgetExceeded(
            f"Frobenius bound {bound} at {state} exceeds the materialization limit {limit}",
            gcd=gcd,
            bound=bound,
        )

    side = negatives if negative else positives
    small = boolean(side, at_most(ctx, bound, negative), 'intersect')
    max_tokens = len(integer_digits(ctx.q, bound)) + 1
    magnitudes = [abs(decode_tokens(ctx, word).num) for word in iter_words(small.dfa, max_tokens)]
    table = representable(magnitudes, bound)

    frobenius = max((n for n in range(0, bound + 1, gcd) if not table[n]), default=0)
    exceptional = tuple(n for n in range(frobenius + 1) if table[n])
    sign = 'nonpos' if negative else 'nonneg'
    tail = boolean(divisible(ctx, gcd, sign), above(ctx, frobenius, negative), 'intersect')
    values = [-n for n in exceptional] if negative else list(exceptional)
    pe_set = boolean(finite_integers(ctx, values), tail, 'union')

    logger.debug(f"Cycle set at {state}: {sign}, gcd={gcd}, B={bound}, F={frobenius}, |X|={len(exceptional)}")
    return IntCycleSet(state, k, sign, gcd, bound, frobenius, exceptional, pe_set)


def left_cycle_star(ma: MoveAutomaton, state: str, k: int, limit: Optional[int] = None) -> IntCycleSet:
    """pe([LeftRuns_k^{p->p}]*) for the original state p."""
    if state not in ma.original:
        raise InvalidArgumentError(f"{state} is not a state of the normalized automaton")
    lang = thin_run_automaton(ma, state, state, k, 'returning_left')
    return star_of_integer_set(ma.ctx, sv_to_pe(lang), limit, state=state, k=k)


# =============================================================================
# Combination
# =============================================================================

def insert_cycles(columns: Dfa, cycles: PeSet, state: str) -> Dfa:
    """
    Column words with one member of cycles added, its radix on a column visited by state.

    The member's digits extend upward from that column and may rise above
    the top column, which adds padding columns with no visiting states.
    The unchanged words are kept as well.
    """
    live = columns.live_states
    cycle_dfa = cycles.dfa
    cycle_live = cycle_dfa.live_states
    symbols = sorted(columns.alphabet, key=lambda column: (column.value, column.radix, column.cursor, sorted(column.states)))

    def column_steps(source):
        for column in symbols:
            target = columns.delta[source][column]
            if target in live:
                yield column, target

    def integer_steps(source):
        for token, target in cycle_dfa.delta[source].items():
            if token in SIGNS or target not in cycle_live:
                continue
            digit, radix, cursor = split_token(token)
            if radix == cursor:
                yield digit, radix, target

    # state: (mode, column source, cycle source, factor)
    def moves(config):
        if config == 'start':
            yield EPSILON, ('skip', columns.initial, None, 1)
            for sign in SIGNS:
                target = cycle_dfa.delta[cycle_dfa.initial][sign]
                if target in cycle_live:
                    yield EPSILON, ('fresh', columns.initial, target, -1 if sign == '-' else 1)
            return
        mode, source, cycle, factor = config
        if mode in ('skip', 'post'):
            for column, target in column_steps(source):
                yield column, (mode, target, cycle, factor)
            return
        if mode in ('fresh', 'top'):
            for digit, marked, cycle_target in integer_steps(cycle):
                if not marked:
                    yield Column(factor * digit, False, False, frozenset()), ('top', source, cycle_target, factor)
        if mode in ('fresh', 'pre'):
            for column, target in column_steps(source):
                yield column, ('pre', target, cycle, factor)
        for column, target in column_steps(source):
            for digit, marked, cycle_target in integer_steps(cycle):
                summed = column._replace(value=column.value + factor * digit)
                if not marked:
                    yield summed, ('in', target, cycle_target, factor)
                elif state in column.states and cycle_target in cycle_dfa.finals:
                    yield summed, ('post', target, cycle_target, factor)

    nfa = build_nfa(
        columns.alphabet,
        ['start'],
        moves,
        lambda config: config != 'start' and config[0] in ('skip', 'post') and config[1] in columns.finals,
        name=f"cycle insertion at {state}",
        extend_alphabet=True,
    )
    return determinize_minimize(nfa)


def combine(ma: MoveAutomaton, stars: Dict[str, IntCycleSet], k: int) -> PeSet:
    """Accepting k-thin runs with the cycle stars folded in, in state order."""
    columns = thin_run_columns(ma, ma.initial, ma.final, k, 'all')
    logger.debug(f"Accepting thin runs: {len(columns.states)} DFA states")
    for state in sorted(stars):
        columns = insert_cycles(columns, stars[state].pe_set, state)
        logger.debug(f"After folding cycles at {state}: {len(columns.states)} DFA states")
    return pe_of_columns(ma.ctx, columns)


# =============================================================================
# Engine
# =============================================================================

@dataclass
class CompileResult:
    pe_set: PeSet
    stats: Dict[str, Any] = field(default_factory=dict)


class CompileEngine:

    COMPILE_STAGES = [
        {'name': 'normalize', 'method': 'normalize'},
        {'name': 'split', 'method': 'split'},
        {'name': 'cycles', 'method': 'cycle_stars'},
        {'name': 'combine', 'method': 'combine'},
    ]

    def __init__(
        self,
        thickness: Optional[int] = None,
        materialization_limit: Optional[int] = None,
        workers: Optional[int] = None,
    ):
        self.thickness = thickness if thickness is not None else settings.BS_COMPILE_THICKNESS
        self.materialization_limit = (
            materialization_limit if materialization_limit is not None else settings.BS_MATERIALIZATION_LIMIT
        )
        self.workers = workers if workers is not None else settings.BS_CYCLE_WORKERS
        if self.thickness is not None and self.thickness < 1:
            raise InvalidArgumentError("Thickness must be >= 1")

    def normalize(self, context: Dict[str, Any]) -> Dict[str, Any]:
        normalized = normalize_edges(context['automaton'])
        context['normalized'] = normalized
        return {'states': len(normalized.states), 'edges': len(normalized.edges)}

    def split(self, context: Dict[str, Any]) -> Dict[str, Any]:
        normalized = context['normalized']
        ma = split_moves(normalized)
        context['moves'] = ma
        k = self.thickness if self.thickness is not None else thickness_bound(len(normalized.states))
        context['k'] = k
        return {'states': len(ma.states), 'edges': len(ma.edges), 'k': k}

    def _cycle_star(self, ma: MoveAutomaton, state: str, k: int) -> Optional[IntCycleSet]:
        try:
            return left_cycle_star(ma, state, k, self.materialization_limit)
        except EmptyCycleSet:
            logger.debug(f"No nonzero left cycles at {state}")
            return None

    def cycle_stars(self, context: Dict[str, Any]) -> Dict[str, Any]:
        ma, k = context['moves'], context['k']
        states = sorted(ma.original)
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(lambda state: self._cycle_star(ma, state, k), states))
        else:
            results = [self._cycle_star(ma, state, k) for state in states]
        stars = {state: star for state, star in zip(states, results) if star is not None}
        context['stars'] = stars
        return {state: star.as_stats() for state, star in stars.items()}

    def combine(self, context: Dict[str, Any]) -> Dict[str, Any]:
        pe_set = combine(context['moves'], context['stars'], context['k'])
        context['pe_set'] = pe_set
        return {'states': pe_set.state_count}

    def run(self, automaton: BsAutomaton) -> CompileResult:
        """Run every stage in order; stats hold one entry per stage."""
        logger.info(f"Compiling automaton with {len(automaton.states)} states over q={automaton.ctx.q}")
        context: Dict[str, Any] = {'automaton': automaton}
        stats: Dict[str, Any] = {}
        for config in self.COMPILE_STAGES:
            stage = getattr(self, config['method'])
            try:
                stats[config['name']] = stage(context)
            except BudgetExceeded as e:
                logger.error(f"Compile stage {config['name']} exceeded its budget: {e}")
                raise
            logger.debug(f"Stage {config['name']}: {stats[config['name']]}")
        logger.info(f"Compiled to {context['pe_set'].state_count} DFA states (k={context['k']})")
        return CompileResult(context['pe_set'], stats)


def compile_automaton(automaton: BsAutomaton, thickness: Optional[int] = None) -> PeSet:
    """PeSet of the subset accepted by automaton."""
    return CompileEngine(thickness=thickness).run(automaton).pe_set
