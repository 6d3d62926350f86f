"""
Decision procedures on rational and PE-regular subsets of BS(1,q).

A set S is k-periodic when membership is invariant under right
multiplication by (0,k) and by every (q^l - q^(l+k), 0). Each such h is
invertible, so the biconditionals reduce to S.h <= S and S.h^-1 <= S,
checked as DFA inclusions.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

from .automata_kit import inclusion
from .bs_automata import BsAutomaton
from .compile_engine import compile_automaton
from .exceptions import InvalidArgumentError
from .group_core import GeneratorWord, GroupContext, WordLike, as_word
from .pe_regular import PeSet, inverse_set, pdiff_sets, product, shift_set

logger = logging.getLogger(__name__)

RECOGNIZABLE = 'recognizable'
NOT_PERIODIC_UP_TO = 'not_periodic_up_to'


@dataclass(frozen=True)
class RecognizabilityVerdict:
    outcome: str
    k: int

    @property
    def is_recognizable(self) -> bool:
        return self.outcome == RECOGNIZABLE

    def to_text(self) -> str:
        if self.is_recognizable:
            return f"Recognizable({self.k})"
        return f"NotPeriodicUpTo({self.k}) (inconclusive)"

    def __str__(self):
        return self.to_text()


def rational_membership(automaton: BsAutomaton, word: WordLike, thickness: Optional[int] = None) -> bool:
    """Is eval_word(word) accepted by the automaton?"""
    ctx = automaton.ctx
    return compile_automaton(automaton, thickness).contains(ctx.eval_word(as_word(word)))


class FixedSubsetMatcher:
    """Membership in a fixed PE-regular set, compiled once."""

    def __init__(self, pe_set: PeSet):
        self.pe_set = pe_set
        self.ctx = pe_set.ctx

    def accepts(self, word: WordLike) -> bool:
        return self.pe_set.contains(self.ctx.eval_word(as_word(word)))


def fixed_subset_matcher(pe_set: PeSet) -> FixedSubsetMatcher:
    return FixedSubsetMatcher(pe_set)


def is_k_periodic(pe_set: PeSet, k: int) -> bool:
    if k < 1:
        raise InvalidArgumentError("Period k must be >= 1")
    ctx = pe_set.ctx
    shift = shift_set(ctx, k)
    differences, differences_inverse = pdiff_sets(ctx, k)
    for factor in (shift, inverse_set(shift), differences, differences_inverse):
        if not inclusion(product(pe_set, factor).dfa, pe_set.dfa):
            return False
    return True


def is_recognizable_bounded(pe_set: PeSet, k_max: Optional[int] = None) -> RecognizabilityVerdict:
    """Least k <= k_max with a k-periodic set; k_max defaults to the DFA state count."""
    if k_max is None:
        k_max = pe_set.state_count
    if k_max < 1:
        raise InvalidArgumentError("k_max must be >= 1")
    for k in range(1, k_max + 1):
        if is_k_periodic(pe_set, k):
            logger.info(f"Set is {k}-periodic")
            return RecognizabilityVerdict(RECOGNIZABLE, k)
    logger.info(f"No period up to {k_max}")
    return RecognizabilityVerdict(NOT_PERIODIC_UP_TO, k_max)


def subgroup_automaton(ctx: GroupContext, generators: List[WordLike]) -> BsAutomaton:
    """One state with a loop for every generator and its inverse."""
    words = [as_word(generator) for generator in generators]
    if not words:
        raise InvalidArgumentError("Subgroup needs at least one generator")
    edges = []
    for word in words:
        edges.append(('s', word, 's'))
        edges.append(('s', word.inverse(), 's'))
    return BsAutomaton(ctx, ('s',), tuple(edges), 's', 's')


def has_finite_index_bounded(
    ctx: GroupContext,
    generators: List[WordLike],
    k_max: Optional[int] = None,
    thickness: Optional[int] = None,
) -> RecognizabilityVerdict:
    """A subgroup has finite index iff it is recognizable."""
    pe_set = compile_automaton(subgroup_automaton(ctx, generators), thickness)
    return is_recognizable_bounded(pe_set, k_max)


def parse_generator_list(text: str) -> List[GeneratorWord]:
    """'a; t^2' -> [a, t t]."""
    return [GeneratorWord.from_text(part) for part in text.split(';') if part.strip()]
