"""
Brute-force ground truth for the decision procedures.

Everything here is bounded and exhaustive: run enumeration by edge count,
sumsets by table, pe windows by token count. Nothing here shares code with
compile_engine, so agreement between the two is meaningful.

Design Decision: layered search over configurations
- reachable_elements explores (state, element) pairs breadth first and keeps
  each pair at its first layer; a later arrival at the same pair can only
  reach what the first one already reaches within the budget
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .bs_automata import BsAutomaton, RunRecord, enumerate_runs, normalize_edges
from .exceptions import InvalidArgumentError
from .group_core import GroupElement
from .pe_regular import PeSet
from .pointed_expansion import encode

logger = logging.getLogger(__name__)


def shortest_runs(a: BsAutomaton, max_run_len: int) -> Dict[GroupElement, int]:
    """Production -> edge count of its shortest accepting run, for runs of at most max_run_len edges."""
    if max_run_len < 0:
        raise InvalidArgumentError("Run budget must be >= 0")
    ctx = a.ctx
    images = {edge: ctx.eval_word(edge[1]) for edge in a.edges}
    start = (a.initial, ctx.identity())
    seen = {start}
    layer = [start]
    found = {start[1]: 0} if a.initial == a.final else {}
    for depth in range(1, max_run_len + 1):
        nxt_layer = []
        for state, element in layer:
            for edge in a.out_edges[state]:
                config = (edge[2], ctx.multiply(element, images[edge]))
                if config in seen:
                    continue
                seen.add(config)
                nxt_layer.append(config)
                if config[0] == a.final:
                    found.setdefault(config[1], depth)
        layer = nxt_layer
        if not layer:
            break
    logger.debug(f"Oracle explored {len(seen)} configurations, {len(found)} accepted elements")
    return found


def reachable_elements(a: BsAutomaton, max_run_len: int) -> Set[GroupElement]:
    """Productions of the accepting runs with at most max_run_len edges."""
    return set(shortest_runs(a, max_run_len))


def sumset_star(values: Iterable[int], limit: int) -> List[bool]:
    """table[n] is True iff n is a sum of members of values (empty sum allowed)."""
    if limit < 0:
        raise InvalidArgumentError("limit must be >= 0")
    parts = sorted({value for value in values if value > 0})
    table = [False] * (limit + 1)
    table[0] = True
    for n in range(1, limit + 1):
        table[n] = any(table[n - part] for part in parts if part <= n)
    return table


# =============================================================================
# Iteration counterexample
# =============================================================================

def smallest_integer_part(n: int, max_terms: int = 8, max_exponent: int = 8) -> Optional[int]:
    """
    Least m with m + (1/2 + ... + 1/2^n) a sum of terms 1 + 2^-d.

    Searches sums of 1..max_terms terms with 1 <= d <= max_exponent.
    """
    target = 1 - Fraction(1, 2 ** n)
    best = None
    for count in range(1, max_terms + 1):
        for exponents in combinations_with_replacement(range(1, max_exponent + 1), count):
            total = count + sum(Fraction(1, 2 ** d) for d in exponents)
            integer = total.numerator // total.denominator
            if total - integer == target and (best is None or integer < best):
                best = integer
    return best


def iteration_counterexample_check(n_max: int, max_terms: int = 8, max_exponent: int = 8) -> bool:
    """Is n the least integer part paired with 1/2 + ... + 1/2^n, for every n <= n_max?"""
    if n_max < 1:
        raise InvalidArgumentError("n_max must be >= 1")
    for n in range(1, n_max + 1):
        found = smallest_integer_part(n, max_terms, max_exponent)
        if found != n:
            logger.warning(f"Least integer part for n={n} is {found}")
            return False
    return True


# =============================================================================
# Windows
# =============================================================================

@dataclass(frozen=True)
class WindowReport:
    fixture: str
    max_pe_len: int
    max_run: int
    only_in_compiled: Tuple[GroupElement, ...] = field(default=())
    only_in_oracle: Tuple[GroupElement, ...] = field(default=())
    agreement_count: int = 0
    beyond_budget: Tuple[Tuple[GroupElement, int], ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.only_in_compiled and not self.only_in_oracle

    def to_text(self, ctx) -> str:
        lines = [
            f"fixture: {self.fixture}",
            f"max_pe_len: {self.max_pe_len}",
            f"max_run: {self.max_run}",
            f"agreement_count: {self.agreement_count}",
            f"only_in_compiled: {len(self.only_in_compiled)}",
        ]
        lines.extend(f"  {encode(ctx, g).to_text()}" for g in self.only_in_compiled)
        lines.append(f"only_in_oracle: {len(self.only_in_oracle)}")
        lines.extend(f"  {encode(ctx, g).to_text()}" for g in self.only_in_oracle)
        if self.beyond_budget:
            lines.append(f"beyond_budget: {len(self.beyond_budget)}")
            lines.extend(f"  {encode(ctx, g).to_text()} (run of {length})" for g, length in self.beyond_budget)
        lines.append(f"status: {'pass' if self.passed else 'fail'}")
        return '\n'.join(lines) + '\n'


def pe_length(ctx, g: GroupElement) -> int:
    """Token count of the canonical pe, sign included."""
    return len(encode(ctx, g).tokens())


def window_check(
    a: BsAutomaton,
    compiled: PeSet,
    max_run: int,
    max_pe_len: int,
    fixture: str = 'automaton',
    confirm_run: Optional[int] = None,
) -> WindowReport:
    """
    Compare compiled members and oracle productions whose pe has at most max_pe_len tokens.

    With confirm_run above max_run, compiled members whose shortest run is
    longer than max_run but at most confirm_run go to beyond_budget instead
    of only_in_compiled.
    """
    ctx = a.ctx
    witnesses = shortest_runs(a, max(max_run, confirm_run or 0))
    oracle = {g for g, length in witnesses.items() if length <= max_run and pe_length(ctx, g) <= max_pe_len}
    members = set(compiled.elements(max_pe_len))
    order = lambda g: (pe_length(ctx, g), encode(ctx, g).to_text())
    unmatched = sorted(members - oracle, key=order)
    report = WindowReport(
        fixture,
        max_pe_len,
        max_run,
        tuple(g for g in unmatched if g not in witnesses),
        tuple(sorted(oracle - members, key=order)),
        len(members & oracle),
        tuple((g, witnesses[g]) for g in unmatched if g in witnesses),
    )
    logger.info(f"Window check {fixture}: {report.agreement_count} agree, pass={report.passed}")
    return report


def magnitude_violations(a: BsAutomaton, max_len: int) -> List[RunRecord]:
    """Returning-left runs of the normalized automaton whose production exceeds q^(2 * length)."""
    normalized = normalize_edges(a)
    q = a.ctx.q
    violations = []
    for start in normalized.states:
        for end in normalized.states:
            for record in enumerate_runs(normalized, start, end, max_len, variant='returning_left'):
                production = record.metrics.production
                if abs(production.value(q)) > q ** (2 * len(record.edges)):
                    violations.append(record)
    return violations
