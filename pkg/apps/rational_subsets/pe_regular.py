"""
PE-regular subsets of BS(1,q): regular languages of canonical pointed expansions.

A PeSet wraps a minimal DFA over the pe token alphabet whose language is
contained in the universe of canonical pe words, so DFA equality is set
equality.

Design Decision: Signed-digit columns as the common intermediate form
- Product and the compile pipeline produce words of Columns whose values
  are signed digit sums
- normalize_columns guesses the result sign and carries top-down, emitting
  the base-q digits of the same value
- strip_zero_padding and the universe intersection finish canonicalization
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .automata_kit import (
    EPSILON,
    Dfa,
    Nfa,
    build_dfa,
    build_nfa,
    determinize_minimize,
    difference,
    enumerate_words,
    intersect,
    is_empty,
    relabel,
    shortest_word,
    union,
)
from .exceptions import AutomatonFormatError, ContextMismatchError, InvalidArgumentError
from .group_core import GroupContext, GroupElement
from .pointed_expansion import SIGNS, PeWord, decode_tokens, encode, make_token, split_token, token_alphabet

logger = logging.getLogger(__name__)

PE_SET_OPS = ('union', 'intersect', 'difference', 'complement')
INTEGER_SIGNS = ('nonneg', 'nonpos', 'all')


class Column(NamedTuple):
    """One digit position: value (a digit or a signed digit sum), markers, and visiting states."""
    value: int
    radix: bool
    cursor: bool
    states: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class SignedDigitWord:
    """Columns most significant first, digits in B_q; not unique per value."""
    columns: Tuple[Column, ...]

    def element(self, ctx: GroupContext) -> GroupElement:
        radix = [index for index, column in enumerate(self.columns) if column.radix]
        cursor = [index for index, column in enumerate(self.columns) if column.cursor]
        if len(radix) != 1 or len(cursor) != 1:
            raise InvalidArgumentError("Signed-digit word needs one radix and one cursor column")
        num = 0
        for column in self.columns:
            num = num * ctx.q + column.value
        low_position = radix[0] - (len(self.columns) - 1)
        return ctx.element(num, -low_position, radix[0] - cursor[0])

    @classmethod
    def from_pe(cls, word: PeWord) -> 'SignedDigitWord':
        sign = -1 if word.sign == '-' else 1
        return cls(tuple(
            Column(sign * digit, index == word.radix_index, index == word.cursor_index)
            for index, digit in enumerate(word.digits)
        ))


# =============================================================================
# PeSet
# =============================================================================

@dataclass(frozen=True)
class PeSet:
    ctx: GroupContext
    dfa: Dfa

    def __post_init__(self):
        if self.dfa.alphabet != frozenset(token_alphabet(self.ctx.q)):
            raise InvalidArgumentError("PeSet DFA must use the pe token alphabet of its base")

    @classmethod
    def from_language(cls, ctx: GroupContext, dfa: Dfa) -> 'PeSet':
        """Restrict an arbitrary token language to canonical words."""
        return cls(ctx, intersect(dfa, _universe_dfa(ctx.q)))

    def contains(self, g: GroupElement) -> bool:
        return self.dfa.accepts(encode(self.ctx, g).tokens())

    def is_empty(self) -> bool:
        return is_empty(self.dfa)

    def shortest_member(self) -> Optional[GroupElement]:
        word = shortest_word(self.dfa)
        return None if word is None else decode_tokens(self.ctx, word)

    def elements(self, max_tokens: int) -> List[GroupElement]:
        """Members whose pe has at most max_tokens tokens, sign included."""
        return [decode_tokens(self.ctx, word) for word in enumerate_words(self.dfa, max_tokens)]

    @property
    def state_count(self) -> int:
        return len(self.dfa.states)

    def dump(self) -> str:
        return f"pe q={self.ctx.q}\n" + self.dfa.to_text()


def parse_pe_set(text: str) -> PeSet:
    """Read a dump written by PeSet.dump."""
    header, _, body = text.lstrip().partition('\n')
    parts = header.split()
    if len(parts) != 2 or parts[0] != 'pe' or not parts[1].startswith('q='):
        raise AutomatonFormatError("PE-set dump must start with 'pe q=<int>'", line=1)
    try:
        ctx = GroupContext(int(parts[1][2:]))
    except ValueError:
        raise AutomatonFormatError(f"Bad base: {parts[1]}", line=1)
    dfa = Dfa.from_text(body)
    if dfa.alphabet != frozenset(token_alphabet(ctx.q)):
        raise AutomatonFormatError(f"DFA alphabet does not match the pe tokens of q={ctx.q}")
    return PeSet.from_language(ctx, dfa)


def _same_context(*sets: PeSet) -> GroupContext:
    ctx = sets[0].ctx
    for other in sets[1:]:
        if other.ctx != ctx:
            raise ContextMismatchError(f"PE sets over q={ctx.q} and q={other.ctx.q}")
    return ctx


# =============================================================================
# Universe and Boolean algebra
# =============================================================================

_UNIVERSE_CACHE = {}


def _universe_dfa(q: int) -> Dfa:
    """Canonical pe words: sign, digits, one radix, one cursor, no removable zeros, zero signed +."""
    if q in _UNIVERSE_CACHE:
        return _UNIVERSE_CACHE[q]

    # state: (sign, has_radix, has_cursor, nonzero_seen, last_is_bare_zero, empty)
    def step(state, token):
        if state == 'start':
            return (token, False, False, False, False, True) if token in SIGNS else None
        if token in SIGNS:
            return None
        sign, has_radix, has_cursor, nonzero, _, empty = state
        digit, radix, cursor = split_token(token)
        if (radix and has_radix) or (cursor and has_cursor):
            return None
        bare_zero = digit == 0 and not radix and not cursor
        if empty and bare_zero:
            return None
        return (sign, has_radix or radix, has_cursor or cursor, nonzero or digit != 0, bare_zero, False)

    def is_final(state):
        if state == 'start':
            return False
        sign, has_radix, has_cursor, nonzero, bare_zero, empty = state
        return has_radix and has_cursor and not bare_zero and not empty and (sign == '+' or nonzero)

    dfa = build_dfa(token_alphabet(q), 'start', step, is_final)
    _UNIVERSE_CACHE[q] = dfa
    return dfa


def universe(ctx: GroupContext) -> PeSet:
    return PeSet(ctx, _universe_dfa(ctx.q))


def empty_set(ctx: GroupContext) -> PeSet:
    return PeSet(ctx, difference(_universe_dfa(ctx.q), _universe_dfa(ctx.q)))


def boolean(a: PeSet, b: Optional[PeSet], op: str) -> PeSet:
    """union, intersect, difference, or complement of a (b ignored) relative to the universe."""
    if op not in PE_SET_OPS:
        raise InvalidArgumentError(f"Unknown set operation: {op}")
    if op == 'complement':
        return PeSet(a.ctx, difference(_universe_dfa(a.ctx.q), a.dfa))
    ctx = _same_context(a, b)
    combined = {'union': union, 'intersect': intersect, 'difference': difference}[op](a.dfa, b.dfa)
    return PeSet(ctx, combined)


def complement(a: PeSet) -> PeSet:
    return boolean(a, None, 'complement')


def singleton(ctx: GroupContext, g: GroupElement) -> PeSet:
    return finite_set(ctx, [g])


def finite_set(ctx: GroupContext, elements: Iterable[GroupElement]) -> PeSet:
    """Trie over the pe words of the given elements."""
    words = {encode(ctx, g).tokens() for g in elements}
    prefixes = {word[:length] for word in words for length in range(len(word) + 1)}

    def step(prefix, token):
        extended = prefix + (token,)
        return extended if extended in prefixes else None

    return PeSet(ctx, build_dfa(token_alphabet(ctx.q), (), step, lambda prefix: prefix in words))


def membership(a: PeSet, g: GroupElement) -> bool:
    return a.contains(g)


def to_pe_set(ctx: GroupContext, nfa: Nfa) -> PeSet:
    """Canonical PeSet from a token NFA whose words may carry removable zeros."""
    return PeSet.from_language(ctx, strip_zero_padding(ctx, determinize_minimize(nfa, token_alphabet(ctx.q))))


# =============================================================================
# Signed-digit addition
# =============================================================================

def signed_digits(q: int) -> List[int]:
    return list(range(-(q - 1), q))


def addition_transducer(ctx: GroupContext) -> Dfa:
    """
    Aligned triples (d1, d2, d3) over B_q, most significant first, accepted
    iff value3 = value1 + value2.

    The state c is the amount the unread lower positions must still
    contribute, in units of the last read position; |c| <= 2.
    """
    q = ctx.q
    digits = signed_digits(q)
    alphabet = [(d1, d2, d3) for d1 in digits for d2 in digits for d3 in digits]

    def step(carry, triple):
        d1, d2, d3 = triple
        nxt = q * carry + d1 + d2 - d3
        return nxt if abs(nxt) <= 2 else None

    return build_dfa(alphabet, 0, step, lambda carry: carry == 0)


def _carry_bound(q: int, magnitude: int) -> int:
    return (magnitude + q - 1) // (q - 1)


def normalize_columns(ctx: GroupContext, columns: Dfa, keep_states: bool = False) -> Dfa:
    """
    Rewrite every accepted Column word into the base-q digits of its value.

    The result sign is guessed up front and verified by the carry returning
    to zero; extra top columns absorb overflow. Without keep_states the
    output is over pe tokens and may still carry removable zeros; with
    keep_states the output is sign + Column words with states preserved.
    """
    q = ctx.q
    magnitude = max((abs(column.value) for column in columns.alphabet), default=0)
    bound = _carry_bound(q, magnitude)
    live = columns.live_states
    sources = sorted(columns.alphabet, key=lambda column: (column.value, column.radix, column.cursor, sorted(column.states)))

    def emit(digit, radix, cursor, states):
        if keep_states:
            return Column(digit, radix, cursor, states)
        return make_token(digit, radix, cursor)

    # state: (phase, source, sign, carry, nonzero_seen)
    def moves(state):
        if state == 'start':
            for sign in SIGNS:
                yield sign, ('top', columns.initial, sign, 0, False)
            return
        phase, source, sign, carry, nonzero = state
        factor = -1 if sign == '-' else 1
        if phase == 'top':
            for digit in range(0 if nonzero else 1, q):
                nxt = q * carry - factor * digit
                if abs(nxt) <= bound:
                    yield emit(digit, False, False, frozenset()), ('top', source, sign, nxt, True)
        for column in sources:
            target = columns.delta[source][column]
            if target not in live:
                continue
            for digit in range(q):
                nxt = q * carry - factor * digit + column.value
                if abs(nxt) <= bound:
                    symbol = emit(digit, column.radix, column.cursor, column.states)
                    yield symbol, ('body', target, sign, nxt, nonzero or digit != 0)

    def is_final(state):
        if state == 'start':
            return False
        phase, source, sign, carry, nonzero = state
        return phase == 'body' and carry == 0 and source in columns.finals and (sign == '+' or nonzero)

    alphabet = () if keep_states else token_alphabet(q)
    nfa = build_nfa(alphabet, ['start'], moves, is_final, name='carry normalizer', extend_alphabet=keep_states)
    return determinize_minimize(nfa)


def strip_zero_padding(ctx: GroupContext, padded: Dfa) -> Dfa:
    """Words obtained by dropping any number of bare leading or trailing zero tokens."""
    live = padded.live_states

    def moves(state):
        phase, source = state
        if phase == 'sign':
            for sign in SIGNS:
                target = padded.delta[source][sign]
                if target in live:
                    yield sign, ('lead', target)
            return
        if phase in ('lead', 'trail'):
            target = padded.delta[source]['0']
            if target in live:
                yield EPSILON, (phase, target)
        if phase in ('lead', 'body'):
            for token in token_alphabet(ctx.q)[len(SIGNS):]:
                target = padded.delta[source][token]
                if target in live:
                    yield token, ('body', target)
        if phase == 'body':
            yield EPSILON, ('trail', source)

    nfa = build_nfa(
        token_alphabet(ctx.q),
        [('sign', padded.initial)],
        moves,
        lambda state: state[0] == 'trail' and state[1] in padded.finals,
        name='zero stripper',
    )
    return determinize_minimize(nfa, token_alphabet(ctx.q))


# =============================================================================
# Product and inverse
# =============================================================================

def product(a: PeSet, b: PeSet) -> PeSet:
    """
    {gh | g in a, h in b}.

    The pe of h is shifted so that its radix sits under the cursor of g;
    the aligned digits are added as signed columns and renormalized. The
    result keeps the radix of g and the cursor of h.
    """
    ctx = _same_context(a, b)
    first, second = a.dfa, b.dfa
    live1, live2 = first.live_states, second.live_states
    digit_tokens = token_alphabet(ctx.q)[len(SIGNS):]

    def advance(dfa, live, source, token):
        target = dfa.delta[source][token]
        return target if target in live else None

    def track_options(mode, source, dfa, live):
        """(token or None, next mode, next source) choices for one track in one column."""
        if mode != 'in':
            yield None, mode, source
        if mode == 'post':
            return
        for token in digit_tokens:
            target = advance(dfa, live, source, token)
            if target is not None:
                yield token, 'in', target

    # state: (mode1, source1, sign1, mode2, source2, sign2)
    def moves(state):
        if state == 'start':
            for sign1 in SIGNS:
                for sign2 in SIGNS:
                    s1 = advance(first, live1, first.initial, sign1)
                    s2 = advance(second, live2, second.initial, sign2)
                    if s1 is not None and s2 is not None:
                        yield EPSILON, ('pre', s1, sign1, 'pre', s2, sign2)
            return
        mode1, s1, sign1, mode2, s2, sign2 = state
        if mode1 == 'in' and s1 in first.finals:
            yield EPSILON, ('post', s1, sign1, mode2, s2, sign2)
        if mode2 == 'in' and s2 in second.finals:
            yield EPSILON, (mode1, s1, sign1, 'post', s2, sign2)
        for token1, next1, t1 in track_options(mode1, s1, first, live1):
            for token2, next2, t2 in track_options(mode2, s2, second, live2):
                if token1 is None and token2 is None:
                    continue
                d1, r1, c1 = split_token(token1) if token1 else (0, False, False)
                d2, r2, c2 = split_token(token2) if token2 else (0, False, False)
                if c1 != r2:
                    continue
                value = (-d1 if sign1 == '-' else d1) + (-d2 if sign2 == '-' else d2)
                yield Column(value, r1, c2), (next1, t1, sign1, next2, t2, sign2)

    nfa = build_nfa(
        (), ['start'], moves,
        lambda state: state != 'start' and state[0] == 'post' and state[3] == 'post',
        name='product alignment', extend_alphabet=True,
    )
    if not nfa.alphabet:
        return empty_set(ctx)
    columns = determinize_minimize(nfa)
    result = PeSet.from_language(ctx, strip_zero_padding(ctx, normalize_columns(ctx, columns)))
    logger.debug(f"Product of {a.state_count}- and {b.state_count}-state sets: {result.state_count} states")
    return result


def _swap_markers(token: str, flip_sign: bool) -> str:
    if token in SIGNS:
        if not flip_sign:
            return token
        return '-' if token == '+' else '+'
    digit, radix, cursor = split_token(token)
    return make_token(digit, cursor, radix)


def inverse_set(a: PeSet) -> PeSet:
    """
    {g^-1 | g in a}.

    g^-1 = (-q^-m r, -m) has the digits of g with the radix and cursor
    markers exchanged and the sign flipped; zero keeps its + sign.
    """
    ctx = a.ctx
    alphabet = token_alphabet(ctx.q)
    flipped = relabel(a.dfa.to_nfa(), lambda token: _swap_markers(token, True), alphabet)
    zeros = intersect(a.dfa, pure_cursor_moves(ctx).dfa)
    swapped = relabel(zeros.to_nfa(), lambda token: _swap_markers(token, False), alphabet)
    result = union(determinize_minimize(flipped, alphabet), determinize_minimize(swapped, alphabet))
    return PeSet.from_language(ctx, result)


# =============================================================================
# Integer and shift predicates
# =============================================================================

def _check_sign(sign: str):
    if sign not in INTEGER_SIGNS:
        raise InvalidArgumentError(f"Unknown integer sign class: {sign}")


def integers(ctx: GroupContext, sign: str = 'all') -> PeSet:
    """pe(N), pe(-N) or pe(Z) with cursor 0: radix and cursor on the last digit."""
    _check_sign(sign)
    allowed = {'nonneg': ('+',), 'nonpos': ('-',), 'all': SIGNS}[sign]

    def step(state, token):
        if state == 'start':
            return 'digits' if token in allowed else None
        if state == 'end' or token in SIGNS:
            return None
        _, radix, cursor = split_token(token)
        if radix != cursor:
            return None
        return 'end' if radix else 'digits'

    result = PeSet.from_language(ctx, build_dfa(token_alphabet(ctx.q), 'start', step, lambda state: state == 'end'))
    if sign == 'nonpos':
        result = boolean(result, singleton(ctx, ctx.identity()), 'union')
    return result


def divisible(ctx: GroupContext, d: int, sign: str = 'nonneg') -> PeSet:
    """pe(dN) (or dZ, -dN) by Horner's rule modulo d, most significant digit first."""
    if d == 0:
        raise InvalidArgumentError("Divisor must be nonzero")
    d = abs(d)
    q = ctx.q

    def step(remainder, token):
        if remainder == 'start':
            return 0 if token in SIGNS else None
        if token in SIGNS:
            return None
        digit, _, _ = split_token(token)
        return (remainder * q + digit) % d

    residues = build_dfa(token_alphabet(q), 'start', step, lambda state: state == 0)
    return boolean(integers(ctx, sign), PeSet(ctx, intersect(residues, _universe_dfa(q))), 'intersect')


def integer_digits(q: int, n: int) -> List[int]:
    """Base-q digits of n >= 0, most significant first."""
    if n == 0:
        return [0]
    digits = []
    while n:
        n, digit = divmod(n, q)
        digits.append(digit)
    return digits[::-1]


def above(ctx: GroupContext, bound: int, negative: bool = False) -> PeSet:
    """pe({n > bound}) over nonnegative integers, or pe({n < -bound}) when negative."""
    if bound < 0:
        raise InvalidArgumentError("Bound must be >= 0")
    reference = integer_digits(ctx.q, bound)
    length = len(reference)

    # state: (count, comparison) with comparison in 'lt' 'eq' 'gt' against the prefix of bound
    def step(state, token):
        if state == 'start':
            return (0, 'eq') if token in SIGNS else None
        if token in SIGNS:
            return None
        count, comparison = state
        digit, _, _ = split_token(token)
        if count >= length:
            return (length + 1, comparison)
        if comparison == 'eq':
            expected = reference[count]
            comparison = 'gt' if digit > expected else 'lt' if digit < expected else 'eq'
        return (count + 1, comparison)

    def is_final(state):
        if state == 'start':
            return False
        count, comparison = state
        return count > length or (count == length and comparison == 'gt')

    magnitudes = PeSet(ctx, intersect(build_dfa(token_alphabet(ctx.q), 'start', step, is_final), _universe_dfa(ctx.q)))
    return boolean(magnitudes, integers(ctx, 'nonpos' if negative else 'nonneg'), 'intersect')


def at_most(ctx: GroupContext, bound: int, negative: bool = False) -> PeSet:
    """Integers in [0, bound], or in [-bound, 0] when negative."""
    base = integers(ctx, 'nonpos' if negative else 'nonneg')
    return boolean(base, above(ctx, bound, negative), 'difference')


def finite_integers(ctx: GroupContext, values: Iterable[int]) -> PeSet:
    return finite_set(ctx, [ctx.element(value) for value in values])


def cursor_congruence(ctx: GroupContext, modulus: int, residue: int) -> PeSet:
    """All elements whose cursor m satisfies m = residue (mod modulus)."""
    if modulus < 1:
        raise InvalidArgumentError("Modulus must be >= 1")
    residue %= modulus

    # state: (markers seen, distance mod modulus, cursor came first)
    def step(state, token):
        if state == 'start':
            return ('none', 0, False) if token in SIGNS else None
        if token in SIGNS:
            return None
        seen, distance, cursor_first = state
        _, radix, cursor = split_token(token)
        if seen == 'none':
            if radix and cursor:
                return ('both', 0, False)
            if radix or cursor:
                return ('one', 1 % modulus, cursor)
            return state
        if seen == 'one':
            if radix or cursor:
                return ('both', distance, cursor_first)
            return ('one', (distance + 1) % modulus, cursor_first)
        return state

    def is_final(state):
        if state == 'start' or state[0] != 'both':
            return False
        _, distance, cursor_first = state
        cursor = distance if cursor_first else -distance
        return cursor % modulus == residue

    return PeSet.from_language(ctx, build_dfa(token_alphabet(ctx.q), 'start', step, is_final))


def pure_cursor_moves(ctx: GroupContext) -> PeSet:
    """pe({(0, m) | m in Z}): every digit is zero."""
    def step(state, token):
        if state == 'start':
            return 'digits' if token == '+' else None
        if token in SIGNS:
            return None
        digit, _, _ = split_token(token)
        return 'digits' if digit == 0 else None

    return PeSet.from_language(ctx, build_dfa(token_alphabet(ctx.q), 'start', step, lambda state: state == 'digits'))


def shift_set(ctx: GroupContext, k: int) -> PeSet:
    """The singleton {(0, k)}."""
    return singleton(ctx, ctx.element(0, 0, k))


def pdiff_sets(ctx: GroupContext, k: int) -> Tuple[PeSet, PeSet]:
    """
    H_k = {(q^l - q^(l+k), 0) | l in Z} and its inverse {(q^(l+k) - q^l, 0)}.

    Both are a block of k digits q-1 at any offset with radix and cursor on
    the same token; H_k carries the minus sign.
    """
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    top = ctx.q - 1

    # state: (block digits read, markers placed)
    def builder(sign):
        def step(state, token):
            if state == 'start':
                return (0, False) if token == sign else None
            if token in SIGNS:
                return None
            count, marked = state
            digit, radix, cursor = split_token(token)
            if radix != cursor or (radix and marked):
                return None
            marked = marked or radix
            if digit == top:
                return (count + 1, marked) if count < k else None
            if digit != 0 or 0 < count < k:
                return None
            return (0 if count == 0 else k + 1, marked)

        def is_final(state):
            return state != 'start' and state[0] in (k, k + 1) and state[1]

        return PeSet.from_language(ctx, build_dfa(token_alphabet(ctx.q), 'start', step, is_final))

    return builder('-'), builder('+')
