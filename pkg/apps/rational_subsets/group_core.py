"""
Exact arithmetic in BS(1,q), the semidirect product Z[1/q] x Z.

An element is a pair (r, m) with r = num / q^exp and cursor m.
Multiplication is (r, m)(r', m') = (r + q^m r', m + m').

Design Decision: num / q^exp with eager normalization
- exp = 0 or q does not divide num, so equal values are equal dataclasses
- Python integers give arbitrary precision for free
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple, Union

from .exceptions import GeneratorWordError, InvalidArgumentError

GENERATORS = ('a', 'a^-1', 't', 't^-1')

_TOKEN_RE = re.compile(r'([at])((?:\^[+-]?\d+)*)')
_CHUNK_RE = re.compile(r'^(?:[at](?:\^[+-]?\d+)*)+$')
_SUPERSCRIPT_INVERSE = '⁻¹'


@dataclass(frozen=True)
class GroupElement:
    """Normalized element (num / q^exp, cursor). Build through GroupContext."""
    num: int
    exp: int
    cursor: int

    def value(self, q: int) -> Fraction:
        return Fraction(self.num, q ** self.exp)

    def is_integer(self) -> bool:
        return self.exp == 0


@dataclass(frozen=True)
class GeneratorWord:
    """Word over a, a^-1, t, t^-1 with exponents already expanded."""
    tokens: Tuple[str, ...] = ()

    def __post_init__(self):
        for token in self.tokens:
            if token not in GENERATORS:
                raise GeneratorWordError(f"Unknown generator token: {token!r}")

    def __len__(self):
        return len(self.tokens)

    def __add__(self, other: 'GeneratorWord') -> 'GeneratorWord':
        return GeneratorWord(self.tokens + other.tokens)

    @classmethod
    def from_text(cls, text: str) -> 'GeneratorWord':
        """
        Parse whitespace-separated tokens.

        Accepts a, t, a^-1, t^-1, exponents such as t^-2 or a^3 (stacked
        exponents multiply), the identity token 1 and the superscript form t⁻¹.
        """
        tokens = []
        for raw in text.split():
            chunk = raw.replace(_SUPERSCRIPT_INVERSE, '^-1')
            if chunk == '1':
                continue
            if not _CHUNK_RE.match(chunk):
                raise GeneratorWordError(f"Unknown generator token: {raw!r}")
            # juxtaposed generators such as "tat" are read letter by letter
            for match in _TOKEN_RE.finditer(chunk):
                base = match.group(1)
                power = 1
                for exponent in re.findall(r'\^([+-]?\d+)', match.group(2)):
                    power *= int(exponent)
                symbol = base if power > 0 else f"{base}^-1"
                tokens.extend([symbol] * abs(power))
        return cls(tuple(tokens))

    def to_text(self) -> str:
        return ' '.join(self.tokens)

    def inverse(self) -> 'GeneratorWord':
        flipped = {'a': 'a^-1', 'a^-1': 'a', 't': 't^-1', 't^-1': 't'}
        return GeneratorWord(tuple(flipped[token] for token in reversed(self.tokens)))

    def __str__(self):
        return self.to_text() or '1'


WordLike = Union[GeneratorWord, str]


def as_word(word: WordLike) -> GeneratorWord:
    if isinstance(word, GeneratorWord):
        return word
    return GeneratorWord.from_text(word)


@dataclass(frozen=True)
class GroupContext:
    """The base q of BS(1,q)."""
    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 2:
            raise InvalidArgumentError(f"q must be an integer >= 2, got {self.q!r}")

    # -------------------------------------------------------------------------
    # Construction
    # -------------------------------------------------------------------------

    def element(self, num: int, exp: int = 0, cursor: int = 0) -> GroupElement:
        """Normalized element num / q^exp with the given cursor."""
        q = self.q
        if exp < 0:
            num *= q ** (-exp)
            exp = 0
        if num == 0:
            return GroupElement(0, 0, cursor)
        while exp > 0 and num % q == 0:
            num //= q
            exp -= 1
        return GroupElement(num, exp, cursor)

    def from_fraction(self, value: Union[Fraction, int], cursor: int = 0) -> GroupElement:
        """Element with r = value; value must lie in Z[1/q]."""
        value = Fraction(value)
        den = value.denominator
        exp, scale = 0, 1
        while scale % den:
            scale *= self.q
            exp += 1
            if exp > den.bit_length():
                raise InvalidArgumentError(f"{value} is not in Z[1/{self.q}]")
        return self.element(value.numerator * (scale // den), exp, cursor)

    def identity(self) -> GroupElement:
        return GroupElement(0, 0, 0)

    def generator(self, symbol: str) -> GroupElement:
        images = {
            'a': (1, 0),
            'a^-1': (-1, 0),
            't': (0, 1),
            't^-1': (0, -1),
        }
        symbol = symbol.replace(_SUPERSCRIPT_INVERSE, '^-1')
        if symbol not in images:
            raise GeneratorWordError(f"Unknown generator: {symbol!r}")
        num, cursor = images[symbol]
        return GroupElement(num, 0, cursor)

    # -------------------------------------------------------------------------
    # Group law
    # -------------------------------------------------------------------------

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """(r + q^m r', m + m') computed on integers only."""
        q = self.q
        shifted_exp = h.exp - g.cursor  # q^m r' = h.num / q^shifted_exp
        exp = max(g.exp, shifted_exp, 0)
        num = g.num * q ** (exp - g.exp) + h.num * q ** (exp - shifted_exp)
        return self.element(num, exp, g.cursor + h.cursor)

    def inverse(self, g: GroupElement) -> GroupElement:
        """(-q^-m r, -m)."""
        return self.element(-g.num, g.exp + g.cursor, -g.cursor)

    def product(self, elements: Iterable[GroupElement]) -> GroupElement:
        result = self.identity()
        for element in elements:
            result = self.multiply(result, element)
        return result

    def eval_word(self, word: WordLike) -> GroupElement:
        """Left-to-right product of the generator images."""
        return self.product(self.generator(token) for token in as_word(word).tokens)

    def shift(self, g: GroupElement, positions: int) -> GroupElement:
        """g with the cursor moved by the given amount, r unchanged."""
        return GroupElement(g.num, g.exp, g.cursor + positions)

    # -------------------------------------------------------------------------
    # Text
    # -------------------------------------------------------------------------

    def format(self, g: GroupElement) -> str:
        """Render as (r, m), r as an exact fraction."""
        return f"({g.value(self.q)}, {g.cursor})"
