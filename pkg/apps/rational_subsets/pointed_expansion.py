"""
Pointed expansions: canonical base-q digit words with a radix and a cursor.

Text format (the wire format for elements everywhere):

    + 0c 1 1r

A sign token, then digit tokens most-significant first. A digit token is the
decimal digit value with an optional 'r' (radix, weight q^0) and then an
optional 'c' (cursor position m).
"""

import re
from dataclasses import dataclass
from typing import List, Tuple

from .exceptions import PeFormatError
from .group_core import GroupContext, GroupElement

SIGNS = ('+', '-')

_DIGIT_TOKEN_RE = re.compile(r'^(\d+)(r?)(c?)$')


def make_token(digit: int, radix: bool = False, cursor: bool = False) -> str:
    return f"{digit}{'r' if radix else ''}{'c' if cursor else ''}"


def split_token(token: str) -> Tuple[int, bool, bool]:
    """Digit token -> (digit, radix, cursor)."""
    match = _DIGIT_TOKEN_RE.match(token)
    if not match:
        raise PeFormatError(f"Bad digit token: {token!r}")
    return int(match.group(1)), bool(match.group(2)), bool(match.group(3))


def token_alphabet(q: int) -> List[str]:
    """Sign tokens followed by every digit token for base q."""
    tokens = list(SIGNS)
    for digit in range(q):
        for radix in (False, True):
            for cursor in (False, True):
                tokens.append(make_token(digit, radix, cursor))
    return tokens


@dataclass(frozen=True)
class PeWord:
    """Sign, digits (most significant first) and the indices carrying the markers."""
    sign: str
    digits: Tuple[int, ...]
    radix_index: int
    cursor_index: int

    def __post_init__(self):
        if self.sign not in SIGNS:
            raise PeFormatError(f"Bad sign: {self.sign!r}")
        if not self.digits:
            raise PeFormatError("Pointed expansion needs at least one digit")
        for index in (self.radix_index, self.cursor_index):
            if not 0 <= index < len(self.digits):
                raise PeFormatError(f"Marker index {index} outside the digit word")

    @property
    def cursor(self) -> int:
        return self.radix_index - self.cursor_index

    def tokens(self) -> Tuple[str, ...]:
        body = tuple(
            make_token(digit, index == self.radix_index, index == self.cursor_index)
            for index, digit in enumerate(self.digits)
        )
        return (self.sign,) + body

    def to_text(self) -> str:
        return ' '.join(self.tokens())

    @classmethod
    def from_tokens(cls, tokens) -> 'PeWord':
        tokens = list(tokens)
        if not tokens:
            raise PeFormatError("Empty pointed expansion")
        sign, body = tokens[0], tokens[1:]
        if sign not in SIGNS:
            raise PeFormatError(f"Expected sign token, got {sign!r}")
        digits, radix_index, cursor_index = [], None, None
        for index, token in enumerate(body):
            digit, radix, cursor = split_token(token)
            if radix:
                if radix_index is not None:
                    raise PeFormatError("Duplicate radix marker")
                radix_index = index
            if cursor:
                if cursor_index is not None:
                    raise PeFormatError("Duplicate cursor marker")
                cursor_index = index
            digits.append(digit)
        if radix_index is None or cursor_index is None:
            raise PeFormatError("Pointed expansion needs one radix and one cursor marker")
        return cls(sign, tuple(digits), radix_index, cursor_index)

    @classmethod
    def from_text(cls, text: str) -> 'PeWord':
        return cls.from_tokens(text.split())

    def is_canonical(self) -> bool:
        return self == _strip(self)

    def __str__(self):
        return self.to_text()


def _check_digits(ctx: GroupContext, word: PeWord):
    for digit in word.digits:
        if not 0 <= digit < ctx.q:
            raise PeFormatError(f"Digit {digit} out of range for q={ctx.q}")


def _strip(word: PeWord) -> PeWord:
    digits = list(word.digits)
    radix_index, cursor_index = word.radix_index, word.cursor_index
    while len(digits) > 1 and digits[0] == 0 and radix_index > 0 and cursor_index > 0:
        digits.pop(0)
        radix_index -= 1
        cursor_index -= 1
    last = len(digits) - 1
    while len(digits) > 1 and digits[-1] == 0 and radix_index < last and cursor_index < last:
        digits.pop()
        last -= 1
    sign = word.sign if any(digits) else '+'
    return PeWord(sign, tuple(digits), radix_index, cursor_index)


def encode(ctx: GroupContext, g: GroupElement) -> PeWord:
    """Canonical pointed expansion of g."""
    q = ctx.q
    magnitude = abs(g.num)
    low_digits = []  # base-q digits of |num|, least significant first
    while magnitude:
        magnitude, digit = divmod(magnitude, q)
        low_digits.append(digit)
    # low_digits[j] has position j - exp
    positions = [0, g.cursor]
    if low_digits:
        nonzero = [j - g.exp for j, digit in enumerate(low_digits) if digit]
        positions.extend((min(nonzero), max(nonzero)))
    low, high = min(positions), max(positions)
    digits = []
    for position in range(high, low - 1, -1):
        j = position + g.exp
        digits.append(low_digits[j] if 0 <= j < len(low_digits) else 0)
    sign = '-' if g.num < 0 else '+'
    return PeWord(sign, tuple(digits), high, high - g.cursor)


def decode(ctx: GroupContext, word: PeWord) -> GroupElement:
    """Element denoted by a (possibly padded) pointed expansion."""
    _check_digits(ctx, word)
    num = 0
    for digit in word.digits:
        num = num * ctx.q + digit
    # the last digit has position radix_index - (len - 1)
    low_position = word.radix_index - (len(word.digits) - 1)
    if word.sign == '-':
        num = -num
    return ctx.element(num, -low_position, word.cursor)


def canonicalize(ctx: GroupContext, raw: PeWord) -> PeWord:
    """Strip removable zeros from both ends; value and markers are preserved."""
    _check_digits(ctx, raw)
    return _strip(raw)


def encode_text(ctx: GroupContext, g: GroupElement) -> str:
    return encode(ctx, g).to_text()


def decode_text(ctx: GroupContext, text: str) -> GroupElement:
    return decode(ctx, PeWord.from_text(text))


def decode_tokens(ctx: GroupContext, tokens) -> GroupElement:
    return decode(ctx, PeWord.from_tokens(tokens))
