"""
Succinct automata: transition relations given by propositional formulas.

A succinct automaton on n state bits has one formula per symbol (and one for
epsilon) over the variables v1..vn of the source state and v1'..vn' of the
target state. The explicit automaton has 2^n states, so it is only built on
request (expand) and under settings.BS_SUCCINCT_EXPAND_LIMIT.

Text format:

    succinct n=2 alphabet=0,1
    phi 0 := (!v1 & !v1') | (v1 & v1')
    phi 1 := v1'
    phi eps := false
    p0=00 pf=11

Design Decision: interned formula DAG
- Every formula node is interned, so equal subformulas are the same object
  and identity hashing is enough for memo tables
- Formula size is the number of distinct nodes
- Successors are enumerated by assigning primed variables one at a time,
  folding constants after each assignment and following forced literals
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from django.conf import settings

from .automata_kit import EPSILON, Nfa, symbol_key
from .exceptions import ExpansionLimitExceeded, FormulaError, InvalidArgumentError

logger = logging.getLogger(__name__)

EPSILON_SYMBOL = 'eps'

Bits = Tuple[int, ...]


# =============================================================================
# Formulas
# =============================================================================

class Formula:
    """Interned formula node; build through const/var/neg/conj/disj."""
    __slots__ = ('op', 'args', '__weakref__')

    def __init__(self, op: str, args: tuple):
        self.op = op
        self.args = args

    @property
    def is_const(self) -> bool:
        return self.op == 'const'

    def __repr__(self):
        return f"Formula({to_text(self)})"


_INTERNED: Dict[tuple, Formula] = {}


def _node(op: str, args: tuple) -> Formula:
    key = (op, args)
    node = _INTERNED.get(key)
    if node is None:
        node = Formula(op, args)
        _INTERNED[key] = node
    return node


TRUE = _node('const', (True,))
FALSE = _node('const', (False,))


def const(value: bool) -> Formula:
    return TRUE if value else FALSE


def var(index: int, primed: bool = False) -> Formula:
    if index < 1:
        raise InvalidArgumentError("Variables are numbered from 1")
    return _node('var', (index, primed))


def neg(formula: Formula) -> Formula:
    if formula.is_const:
        return const(not formula.args[0])
    if formula.op == 'not':
        return formula.args[0]
    return _node('not', (formula,))


def _connective(op: str, absorbing: Formula, neutral: Formula, parts: Iterable[Formula]) -> Formula:
    children: List[Formula] = []
    seen = set()
    for part in parts:
        if part is absorbing:
            return absorbing
        if part is neutral:
            continue
        flattened = part.args if part.op == op else (part,)
        for child in flattened:
            if id(child) not in seen:
                seen.add(id(child))
                children.append(child)
    if not children:
        return neutral
    if len(children) == 1:
        return children[0]
    return _node(op, tuple(children))


def conj(*parts: Formula) -> Formula:
    return _connective('and', FALSE, TRUE, parts)


def disj(*parts: Formula) -> Formula:
    return _connective('or', TRUE, FALSE, parts)


def xor(a: Formula, b: Formula) -> Formula:
    return disj(conj(a, neg(b)), conj(neg(a), b))


def iff(a: Formula, b: Formula) -> Formula:
    return disj(conj(a, b), conj(neg(a), neg(b)))


def majority(a: Formula, b: Formula, c: Formula) -> Formula:
    return disj(conj(a, b), conj(a, c), conj(b, c))


def to_nnf(formula: Formula) -> Formula:
    """Push negations down to the variables."""
    memo: Dict[Tuple[int, bool], Formula] = {}

    def walk(node: Formula, positive: bool) -> Formula:
        key = (id(node), positive)
        if key in memo:
            return memo[key]
        op = node.op
        if op == 'const':
            result = const(node.args[0] == positive)
        elif op == 'var':
            result = node if positive else neg(node)
        elif op == 'not':
            result = walk(node.args[0], not positive)
        else:
            children = [walk(child, positive) for child in node.args]
            if (op == 'and') == positive:
                result = conj(*children)
            else:
                result = disj(*children)
        memo[key] = result
        return result

    return walk(formula, True)


def nodes(formula: Formula) -> List[Formula]:
    """Distinct nodes reachable from formula."""
    seen = {}
    stack = [formula]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen[id(node)] = node
        if node.op in ('not', 'and', 'or'):
            stack.extend(node.args)
    return list(seen.values())


def formula_size(formula: Formula) -> int:
    return len(nodes(formula))


def variables(formula: Formula) -> List[Tuple[int, bool]]:
    return sorted({node.args for node in nodes(formula) if node.op == 'var'})


def substitute(formula: Formula, assignment: Dict[Tuple[int, bool], bool]) -> Formula:
    """Partial evaluation: fix the assigned variables and fold constants."""
    memo: Dict[int, Formula] = {}

    def walk(node: Formula) -> Formula:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        op = node.op
        if op == 'const':
            result = node
        elif op == 'var':
            result = const(assignment[node.args]) if node.args in assignment else node
        elif op == 'not':
            result = neg(walk(node.args[0]))
        elif op == 'and':
            result = conj(*(walk(child) for child in node.args))
        else:
            result = disj(*(walk(child) for child in node.args))
        memo[id(node)] = result
        return result

    return walk(formula)


def evaluate(formula: Formula, assignment: Dict[Tuple[int, bool], bool]) -> bool:
    result = substitute(formula, assignment)
    if not result.is_const:
        raise InvalidArgumentError(f"Unassigned variables in {to_text(result)}")
    return result.args[0]


def forced_literals(formula: Formula) -> Dict[Tuple[int, bool], bool]:
    """Literals that every satisfying assignment must set (top-level unit clauses)."""
    parts = formula.args if formula.op == 'and' else (formula,)
    forced = {}
    for part in parts:
        if part.op == 'var':
            forced[part.args] = True
        elif part.op == 'not' and part.args[0].op == 'var':
            forced[part.args[0].args] = False
    return forced


# -----------------------------------------------------------------------------
# Formula text
# -----------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<var>v(?P<index>\d+)(?P<prime>')?)|(?P<word>true|false)|(?P<op>[&|!()]))")


def _tokenize(text: str) -> List[str]:
    tokens = []
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN_RE.match(stripped, position)
        if match is None:
            raise FormulaError(f"Unexpected input at {stripped[position:]!r}")
        tokens.append(match.group('var') or match.group('word') or match.group('op'))
        position = match.end()
    return tokens


def parse_formula(text: str) -> Formula:
    """Parse '!', '&', '|' (in decreasing precedence), parentheses, v<i>, v<i>', true, false."""
    tokens = _tokenize(text)
    position = 0

    def peek() -> Optional[str]:
        return tokens[position] if position < len(tokens) else None

    def take() -> str:
        nonlocal position
        if position >= len(tokens):
            raise FormulaError("Unexpected end of formula")
        position += 1
        return tokens[position - 1]

    def disjunction() -> Formula:
        parts = [conjunction()]
        while peek() == '|':
            take()
            parts.append(conjunction())
        return disj(*parts)

    def conjunction() -> Formula:
        parts = [factor()]
        while peek() == '&':
            take()
            parts.append(factor())
        return conj(*parts)

    def factor() -> Formula:
        token = take()
        if token == '!':
            return neg(factor())
        if token == '(':
            inner = disjunction()
            if take() != ')':
                raise FormulaError("Missing ')'")
            return inner
        if token in ('true', 'false'):
            return const(token == 'true')
        if token.startswith('v'):
            primed = token.endswith("'")
            return var(int(token[1:].rstrip("'")), primed)
        raise FormulaError(f"Unexpected token {token!r}")

    if not tokens:
        raise FormulaError("Empty formula")
    result = disjunction()
    if position != len(tokens):
        raise FormulaError(f"Trailing input: {' '.join(tokens[position:])}")
    return result


def to_text(formula: Formula) -> str:
    op = formula.op
    if op == 'const':
        return 'true' if formula.args[0] else 'false'
    if op == 'var':
        index, primed = formula.args
        return f"v{index}'" if primed else f"v{index}"
    if op == 'not':
        inner = formula.args[0]
        text = to_text(inner)
        return f"!{text}" if inner.op in ('var', 'const', 'not') else f"!({text})"
    joiner = ' & ' if op == 'and' else ' | '
    parts = []
    for child in formula.args:
        text = to_text(child)
        parts.append(f"({text})" if child.op in ('and', 'or') else text)
    return joiner.join(parts)


# =============================================================================
# Succinct automata
# =============================================================================

def bits_of(value: int, n: int) -> Bits:
    """Bit i of the tuple is variable v(i+1), least significant first."""
    return tuple((value >> i) & 1 for i in range(n))


def value_of(bits: Sequence[int]) -> int:
    return sum(bit << i for i, bit in enumerate(bits))


def _parse_bits(text: str, n: int, what: str) -> Bits:
    if len(text) != n or any(char not in '01' for char in text):
        raise FormulaError(f"{what} must be {n} bits, got {text!r}")
    return tuple(int(char) for char in text)


@dataclass(frozen=True)
class SuccinctAutomaton:
    n: int
    alphabet: Tuple[str, ...]
    formulas: Dict[str, Formula] = field(hash=False, compare=False)
    p0: Bits
    pf: Bits

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("A succinct automaton needs at least one state bit")
        if EPSILON_SYMBOL in self.alphabet:
            raise FormulaError(f"'{EPSILON_SYMBOL}' is reserved for epsilon")
        for bits, name in ((self.p0, 'p0'), (self.pf, 'pf')):
            if len(bits) != self.n or any(bit not in (0, 1) for bit in bits):
                raise FormulaError(f"{name} must be {self.n} bits")
        for symbol, formula in self.formulas.items():
            if symbol != EPSILON_SYMBOL and symbol not in self.alphabet:
                raise FormulaError(f"Formula for unknown symbol {symbol!r}")
            for index, primed in variables(formula):
                if index > self.n:
                    name = f"v{index}'" if primed else f"v{index}"
                    raise FormulaError(f"Formula for {symbol!r} uses undeclared variable {name}")

    def formula(self, symbol: str) -> Formula:
        return self.formulas.get(symbol, FALSE)

    @property
    def size(self) -> int:
        """n plus the node count of every formula."""
        return self.n + sum(formula_size(self.formula(symbol)) for symbol in self.alphabet + (EPSILON_SYMBOL,))

    def successors(self, state: Bits, symbol: str) -> Iterator[Bits]:
        """All targets of symbol-edges from state, by search over the primed variables."""
        current = {(i + 1, False): bool(bit) for i, bit in enumerate(state)}
        residual = substitute(self.formula(symbol), current)
        n = self.n

        def search(formula: Formula, index: int, chosen: Tuple[int, ...]):
            if formula is FALSE:
                return
            if index > n:
                if formula is TRUE:
                    yield chosen
                return
            forced = forced_literals(formula)
            key = (index, True)
            values = (int(forced[key]),) if key in forced else (0, 1)
            for value in values:
                yield from search(substitute(formula, {key: bool(value)}), index + 1, chosen + (value,))

        yield from search(residual, 1, ())

    def closure(self, states: Iterable[Bits]) -> set:
        result = set(states)
        stack = list(result)
        while stack:
            state = stack.pop()
            for nxt in self.successors(state, EPSILON_SYMBOL):
                if nxt not in result:
                    result.add(nxt)
                    stack.append(nxt)
        return result

    # -------------------------------------------------------------------------
    # Text format
    # -------------------------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> 'SuccinctAutomaton':
        return parse_succinct(text)

    def to_text(self) -> str:
        lines = [f"succinct n={self.n} alphabet={','.join(self.alphabet)}"]
        for symbol in self.alphabet + (EPSILON_SYMBOL,):
            lines.append(f"phi {symbol} := {to_text(self.formula(symbol))}")
        bits = lambda vector: ''.join(str(bit) for bit in vector)
        lines.append(f"p0={bits(self.p0)} pf={bits(self.pf)}")
        return '\n'.join(lines) + '\n'


def parse_succinct(text: str) -> SuccinctAutomaton:
    n = None
    alphabet: Tuple[str, ...] = ()
    formulas: Dict[str, Formula] = {}
    p0 = pf = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if n is None:
            match = re.fullmatch(r'succinct\s+n=(\d+)\s+alphabet=(\S*)', line)
            if match is None:
                raise FormulaError("First line must be 'succinct n=<int> alphabet=<syms>'", line=number)
            n = int(match.group(1))
            alphabet = tuple(symbol for symbol in match.group(2).split(',') if symbol)
            continue
        if line.startswith('phi '):
            head, sep, body = line[4:].partition(':=')
            symbol = head.strip()
            if not sep or not symbol:
                raise FormulaError("Formula line must be 'phi <sym> := <formula>'", line=number)
            if symbol in formulas:
                raise FormulaError(f"Duplicate formula for {symbol!r}", line=number)
            try:
                formulas[symbol] = to_nnf(parse_formula(body))
            except FormulaError as exc:
                raise FormulaError(exc.message, line=number)
            continue
        match = re.fullmatch(r'p0=(\S+)\s+pf=(\S+)', line)
        if match is None:
            raise FormulaError(f"Unrecognized line {line!r}", line=number)
        p0 = _parse_bits(match.group(1), n, 'p0')
        pf = _parse_bits(match.group(2), n, 'pf')
    if n is None:
        raise FormulaError("Empty succinct automaton file")
    if p0 is None:
        raise FormulaError("Missing 'p0=... pf=...' line")
    return SuccinctAutomaton(n, alphabet, formulas, p0, pf)


# =============================================================================
# Expansion and membership
# =============================================================================

def expand(s: SuccinctAutomaton, limit: Optional[int] = None) -> Nfa:
    """Explicit NFA on the 2^n bit vectors, states named by their integer value."""
    limit = limit if limit is not None else settings.BS_SUCCINCT_EXPAND_LIMIT
    if s.n > limit:
        raise ExpansionLimitExceeded(f"Refusing to expand {s.n} state bits (limit {limit})", bound=limit)
    transitions = []
    for value in range(2 ** s.n):
        state = bits_of(value, s.n)
        for symbol in s.alphabet + (EPSILON_SYMBOL,):
            label = EPSILON if symbol == EPSILON_SYMBOL else symbol
            for target in s.successors(state, symbol):
                transitions.append((value, label, value_of(target)))
    logger.debug(f"Expanded succinct automaton: {2 ** s.n} states, {len(transitions)} transitions")
    return Nfa.build(range(2 ** s.n), s.alphabet, transitions, [value_of(s.p0)], [value_of(s.pf)])


def otf_membership(s: SuccinctAutomaton, word: Sequence[str]) -> bool:
    """Subset simulation over bit vectors, generating successors from the formulas."""
    current = s.closure([s.p0])
    for symbol in word:
        if symbol not in s.alphabet:
            return False
        targets = set()
        for state in current:
            targets.update(s.successors(state, symbol))
        current = s.closure(targets)
        if not current:
            return False
    return s.pf in current


def _cube(src: int, dst: int, n: int) -> Formula:
    literals = []
    for i, bit in enumerate(bits_of(src, n)):
        literals.append(var(i + 1) if bit else neg(var(i + 1)))
    for i, bit in enumerate(bits_of(dst, n)):
        literals.append(var(i + 1, True) if bit else neg(var(i + 1, True)))
    return conj(*literals)


def nfa_to_succinct(nfa: Nfa) -> SuccinctAutomaton:
    """Binary state encoding; each symbol formula is the disjunction of its edge cubes."""
    states = sorted(nfa.states, key=symbol_key)
    transitions = list(nfa.transitions)
    initials = sorted(nfa.initials, key=symbol_key)
    finals = sorted(nfa.finals, key=symbol_key)

    if len(initials) == 1:
        initial = initials[0]
    else:
        initial = ('__initial',)
        states.append(initial)
        transitions.extend((initial, EPSILON, state) for state in initials)
    if len(finals) == 1:
        final = finals[0]
    else:
        final = ('__final',)
        states.append(final)
        transitions.extend((state, EPSILON, final) for state in finals)

    codes = {state: index for index, state in enumerate(states)}
    n = max(1, (len(states) - 1).bit_length())
    alphabet = tuple(str(symbol) for symbol in sorted(nfa.alphabet, key=symbol_key))
    cubes: Dict[str, List[Formula]] = {}
    for src, symbol, dst in sorted(transitions, key=lambda t: (codes[t[0]], symbol_key(t[1]), codes[t[2]])):
        key = EPSILON_SYMBOL if symbol is EPSILON else str(symbol)
        cubes.setdefault(key, []).append(_cube(codes[src], codes[dst], n))
    formulas = {symbol: disj(*parts) for symbol, parts in cubes.items()}
    return SuccinctAutomaton(n, alphabet, formulas, bits_of(codes[initial], n), bits_of(codes[final], n))


# =============================================================================
# Integer predicates on digit words
# =============================================================================

Circuit = List[Formula]  # little-endian bit formulas


def _constant_bits(value: int, width: int) -> Circuit:
    return [const(bool((value >> i) & 1)) for i in range(width)]


def _add(a: Circuit, b: Circuit) -> Circuit:
    width = max(len(a), len(b)) + 1
    a = a + [FALSE] * (width - len(a))
    b = b + [FALSE] * (width - len(b))
    carry = FALSE
    result = []
    for x, y in zip(a, b):
        result.append(xor(xor(x, y), carry))
        carry = majority(x, y, carry)
    return result


def _scale(bits: Circuit, factor: int) -> Circuit:
    """bits * factor by shift-and-add."""
    total: Circuit = [FALSE]
    shift = 0
    while factor:
        if factor & 1:
            total = _add(total, [FALSE] * shift + bits)
        factor >>= 1
        shift += 1
    return total


def _at_least(bits: Circuit, value: int) -> Formula:
    """bits >= value; built from the least significant bit up."""
    width = max(len(bits), value.bit_length())
    bits = bits + [FALSE] * (width - len(bits))
    result = TRUE  # equal so far
    for i in range(width):
        if (value >> i) & 1:
            result = conj(bits[i], result)
        else:
            result = disj(bits[i], result)
    return result


def _subtract_if(bits: Circuit, value: int) -> Circuit:
    """bits - value when bits >= value, else bits unchanged."""
    width = len(bits)
    complement = _constant_bits((1 << width) - value, width) if value else _constant_bits(0, width)
    difference = _add(bits, complement)[:width]
    take = _at_least(bits, value)
    return [disj(conj(take, d), conj(neg(take), b)) for b, d in zip(bits, difference)]


def _transition(state_bits: int, next_bits: Circuit) -> Formula:
    return conj(*(iff(var(i + 1, True), next_bits[i] if i < len(next_bits) else FALSE) for i in range(state_bits)))


def _digit_alphabet(q: int) -> Tuple[str, ...]:
    return tuple(str(digit) for digit in range(q))


def remainder_automaton(d: int, q: int) -> SuccinctAutomaton:
    """Digit words (most significant first) whose value is divisible by d."""
    if d < 1:
        raise InvalidArgumentError("Modulus d must be >= 1")
    if q < 2:
        raise InvalidArgumentError("Base q must be >= 2")
    n = max(1, (d - 1).bit_length())
    state = [var(i + 1) for i in range(n)]
    in_range = neg(_at_least(state, d))
    formulas = {}
    for digit in range(q):
        # q*v + digit < q*d, so at most bit_length(q) restoring steps
        value = _add(_scale(state, q), _constant_bits(digit, q.bit_length()))
        for shift in reversed(range(q.bit_length())):
            value = _subtract_if(value, d << shift)
        formulas[str(digit)] = to_nnf(conj(in_range, _transition(n, value)))
    return SuccinctAutomaton(n, _digit_alphabet(q), formulas, bits_of(0, n), bits_of(0, n))


def threshold_automaton(bound: int, q: int) -> SuccinctAutomaton:
    """Digit words whose value exceeds bound; the state saturates at bound + 1."""
    if bound < 0:
        raise InvalidArgumentError("Threshold B must be >= 0")
    if q < 2:
        raise InvalidArgumentError("Base q must be >= 2")
    cap = bound + 1
    n = cap.bit_length()
    state = [var(i + 1) for i in range(n)]
    in_range = neg(_at_least(state, cap + 1))
    formulas = {}
    for digit in range(q):
        value = _add(_scale(state, q), _constant_bits(digit, q.bit_length()))
        saturated = _at_least(value, cap)
        capped = [disj(conj(saturated, c), conj(neg(saturated), v)) for v, c in zip(value, _constant_bits(cap, len(value)))]
        formulas[str(digit)] = to_nnf(conj(in_range, _transition(n, capped)))
    return SuccinctAutomaton(n, _digit_alphabet(q), formulas, bits_of(0, n), bits_of(cap, n))


def succinct_int_predicates(d: int, bound: int, q: int = 2) -> Tuple[SuccinctAutomaton, SuccinctAutomaton]:
    """(multiples of d, numbers above bound) as succinct automata over base-q digit words."""
    return remainder_automaton(d, q), threshold_automaton(bound, q)


def digit_word(n: int, q: int) -> Tuple[str, ...]:
    """Base-q digits of n >= 0, most significant first; 0 is the empty word."""
    digits = []
    while n:
        n, digit = divmod(n, q)
        digits.append(str(digit))
    return tuple(reversed(digits))
