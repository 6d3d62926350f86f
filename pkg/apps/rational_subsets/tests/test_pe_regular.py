import random
from fractions import Fraction
from itertools import product as cartesian

from django.test import SimpleTestCase

from apps.rational_subsets.automata_kit import Nfa, equivalence
from apps.rational_subsets.exceptions import AutomatonFormatError, ContextMismatchError, InvalidArgumentError
from apps.rational_subsets.group_core import GroupContext
from apps.rational_subsets.pe_regular import (
    PeSet,
    above,
    addition_transducer,
    at_most,
    boolean,
    complement,
    cursor_congruence,
    divisible,
    empty_set,
    finite_integers,
    finite_set,
    integers,
    inverse_set,
    parse_pe_set,
    pdiff_sets,
    product,
    pure_cursor_moves,
    shift_set,
    signed_digits,
    singleton,
    to_pe_set,
    universe,
)
from apps.rational_subsets.pointed_expansion import token_alphabet


def small_elements(ctx, rng, count):
    return [ctx.element(rng.randint(-6, 6), rng.randint(0, 2), rng.randint(-2, 2)) for _ in range(count)]


class AdditionTransducerTests(SimpleTestCase):

    def check_exhaustively(self, q, max_len):
        """Every aligned triple word up to max_len, grouped by (state, value1 + value2 - value3)."""
        ctx = GroupContext(q)
        adder = addition_transducer(ctx)
        digits = signed_digits(q)
        triples = list(cartesian(digits, repeat=3))
        # prefixes sharing a state and a value difference have the same futures
        layer = {(adder.initial, 0)}
        for length in range(1, max_len + 1):
            layer = {
                (adder.delta[state][triple], q * gap + triple[0] + triple[1] - triple[2])
                for state, gap in layer
                for triple in triples
            }
            for state, gap in layer:
                self.assertEqual(state in adder.finals, gap == 0, (length, state, gap))

    def test_base_two(self):
        self.check_exhaustively(2, 6)

    def test_base_three(self):
        self.check_exhaustively(3, 4)


class BooleanTests(SimpleTestCase):

    def setUp(self):
        self.ctx = GroupContext(2)

    def test_finite_sets(self):
        ctx = self.ctx
        members = [ctx.element(3, 0, 2), ctx.from_fraction(Fraction(5, 4), -1), ctx.identity()]
        pe_set = finite_set(ctx, members)
        for g in members:
            self.assertTrue(pe_set.contains(g))
        self.assertFalse(pe_set.contains(ctx.element(3)))
        self.assertEqual(set(pe_set.elements(6)), set(members))
        self.assertEqual(pe_set.shortest_member(), ctx.identity())

    def test_operations(self):
        ctx = self.ctx
        small = finite_integers(ctx, [1, 2, 3])
        odd = finite_integers(ctx, [1, 3, 5])
        self.assertEqual(set(boolean(small, odd, 'union').elements(6)), {ctx.element(n) for n in (1, 2, 3, 5)})
        self.assertEqual(set(boolean(small, odd, 'intersect').elements(6)), {ctx.element(1), ctx.element(3)})
        self.assertEqual(set(boolean(small, odd, 'difference').elements(6)), {ctx.element(2)})
        rest = complement(small)
        self.assertFalse(rest.contains(ctx.element(2)))
        self.assertTrue(rest.contains(ctx.element(4)))
        self.assertTrue(complement(universe(ctx)).is_empty())
        self.assertTrue(empty_set(ctx).is_empty())

    def test_unknown_operation(self):
        with self.assertRaises(InvalidArgumentError):
            boolean(universe(self.ctx), universe(self.ctx), 'xor')

    def test_contexts_must_match(self):
        with self.assertRaises(ContextMismatchError):
            boolean(universe(self.ctx), universe(GroupContext(3)), 'union')
        with self.assertRaises(ContextMismatchError):
            product(universe(self.ctx), universe(GroupContext(3)))

    def test_wrong_alphabet(self):
        with self.assertRaises(InvalidArgumentError):
            PeSet(GroupContext(3), universe(self.ctx).dfa)

    def test_dump(self):
        pe_set = finite_integers(self.ctx, [2, 7])
        parsed = parse_pe_set(pe_set.dump())
        self.assertEqual(parsed.ctx, self.ctx)
        self.assertTrue(equivalence(parsed.dfa, pe_set.dfa))
        with self.assertRaises(AutomatonFormatError):
            parse_pe_set('pe base=2\n' + pe_set.dfa.to_text())
        with self.assertRaises(AutomatonFormatError):
            parse_pe_set('pe q=3\n' + pe_set.dfa.to_text())

    def test_padded_words_are_canonicalized(self):
        ctx = self.ctx
        tokens = ['+', '0', '0', '1rc', '0']
        states = range(len(tokens) + 1)
        nfa = Nfa.build(states, token_alphabet(2), [(i, token, i + 1) for i, token in enumerate(tokens)], {0}, {len(tokens)})
        pe_set = to_pe_set(ctx, nfa)
        self.assertEqual(pe_set.elements(5), [ctx.element(1)])


class IntegerPredicateTests(SimpleTestCase):

    def setUp(self):
        self.ctx = GroupContext(2)

    def test_integers(self):
        ctx = self.ctx
        nonneg = integers(ctx, 'nonneg')
        self.assertTrue(nonneg.contains(ctx.element(5)))
        self.assertTrue(nonneg.contains(ctx.identity()))
        self.assertFalse(nonneg.contains(ctx.element(-5)))
        self.assertFalse(nonneg.contains(ctx.element(1, 1)))
        self.assertFalse(nonneg.contains(ctx.element(5, 0, 1)))
        nonpos = integers(ctx, 'nonpos')
        self.assertTrue(nonpos.contains(ctx.identity()))
        self.assertTrue(nonpos.contains(ctx.element(-3)))
        self.assertTrue(integers(ctx).contains(ctx.element(-12)))
        with self.assertRaises(InvalidArgumentError):
            integers(ctx, 'positive')

    def test_divisible(self):
        ctx = self.ctx
        threes = divisible(ctx, 3)
        for n in range(0, 40):
            self.assertEqual(threes.contains(ctx.element(n)), n % 3 == 0, n)
        self.assertFalse(threes.contains(ctx.element(-6)))
        self.assertTrue(divisible(ctx, 3, 'all').contains(ctx.element(-6)))
        with self.assertRaises(InvalidArgumentError):
            divisible(ctx, 0)

    def test_bounds(self):
        for q in (2, 3):
            ctx = GroupContext(q)
            big = above(ctx, 5)
            small = at_most(ctx, 5)
            for n in range(0, 30):
                self.assertEqual(big.contains(ctx.element(n)), n > 5, (q, n))
                self.assertEqual(small.contains(ctx.element(n)), n <= 5, (q, n))
            negative = above(ctx, 5, negative=True)
            self.assertTrue(negative.contains(ctx.element(-6)))
            self.assertFalse(negative.contains(ctx.element(-5)))
            self.assertFalse(negative.contains(ctx.element(6)))
            self.assertTrue(at_most(ctx, 5, negative=True).contains(ctx.element(-5)))

    def test_bounds_reject_negative(self):
        with self.assertRaises(InvalidArgumentError):
            above(self.ctx, -1)


class CursorPredicateTests(SimpleTestCase):

    def setUp(self):
        self.ctx = GroupContext(2)

    def test_cursor_congruence(self):
        ctx = self.ctx
        even = cursor_congruence(ctx, 2, 0)
        for m in range(-5, 6):
            self.assertEqual(even.contains(ctx.element(5, 1, m)), m % 2 == 0, m)
            self.assertEqual(even.contains(ctx.element(0, 0, m)), m % 2 == 0, m)
        three = cursor_congruence(ctx, 3, -1)
        self.assertTrue(three.contains(ctx.element(1, 0, 2)))
        self.assertTrue(three.contains(ctx.element(1, 0, -1)))
        self.assertFalse(three.contains(ctx.element(1, 0, 1)))

    def test_pure_cursor_moves(self):
        ctx = self.ctx
        moves = pure_cursor_moves(ctx)
        self.assertTrue(moves.contains(ctx.element(0, 0, -3)))
        self.assertTrue(moves.contains(ctx.identity()))
        self.assertFalse(moves.contains(ctx.element(1)))

    def test_shift_set(self):
        self.assertEqual(shift_set(self.ctx, 3).elements(6), [self.ctx.element(0, 0, 3)])

    def test_pdiff_sets(self):
        for q in (2, 3):
            ctx = GroupContext(q)
            forward, backward = pdiff_sets(ctx, 2)
            for l in range(-3, 4):
                value = Fraction(q) ** l - Fraction(q) ** (l + 2)
                self.assertTrue(forward.contains(ctx.from_fraction(value)), (q, l))
                self.assertTrue(backward.contains(ctx.from_fraction(-value)), (q, l))
                self.assertFalse(forward.contains(ctx.from_fraction(Fraction(q) ** l - Fraction(q) ** (l + 1))))
            self.assertFalse(forward.contains(ctx.from_fraction(-value, 1)))
        with self.assertRaises(InvalidArgumentError):
            pdiff_sets(GroupContext(2), 0)


class ProductTests(SimpleTestCase):

    def test_generators(self):
        ctx = GroupContext(2)
        a, t = ctx.generator('a'), ctx.generator('t')
        self.assertEqual(product(singleton(ctx, a), singleton(ctx, t)).elements(6), [ctx.multiply(a, t)])
        self.assertEqual(product(singleton(ctx, t), singleton(ctx, a)).elements(6), [ctx.multiply(t, a)])

    def test_finite_products_match_brute_force(self):
        rng = random.Random(3)
        for q in (2, 3):
            ctx = GroupContext(q)
            for _ in range(4):
                left, right = small_elements(ctx, rng, 3), small_elements(ctx, rng, 3)
                expected = finite_set(ctx, [ctx.multiply(g, h) for g in left for h in right])
                computed = product(finite_set(ctx, left), finite_set(ctx, right))
                self.assertTrue(equivalence(computed.dfa, expected.dfa), (q, left, right))

    def test_infinite_product(self):
        ctx = GroupContext(2)
        shifted = product(integers(ctx, 'nonneg'), shift_set(ctx, 1))
        self.assertTrue(shifted.contains(ctx.element(6, 0, 1)))
        self.assertFalse(shifted.contains(ctx.element(6)))
        evens = product(shift_set(ctx, 1), product(integers(ctx, 'nonneg'), shift_set(ctx, -1)))
        for n in range(0, 12):
            self.assertEqual(evens.contains(ctx.element(n)), n % 2 == 0, n)

    def test_empty_factor(self):
        ctx = GroupContext(2)
        self.assertTrue(product(empty_set(ctx), universe(ctx)).is_empty())


class InverseTests(SimpleTestCase):

    def test_finite_inverses_match_brute_force(self):
        rng = random.Random(9)
        for q in (2, 3):
            ctx = GroupContext(q)
            members = small_elements(ctx, rng, 6) + [ctx.element(0, 0, 2), ctx.identity()]
            expected = finite_set(ctx, [ctx.inverse(g) for g in members])
            self.assertTrue(equivalence(inverse_set(finite_set(ctx, members)).dfa, expected.dfa), q)

    def test_inverse_of_integers(self):
        ctx = GroupContext(2)
        negated = inverse_set(integers(ctx, 'nonneg'))
        self.assertTrue(equivalence(negated.dfa, integers(ctx, 'nonpos').dfa))
