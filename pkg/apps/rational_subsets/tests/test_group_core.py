import random
from fractions import Fraction

from django.test import SimpleTestCase

from apps.rational_subsets.exceptions import GeneratorWordError, InvalidArgumentError
from apps.rational_subsets.group_core import GeneratorWord, GroupContext


def random_element(ctx, rng):
    return ctx.element(rng.randint(-500, 500), rng.randint(0, 6), rng.randint(-8, 8))


class MultiplyTests(SimpleTestCase):

    def setUp(self):
        self.ctx = GroupContext(2)

    def test_generator_products(self):
        ctx = self.ctx
        a, t = ctx.generator('a'), ctx.generator('t')
        self.assertEqual(ctx.multiply(a, t), ctx.element(1, 0, 1))
        self.assertEqual(ctx.multiply(t, a), ctx.element(2, 0, 1))
        self.assertEqual(ctx.product([t, a, ctx.generator('t^-1')]), ctx.element(2, 0, 0))

    def test_inverse(self):
        ctx = self.ctx
        self.assertEqual(ctx.inverse(ctx.identity()), ctx.identity())
        self.assertEqual(ctx.inverse(ctx.element(3, 0, 2)), ctx.from_fraction(Fraction(-3, 4), -2))
        self.assertEqual(ctx.inverse(ctx.element(0, 0, 5)), ctx.element(0, 0, -5))

    def test_group_laws_on_random_triples(self):
        rng = random.Random(7)
        for q in (2, 3, 10):
            ctx = GroupContext(q)
            for _ in range(10 ** 4):
                g, h, k = (random_element(ctx, rng) for _ in range(3))
                self.assertEqual(ctx.multiply(ctx.multiply(g, h), k), ctx.multiply(g, ctx.multiply(h, k)))
                self.assertEqual(ctx.multiply(g, ctx.identity()), g)
                self.assertEqual(ctx.multiply(ctx.identity(), g), g)
                self.assertEqual(ctx.multiply(g, ctx.inverse(g)), ctx.identity())

    def test_defining_relation(self):
        for q in (2, 3, 5):
            ctx = GroupContext(q)
            self.assertEqual(ctx.eval_word('t a t^-1'), ctx.eval_word(' '.join(['a'] * q)))

    def test_normalization_is_canonical(self):
        ctx = self.ctx
        self.assertEqual(ctx.element(4, 2, 0), ctx.element(1, 0, 0))
        self.assertEqual(ctx.element(3, -1, 0), ctx.element(6, 0, 0))
        self.assertEqual(ctx.element(0, 9, 1), ctx.element(0, 0, 1))

    def test_bad_base(self):
        with self.assertRaises(InvalidArgumentError):
            GroupContext(1)


class EvalWordTests(SimpleTestCase):

    def setUp(self):
        self.ctx = GroupContext(2)

    def test_examples(self):
        ctx = self.ctx
        self.assertEqual(ctx.eval_word('a t a t'), ctx.element(3, 0, 2))
        self.assertEqual(ctx.eval_word(''), ctx.identity())
        self.assertEqual(ctx.eval_word('t^-1 a t'), ctx.from_fraction(Fraction(1, 2)))

    def test_exponent_shorthand(self):
        self.assertEqual(GeneratorWord.from_text('t^-2 a^3').tokens, ('t^-1', 't^-1', 'a', 'a', 'a'))
        self.assertEqual(GeneratorWord.from_text('tat').tokens, ('t', 'a', 't'))
        self.assertEqual(GeneratorWord.from_text('t⁻¹').tokens, ('t^-1',))
        self.assertEqual(GeneratorWord.from_text('1').tokens, ())

    def test_text_round_trip(self):
        word = GeneratorWord.from_text('a t^-1 a^-1 t')
        self.assertEqual(GeneratorWord.from_text(word.to_text()), word)

    def test_inverse_word(self):
        word = GeneratorWord.from_text('a t a t')
        ctx = self.ctx
        self.assertEqual(ctx.multiply(ctx.eval_word(word), ctx.eval_word(word.inverse())), ctx.identity())

    def test_unknown_token(self):
        with self.assertRaises(GeneratorWordError):
            GeneratorWord.from_text('a b')
        with self.assertRaises(GeneratorWordError):
            self.ctx.generator('b')

    def test_format(self):
        self.assertEqual(self.ctx.format(self.ctx.eval_word('t^-1 a')), '(1/2, -1)')
