import random
from fractions import Fraction

from django.test import SimpleTestCase

from apps.rational_subsets.exceptions import BSToolkitError, PeFormatError
from apps.rational_subsets.group_core import GroupContext
from apps.rational_subsets.pointed_expansion import (
    PeWord,
    canonicalize,
    decode,
    decode_text,
    encode,
    encode_text,
    token_alphabet,
)


class EncodeTests(SimpleTestCase):

    def setUp(self):
        self.ctx = GroupContext(2)

    def test_examples(self):
        ctx = self.ctx
        self.assertEqual(encode_text(ctx, ctx.identity()), '+ 0rc')
        self.assertEqual(encode_text(ctx, ctx.element(3, 0, 2)), '+ 0c 1 1r')
        self.assertEqual(encode_text(ctx, ctx.from_fraction(Fraction(5, 4), -1)), '+ 1r 0c 1')

    def test_negative_and_large_base(self):
        self.assertEqual(encode_text(self.ctx, self.ctx.element(-1)), '- 1rc')
        ctx = GroupContext(10)
        self.assertEqual(encode_text(ctx, ctx.element(907, 1, 0)), '+ 9 0rc 7')
        self.assertEqual(encode_text(ctx, ctx.element(12)), '+ 1 2rc')

    def test_round_trip_on_random_elements(self):
        rng = random.Random(11)
        for q in (2, 3, 10):
            ctx = GroupContext(q)
            for _ in range(10 ** 4):
                g = ctx.element(rng.randint(-10 ** 6, 10 ** 6), rng.randint(0, 8), rng.randint(-12, 12))
                word = encode(ctx, g)
                self.assertEqual(decode(ctx, word), g)
                self.assertEqual(decode_text(ctx, word.to_text()), g)

    def test_encodings_are_canonical(self):
        rng = random.Random(5)
        ctx = GroupContext(3)
        for _ in range(1000):
            g = ctx.element(rng.randint(-3000, 3000), rng.randint(0, 4), rng.randint(-6, 6))
            word = encode(ctx, g)
            self.assertTrue(word.is_canonical())
            digits = word.digits
            # dropping an end digit loses a marker or changes the value
            for shorter in ((digits[1:], word.radix_index - 1, word.cursor_index - 1),
                            (digits[:-1], word.radix_index, word.cursor_index)):
                try:
                    candidate = PeWord(word.sign, *shorter)
                except BSToolkitError:
                    continue
                self.assertNotEqual(decode(ctx, candidate), g)


class DecodeTests(SimpleTestCase):

    def setUp(self):
        self.ctx = GroupContext(2)

    def test_examples(self):
        ctx = self.ctx
        self.assertEqual(decode_text(ctx, '+ 0rc'), ctx.identity())
        self.assertEqual(decode_text(ctx, '- 1rc'), ctx.element(-1))
        self.assertEqual(decode_text(ctx, '+ 0c 1 1r'), ctx.element(3, 0, 2))

    def test_canonicalize(self):
        ctx = self.ctx
        self.assertEqual(canonicalize(ctx, PeWord.from_text('+ 0 0 1rc 0')).to_text(), '+ 1rc')
        self.assertEqual(canonicalize(ctx, PeWord.from_text('+ 0c 0 1r')).to_text(), '+ 0c 0 1r')
        self.assertEqual(canonicalize(ctx, PeWord.from_text('- 0 1r 1 0 0c')).to_text(), '- 1r 1 0 0c')

    def test_zero_gets_plus(self):
        self.assertEqual(canonicalize(self.ctx, PeWord.from_text('- 0rc')).to_text(), '+ 0rc')

    def test_from_text(self):
        self.assertEqual(PeWord.from_text('+ 1rc'), PeWord('+', (1,), 0, 0))

    def test_malformed(self):
        for text in ('+ 1r 1r', '+ 1r', '1rc', '', '+ 1x'):
            with self.assertRaises(PeFormatError):
                PeWord.from_text(text)
        with self.assertRaises(PeFormatError):
            decode_text(self.ctx, '+ 2rc')

    def test_token_alphabet(self):
        self.assertEqual(len(token_alphabet(2)), 2 + 2 * 4)
        self.assertIn('1rc', token_alphabet(2))
