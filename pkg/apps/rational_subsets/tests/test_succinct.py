import random
from itertools import product as cartesian

from django.test import SimpleTestCase, override_settings

from apps.rational_subsets.automata_kit import EPSILON, Nfa
from apps.rational_subsets.exceptions import ExpansionLimitExceeded, FormulaError, InvalidArgumentError
from apps.rational_subsets.succinct import (
    FALSE,
    TRUE,
    SuccinctAutomaton,
    bits_of,
    conj,
    digit_word,
    disj,
    evaluate,
    expand,
    forced_literals,
    formula_size,
    neg,
    nfa_to_succinct,
    otf_membership,
    parse_formula,
    parse_succinct,
    remainder_automaton,
    substitute,
    succinct_int_predicates,
    threshold_automaton,
    to_nnf,
    to_text,
    value_of,
    var,
    variables,
    xor,
)

# two-bit counter of 1s modulo 4
COUNTER = """
succinct n=2 alphabet=0,1
phi 0 := ((v1 & v1') | (!v1 & !v1')) & ((v2 & v2') | (!v2 & !v2'))
phi 1 := ((v1 & !v1') | (!v1 & v1')) & ((v2 & v1 & !v2') | (v2 & !v1 & v2') | (!v2 & v1 & v2') | (!v2 & !v1 & !v2'))
phi eps := false
p0=00 pf=00
"""


def words_up_to(alphabet, max_len):
    for length in range(max_len + 1):
        yield from cartesian(alphabet, repeat=length)


class FormulaTests(SimpleTestCase):

    def test_interning(self):
        self.assertIs(conj(var(1), var(2)), conj(var(1), var(2)))
        self.assertIs(conj(var(1), conj(var(2), var(1))), conj(var(1), var(2)))
        self.assertIs(disj(var(1), TRUE), TRUE)
        self.assertIs(conj(var(1), TRUE), var(1))
        self.assertIs(neg(neg(var(3, True))), var(3, True))
        self.assertIs(conj(), TRUE)

    def test_parse_precedence(self):
        self.assertIs(parse_formula("v1 | v2 & !v3'"), disj(var(1), conj(var(2), neg(var(3, True)))))
        self.assertIs(parse_formula('(v1 | v2) & true'), disj(var(1), var(2)))
        self.assertIs(parse_formula('!!false'), FALSE)

    def test_text_round_trip(self):
        formula = conj(disj(var(1), neg(var(2, True))), neg(conj(var(3), var(1, True))))
        self.assertIs(parse_formula(to_text(formula)), formula)

    def test_parse_errors(self):
        for text in ('', 'v1 &', '(v1', 'v1 v2', 'x1', 'v1 )'):
            with self.assertRaises(FormulaError, msg=text):
                parse_formula(text)
        with self.assertRaises(InvalidArgumentError):
            var(0)

    def test_nnf(self):
        self.assertIs(to_nnf(neg(conj(var(1), var(2)))), disj(neg(var(1)), neg(var(2))))
        nnf = to_nnf(neg(xor(var(1), var(2))))
        for v1, v2 in cartesian((False, True), repeat=2):
            assignment = {(1, False): v1, (2, False): v2}
            self.assertEqual(evaluate(nnf, assignment), v1 == v2)

    def test_size_counts_shared_nodes_once(self):
        shared = conj(var(1), var(2))
        self.assertEqual(formula_size(shared), 3)
        self.assertEqual(formula_size(disj(shared, neg(shared))), 5)

    def test_substitute_and_evaluate(self):
        formula = conj(disj(var(1), var(2)), neg(var(1, True)))
        self.assertIs(substitute(formula, {(1, False): True}), neg(var(1, True)))
        self.assertTrue(evaluate(formula, {(1, False): False, (2, False): True, (1, True): False}))
        with self.assertRaises(InvalidArgumentError):
            evaluate(formula, {(1, False): True})
        self.assertEqual(variables(formula), [(1, False), (1, True), (2, False)])

    def test_forced_literals(self):
        formula = conj(var(1, True), neg(var(2, True)), disj(var(3), var(1)))
        self.assertEqual(forced_literals(formula), {(1, True): True, (2, True): False})

    def test_bits(self):
        self.assertEqual(bits_of(6, 4), (0, 1, 1, 0))
        self.assertEqual(value_of((0, 1, 1, 0)), 6)


class SuccinctAutomatonTests(SimpleTestCase):

    def setUp(self):
        self.counter = parse_succinct(COUNTER)

    def test_counter(self):
        for word in ('', '1111', '11110', '01011010'):
            self.assertTrue(otf_membership(self.counter, word), word)
        for word in ('1', '11', '0101', '10101011'):
            self.assertFalse(otf_membership(self.counter, word), word)
        self.assertFalse(otf_membership(self.counter, '2'))

    def test_successors(self):
        self.assertEqual(list(self.counter.successors((1, 0), '1')), [(0, 1)])
        self.assertEqual(list(self.counter.successors((1, 1), '0')), [(1, 1)])
        self.assertEqual(list(self.counter.successors((0, 0), 'eps')), [])

    def test_expansion_agrees_with_simulation(self):
        nfa = expand(self.counter)
        self.assertEqual(len(nfa.states), 4)
        for word in words_up_to('01', 6):
            self.assertEqual(nfa.accepts(word), otf_membership(self.counter, word), word)

    def test_free_target_bits(self):
        loose = parse_succinct('succinct n=2 alphabet=x\nphi x := v1\'\np0=00 pf=11\n')
        self.assertEqual(sorted(loose.successors((0, 0), 'x')), [(1, 0), (1, 1)])
        self.assertTrue(otf_membership(loose, 'x'))
        self.assertFalse(otf_membership(loose, ''))

    def test_epsilon(self):
        hop = parse_succinct('succinct n=1 alphabet=x\nphi eps := !v1 & v1\'\np0=0 pf=1\n')
        self.assertTrue(otf_membership(hop, ''))
        self.assertFalse(otf_membership(hop, 'x'))
        self.assertTrue(expand(hop).accepts(''))

    def test_text_round_trip(self):
        again = parse_succinct(self.counter.to_text())
        self.assertEqual(again, self.counter)
        self.assertEqual(again.size, self.counter.size)
        for word in words_up_to('01', 5):
            self.assertEqual(otf_membership(again, word), otf_membership(self.counter, word))

    def test_size(self):
        self.assertGreater(self.counter.size, self.counter.n)
        empty = parse_succinct('succinct n=3 alphabet=x\np0=000 pf=000\n')
        # one FALSE node per formula slot
        self.assertEqual(empty.size, 3 + 2)

    @override_settings(BS_SUCCINCT_EXPAND_LIMIT=1)
    def test_expansion_limit(self):
        with self.assertRaises(ExpansionLimitExceeded):
            expand(self.counter)

    def test_malformed(self):
        bad = [
            '',
            'automaton n=2\n',
            'succinct n=1 alphabet=x\nphi x := v2\np0=0 pf=0\n',
            'succinct n=1 alphabet=x\nphi y := v1\np0=0 pf=0\n',
            'succinct n=1 alphabet=x\nphi x := v1\nphi x := v1\np0=0 pf=0\n',
            'succinct n=1 alphabet=x\nphi x := v1 &\np0=0 pf=0\n',
            'succinct n=1 alphabet=x\np0=00 pf=0\n',
            'succinct n=1 alphabet=x\nphi x := v1\n',
            'succinct n=1 alphabet=x,eps\np0=0 pf=0\n',
        ]
        for text in bad:
            with self.assertRaises(FormulaError, msg=text):
                parse_succinct(text)


class NfaEncodingTests(SimpleTestCase):

    def test_single_initial_and_final(self):
        nfa = Nfa.build(
            {'p', 'r', 's'},
            {'a', 'b'},
            [('p', 'a', 'p'), ('p', 'b', 'p'), ('p', 'a', 'r'), ('r', 'b', 's')],
            {'p'},
            {'s'},
        )
        s = nfa_to_succinct(nfa)
        self.assertEqual(s.n, 2)
        self.assertEqual(s.alphabet, ('a', 'b'))
        for word in words_up_to('ab', 5):
            self.assertEqual(otf_membership(s, word), nfa.accepts(word), word)

    def test_several_initials_and_finals(self):
        nfa = Nfa.build({0, 1, 2}, {'a'}, [(0, 'a', 1), (1, 'a', 2)], {0, 1}, {1, 2})
        s = nfa_to_succinct(nfa)
        self.assertEqual(s.n, 3)
        for word in words_up_to('a', 4):
            self.assertEqual(otf_membership(s, word), nfa.accepts(word), word)


class IntegerPredicateTests(SimpleTestCase):

    def test_digit_word(self):
        self.assertEqual(digit_word(0, 2), ())
        self.assertEqual(digit_word(6, 2), ('1', '1', '0'))
        self.assertEqual(digit_word(907, 10), ('9', '0', '7'))

    def test_remainders(self):
        for q, moduli in ((2, (1, 2, 3, 5, 6)), (3, (4, 7)), (10, (3, 7))):
            for d in moduli:
                s = remainder_automaton(d, q)
                for n in range(0, 40):
                    word = digit_word(n, q)
                    self.assertEqual(otf_membership(s, word), n % d == 0, (q, d, n))
                    self.assertEqual(otf_membership(s, ('0',) + word), n % d == 0, (q, d, n))

    def test_thresholds(self):
        for q in (2, 3):
            for bound in (0, 5, 12):
                s = threshold_automaton(bound, q)
                for n in range(0, 45):
                    self.assertEqual(otf_membership(s, digit_word(n, q)), n > bound, (q, bound, n))

    def test_large_modulus_stays_small(self):
        d = 2 ** 20 + 7
        multiples, above = succinct_int_predicates(d, 2 ** 20)
        self.assertEqual(multiples.n, 21)
        for k in range(4):
            self.assertTrue(otf_membership(multiples, digit_word(k * d, 2)), k)
        self.assertFalse(otf_membership(multiples, digit_word(d + 1, 2)))
        self.assertTrue(otf_membership(above, digit_word(2 ** 20 + 1, 2)))
        self.assertFalse(otf_membership(above, digit_word(2 ** 20, 2)))

    def test_bad_arguments(self):
        with self.assertRaises(InvalidArgumentError):
            remainder_automaton(0, 2)
        with self.assertRaises(InvalidArgumentError):
            threshold_automaton(-1, 2)
        with self.assertRaises(InvalidArgumentError):
            remainder_automaton(3, 1)


def random_formula(rng, n, depth):
    if depth == 0 or rng.random() < 0.3:
        literal = var(rng.randint(1, n), rng.random() < 0.5)
        return neg(literal) if rng.random() < 0.5 else literal
    parts = [random_formula(rng, n, depth - 1) for _ in range(rng.randint(2, 3))]
    return conj(*parts) if rng.random() < 0.5 else disj(*parts)


def random_succinct(rng):
    n = rng.randint(1, 4)
    formulas = {symbol: random_formula(rng, n, 3) for symbol in ('a', 'b')}
    if rng.random() < 0.3:
        formulas['eps'] = random_formula(rng, n, 2)
    bits = lambda: tuple(rng.randint(0, 1) for _ in range(n))
    return SuccinctAutomaton(n, ('a', 'b'), formulas, bits(), bits())


def random_nfa(rng):
    states = range(rng.randint(1, 5))
    transitions = [
        (src, rng.choice(('a', 'b', EPSILON)), rng.choice(states))
        for src in states
        for _ in range(rng.randint(0, 3))
    ]
    initials = [state for state in states if rng.random() < 0.4] or [0]
    finals = [state for state in states if rng.random() < 0.4]
    return Nfa.build(states, ('a', 'b'), transitions, initials, finals)


class RandomSuccinctTests(SimpleTestCase):

    def setUp(self):
        self.rng = random.Random(23)

    def test_expansion_agrees_with_simulation(self):
        for _ in range(50):
            s = random_succinct(self.rng)
            nfa = expand(s)
            self.assertEqual(len(nfa.states), 2 ** s.n)
            for word in words_up_to('ab', 4):
                self.assertEqual(nfa.accepts(word), otf_membership(s, word), (s.to_text(), word))

    def test_nfa_encoding_keeps_the_language(self):
        for _ in range(30):
            nfa = random_nfa(self.rng)
            s = nfa_to_succinct(nfa)
            again = expand(s)
            for word in words_up_to('ab', 6):
                self.assertEqual(otf_membership(s, word), nfa.accepts(word), (nfa.to_text(), word))
                self.assertEqual(again.accepts(word), nfa.accepts(word), (nfa.to_text(), word))
