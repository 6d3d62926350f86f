from django.test import TestCase, override_settings
from rest_framework.test import APIClient

from apps.rational_subsets.models import CompiledSet, CompileStatus
from apps.rational_subsets.pe_regular import parse_pe_set
from apps.rational_subsets.tests import fixture_text


class ElementApiTests(TestCase):

    def setUp(self):
        self.client = APIClient()

    def test_encode(self):
        response = self.client.post('/api/bs/pe/', {'q': 2, 'word': 'a t a t'}, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json(), {'pe': '+ 0c 1 1r', 'element': '(3, 2)'})

    def test_encode_default_base(self):
        response = self.client.post('/api/bs/pe/', {'word': 't a t^-1'}, format='json')
        self.assertEqual(response.json()['pe'], '+ 1 0rc')

    def test_bad_word(self):
        response = self.client.post('/api/bs/pe/', {'q': 2, 'word': 'a b'}, format='json')
        self.assertEqual(response.status_code, 400)
        self.assertIn('error', response.json())

    def test_bad_base(self):
        response = self.client.post('/api/bs/pe/', {'q': 1, 'word': 'a'}, format='json')
        self.assertEqual(response.status_code, 400)

    def test_multiply(self):
        response = self.client.post('/api/bs/mul/', {'q': 2, 'elements': ['+ 1rc', '+ 1rc']}, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json(), {'pe': '+ 1 0rc', 'element': '(2, 0)'})


class CompileApiTests(TestCase):

    def setUp(self):
        self.client = APIClient()
        self.source = fixture_text('a_t_cycle.bs')

    def test_compile_is_cached(self):
        first = self.client.post('/api/bs/compile/', {'automaton': self.source, 'thickness': 3}, format='json')
        self.assertEqual(first.status_code, 200)
        self.assertFalse(first.json()['cached'])
        result = first.json()['result']
        self.assertEqual(result['status'], CompileStatus.SUCCESS)
        self.assertEqual(result['stats']['split']['k'], 3)

        second = self.client.post('/api/bs/compile/', {'automaton': self.source, 'thickness': 3}, format='json')
        self.assertTrue(second.json()['cached'])
        self.assertEqual(second.json()['result']['dump'], result['dump'])
        self.assertEqual(CompiledSet.objects.count(), 1)

        compiled = parse_pe_set(result['dump'])
        self.assertTrue(compiled.contains(compiled.ctx.element(3)))

        listing = self.client.get('/api/bs/compiled/')
        self.assertEqual(listing.json()['count'], 1)

    @override_settings(BS_MATERIALIZATION_LIMIT=5)
    def test_budget_failure_is_recorded(self):
        response = self.client.post('/api/bs/compile/', {'automaton': self.source, 'thickness': 3}, format='json')
        self.assertEqual(response.status_code, 422)
        self.assertEqual((response.json()['gcd'], response.json()['bound']), (3, 9))
        record = CompiledSet.lookup(self.source, 3)
        self.assertEqual(record.status, CompileStatus.BUDGET_EXCEEDED)
        self.assertIsNone(record.dump)

    @override_settings(BS_THIN_RUN_WORK_LIMIT=10)
    def test_default_thickness_stops_on_budget(self):
        response = self.client.post('/api/bs/member/', {'automaton': self.source, 'word': ''}, format='json')
        self.assertEqual(response.status_code, 422)
        self.assertIn('simulation steps', response.json()['error'])
        self.assertEqual(CompiledSet.lookup(self.source).status, CompileStatus.BUDGET_EXCEEDED)

    def test_bad_automaton(self):
        response = self.client.post('/api/bs/compile/', {'automaton': 'bs q=2\nstate p\n'}, format='json')
        self.assertEqual(response.status_code, 400)
        self.assertIn('initial', response.json()['error'])

    def test_bad_thickness(self):
        response = self.client.post('/api/bs/compile/', {'automaton': self.source, 'thickness': 0}, format='json')
        self.assertEqual(response.status_code, 400)

    def test_member(self):
        accepted = self.client.post(
            '/api/bs/member/',
            {'automaton': self.source, 'thickness': 3, 'word': 'a t a t t^-1 t^-1'},
            format='json',
        )
        self.assertEqual(accepted.status_code, 200)
        self.assertEqual(accepted.json(), {'accepted': True, 'element': '(3, 0)'})
        rejected = self.client.post(
            '/api/bs/member/',
            {'automaton': self.source, 'thickness': 3, 'word': 'a'},
            format='json',
        )
        self.assertFalse(rejected.json()['accepted'])
        self.assertEqual(CompiledSet.objects.count(), 1)
