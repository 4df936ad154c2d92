from django.contrib.auth import get_user_model
from django.test import SimpleTestCase, TestCase
from rest_framework.test import APIClient

from .exceptions import ConfigParseError, InvalidChannelCount, NumericFailure, ScenarioError, TruncationNotConverged
from .units import (
    db_to_linear,
    dbm_to_watts,
    dbw_to_watts,
    km_to_m,
    linear_to_db,
    m_to_km,
    watts_to_dbm,
    watts_to_dbw,
)


class OpenAPISchemaTests(TestCase):
    def test_schema_contains_expected_tags_and_paths(self):
        """Generate the OpenAPI schema and assert basic docs structure."""
        User = get_user_model()
        user = User.objects.create_user(username='schemauser', email='schema@example.com', password='secret')

        client = APIClient()
        # force authenticate to bypass JWT since default permission is IsAuthenticated
        client.force_authenticate(user=user)

        resp = client.get('/api/schema/')
        self.assertEqual(resp.status_code, 200)

        data = resp.json()

        tag_names = {t.get('name') for t in data.get('tags', [])}
        self.assertIn('Outage', tag_names)

        paths = data.get('paths', {})
        self.assertIn('/api/outage/runs/', paths)
        self.assertTrue(any(p.startswith('/api/outage/runs/{') and p.endswith('/export/') for p in paths))
        self.assertIn('/api/auth/token/', paths)

    def test_token_endpoint(self):
        get_user_model().objects.create_user(username='tokenuser', password='secret')
        resp = APIClient().post('/api/auth/token/', {'username': 'tokenuser', 'password': 'secret'}, format='json')
        self.assertEqual(resp.status_code, 200)

        client = APIClient()
        client.credentials(HTTP_AUTHORIZATION=f"Bearer {resp.json()['access']}")
        self.assertEqual(client.get('/api/outage/runs/').status_code, 200)


class UnitConversionTests(SimpleTestCase):
    def test_reference_values(self):
        self.assertAlmostEqual(db_to_linear(-18.0), 0.015848931924611134, places=15)
        self.assertAlmostEqual(dbw_to_watts(20.0), 100.0)
        self.assertAlmostEqual(dbm_to_watts(-160.0) / 1e-19, 1.0)
        self.assertEqual(km_to_m(300.0), 300_000.0)

    def test_round_trips(self):
        for value in (-200.0, -160.0, -18.0, -10.0, 0.0, 19.0, 30.0, 100.0):
            with self.subTest(value=value):
                self.assertAlmostEqual(linear_to_db(db_to_linear(value)), value, delta=1e-12 * max(1.0, abs(value)))
                self.assertAlmostEqual(watts_to_dbw(dbw_to_watts(value)), value, delta=1e-12 * max(1.0, abs(value)))
                self.assertAlmostEqual(watts_to_dbm(dbm_to_watts(value)), value, delta=1e-12 * max(1.0, abs(value)))
        self.assertEqual(m_to_km(km_to_m(12.5)), 12.5)


class ExceptionTests(SimpleTestCase):
    def test_hierarchy(self):
        self.assertTrue(issubclass(TruncationNotConverged, NumericFailure))
        self.assertTrue(issubclass(InvalidChannelCount, ValueError))
        self.assertTrue(issubclass(InvalidChannelCount, ScenarioError))

    def test_default_messages(self):
        self.assertEqual(str(NumericFailure()), 'Numerical evaluation failed.')
        error = TruncationNotConverged(k_max=5, last_term=0.1)
        self.assertEqual((error.k_max, error.last_term), (5, 0.1))

    def test_parse_error_location(self):
        self.assertEqual(str(ConfigParseError('unknown key', line=3, key='x')), "line 3, key 'x': unknown key")
        self.assertEqual(str(ConfigParseError('bad')), 'bad')
