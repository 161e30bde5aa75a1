"""
Unit tests for the BMW algebra over QQ(q): skein reduction, relations,
specialization, coefficient support and cached structure tables.
"""

import json
import os
import shutil
import tempfile
import unittest

import pytest
from sympy import QQ

from bmw_workbench.bmwq import (
    BMWAlgebra,
    SkeinEngine,
    associativity_oracle,
    cache_path,
    coefficient_support,
    element_support,
    load_structure_table,
    phi_coefficients,
    phi_q_identities,
    specialization_oracle,
    specialize_to_brauer,
    structure_table,
    table_support,
    tilde_phi_coefficients,
    validate_relations,
)
from bmw_workbench.brauer import BrauerAlgebra, BrauerDiagram
from bmw_workbench.exceptions import CacheError, RankTooSmallError, ResourceGuardError, RewriteLimitError
from bmw_workbench.scalars import DELTA, ONE, Y, Z, LaurentPoly, ScalarQ


@pytest.mark.unit
class TestSkeinEngine(unittest.TestCase):
    """Test cases for reducing words to the descending basis."""

    def test_descending_crossing_is_a_basis_element(self):
        engine = SkeinEngine(2)
        s1 = BrauerDiagram.s(1, 2)
        self.assertEqual(engine.evaluate((("g", 1),)), {s1: ONE})

    def test_inverse_crossing_uses_the_skein_relation(self):
        engine = SkeinEngine(2)
        result = engine.evaluate((("G", 1),))
        self.assertEqual(result[BrauerDiagram.s(1, 2)], ONE)
        self.assertEqual(result[BrauerDiagram.identity(2)], -Z)
        self.assertEqual(result[BrauerDiagram.e(1, 2)], Z)

    def test_kink_and_loop_factors(self):
        engine = SkeinEngine(2)
        e1 = BrauerDiagram.e(1, 2)
        self.assertEqual(engine.evaluate((("g", 1), ("e", 1))), {e1: Y})
        self.assertEqual(engine.evaluate((("e", 1), ("e", 1))), {e1: DELTA})

    def test_rewrite_budget(self):
        engine = SkeinEngine(2, max_steps=1)
        with self.assertRaises(RewriteLimitError):
            engine.evaluate((("G", 1),))


@pytest.mark.unit
class TestBMWAlgebra(unittest.TestCase):
    """Test cases for BMW_r(q) at small rank."""

    def setUp(self):
        self.algebra = BMWAlgebra(3)

    def test_relations_hold(self):
        results = validate_relations(self.algebra)
        self.assertTrue(results)
        self.assertEqual([res.name for res in results if not res.passed], [])

    def test_inverse(self):
        self.assertEqual(self.algebra.g(1) * self.algebra.g_inv(1), self.algebra.one())
        self.assertEqual(self.algebra.g_inv(2) * self.algebra.g(2), self.algebra.one())

    def test_star_reverses_words(self):
        x = self.algebra.word_element((("g", 1), ("e", 2)))
        y = self.algebra.word_element((("e", 2), ("g", 1)))
        self.assertEqual(x.star(), y)

    def test_specialization_of_generators(self):
        brauer = BrauerAlgebra(3)
        self.assertEqual(specialize_to_brauer(self.algebra.g(1), brauer), brauer.s(1))
        self.assertEqual(specialize_to_brauer(self.algebra.g_inv(2), brauer), brauer.s(2))
        self.assertEqual(self.algebra.e(1).specialize(), brauer.e(1))

    def test_f_specializes_to_one_minus_s(self):
        brauer = BrauerAlgebra(3)
        self.assertEqual(self.algebra.f(1).specialize(), brauer.one() - brauer.s(1))

    def test_resource_guard(self):
        with self.assertRaises(ResourceGuardError):
            BMWAlgebra(6)


@pytest.mark.unit
class TestPhiCoefficients(unittest.TestCase):
    """Test cases for the coefficients of Phi_q and their denominators."""

    def test_values_at_q_equal_one(self):
        coeffs = phi_coefficients()
        self.assertEqual(coeffs["a"].specialize_q1(), 1)
        self.assertEqual(coeffs["b"].specialize_q1(), 1)
        self.assertEqual(coeffs["c"].specialize_q1(), QQ(1, 4))
        self.assertEqual(coeffs["d"].specialize_q1(), 0)

    def test_tilde_coefficients_scale_by_q2_plus_q_minus_2(self):
        factor = ScalarQ(LaurentPoly.from_coeffs({2: 1, -2: 1}))
        tilde = tilde_phi_coefficients()
        for name, value in phi_coefficients().items():
            self.assertEqual(tilde[name], value * factor)

    def test_support_rows(self):
        rows = {row.name: row for row in coefficient_support()}
        self.assertEqual(set(rows), {"a", "b", "c", "d", "tilde_a", "tilde_b", "tilde_c", "tilde_d"})
        for name in ("a", "b", "c", "d"):
            self.assertTrue(rows[name].in_localization, name)
        self.assertTrue(rows["d"].laurent)
        self.assertFalse(rows["c"].laurent)


@pytest.mark.unit
class TestEngineOracles(unittest.TestCase):
    """Test cases for the consistency checks of the engine at rank three."""

    def setUp(self):
        self.algebra = BMWAlgebra(3)

    def test_specialization_matches_brauer_products(self):
        result = specialization_oracle(self.algebra)
        self.assertTrue(result.passed)
        self.assertIn("225 checked", result.name)

    def test_specialization_with_workers(self):
        self.assertTrue(specialization_oracle(self.algebra, workers=2).passed)

    def test_associativity(self):
        result = associativity_oracle(self.algebra, samples=60, seed=5)
        self.assertTrue(result.passed)
        self.assertIn("60 checked", result.name)

    def test_coefficients_of_an_inverse_lie_in_the_localization(self):
        self.assertTrue(element_support(self.algebra.g_inv(1) * self.algebra.g_inv(2)))

    def test_phi_q_identities_need_rank_four(self):
        with self.assertRaises(RankTooSmallError):
            phi_q_identities(self.algebra)


@pytest.mark.slow
class TestPhiQ(unittest.TestCase):
    """Test cases for Phi_q at rank four."""

    @classmethod
    def setUpClass(cls):
        cls.algebra = BMWAlgebra(4)
        cls.t = ScalarQ(LaurentPoly.from_coeffs({2: 1, -2: 1}))
        cls.F = cls.algebra.F()
        cls.phi = cls.algebra.phi()

    def test_phi_q_specializes_to_phi(self):
        self.assertEqual(self.phi.specialize(), BrauerAlgebra(4).phi())

    def test_f_q_is_a_quasi_idempotent(self):
        self.assertEqual(self.F * self.F, self.F.scale(self.t * self.t))

    def test_cup_caps_kill_phi_q_from_the_left(self):
        for i in (1, 2, 3):
            self.assertTrue((self.algebra.e(i) * self.phi).is_zero(), f"e{i}")

    def test_cup_caps_kill_phi_q_from_the_right(self):
        for i in (1, 2, 3):
            self.assertTrue((self.phi * self.algebra.e(i)).is_zero(), f"e{i}")

    def test_phi_q_is_a_quasi_idempotent(self):
        b = phi_coefficients()["b"]
        self.assertEqual(self.phi * self.phi, self.phi.scale(-(self.t * self.t * b)))

    def test_tilde_phi_q_rescales_phi_q(self):
        self.assertEqual(self.algebra.tilde_phi(), self.phi.scale(self.t))

    def test_identity_report(self):
        results = phi_q_identities(self.algebra)
        self.assertEqual(len(results), 9)
        self.assertEqual([res.name for res in results if not res.passed], [])

    def test_coefficients_lie_in_the_localization(self):
        self.assertTrue(element_support(self.phi))
        self.assertTrue(element_support(self.algebra.tilde_phi()))


@pytest.mark.slow
class TestEngineOraclesRankFour(unittest.TestCase):
    """Test cases for the engine consistency checks at rank four."""

    def test_specialization_is_exhaustive(self):
        result = specialization_oracle(BMWAlgebra(4), workers=2)
        self.assertTrue(result.passed)
        self.assertIn("11025 checked", result.name)

    def test_associativity(self):
        self.assertTrue(associativity_oracle(BMWAlgebra(4), samples=200, seed=20240611).passed)

    def test_relations(self):
        results = validate_relations(BMWAlgebra(4))
        self.assertEqual([res.name for res in results if not res.passed], [])


@pytest.mark.unit
class TestStructureTable(unittest.TestCase):
    """Test cases for building and caching structure tables."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_build_and_cache(self):
        table = structure_table(BMWAlgebra(2), cache_dir=self.temp_dir)
        self.assertEqual(len(table), 9)
        path = cache_path(self.temp_dir, 2)
        self.assertTrue(path.exists())
        ok, count = table_support(table)
        self.assertTrue(ok)
        self.assertGreater(count, 0)

        reloaded = structure_table(BMWAlgebra(2), cache_dir=self.temp_dir)
        self.assertEqual(reloaded.entries, table.entries)

    def test_cache_path_depends_on_code_version(self):
        self.assertNotEqual(cache_path(self.temp_dir, 3, "v1"), cache_path(self.temp_dir, 3, "v2"))

    def test_corrupt_cache_is_rejected(self):
        path = cache_path(self.temp_dir, 2)
        table = structure_table(BMWAlgebra(2), cache_dir=self.temp_dir)
        payload = table.to_payload()
        payload["entries"][0][2] = [[0, "q^7"]]
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)

        with self.assertRaises(CacheError):
            load_structure_table(path, BMWAlgebra(2), samples=len(table))

        # structure_table discards the bad file and rebuilds it
        rebuilt = structure_table(BMWAlgebra(2), cache_dir=self.temp_dir)
        self.assertEqual(rebuilt.entries, table.entries)

    def test_unreadable_cache(self):
        path = os.path.join(self.temp_dir, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write("{not json")
        with self.assertRaises(CacheError):
            load_structure_table(path, BMWAlgebra(2))


if __name__ == "__main__":
    unittest.main()
