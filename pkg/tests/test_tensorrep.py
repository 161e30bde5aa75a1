"""
Tests for the tensor representations on V^{(x)r}, the Bratteli data and the
kernel verification pipeline.
"""

import os
import unittest

import pytest
from sympy import QQ

from bmw_workbench.bmwq import BMWAlgebra
from bmw_workbench.brauer import BrauerAlgebra
from bmw_workbench.exceptions import IndexRangeError, ResourceGuardError
from bmw_workbench.tensorrep import (
    TensorRepresentation,
    bratteli,
    bratteli_dimension,
    build_rmatrix,
    check_commutant,
    classical_kernel,
    classical_pair,
    digits,
    engine_reports,
    homomorphism_oracle,
    phi_q_report,
    place,
    quantum_kernel_exact,
    quantum_sl2,
    sample_points,
    sampled_rank,
    tensor_relations,
    verify_main_theorem,
    weight,
    weight_spaces,
)

RUN_STRETCH = os.getenv("BMW_RUN_STRETCH", "false").lower() == "true"


@pytest.mark.unit
class TestBratteli(unittest.TestCase):
    """Test cases for the multiplicities of V^{(x)r}."""

    def test_small_ranks(self):
        self.assertEqual(bratteli(0), {0: 1})
        self.assertEqual(bratteli(1), {2: 1})
        self.assertEqual(bratteli(4), {0: 3, 2: 6, 4: 6, 6: 3, 8: 1})

    def test_dimensions(self):
        self.assertEqual(bratteli_dimension(3), 15)
        self.assertEqual(bratteli_dimension(4), 91)
        self.assertEqual(bratteli_dimension(5), 603)

    def test_components(self):
        self.assertEqual(len(bratteli(10)), 11)

    def test_multiplicities_account_for_every_vector(self):
        for r in range(1, 7):
            total = sum(m * (d + 1) for d, m in bratteli(r).items())
            self.assertEqual(total, 3 ** r)

    def test_negative_rank(self):
        with self.assertRaises(ValueError):
            bratteli(-1)


@pytest.mark.unit
class TestWeights(unittest.TestCase):
    """Test cases for the base-3 numbering of V^{(x)r}."""

    def test_digits_put_the_first_factor_first(self):
        self.assertEqual(digits(5, 2), (1, 2))
        self.assertEqual(digits(0, 3), (0, 0, 0))

    def test_weight(self):
        self.assertEqual(weight(0, 2), 4)
        self.assertEqual(weight(8, 2), -4)

    def test_weight_zero_space(self):
        self.assertEqual(weight_spaces(2)[0], (2, 4, 6))
        self.assertEqual(len(weight_spaces(3)[0]), 7)


@pytest.mark.unit
class TestRMatrix(unittest.TestCase):
    """Test cases for U_q(sl2) and its R-matrix on V (x) V."""

    def test_quantum_group_relations(self):
        self.assertTrue(quantum_sl2().check())

    def test_r_matrix_is_invertible(self):
        pair = build_rmatrix()
        identity = pair.projectors[4].add(pair.projectors[2]).add(pair.projectors[0])
        self.assertEqual(pair.R.matmul(pair.R_inv).to_dense(), identity.to_dense())

    def test_classical_r_matrix_is_the_flip(self):
        pair = classical_pair()
        flip = {3 * b + a: {3 * a + b: QQ(1)} for a in range(3) for b in range(3)}
        self.assertEqual(
            {i: {j: v for j, v in row.items() if v} for i, row in pair.R.to_dod().items()},
            flip,
        )

    def test_place_range(self):
        with self.assertRaises(IndexRangeError):
            place(build_rmatrix().R, 3, 3)


@pytest.mark.unit
class TestTensorRepresentation(unittest.TestCase):
    """Test cases for generator images on V^{(x)r}."""

    def test_classical_relations(self):
        report = tensor_relations(3, "classical")
        self.assertTrue(report.passed, report.failures)

    def test_quantum_relations(self):
        report = tensor_relations(3, "quantum")
        self.assertTrue(report.passed, report.failures)

    def test_relations_at_a_rational_point(self):
        rep = TensorRepresentation(3, "quantum", point=QQ(2))
        self.assertTrue(all(res.passed for res in rep.relation_results()))

    def test_images_commute_with_the_quantum_group(self):
        self.assertTrue(check_commutant(3, "quantum"))
        self.assertTrue(check_commutant(2, "classical"))

    def test_image_of_an_element(self):
        rep = TensorRepresentation(2, "classical")
        algebra = BrauerAlgebra(2)
        x = algebra.e(1) + algebra.s(1).scale(2)
        self.assertEqual(rep.image(x), rep.e(1) + rep.word([("s", 1)]).scale(2))

    def test_resource_guard(self):
        with self.assertRaises(ResourceGuardError):
            TensorRepresentation(6, "classical")
        with self.assertRaises(ValueError):
            TensorRepresentation(2, "mixed")


@pytest.mark.unit
class TestKernels(unittest.TestCase):
    """Test cases for exact and sampled ranks."""

    def test_faithful_below_rank_four(self):
        for r in (1, 2, 3):
            result = classical_kernel(r)
            self.assertEqual(result.kernel_dim, 0)
            self.assertEqual(result.rank, bratteli_dimension(r))

    def test_classical_rank_four(self):
        result = classical_kernel(4)
        self.assertEqual(result.rank, 91)
        self.assertEqual(result.kernel.dim, 14)

    def test_quantum_exact_rank_three(self):
        result = quantum_kernel_exact(3)
        self.assertEqual(result.rank, 15)
        self.assertEqual(result.kernel_dim, 0)

    def test_sampled_rank(self):
        result = sampled_rank(3, points=3, seed=7)
        self.assertEqual(result.method, "sampled")
        self.assertEqual(result.rank, 15)
        self.assertEqual(len(result.sample_points), 3)

    def test_exact_guard(self):
        with self.assertRaises(ResourceGuardError):
            quantum_kernel_exact(5)

    def test_sample_points_respect_the_height(self):
        points = sample_points(6, seed=3, height=4)
        self.assertEqual(len(set(points)), 6)
        for x in points:
            self.assertLessEqual(abs(x.numerator), 4)
            self.assertLessEqual(x.denominator, 4)
            self.assertNotIn(x, (QQ(0), QQ(1), QQ(-1)))

    def test_sample_points_need_enough_candidates(self):
        with self.assertRaises(ValueError):
            sample_points(1, height=1)
        with self.assertRaises(ValueError):
            sample_points(7, height=4)

    def test_sampled_rank_with_small_height(self):
        self.assertEqual(sampled_rank(3, points=2, seed=1, height=5).rank, 15)


@pytest.mark.unit
class TestEngineChecks(unittest.TestCase):
    """Test cases for the checks of the BMW engine run before the kernel comparison."""

    def test_representation_is_multiplicative(self):
        result = homomorphism_oracle(BMWAlgebra(3), samples=40, seed=2)
        self.assertTrue(result.passed)
        self.assertIn("40 checked", result.name)

    def test_engine_reports(self):
        reports = engine_reports(BMWAlgebra(3), samples=20, seed=4, height=10)
        self.assertEqual([report.setting for report in reports], ["bmw-engine", "bmw-oracles"])
        self.assertEqual(len(reports[1].checks), 3)
        for report in reports:
            self.assertTrue(report.passed, report.failures)


@pytest.mark.unit
class TestVerifyMainTheorem(unittest.TestCase):
    """Test cases for comparing kernels with the ideal of Phi."""

    def test_classical_rank_four(self):
        report = verify_main_theorem(4, "classical")
        self.assertTrue(report.passed, report.witnesses)
        self.assertTrue(report.equal)
        self.assertEqual(report.kernel_dim, 14)
        self.assertEqual(report.ideal_dim, 14)
        self.assertEqual(sorted(report.annihilated), sorted(report.lambda0))

    def test_quantum_rank_three(self):
        report = verify_main_theorem(3, "quantum")
        self.assertTrue(report.passed, report.witnesses)
        self.assertEqual(report.method, "exact")
        self.assertEqual(report.ideal_dim, 0)
        settings = [rep.setting for rep in report.relations]
        self.assertEqual(settings, ["bmw-engine", "bmw-oracles", "tensor-quantum"])

    def test_classical_mode_skips_the_engine(self):
        report = verify_main_theorem(3, "classical")
        self.assertEqual([rep.setting for rep in report.relations], ["tensor-classical"])

    def test_rank_must_be_positive(self):
        with self.assertRaises(ValueError):
            verify_main_theorem(0)


@pytest.mark.slow
class TestVerifyMainTheoremSlow(unittest.TestCase):
    """Test cases for the expensive ranks."""

    def test_quantum_rank_four_exact(self):
        report = verify_main_theorem(4, "quantum", exact=True)
        self.assertTrue(report.passed, report.witnesses)
        self.assertEqual(report.rank, 91)
        self.assertEqual(report.kernel_dim, 14)
        settings = [rep.setting for rep in report.relations]
        self.assertEqual(settings, ["bmw-engine", "bmw-oracles", "phi-q", "tensor-quantum"])

    def test_phi_q_report(self):
        report = phi_q_report()
        self.assertEqual(report.setting, "phi-q")
        self.assertIn("eta_q(Phi_q) = 0", [check.name for check in report.checks])
        self.assertTrue(report.passed, report.failures)

    def test_classical_rank_five(self):
        report = verify_main_theorem(5, "classical")
        self.assertTrue(report.passed, report.witnesses)
        self.assertEqual(report.rank, 603)
        self.assertEqual(report.kernel_dim, 342)

    @pytest.mark.skipif(not RUN_STRETCH, reason="Stretch run disabled")
    def test_quantum_rank_five_sampled(self):
        report = verify_main_theorem(5, "quantum", exact=False, points=3)
        self.assertTrue(report.passed, report.witnesses)
        self.assertEqual(report.method, "sampled")
        self.assertEqual([rep.setting for rep in report.relations], ["phi-q"])
        self.assertEqual(report.kernel_dim, 342)


if __name__ == "__main__":
    unittest.main()
