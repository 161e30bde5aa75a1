"""
Unit tests for Brauer diagrams, the Brauer algebra and its ideals.
"""

import unittest

import pytest
from sympy import QQ

from bmw_workbench.brauer import (
    BrauerAlgebra,
    BrauerDiagram,
    compose_matchings,
    diagram_to_word,
    double_factorial,
    enumerate_diagrams,
    format_word,
    is_star_stable,
    parse_word,
    presentation_relations,
    through_filtration,
)
from bmw_workbench.exceptions import IndexRangeError, RankMismatchError, RankTooSmallError


@pytest.mark.unit
class TestBrauerDiagram(unittest.TestCase):
    """Test cases for single diagrams and their composition."""

    def test_counts(self):
        for r in range(1, 5):
            self.assertEqual(len(enumerate_diagrams(r)), double_factorial(2 * r - 1))
        self.assertEqual(double_factorial(9), 945)

    def test_e_squared_closes_one_loop(self):
        e1 = BrauerDiagram.e(1, 3)
        product, loops = e1.compose(e1)
        self.assertEqual(product, e1)
        self.assertEqual(loops, 1)

    def test_permutation_diagrams_compose_like_permutations(self):
        a = BrauerDiagram.from_permutation((2, 3, 1))
        b = BrauerDiagram.from_permutation((1, 3, 2))
        product, loops = a.compose(b)
        self.assertEqual(loops, 0)
        # 1 -> 2 -> 3
        self.assertEqual(product.permutation()[0], 3)

    def test_compose_matchings_counts_closed_loops(self):
        cap_cup = (1, 0, 3, 2)
        out, loops = compose_matchings(cap_cup, 2, 2, cap_cup, 2)
        self.assertEqual(out, cap_cup)
        self.assertEqual(loops, 1)

    def test_star_is_an_involution_and_reverses_products(self):
        diagrams = enumerate_diagrams(3)
        for a in diagrams[:5]:
            self.assertEqual(a.star().star(), a)
            for b in diagrams[-5:]:
                ab, loops = a.compose(b)
                ba, loops_star = b.star().compose(a.star())
                self.assertEqual(ab.star(), ba)
                self.assertEqual(loops, loops_star)

    def test_text_form(self):
        d = BrauerDiagram.e(1, 2)
        self.assertEqual(str(d), "[(T1,T2),(B1,B2)]")
        self.assertEqual(BrauerDiagram.parse(str(d), 2), d)

    def test_embed(self):
        d = BrauerDiagram.e(1, 2).embed(3)
        self.assertEqual(d, BrauerDiagram.e(1, 3))
        with self.assertRaises(RankMismatchError):
            BrauerDiagram.identity(3).embed(2)

    def test_index_range(self):
        with self.assertRaises(IndexRangeError):
            BrauerDiagram.s(3, 3)

    def test_canonical_words_evaluate_to_their_diagram(self):
        algebra = BrauerAlgebra(3)
        for d in algebra.basis():
            self.assertEqual(algebra.from_word(diagram_to_word(d)), algebra.diagram(d))

    def test_word_text_form(self):
        word = (("s", 1), ("e", 2))
        self.assertEqual(format_word(word), "s1 e2")
        self.assertEqual(parse_word("s1 e2"), word)
        self.assertEqual(parse_word("1"), ())
        with self.assertRaises(ValueError):
            parse_word("x1")


@pytest.mark.unit
class TestBrauerAlgebra(unittest.TestCase):
    """Test cases for B_r(3)."""

    def setUp(self):
        self.algebra = BrauerAlgebra(4)

    def test_presentation_holds(self):
        for name, lhs, rhs in presentation_relations(self.algebra):
            self.assertEqual(lhs, rhs, name)

    def test_loop_value(self):
        e1 = self.algebra.e(1)
        self.assertEqual(e1 * e1, e1.scale(3))

    def test_star_is_an_anti_automorphism(self):
        x = self.algebra.s(1) + self.algebra.e(2).scale(QQ(1, 2))
        y = self.algebra.e(3) * self.algebra.s(2)
        self.assertEqual((x * y).star(), y.star() * x.star())

    def test_phi_is_star_invariant(self):
        phi = self.algebra.phi()
        self.assertFalse(phi.is_zero())
        self.assertEqual(phi.star(), phi)

    def test_phi_needs_rank_four(self):
        with self.assertRaises(RankTooSmallError):
            BrauerAlgebra(3).phi()

    def test_rank_mismatch(self):
        with self.assertRaises(RankMismatchError):
            _ = self.algebra.one() * BrauerAlgebra(3).one()

    def test_vector_round_trip(self):
        x = self.algebra.F()
        self.assertEqual(self.algebra.from_vector(self.algebra.to_vector(x)), x)

    def test_through_filtration(self):
        self.assertEqual(len(through_filtration(4, 0)), 9)
        self.assertEqual(len(self.algebra.through_filtration(4)), 105)

    def test_ideal_of_e1_is_the_through_filtration(self):
        algebra = BrauerAlgebra(3)
        ideal = algebra.ideal_closure([algebra.e(1)])
        self.assertEqual(ideal.dim, len(algebra.through_filtration(1)))
        self.assertTrue(is_star_stable(algebra, ideal))

    def test_ideal_of_phi(self):
        ideal = self.algebra.ideal_closure([self.algebra.phi()])
        self.assertEqual(ideal.dim, 14)
        self.assertTrue(is_star_stable(self.algebra, ideal))


if __name__ == "__main__":
    unittest.main()
