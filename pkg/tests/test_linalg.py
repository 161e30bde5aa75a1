"""
Unit tests for sparse exact linear algebra helpers.
"""

import unittest

import pytest
from sympy import QQ

from bmw_workbench.linalg import (
    QF,
    Subspace,
    left_kernel,
    mat_vec,
    matrix_from_rows,
    nullspace,
    parallel_map,
    rank,
    to_domain_element,
)
from bmw_workbench.scalars import DELTA, ScalarQ


@pytest.mark.unit
class TestKernels(unittest.TestCase):
    """Test cases for rank and kernel computations."""

    def setUp(self):
        self.rows = [{0: QQ(1), 1: QQ(2)}, {0: QQ(2), 1: QQ(4)}, {2: QQ(1)}]

    def test_rank(self):
        self.assertEqual(rank(self.rows, 3, QQ), 2)
        self.assertEqual(rank([], 3, QQ), 0)

    def test_nullspace(self):
        kernel = nullspace(self.rows, 3, QQ)
        self.assertEqual(kernel, [{1: QQ(1), 0: QQ(-2)}])

    def test_left_kernel(self):
        relations = left_kernel(self.rows, 3, QQ)
        self.assertEqual(len(relations), 1)
        c = relations[0]
        self.assertEqual(c.get(0, QQ(0)) * 2 + c.get(1, QQ(0)) * 4, QQ(0))
        self.assertFalse(c.get(2))

    def test_mat_vec(self):
        m = matrix_from_rows(self.rows, 3, QQ)
        self.assertEqual(mat_vec(m, {0: QQ(1), 2: QQ(3)}), {0: QQ(1), 1: QQ(2), 2: QQ(3)})


@pytest.mark.unit
class TestSubspace(unittest.TestCase):
    """Test cases for echelon-form subspaces."""

    def test_span_is_canonical(self):
        a = Subspace.span([{0: QQ(1), 1: QQ(1)}, {1: QQ(1)}], 3, QQ)
        b = Subspace.span([{0: QQ(2)}, {0: QQ(1), 1: QQ(-1)}], 3, QQ)
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))
        self.assertEqual(a.dim, 2)

    def test_containment_and_sum(self):
        line = Subspace.span([{0: QQ(1), 2: QQ(1)}], 3, QQ)
        plane = Subspace.span([{0: QQ(1)}, {2: QQ(1)}], 3, QQ)
        self.assertTrue(line <= plane)
        self.assertFalse(plane <= line)
        self.assertEqual(line.intersection_dim(plane), 1)
        self.assertEqual(plane.sum(Subspace.span([{1: QQ(1)}], 3, QQ)), Subspace.full(3, QQ))
        self.assertEqual(line.first_missing(plane), {0: QQ(1)})
        self.assertIsNone(plane.first_missing(line))

    def test_zero_space(self):
        zero = Subspace.zero(4, QQ)
        self.assertEqual(zero.dim, 0)
        self.assertTrue(zero <= Subspace.full(4, QQ))

    def test_rational_function_entries(self):
        delta = to_domain_element(DELTA, QF)
        v = {0: delta, 1: QF.one}
        space = Subspace.span([v], 2, QF)
        self.assertTrue(space.contains_vector({0: delta * delta, 1: delta}))
        self.assertEqual(ScalarQ(space.coordinates(v)[0]), ScalarQ(DELTA))


@pytest.mark.unit
class TestParallelMap(unittest.TestCase):
    """Test cases for the order-preserving worker map."""

    def test_order_is_preserved(self):
        items = list(range(20))
        self.assertEqual(parallel_map(lambda x: x * x, items, workers=4), [x * x for x in items])
        self.assertEqual(parallel_map(lambda x: x + 1, items), [x + 1 for x in items])


if __name__ == "__main__":
    unittest.main()
