import numpy as np
import pytest
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError, DegenerateMaskError, DimensionError, GradientError
from numerics import functional as F
from numerics.gradcheck import check_gradients
from numerics.tensor import Tensor, precision


def leaf(array):
    return Tensor(np.asarray(array, dtype=np.float64), requires_grad=True, dtype=np.float64)


@pytest.mark.unit
class MatmulTests(SimpleTestCase):
    def test_identity_product(self):
        x = Tensor(np.arange(9.0).reshape(3, 3))
        out = F.matmul(Tensor(np.eye(3)), x)
        np.testing.assert_array_equal(out.data, x.data)

    def test_hand_checked_product(self):
        out = F.matmul(Tensor([[1, 2], [3, 4]]), Tensor([[1], [1]]))
        np.testing.assert_array_equal(out.data, [[3], [7]])

    def test_shape_mismatch_names_both_shapes(self):
        with self.assertRaises(DimensionError) as ctx:
            F.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
        self.assertIn("(2, 3) and (2, 3)", str(ctx.exception))

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(1)
        with precision(np.float64):
            a, b = leaf(rng.standard_normal((5, 4))), leaf(rng.standard_normal((4, 3)))
            weights = Tensor(rng.standard_normal((5, 3)))
            worst = check_gradients(lambda: F.sum(F.mul(F.matmul(a, b), weights)), [a, b])
        self.assertLess(worst, 1e-4)


@pytest.mark.unit
class SoftmaxTests(SimpleTestCase):
    def test_uniform_logits(self):
        np.testing.assert_allclose(F.softmax(Tensor([0.0, 0.0, 0.0])).data, [1 / 3] * 3, atol=1e-7)

    def test_single_unmasked_entry(self):
        out = F.softmax(Tensor([[0.3, 2.0, -1.0]]), mask=np.array([[False, True, False]]))
        np.testing.assert_array_equal(out.data, [[0.0, 1.0, 0.0]])

    def test_matches_high_precision_reference(self):
        row = np.random.default_rng(3).standard_normal(17)
        expected = np.exp(row) / np.exp(row).sum()
        np.testing.assert_allclose(F.softmax(Tensor(row)).data, expected, atol=1e-6)

    def test_rows_sum_to_one_and_masked_entries_are_zero(self):
        rng = np.random.default_rng(4)
        mask = rng.random((6, 9)) > 0.5
        mask[:, 0] = True
        out = F.softmax(Tensor(rng.standard_normal((6, 9)) * 5), mask=mask).data
        np.testing.assert_allclose(out.sum(axis=-1), 1.0, atol=1e-6)
        self.assertTrue((out[~mask] == 0).all())

    def test_all_masked_row_is_rejected(self):
        with self.assertRaises(DegenerateMaskError):
            F.softmax(Tensor(np.zeros((2, 3))), mask=np.array([[True, False, False], [False, False, False]]))

    def test_masked_gradient(self):
        rng = np.random.default_rng(5)
        mask = np.array([[True, False, True, True], [False, True, True, False]])
        with precision(np.float64):
            x = leaf(rng.standard_normal((2, 4)))
            weights = Tensor(rng.standard_normal((2, 4)))
            worst = check_gradients(lambda: F.sum(F.mul(F.softmax(x, mask), weights)), [x])
        self.assertLess(worst, 1e-4)


@pytest.mark.unit
class SegmentSoftmaxTests(SimpleTestCase):
    def test_matches_per_group_softmax(self):
        scores = np.array([0.5, -1.0, 2.0, 0.0, 3.0])
        segments = np.array([0, 0, 1, 1, 1])
        out = F.segment_softmax(Tensor(scores), segments, 2).data
        np.testing.assert_allclose(out[:2], np.exp(scores[:2]) / np.exp(scores[:2]).sum(), atol=1e-6)
        np.testing.assert_allclose(out[2:], np.exp(scores[2:]) / np.exp(scores[2:]).sum(), atol=1e-6)

    def test_empty_segment_is_rejected(self):
        with self.assertRaises(DegenerateMaskError):
            F.segment_softmax(Tensor([1.0, 2.0]), [0, 0], 2)

    def test_gradient(self):
        rng = np.random.default_rng(6)
        segments = np.array([2, 0, 1, 0, 2, 2])
        with precision(np.float64):
            x = leaf(rng.standard_normal(6))
            weights = Tensor(rng.standard_normal(6))
            worst = check_gradients(lambda: F.sum(F.mul(F.segment_softmax(x, segments, 3), weights)), [x])
        self.assertLess(worst, 1e-4)


@pytest.mark.unit
class ElementwiseOpTests(SimpleTestCase):
    def test_layer_norm_of_constant_vector_is_zero(self):
        out = F.layer_norm(Tensor(np.full((2, 5), 3.0)))
        np.testing.assert_array_equal(out.data, np.zeros((2, 5)))

    def test_dropout_identity_when_disabled(self):
        x = Tensor(np.ones((3, 3)))
        self.assertIs(F.dropout(x, 0.0, np.random.default_rng(0)), x)
        self.assertIs(F.dropout(x, 0.5, np.random.default_rng(0), training=False), x)

    def test_dropout_scales_kept_units(self):
        out = F.dropout(Tensor(np.ones((50, 50))), 0.5, np.random.default_rng(0)).data
        self.assertTrue(set(np.unique(out)) <= {0.0, 2.0})

    def test_dropout_rejects_invalid_probability(self):
        with self.assertRaises(ConfigurationError):
            F.dropout(Tensor([1.0]), 1.0, np.random.default_rng(0))

    def test_cross_entropy_value_and_invalid_class(self):
        loss = F.cross_entropy(Tensor([[0.0, 0.0, 0.0, 0.0]]), [2])
        self.assertAlmostEqual(float(loss.data[0]), np.log(4), places=6)
        with self.assertRaises(IndexError):
            F.cross_entropy(Tensor([[0.0, 1.0]]), [2])

    def test_differentiable_ops_match_finite_differences(self):
        rng = np.random.default_rng(7)
        with precision(np.float64):
            x = leaf(rng.standard_normal((3, 4)))
            gamma, beta = leaf(rng.standard_normal(4)), leaf(rng.standard_normal(4))
            away_from_zero = leaf(rng.uniform(0.5, 1.5, (3, 4)) * rng.choice([-1, 1], (3, 4)))
            table = leaf(rng.standard_normal((5, 4)))
            weights = Tensor(rng.standard_normal((3, 4)))
            cases = {
                "layer_norm": (lambda: F.sum(F.mul(F.layer_norm(x, gamma, beta), weights)), [x, gamma, beta]),
                "relu": (lambda: F.sum(F.mul(F.relu(away_from_zero), weights)), [away_from_zero]),
                "sigmoid": (lambda: F.sum(F.mul(F.sigmoid(x), weights)), [x]),
                "exp_log": (lambda: F.sum(F.log(F.add(F.exp(x), 1.0))), [x]),
                "cross_entropy": (lambda: F.sum(F.cross_entropy(x, [0, 3, 1])), [x]),
                "index_select": (lambda: F.sum(F.mul(F.index_select(table, [4, 0, 4]), weights)), [table]),
                "concat": (lambda: F.sum(F.mul(F.concat([x[:, :1], x[:, 1:]]), weights)), [x]),
                "div": (lambda: F.sum(F.div(weights, F.add(F.exp(x), 1.0))), [x]),
                "mean_rows": (lambda: F.sum(F.mul(F.mean(x, axis=0), gamma)), [x, gamma]),
                "pick": (lambda: F.sum(F.pick(x, [1, 1, 3])), [x]),
            }
            for name, (loss_fn, tensors) in cases.items():
                with self.subTest(op=name):
                    self.assertLess(check_gradients(loss_fn, tensors), 1e-4)


@pytest.mark.unit
class BackwardTests(SimpleTestCase):
    def test_sum_gives_all_ones(self):
        x = Tensor(np.zeros((2, 3)), requires_grad=True)
        F.sum(x).backward()
        np.testing.assert_array_equal(x.grad, np.ones((2, 3)))

    def test_square_of_scalar(self):
        x = Tensor(3.0, requires_grad=True)
        (x * x).backward()
        self.assertEqual(float(x.grad), 6.0)

    def test_repeated_backward_accumulates(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        loss = F.sum(x * 2.0)
        loss.backward()
        loss.backward()
        np.testing.assert_array_equal(x.grad, [4.0, 4.0])
        x.zero_grad()
        np.testing.assert_array_equal(x.grad, [0.0, 0.0])

    def test_non_scalar_loss_is_rejected(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with self.assertRaises(GradientError):
            (x * 2.0).backward()

    def test_every_reachable_tensor_receives_a_gradient(self):
        x = Tensor([1.0, -2.0], requires_grad=True)
        hidden = F.relu(x)
        F.sum(hidden).backward()
        self.assertIsNotNone(hidden.grad)
        np.testing.assert_array_equal(x.grad, [1.0, 0.0])
