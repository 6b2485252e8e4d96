import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pexkit.signals import (AnalyticSignal, DiscreteSignal, SampledSignal, SineTerm,
                            multi_derivative, multi_shift, sample, shift, stack)


class TestDiscreteSignal:
    def test_promotes_1d(self):
        w = DiscreteSignal([1.0, 2.0, 3.0])
        assert w.dim == 1 and w.length == 3

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="non-finite"):
            DiscreteSignal([[1.0, np.inf]])

    def test_sup_norm_is_max_column_norm(self):
        w = DiscreteSignal([[3.0, 0.0], [4.0, 1.0]])
        assert w.sup_norm() == 5.0

    def test_data_is_readonly(self):
        w = DiscreteSignal([1.0, 2.0])
        with pytest.raises(ValueError):
            w.data[0, 0] = 9.0


class TestShift:
    def test_scalar_by_one(self):
        out = shift(DiscreteSignal([1.0, 2.0, 3.0]), 1)
        np.testing.assert_array_equal(out.data, [[0.0, 1.0, 2.0]])

    def test_zero_is_identity(self):
        w = DiscreteSignal([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(shift(w, 0).data, w.data)

    def test_shift_past_length_is_zero(self):
        out = shift(DiscreteSignal([5.0, 7.0]), 3)
        np.testing.assert_array_equal(out.data, [[0.0, 0.0]])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            shift(DiscreteSignal([1.0]), -1)

    @given(a=st.integers(0, 6), b=st.integers(0, 6))
    @settings(max_examples=40, deadline=None)
    def test_composition(self, a, b):
        rng = np.random.default_rng(7)
        w = DiscreteSignal(rng.standard_normal((2, 12)))
        lhs = shift(shift(w, a), b)
        rhs = shift(w, a + b)
        np.testing.assert_array_equal(lhs.data, rhs.data)


class TestMultiShift:
    def test_scalar_depth_two(self):
        out = multi_shift(DiscreteSignal([1.0, 2.0, 3.0]), 2)
        np.testing.assert_array_equal(out.data, [[0.0, 1.0, 2.0], [1.0, 2.0, 3.0]])

    def test_depth_one_is_identity(self):
        w = DiscreteSignal([[1.0, 2.0, 3.0]])
        np.testing.assert_array_equal(multi_shift(w, 1).data, w.data)

    def test_blocks_match_shift(self):
        rng = np.random.default_rng(0)
        w = DiscreteSignal(rng.standard_normal((2, 9)))
        k = 3
        out = multi_shift(w, k)
        assert out.dim == 2 * k
        for j in range(k):
            block = out.data[2 * j : 2 * (j + 1)]
            np.testing.assert_array_equal(block, shift(w, k - 1 - j).data)

    def test_last_rows_reproduce_signal(self):
        rng = np.random.default_rng(1)
        w = DiscreteSignal(rng.standard_normal((3, 10)))
        out = multi_shift(w, 4)
        np.testing.assert_array_equal(out.data[-3:], w.data)


class TestAnalyticSignal:
    def test_sin_derivative_pair(self):
        w = AnalyticSignal(((SineTerm(1.0, 1.0),),))
        d2 = multi_derivative(w, 2)
        t = np.linspace(0, 5, 40)
        np.testing.assert_allclose(d2(t)[0], np.cos(t), atol=1e-14)
        np.testing.assert_allclose(d2(t)[1], np.sin(t), atol=1e-14)

    def test_depth_one_identity(self):
        w = AnalyticSignal(((SineTerm(2.0, 3.0, 0.5, 1.0),),))
        t = np.linspace(0, 2, 11)
        np.testing.assert_allclose(multi_derivative(w, 1)(t), w(t))

    def test_repeated_differentiation(self):
        w = AnalyticSignal(((SineTerm(1.0, 2.0),),))
        d3 = multi_derivative(w, 3)
        t = np.linspace(0, 4, 25)
        np.testing.assert_allclose(d3(t)[0], -4.0 * np.sin(2 * t), atol=1e-13)
        np.testing.assert_allclose(d3(t)[1], 2.0 * np.cos(2 * t), atol=1e-13)
        np.testing.assert_allclose(d3(t)[2], np.sin(2 * t), atol=1e-13)

    def test_derivative_of_derivative_stacks(self):
        w = AnalyticSignal(((SineTerm(1.0, 1.0), SineTerm(0.5, 2.0)),))
        once_then_k = multi_derivative(multi_derivative(w, 1), 3)
        direct = multi_derivative(w, 3)
        t = np.linspace(0, 3, 17)
        np.testing.assert_allclose(once_then_k(t), direct(t))

    def test_closure_under_differentiation(self):
        w = AnalyticSignal(((SineTerm(1.0, 1.5, 0.2, 0.7),), (SineTerm(2.0, 0.5),)))
        d = w.derivative()
        assert isinstance(d, AnalyticSignal) and d.dim == w.dim

    def test_amplitude_bound_holds_on_grid(self):
        w = AnalyticSignal((
            (SineTerm(1.3, 2.0, 0.3, 0.4), SineTerm(0.7, 5.0)),
            (SineTerm(2.0, 1.0, 1.0, -1.0),),
        ))
        t = np.linspace(0, 50, 20001)
        for order in range(4):
            values = np.abs(w.derivative(order)(t))
            assert values.max() <= w.amplitude_bound(order) + 1e-12


class TestSample:
    def test_sine_quarter_period(self):
        w = AnalyticSignal(((SineTerm(1.0, 1.0),),))
        s = sample(w, np.pi / 2, 3)
        np.testing.assert_allclose(s.data, [[0.0, 1.0, 0.0]], atol=1e-12)

    def test_constant(self):
        w = AnalyticSignal(((SineTerm(0.0, 0.0, 0.0, 2.0),),))
        s = sample(w, 0.1, 5)
        np.testing.assert_array_equal(s.data, np.full((1, 5), 2.0))

    def test_two_tone_value(self):
        # sin(1) + sin(2), evaluated independently at 30 digits
        w = AnalyticSignal(((SineTerm(1.0, 1.0), SineTerm(1.0, 2.0)),))
        s = sample(w, 1.0, 2)
        assert s.data[0, 1] == pytest.approx(1.7507684116335782, abs=1e-15)

    def test_grid_metadata(self):
        w = AnalyticSignal(((SineTerm(1.0, 1.0),),))
        s = sample(w, 0.5, 4, t0=2.0)
        np.testing.assert_allclose(s.times, [2.0, 2.5, 3.0, 3.5])

    def test_bad_grid_rejected(self):
        w = AnalyticSignal(((SineTerm(1.0, 1.0),),))
        with pytest.raises(ValueError):
            sample(w, -0.1, 5)
        with pytest.raises(ValueError):
            sample(w, 0.1, 0)


class TestStack:
    def test_discrete(self):
        a = DiscreteSignal([[1.0, 2.0]])
        b = DiscreteSignal([[3.0, 4.0], [5.0, 6.0]])
        out = stack(a, b)
        assert out.dim == 3
        np.testing.assert_array_equal(out.data[0], [1.0, 2.0])

    def test_mismatched_length_rejected(self):
        with pytest.raises(ValueError):
            stack(DiscreteSignal([[1.0]]), DiscreteSignal([[1.0, 2.0]]))

    def test_sampled_grid_must_match(self):
        a = SampledSignal([[1.0, 2.0]], step=0.1)
        b = SampledSignal([[1.0, 2.0]], step=0.2)
        with pytest.raises(ValueError):
            stack(a, b)
