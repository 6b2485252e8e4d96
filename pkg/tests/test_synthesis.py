import numpy as np
import pytest

from pexkit.excitation import pe_check
from pexkit.signals import (AnalyticSignal, DiscreteSignal, multi_derivative,
                            multi_shift, sample)
from pexkit.synthesis import (SynthesisError, SynthesisRequest, SynthesisResult,
                              synthesize_sr_input)


class TestRequestValidation:
    def test_rejects_nonpositive_dims(self):
        with pytest.raises(ValueError):
            SynthesisRequest(n=0, m=1)
        with pytest.raises(ValueError):
            SynthesisRequest(n=2, m=0)

    def test_rejects_bad_domain_and_class(self):
        with pytest.raises(ValueError):
            SynthesisRequest(n=1, m=1, domain="zt")
        with pytest.raises(ValueError):
            SynthesisRequest(n=1, m=1, output_class="y")

    def test_stack_dimensions(self):
        req = SynthesisRequest(n=3, m=2, output_class="xu")
        assert req.stack_depth == 4
        assert req.stack_dim == 8


class TestSynthesizeDt:
    def test_single_state_single_tone(self):
        result = synthesize_sr_input(SynthesisRequest(n=1, m=1, horizon=400))
        assert sum(len(ch) for ch in result.tones) == 1
        assert result.certificate.is_pe

    def test_two_state_scalar_input(self):
        result = synthesize_sr_input(SynthesisRequest(n=2, m=1, horizon=600))
        assert result.certificate.is_pe
        stacked = multi_shift(result.signal, 2)
        recheck = pe_check(stacked, int(result.window), result.certificate.tol)
        assert recheck.margin == result.certificate.margin

    def test_certificate_reverifies_exactly(self):
        req = SynthesisRequest(n=3, m=2, output_class="xu", horizon=800, seed=5)
        result = synthesize_sr_input(req)
        stacked = multi_shift(result.signal, req.stack_depth)
        recheck = pe_check(stacked, int(result.window), result.certificate.tol)
        assert recheck.is_pe
        assert recheck.margin == result.certificate.margin

    def test_deterministic_in_seed(self):
        req = SynthesisRequest(n=2, m=2, horizon=500, seed=9)
        a = synthesize_sr_input(req)
        b = synthesize_sr_input(req)
        assert a.tones == b.tones
        np.testing.assert_array_equal(a.signal.data, b.signal.data)
        assert a.certificate.margin == b.certificate.margin

    def test_seeds_move_tones(self):
        a = synthesize_sr_input(SynthesisRequest(n=2, m=1, horizon=500, seed=0))
        b = synthesize_sr_input(SynthesisRequest(n=2, m=1, horizon=500, seed=1))
        assert a.tones != b.tones

    def test_tone_constraints(self):
        result = synthesize_sr_input(SynthesisRequest(n=4, m=3, output_class="xu",
                                                      horizon=900, seed=3))
        tones = [w for ch in result.tones for w in ch]
        assert len(set(tones)) == len(tones)
        assert all(0.0 < w < np.pi for w in tones)

    def test_scaling_keeps_certificate(self):
        result = synthesize_sr_input(SynthesisRequest(n=2, m=1, horizon=500))
        for lam in (0.5, 7.0):
            stacked = multi_shift(result.signal.scaled(lam), 2)
            recheck = pe_check(stacked, int(result.window),
                               result.certificate.tol * lam**2)
            assert recheck.is_pe

    def test_budget_exhaustion_carries_best(self):
        req = SynthesisRequest(n=4, m=1, horizon=60, window=40, max_tones=2)
        with pytest.raises(SynthesisError) as exc_info:
            synthesize_sr_input(req)
        assert isinstance(exc_info.value.best, SynthesisResult)
        assert not exc_info.value.best.certificate.is_pe


class TestSynthesizeCt:
    def test_scalar_continuous(self):
        result = synthesize_sr_input(SynthesisRequest(n=1, m=1, domain="ct",
                                                      horizon=30.0))
        assert isinstance(result.signal, AnalyticSignal)
        assert result.certificate.is_pe

    def test_certificate_reverifies(self):
        req = SynthesisRequest(n=3, m=2, domain="ct", output_class="x",
                               horizon=40.0, seed=7)
        result = synthesize_sr_input(req)
        length = int(round(req.horizon / req.step)) + 1
        stacked = sample(multi_derivative(result.signal, req.stack_depth),
                         req.step, length)
        recheck = pe_check(stacked, result.window, result.certificate.tol)
        assert recheck.is_pe
        assert recheck.margin == result.certificate.margin

    def test_random_requests_all_certify(self):
        rng = np.random.default_rng(101)
        for i in range(6):
            req = SynthesisRequest(n=int(rng.integers(1, 5)), m=int(rng.integers(1, 4)),
                                   domain="ct" if i % 2 else "dt",
                                   output_class="xu" if rng.random() < 0.5 else "x",
                                   horizon=35.0 if i % 2 else 800, seed=i)
            result = synthesize_sr_input(req)
            assert result.certificate.is_pe
