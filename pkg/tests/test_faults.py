"""Tests for single-bit transient fault injection."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cced.faults import FaultSpec, apply_fault, faulty_forward, flip_bit, sample_fault
from cced.model import ModelSpec, Parameters, forward, param_count
from cced.rng import RngStream

F32 = np.float32


class TestFlipBit:
    # analytic IEEE-754 single-precision cases
    @pytest.mark.parametrize(
        "value, bit, expected",
        [
            (1.0, 31, -1.0),       # sign bit
            (1.0, 23, 0.5),        # exponent LSB: 0x7F -> 0x7E
            (1.0, 30, math.inf),   # exponent MSB: 0xFF with zero mantissa
            (-1.0, 31, 1.0),
            (0.0, 31, -0.0),
            (1.5, 22, 1.0),        # mantissa MSB of 1.5 clears the .5
        ],
    )
    def test_analytic_cases(self, value, bit, expected):
        got = flip_bit(F32(value), bit)
        if math.isinf(expected):
            assert math.isinf(got) and got > 0
        else:
            assert got == F32(expected)
            # sign must survive even for -0.0
            assert math.copysign(1, got) == math.copysign(1, expected)

    def test_bit_30_of_one_is_positive_infinity(self):
        # 0x3F800000 ^ 0x40000000 = 0x7F800000
        assert np.isposinf(flip_bit(F32(1.0), 30))

    def test_out_of_range_bit(self):
        with pytest.raises(ValueError):
            flip_bit(F32(1.0), 32)
        with pytest.raises(ValueError):
            flip_bit(F32(1.0), -1)


def random_params(g, dims=(3, 4, 2)):
    spec = ModelSpec(dims)
    buf = g.normal(size=param_count(spec)).astype(F32)
    return spec, Parameters.for_spec(spec, buf)


class TestApplyFault:
    def test_involution(self):
        g = np.random.default_rng(10)
        spec, p = random_params(g)
        for _ in range(200):
            f = FaultSpec(int(g.integers(param_count(spec))), int(g.integers(32)))
            twice = apply_fault(apply_fault(p, f), f)
            assert twice.buffer.tobytes() == p.buffer.tobytes()

    def test_locality_single_bit(self):
        g = np.random.default_rng(11)
        spec, p = random_params(g)
        for _ in range(200):
            f = FaultSpec(int(g.integers(param_count(spec))), int(g.integers(32)))
            q = apply_fault(p, f)
            a = p.buffer.view(np.uint32)
            b = q.buffer.view(np.uint32)
            diff = a ^ b
            changed = np.flatnonzero(diff)
            assert list(changed) == [f.param_index]
            assert int(diff[f.param_index]).bit_count() == 1
            assert int(diff[f.param_index]) == 1 << f.bit_position

    def test_input_untouched(self):
        g = np.random.default_rng(12)
        spec, p = random_params(g)
        before = p.buffer.tobytes()
        apply_fault(p, FaultSpec(0, 31))
        assert p.buffer.tobytes() == before

    def test_out_of_range(self):
        g = np.random.default_rng(13)
        spec, p = random_params(g)
        with pytest.raises(ValueError):
            apply_fault(p, FaultSpec(param_count(spec), 0))
        with pytest.raises(ValueError):
            apply_fault(p, FaultSpec(0, 32))

    @given(st.integers(0, 2**32 - 1), st.integers(0, 31))
    @settings(max_examples=300, deadline=None)
    def test_involution_any_pattern(self, pattern, bit):
        v = np.uint32(pattern).view(F32)
        w = flip_bit(flip_bit(v, bit), bit)
        assert np.asarray(w, F32).tobytes() == np.asarray(v, F32).tobytes()


class TestSampleFault:
    def test_single_param_always_index_zero(self):
        rng = RngStream(1, 0)
        for _ in range(50):
            f = sample_fault(rng, 1)
            assert f.param_index == 0
            assert 0 <= f.bit_position <= 31

    def test_bounds(self):
        rng = RngStream(2, 0)
        for _ in range(500):
            f = sample_fault(rng, 17)
            assert 0 <= f.param_index < 17
            assert 0 <= f.bit_position <= 31

    def test_zero_param_count_rejected(self):
        with pytest.raises(ValueError):
            sample_fault(RngStream(3, 0), 0)

    def test_deterministic_stream(self):
        # a fresh stream with the same key replays the same draw sequence
        rng_a, rng_b = RngStream(5, 9), RngStream(5, 9)
        a = [sample_fault(rng_a, 100) for _ in range(10)]
        b = [sample_fault(rng_b, 100) for _ in range(10)]
        assert a == b
        assert len({(f.param_index, f.bit_position) for f in a}) > 1

    def test_chi_square_uniformity(self):
        # chi-square oracle over the 8 x 32 = 256 (index, bit) cells
        from scipy.stats import chi2

        rng = RngStream(1234, 0)
        n_draws, cells = 32_000, 256
        counts = np.zeros(cells, dtype=np.int64)
        for _ in range(n_draws):
            f = sample_fault(rng, 8)
            counts[f.param_index * 32 + f.bit_position] += 1
        expected = n_draws / cells
        stat = float(((counts - expected) ** 2 / expected).sum())
        critical = chi2.ppf(1 - 0.001, df=cells - 1)
        assert stat < critical, f"chi2={stat:.1f} >= {critical:.1f}"


class TestFaultyForward:
    def test_masked_by_zero_input(self):
        # single layer; weight column multiplied by a zero feature
        spec = ModelSpec((2, 2))
        buf = np.asarray([1, 0, 0, 1, 0, 0], dtype=F32)  # W=I, b=0
        p = Parameters.for_spec(spec, buf)
        x = np.asarray([0.0, 1.0], dtype=F32)
        clean = forward(spec, p, x)
        # W[0,0] and W[1,0] multiply x[0] == 0; finite-valued flips there
        # are masked (an exponent flip to Inf would not be: Inf * 0 = NaN)
        for idx in (0, 2):
            for bit in (23, 31, 22):
                res = faulty_forward(spec, p, x, FaultSpec(idx, bit))
                assert res.check_signal.tobytes() == clean.check_signal.tobytes()

    def test_copy_based_oracle(self):
        g = np.random.default_rng(20)
        spec, p = random_params(g, (4, 5, 3))
        x = g.normal(size=4).astype(F32)
        for _ in range(100):
            f = FaultSpec(int(g.integers(param_count(spec))), int(g.integers(32)))
            res = faulty_forward(spec, p, x, f)
            # oracle: explicitly copy, flip the one bit, run plain forward
            buf = p.buffer.copy()
            buf.view(np.uint32)[f.param_index] ^= np.uint32(1) << f.bit_position
            ref = forward(spec, Parameters.for_spec(spec, buf), x)
            assert res.check_signal.tobytes() == ref.check_signal.tobytes()
            assert res.predicted_class == ref.predicted_class

    def test_transience(self):
        g = np.random.default_rng(21)
        spec, p = random_params(g)
        x = g.normal(size=3).astype(F32)
        never_faulted = forward(spec, p, x)
        for _ in range(50):
            f = FaultSpec(int(g.integers(param_count(spec))), int(g.integers(32)))
            faulty_forward(spec, p, x, f)
            after = forward(spec, p, x)
            assert after.check_signal.tobytes() == never_faulted.check_signal.tobytes()
