"""Parameter validation, mask geometry, and normalization constants."""

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvphase import (
    CONTAINMENT_RATIO,
    MeasurementDistribution,
    NormalizationConstants,
    ParameterError,
    PiecewiseBinaryFunction,
    ProcedureParams,
    RegimeError,
    f_eval,
    norm_p_sq,
    norm_x_sq,
    require_containment,
    validate_params,
)
from erf_oracle import erf_f, erf_series
from helpers import BIG_P, DELTA, canonical


class TestProcedureParams:
    def test_epsilon_defaults_to_preparation_width(self):
        p = ProcedureParams(x0=0.0, delta=0.5, big_t=5.0, big_p=2.0)
        assert p.epsilon == 0.5

    def test_explicit_epsilon_kept(self):
        p = ProcedureParams(x0=0.0, delta=0.5, big_t=5.0, big_p=2.0, epsilon=0.25)
        assert p.epsilon == 0.25

    def test_nonfinite_rejected_at_construction(self):
        with pytest.raises(ParameterError):
            ProcedureParams(x0=math.nan, delta=0.5, big_t=5.0, big_p=2.0)
        with pytest.raises(ParameterError):
            ProcedureParams(x0=0.0, delta=math.inf, big_t=5.0, big_p=2.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"delta": 0.0},
            {"delta": -1.0},
            {"big_t": 0.0},
            {"big_p": -2.0},
            {"epsilon": 0.0},
        ],
    )
    def test_nonpositive_scales_fail_validation(self, kwargs):
        base = dict(x0=0.0, delta=0.5, big_t=5.0, big_p=2.0, epsilon=0.5)
        base.update(kwargs)
        p = ProcedureParams(**base)
        report = validate_params(p)
        assert report.errors
        assert not report.ok
        with pytest.raises(ParameterError):
            p.require_valid()

    def test_derived_properties(self):
        p = ProcedureParams(x0=1.0, delta=0.5, big_t=4.0, big_p=3.0)
        assert p.containment_ratio == pytest.approx((4.0 - 1.0) / 0.5)
        assert p.mask_product == pytest.approx(1.5)
        assert p.in_containment_regime

    def test_validation_warnings_and_info(self):
        snug = ProcedureParams(x0=0.0, delta=1.0, big_t=3.0, big_p=1.0)
        report = validate_params(snug)
        assert report.ok  # warnings do not fail validation
        assert len(report.warnings) == 2  # containment < 4.2 and P*delta < 1.5
        assert report.info["containment_ratio"] == pytest.approx(3.0)
        assert report.info["mask_product"] == pytest.approx(1.0)
        assert report.info["two_t_p"] == pytest.approx(6.0)

        roomy = canonical()
        assert validate_params(roomy).warnings == ()

    def test_require_containment_gate(self):
        snug = ProcedureParams(x0=0.0, delta=1.0, big_t=4.0, big_p=1.5)
        with pytest.raises(RegimeError):
            require_containment(snug)
        ok = ProcedureParams(x0=0.0, delta=1.0, big_t=CONTAINMENT_RATIO, big_p=1.5)
        require_containment(ok)


class TestNormalization:
    def test_norm_x_sq_unit_width(self):
        # T = delta = 1, centered: integral of exp(-x^2) over [-1, 1]
        p = ProcedureParams(x0=0.0, delta=1.0, big_t=1.0, big_p=1.0)
        assert norm_x_sq(p) == pytest.approx(1.493648265624854, rel=1e-15)

    def test_norm_x_sq_off_center_oracle(self):
        p = ProcedureParams(x0=0.7, delta=0.9, big_t=4.0, big_p=1.0)
        expected = float(
            (math.pi * 0.9**2) ** 0.5
            / 2.0
            * (erf_series((4.0 + 0.7) / 0.9) + erf_series((4.0 - 0.7) / 0.9))
        )
        assert norm_x_sq(p) == pytest.approx(expected, rel=1e-14)

    @given(x0=st.floats(-3.0, 3.0))
    @settings(max_examples=50, deadline=None)
    def test_norm_x_sq_symmetric_in_center(self, x0):
        p_plus = ProcedureParams(x0=x0, delta=0.8, big_t=6.0, big_p=1.0)
        p_minus = ProcedureParams(x0=-x0, delta=0.8, big_t=6.0, big_p=1.0)
        assert norm_x_sq(p_plus) == norm_x_sq(p_minus)

    def test_norm_p_sq_oracle(self):
        p = canonical()
        # conjugate envelope has width 1/(2*delta) on the domain [-P, P]
        expected = float(
            math.sqrt(math.pi)
            / (4.0 * DELTA)
            * (erf_series(2.0 * DELTA * BIG_P) * 2)
        )
        assert norm_p_sq(p) == pytest.approx(expected, rel=1e-14)

    def test_norm_p_sq_off_center(self):
        p = canonical()
        p0 = 0.4
        expected = float(
            math.sqrt(math.pi)
            / (4.0 * DELTA)
            * (
                erf_series(2.0 * DELTA * (BIG_P + p0))
                + erf_series(2.0 * DELTA * (BIG_P - p0))
            )
        )
        assert norm_p_sq(p, p0) == pytest.approx(expected, rel=1e-14)

    def test_constants_bundle(self):
        p = canonical()
        consts = NormalizationConstants.from_params(p)
        assert consts.nx_sq == norm_x_sq(p)
        assert consts.np_sq == norm_p_sq(p)


class TestPiecewiseBinaryFunction:
    def test_step_semantics(self):
        f = PiecewiseBinaryFunction.step(0.5, 2.0)
        assert f(0.5) == 0  # threshold itself belongs to the low side
        assert f(0.5 + 1e-12) == 1
        assert f(-2.0) == 0
        assert f(2.0) == 1

    def test_step_at_domain_edges_is_constant(self):
        low = PiecewiseBinaryFunction.step(2.0, 2.0)
        high = PiecewiseBinaryFunction.step(-2.0, 2.0)
        assert low.breakpoints == () and low.values == (0,)
        assert high.breakpoints == () and high.values == (1,)
        assert low.measure_of_ones() == 0.0
        assert high.measure_of_ones() == 4.0

    def test_hat_semantics(self):
        f = PiecewiseBinaryFunction.hat(-0.5, 0.5, 2.0)
        assert f(0.0) == 1
        assert f(-0.5) == 0  # left edge excluded, consistent with step
        assert f(0.5) == 1
        assert f(1.0) == 0
        assert f.measure_of_ones() == pytest.approx(1.0)

    def test_invalid_constructions(self):
        with pytest.raises(ParameterError):
            PiecewiseBinaryFunction(breakpoints=(0.5, 0.5), values=(0, 1, 0), half_domain=1.0)
        with pytest.raises(ParameterError):
            PiecewiseBinaryFunction(breakpoints=(0.7, 0.3), values=(0, 1, 0), half_domain=1.0)
        with pytest.raises(ParameterError):
            PiecewiseBinaryFunction(breakpoints=(5.0,), values=(0, 1), half_domain=1.0)
        with pytest.raises(ParameterError):
            PiecewiseBinaryFunction(breakpoints=(0.3,), values=(0, 2), half_domain=1.0)
        with pytest.raises(ParameterError):
            PiecewiseBinaryFunction(breakpoints=(0.3,), values=(0,), half_domain=1.0)
        with pytest.raises(ParameterError):
            PiecewiseBinaryFunction.step(3.0, 2.0)
        with pytest.raises(ParameterError):
            PiecewiseBinaryFunction.hat(0.5, 0.5, 2.0)

    def test_out_of_domain_evaluation_rejected(self):
        f = PiecewiseBinaryFunction.step(0.0, 1.0)
        with pytest.raises(ParameterError):
            f(1.5)

    def test_segments_tile_the_domain(self):
        f = PiecewiseBinaryFunction(
            breakpoints=(-0.4, 0.1, 0.8), values=(1, 0, 1, 0), half_domain=2.0
        )
        segs = f.segments()
        assert segs[0][0] == -2.0 and segs[-1][1] == 2.0
        for (_, hi, _), (lo, _, _) in zip(segs, segs[1:]):
            assert hi == lo
        assert [v for _, _, v in segs] == [1, 0, 1, 0]

    def test_measure_of_ones(self):
        f = PiecewiseBinaryFunction.step(0.5, 2.0)
        assert f.measure_of_ones() == pytest.approx(1.5)
        g = PiecewiseBinaryFunction.hat(-1.0, 0.25, 2.0)
        assert g.measure_of_ones() == pytest.approx(1.25)

    def test_describe_names_the_shape(self):
        assert "step" in PiecewiseBinaryFunction.step(0.5, 2.0).describe()
        assert "hat" in PiecewiseBinaryFunction.hat(-0.5, 0.5, 2.0).describe()

    def test_f_eval_matches_call(self):
        f = PiecewiseBinaryFunction.hat(-0.3, 0.9, 2.0)
        for y in (-2.0, -0.3, 0.0, 0.9, 1.5, 2.0):
            assert f_eval(f, y) == f(y)

    @given(
        data=st.lists(st.floats(-1.9, 1.9), min_size=0, max_size=5, unique=True),
        seed=st.integers(0, 2**16),
    )
    @settings(max_examples=80, deadline=None)
    def test_complement_involution_and_measure(self, data, seed):
        bps = tuple(sorted(data))
        n_vals = len(bps) + 1
        vals = tuple((seed >> i) & 1 for i in range(n_vals))
        f = PiecewiseBinaryFunction(breakpoints=bps, values=vals, half_domain=2.0)
        g = f.complement()
        assert g.complement() == f
        assert f.measure_of_ones() + g.measure_of_ones() == pytest.approx(4.0)
        for y in (-2.0, -1.0, 0.0, 0.33, 2.0):
            assert f(y) + g(y) == 1


class TestMeasurementDistribution:
    def test_roundoff_clamped(self):
        assert MeasurementDistribution(-1e-13).p_x0 == 0.0
        assert MeasurementDistribution(1.0 + 1e-13).p_x0 == 1.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ParameterError):
            MeasurementDistribution(-1e-3)
        with pytest.raises(ParameterError):
            MeasurementDistribution(1.01)

    def test_complement_probability(self):
        d = MeasurementDistribution(0.25)
        assert d.p_not_x0 == pytest.approx(0.75)

    def test_oracle_consistency(self):
        # the unit-width reference value used across the stats tests
        assert erf_f(3.0) == math.erf(3.0)
