import math

import numpy as np
import pytest

from mmopam.errors import DiscontinuityHit, DomainError, NotPeriodic
from mmopam.family import CanonicalParams, eval_F
from mmopam.pam import PamCoefficients, iterate_orbit
from mmopam.simulate import (
    SectionSpec,
    SimConfig,
    TimeSeries,
    canard_hole_radius,
    classify_series,
    detect_section_crossings,
    hybrid_simulate,
    integrate_full,
    visual_rescale,
    visual_rescale_inverse,
)
from mmopam.synthesis import synthesize

ROW_1_1 = PamCoefficients(0.3, 1.0, 0.9, -2.0)


@pytest.fixture(scope="module")
def params_1_1(fixed_rho):
    return synthesize(ROW_1_1, fixed_rho)


class TestSimConfig:
    def test_defaults_valid(self):
        cfg = SimConfig()
        assert cfg.eps == 1e-7 and cfg.delta == 5e-3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"eps": 1e-2},
            {"eps": 0.0},
            {"delta": 0.5},
            {"rel_tol": 1e-5},
            {"abs_tol": 1e-15},
            {"max_slow_time": -1.0},
        ],
    )
    def test_invariants(self, kwargs):
        with pytest.raises(DomainError):
            SimConfig(**kwargs)

    def test_default_initial_state_on_sheet(self, params_1_1):
        cfg = SimConfig()
        x0, y0, z0 = cfg.resolve_initial_state(params_1_1)
        assert x0 == 1.3
        assert math.isclose(y0, float(eval_F(1.3, params_1_1.z0)))
        assert math.isclose(z0, params_1_1.z0 - cfg.delta / 2.0)


class TestSectionSpec:
    def test_default_resolves_between_last_folds(self, geometry):
        sec = SectionSpec()
        assert math.isclose(sec.resolve(geometry), 0.5, abs_tol=1e-9)

    def test_direction_validated(self):
        with pytest.raises(DomainError):
            SectionSpec(crossing_direction=0)


class TestTimeSeries:
    def test_monotone_time_required(self):
        with pytest.raises(DomainError):
            TimeSeries(np.array([0.0, 0.0]), np.zeros(2), np.zeros(2), np.zeros(2))

    def test_csv_export(self, tmp_path):
        t = np.linspace(0, 1, 5)
        series = TimeSeries(t, t * 2, t * 3, t * 4)
        path = tmp_path / "out.csv"
        series.to_csv(str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,x,y,z"
        assert len(lines) == 6


def synthetic_series():
    # x sweeps down through 0.5 once per unit of time
    t = np.linspace(0.0, 4.0, 801)
    x = np.cos(2 * np.pi * t)
    y = np.sin(2 * np.pi * t)
    z = 0.1 * t
    return TimeSeries(t, x, y, z)


class TestDetectCrossings:
    def test_constant_x_no_crossings(self):
        t = np.linspace(0, 1, 10)
        series = TimeSeries(t, np.full(10, 2.0), np.zeros(10), np.zeros(10))
        assert detect_section_crossings(series, SectionSpec(x_section=0.5)) == []

    def test_directed_crossings_found(self):
        series = synthetic_series()
        hits = detect_section_crossings(series, SectionSpec(x_section=0.5, crossing_direction=-1))
        assert len(hits) == 4
        # x = cos(2 pi t) falls through 0.5 at t = 1/6 (mod 1); y there is
        # sin = +sqrt(3)/2 (up to the sample-spacing interpolation error)
        for yv, _ in hits:
            assert math.isclose(yv, math.sqrt(3) / 2, abs_tol=5e-3)

    def test_direction_filter(self):
        series = synthetic_series()
        up = detect_section_crossings(series, SectionSpec(x_section=0.5, crossing_direction=1))
        assert len(up) == 4
        for yv, _ in up:
            assert math.isclose(yv, -math.sqrt(3) / 2, abs_tol=5e-3)


class TestHybrid:
    def test_delta_zero_reproduces_map(self, params_1_1):
        orbit = iterate_orbit(ROW_1_1, -0.5)
        res = hybrid_simulate(params_1_1, 0.0, -0.5, 15)
        for got, want in zip(res.returns, orbit.iterates[1:16]):
            assert math.isclose(got, want, abs_tol=1e-8)

    def test_signature_detected(self, params_1_1):
        res = hybrid_simulate(params_1_1, 0.0, -0.5, 40)
        assert res.signature is not None
        assert str(res.signature) == "1^1"
        assert res.period == 2

    def test_pure_lao_fixed_point(self, fixed_rho):
        pam = PamCoefficients(0.5, -1.0, 0.5, -3.0)
        params = synthesize(pam, fixed_rho)
        res = hybrid_simulate(params, 0.0, -0.5, 30)
        assert str(res.signature) == "1^0"

    def test_negative_delta_rejected(self, params_1_1):
        with pytest.raises(DomainError):
            hybrid_simulate(params_1_1, -1e-3, -0.5, 5)

    def test_jump_hit_raises(self, params_1_1):
        with pytest.raises(DiscontinuityHit):
            hybrid_simulate(params_1_1, 0.0, 1e-13, 5)


class TestVisualRescale:
    def test_arithmetic(self):
        t = np.array([0.0, 1.0])
        series = TimeSeries(t, np.array([3.5, 7.0]), np.array([2.0, 4.0]), np.array([0.1, 0.2]))
        out = visual_rescale(series, delta=0.1, z0=0.0)
        assert np.allclose(out.x, [1.0, 2.0])
        assert np.allclose(out.y, [3.0, 6.0])
        assert np.allclose(out.z, [1.0, 2.0])

    def test_identity_on_z_when_trivial(self):
        t = np.array([0.0, 1.0])
        series = TimeSeries(t, np.zeros(2), np.zeros(2), np.array([0.3, -0.4]))
        out = visual_rescale(series)
        assert np.allclose(out.z, series.z)

    def test_roundtrip(self):
        t = np.linspace(0, 1, 7)
        series = TimeSeries(t, np.sin(t), np.cos(t), t**2)
        back = visual_rescale_inverse(visual_rescale(series, delta=0.05, z0=0.1), delta=0.05, z0=0.1)
        assert np.allclose(back.x, series.x)
        assert np.allclose(back.y, series.y)
        assert np.allclose(back.z, series.z)

    def test_zero_delta_rejected(self):
        t = np.array([0.0, 1.0])
        series = TimeSeries(t, np.zeros(2), np.zeros(2), np.zeros(2))
        with pytest.raises(DomainError):
            visual_rescale(series, delta=0.0)


def test_canard_hole_radius():
    assert math.isclose(canard_hole_radius(1e-7, 5e-3), 2.0 * 1e-7 ** (1 / 3) / 5e-3)


class TestClassifySeries:
    def _series_from_symbols(self, symbols, geom):
        # build a synthetic sampled trajectory: each cycle crosses x = 0.5
        # downward once and dips to -2.5 (LAO) or -1.0 (SAO)
        t_parts, x_parts = [], []
        t0 = 0.0
        for k, is_lao in enumerate(symbols):
            depth = -2.5 if is_lao else -1.0
            tt = np.linspace(t0, t0 + 1.0, 51)[:-1]
            phase = (tt - t0) * 2 * np.pi
            xx = 0.5 * (1.3 + depth) + 0.5 * (1.3 - depth) * np.cos(phase)
            t_parts.append(tt)
            x_parts.append(xx)
            t0 += 1.0
        t = np.concatenate(t_parts)
        x = np.concatenate(x_parts)
        y = np.zeros_like(t)
        z = np.where(x > 0.4, 0.01, -0.01)  # irrelevant detail, recurrent
        return TimeSeries(t, x, y, np.zeros_like(t))

    def test_periodic_pattern_classified(self, geometry):
        symbols = [True, False, False] * 8  # 1^2 repeated
        series = self._series_from_symbols(symbols, geometry)
        sig = classify_series(series, geometry, SectionSpec(x_section=0.5))
        assert str(sig) == "1^2"

    def test_all_lao(self, geometry):
        series = self._series_from_symbols([True] * 12, geometry)
        sig = classify_series(series, geometry, SectionSpec(x_section=0.5))
        assert str(sig) == "1^0"

    def test_too_few_crossings(self, geometry):
        series = self._series_from_symbols([True, False], geometry)
        with pytest.raises(NotPeriodic):
            classify_series(series, geometry, SectionSpec(x_section=0.5))


@pytest.mark.slow
class TestIntegrateFull:
    def test_z_frozen_without_drift(self, fixed_rho):
        # alpha = beta = 0 kills the slow z-drift entirely
        params = CanonicalParams(0.0, 0.0, 3.0, -5.0, fixed_rho)
        cfg = SimConfig(eps=1e-5, delta=1e-2, max_slow_time=2.0, rel_tol=1e-8, abs_tol=1e-10)
        series = integrate_full(params, cfg)
        assert np.ptp(series.z) < 1e-9

    def test_slow_manifold_attraction(self, params_1_1):
        # distance to {y = F(x, z)} during slow segments shrinks with eps
        devs = []
        for eps in (1e-4, 1e-5, 1e-6):
            cfg = SimConfig(eps=eps, delta=5e-3, max_slow_time=1.0)
            series = integrate_full(params_1_1, cfg)
            # sample the second half (past the initial layer), slow segments only
            n = len(series) // 2
            resid = np.abs(series.y[n:] - eval_F(series.x[n:], series.z[n:]))
            slow = resid < np.median(resid) * 4  # ignore jump segments
            devs.append(float(np.median(resid[slow])))
        assert devs[0] > devs[1] > devs[2]

    def test_full_run_produces_crossings_and_density(self, params_1_1):
        cfg = SimConfig(eps=1e-5, delta=1e-2, max_slow_time=10.0)
        series = integrate_full(params_1_1, cfg, n_crossings=8)
        assert len(series.crossing_states) >= 8
        assert np.all(np.abs(np.diff(series.x)) < 0.05 + 1e-9)
        assert np.all(np.diff(series.t) > 0.0)
        # event marks index close to the crossing times
        for mark, (tc, *_rest) in zip(series.event_marks, series.crossing_states):
            assert abs(series.t[min(mark, len(series) - 1)] - tc) < 0.05
