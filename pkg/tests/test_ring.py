import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import S2
from oracles import dense_distribution, ring_amplitude_oracle
from oamwalk.jones import JonesField, apply, qwp_step_operator
from oamwalk.ring import (
    DetectorConfig,
    RingConfig,
    audit,
    detect,
    energy_audit,
    run_ring,
)
from oamwalk.walk import StepParams, WalkState, distribution, run

SYM = JonesField.from_polarization(S2, 1j * S2)


def walk_dist(n):
    return distribution(run(WalkState.localized("symmetric"), StepParams(), n)[-1])


class TestConfig:
    @pytest.mark.parametrize("mu", [0, -0.1, 1.5])
    def test_bad_mu(self, mu):
        with pytest.raises(ValueError):
            RingConfig(mu, 3)

    def test_bad_iterations(self):
        with pytest.raises(ValueError):
            RingConfig(0.5, 0)

    def test_bandwidth(self):
        assert DetectorConfig().bandwidth == 101
        assert DetectorConfig(odd_even_split=True).bandwidth == 202

    def test_bad_halfwidth(self):
        with pytest.raises(ValueError):
            DetectorConfig(window_halfwidth=0)


class TestRunRing:
    def test_full_transmission(self):
        res = run_ring(SYM, RingConfig(1.0, 3))
        assert [r.detected_power for r in res.records] == [1, 0, 0]
        assert res.records[0].spectrum == pytest.approx(walk_dist(1), abs=1e-12)
        assert res.entry_rejected == 0 and res.final_circulating == 0

    def test_half_geometric(self):
        res = run_ring(SYM, RingConfig(0.5, 20))
        for r in res.records:
            assert r.detected_power == pytest.approx(0.25 * 0.5 ** (r.iteration - 1), abs=1e-12)

    @pytest.mark.parametrize("mu", [0.1, 0.5, 0.77])
    def test_against_amplitude_oracle(self, mu):
        detected, circ = ring_amplitude_oracle(mu, 12, S2, 1j * S2)
        res = run_ring(SYM, RingConfig(mu, 12))
        np.testing.assert_allclose([r.detected_power for r in res.records], detected, atol=1e-12)
        assert res.final_circulating == pytest.approx(circ, abs=1e-12)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.01, 1.0), st.integers(1, 25))
    def test_spectrum_factorizes(self, mu, n):
        res = run_ring(SYM, RingConfig(mu, n))
        last = res.records[-1]
        if last.detected_power == 0:
            return
        expected = walk_dist(n)
        for ell, p in last.spectrum.items():
            assert p / last.detected_power == pytest.approx(expected[ell], abs=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.01, 0.99), st.integers(1, 40))
    def test_energy_and_monotone(self, mu, n):
        res = run_ring(SYM, RingConfig(mu, n))
        assert audit(res) < 1e-10
        powers = [r.detected_power for r in res.records]
        assert all(a > b for a, b in zip(powers, powers[1:]))
        for r in res.records:
            assert math.fsum(r.spectrum.values()) + r.clipped_power == pytest.approx(
                r.detected_power, abs=1e-12
            )

    def test_unnormalized_input(self):
        with pytest.raises(ValueError):
            run_ring(JonesField.from_polarization(1, 1), RingConfig(0.5, 2))


class TestDetect:
    def test_all_inside(self):
        spec, clipped = detect(apply(qwp_step_operator(), SYM), 0.3, DetectorConfig())
        assert clipped == 0
        assert spec == pytest.approx({-1: 0.15, 1: 0.15})

    def test_negative_power(self):
        with pytest.raises(ValueError):
            detect(SYM, -1, DetectorConfig())

    def test_120_steps_clips(self):
        f = SYM
        op = qwp_step_operator()
        for _ in range(120):
            f = apply(op, f)
        ells, p = dense_distribution(120, S2, 1j * S2)
        spec, clipped = detect(f, 1.0, DetectorConfig(window_halfwidth=50))
        assert clipped > 0
        assert clipped == pytest.approx(p[np.abs(ells) > 50].sum(), abs=1e-10)

    def test_split_captures_hundred(self):
        f = JonesField({ell: (1 / math.sqrt(201), 0) for ell in range(-100, 101)})
        _, clipped_plain = detect(f, 1.0, DetectorConfig(window_halfwidth=50))
        _, clipped_split = detect(f, 1.0, DetectorConfig(window_halfwidth=50, odd_even_split=True))
        assert clipped_plain == pytest.approx(100 / 201)
        assert clipped_split == 0

    def test_off_center_window(self):
        f = JonesField({100: (1, 0)})
        assert detect(f, 1.0, DetectorConfig(window_center=100))[1] == 0
        assert detect(f, 1.0, DetectorConfig())[1] == 1


class TestAudit:
    def test_full_transmission(self):
        res = run_ring(SYM, RingConfig(1.0, 5))
        assert res.entry_rejected == 0
        assert math.fsum(r.detected_power for r in res.records) == 1
        assert energy_audit(res.records, res.final_circulating, res.entry_rejected) == 0

    def test_half_twenty(self):
        res = run_ring(SYM, RingConfig(0.5, 20))
        assert res.final_circulating == pytest.approx(0.5 * 0.5**20, rel=1e-12)
        assert audit(res) < 1e-10

    def test_detects_missing_power(self):
        res = run_ring(SYM, RingConfig(0.5, 5))
        assert energy_audit(res.records[:-1], res.final_circulating, res.entry_rejected) > 1e-3
