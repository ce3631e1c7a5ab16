# tests/test_noise.py

import numpy as np
import pydantic
import pytest
from numpy.testing import assert_array_equal
from scipy import stats
from src.noise.generator import (
    BOTH_CHANNELS,
    NoiseConfig,
    NoiseStreams,
    ShotSchedule,
    build_schedule,
    sample_measurement_noise,
    sample_process_noise
)


def _config(**overrides) -> NoiseConfig:
    data = dict(
        q_diag=(1.0,) * 5,
        r_diag=(0.01, 0.01),
        shot_count=20,
        shot_magnitude=200.0,
        seed=42,
        horizon=40.0,
    )
    data.update(overrides)
    return NoiseConfig(**data)


class TestNoiseConfig:

    def test_measurement_covariance_must_be_positive(self):
        with pytest.raises(pydantic.ValidationError):
            _config(r_diag=(0.0, 0.01))

    def test_process_covariance_must_be_nonnegative(self):
        with pytest.raises(pydantic.ValidationError):
            _config(q_diag=(1.0, 1.0, -1.0, 1.0, 1.0))
        assert _config(q_diag=(0.0,) * 5).q_diag == (0.0,) * 5

    def test_seed_range(self):
        with pytest.raises(pydantic.ValidationError):
            _config(seed=-1)
        assert _config(seed=2 ** 64 - 1).seed == 2 ** 64 - 1


class TestShotSchedule:

    def test_empty_when_no_shots(self):
        assert len(build_schedule(_config(shot_count=0), dt=0.01)) == 0
        assert len(build_schedule(_config(shot_count=0))) == 0

    def test_same_seed_same_schedule(self):
        first = build_schedule(_config(), dt=0.01)
        second = build_schedule(_config(), dt=0.01)
        assert_array_equal(first.times, second.times)
        assert first.channels == second.channels

    def test_different_seed_different_schedule(self):
        first = build_schedule(_config(seed=1), dt=0.01)
        second = build_schedule(_config(seed=2), dt=0.01)
        assert not np.array_equal(first.times, second.times)

    def test_twenty_impulses_of_two_hundred(self):
        schedule = build_schedule(_config(), dt=0.01)
        assert len(schedule) == 20
        assert schedule.magnitude == 200.0
        assert np.all(schedule.times >= 0.0)
        assert np.all(schedule.times < 40.0)
        assert np.all(np.diff(schedule.times) > 0.0)
        assert all(channels == BOTH_CHANNELS for channels in schedule.channels)

    def test_continuous_times_without_grid(self):
        schedule = build_schedule(_config())
        assert len(schedule) == 20
        assert np.all((schedule.times >= 0.0) & (schedule.times < 40.0))

    def test_each_shot_hits_exactly_one_step(self):
        dt = 0.01
        schedule = build_schedule(_config(), dt=dt)
        hit_steps = [k for k in range(4000) if schedule.hits(k * dt, dt)]
        assert len(hit_steps) == 20

        total = sum(schedule.impulse(k * dt, dt) for k in hit_steps)
        assert_array_equal(total, [4000.0, 4000.0])

    def test_more_shots_than_steps_share_steps(self):
        dt = 0.01
        schedule = build_schedule(_config(shot_count=25, horizon=0.1), dt=dt)
        assert len(schedule) == 25
        assert np.all((schedule.times >= 0.0) & (schedule.times < 0.1))

        total = sum(schedule.impulse(k * dt, dt) for k in range(10))
        assert_array_equal(total, [5000.0, 5000.0])

    def test_distinct_steps_when_shots_fit(self):
        dt = 0.01
        schedule = build_schedule(_config(shot_count=10, horizon=0.1), dt=dt)
        assert sum(schedule.hits(k * dt, dt) for k in range(10)) == 10

    def test_impulse_window_is_half_open(self):
        schedule = ShotSchedule([1.0], 200.0, [BOTH_CHANNELS])
        assert_array_equal(schedule.impulse(1.0, 0.01), [200.0, 200.0])
        assert_array_equal(schedule.impulse(0.99, 0.01), [0.0, 0.0])
        assert schedule.hits(1.0, 0.01)
        assert not schedule.hits(0.99, 0.01)

    def test_single_channel_impulse(self):
        schedule = ShotSchedule([2.5], 50.0, [(1,)])
        assert_array_equal(schedule.impulse(2.5, 0.01), [0.0, 50.0])

    def test_mismatched_channels_rejected(self):
        with pytest.raises(ValueError):
            ShotSchedule([1.0, 2.0], 200.0, [BOTH_CHANNELS])


class TestProcessNoise:

    def test_zero_covariance_gives_zero(self):
        gen = NoiseStreams.create(1).process
        assert_array_equal(sample_process_noise(gen, (0.0,) * 5, 0.01), np.zeros(5))

    def test_empirical_variance(self):
        gen = NoiseStreams.create(7).process
        q_diag = np.array([1.0, 0.5, 2.0, 4.0, 0.25])
        draws = np.array([sample_process_noise(gen, q_diag, 0.01) for _ in range(100_000)])
        assert np.all(np.abs(draws.var(axis=0) / q_diag - 1.0) < 0.05)

    def test_continuous_scaling_divides_by_step(self):
        gen = NoiseStreams.create(11).process
        draws = np.array([sample_process_noise(gen, (1.0,) * 5, 0.25, continuous_scaling=True) for _ in range(20_000)])
        assert np.all(np.abs(draws.var(axis=0) / 4.0 - 1.0) < 0.05)

    def test_same_seed_same_sequence(self):
        first = NoiseStreams.create(99).process
        second = NoiseStreams.create(99).process
        for _ in range(10):
            assert_array_equal(sample_process_noise(first, (1.0,) * 5, 0.01),
                               sample_process_noise(second, (1.0,) * 5, 0.01))

    def test_rejects_nonpositive_step(self):
        with pytest.raises(ValueError):
            sample_process_noise(NoiseStreams.create(1).process, (1.0,) * 5, 0.0)

    def test_substreams_are_distinct(self):
        streams = NoiseStreams.create(5)
        draws = [gen.standard_normal(4) for gen in streams]
        assert not np.array_equal(draws[0], draws[1])
        assert not np.array_equal(draws[1], draws[2])


class TestMeasurementNoise:

    def test_shot_adds_magnitude(self):
        schedule = ShotSchedule([3.004], 200.0, [BOTH_CHANNELS])
        first = NoiseStreams.create(3).measurement
        second = NoiseStreams.create(3).measurement
        clean = sample_measurement_noise(first, (0.01, 0.01), ShotSchedule.empty(), 3.0, 0.01)
        shot = sample_measurement_noise(second, (0.01, 0.01), schedule, 3.0, 0.01)
        np.testing.assert_allclose(shot - clean, [200.0, 200.0])

    def test_shot_free_mean(self):
        gen = NoiseStreams.create(13).measurement
        r = 0.01
        draws = np.array([
            sample_measurement_noise(gen, (r, r), ShotSchedule.empty(), 0.0, 0.01)
            for _ in range(100_000)
        ])
        assert np.all(np.abs(draws.mean(axis=0)) < 4.0 * np.sqrt(r) / np.sqrt(len(draws)))

    def test_shot_free_samples_are_normal(self):
        r = 0.01

        def p_value(seed: int) -> float:
            gen = NoiseStreams.create(seed).measurement
            draws = np.array([
                sample_measurement_noise(gen, (r, r), ShotSchedule.empty(), 0.0, 0.01)
                for _ in range(5_000)
            ]).ravel()
            return stats.kstest(draws / np.sqrt(r), 'norm').pvalue

        assert p_value(17) > 0.01 or p_value(18) > 0.01
