import numpy as np
import pytest

from evinterp import (
    DEFAULT_CONTRAST,
    LOG_FLOOR,
    EventStream,
    ValidationError,
    count_map,
    integrate_events,
    make_preset,
    render_frame,
    simulate_events,
    simulate_scene_events,
    to_event_tensor,
)

C = DEFAULT_CONTRAST


def manual_stream(width=8, height=8, events=(), window=(0.0, 1.0)):
    """Build a stream from (x, y, t, p) tuples, canonically sorted."""
    if events:
        x, y, t, p = (np.asarray(col) for col in zip(*events))
    else:
        x = y = t = p = np.empty(0)
    order = np.lexsort((p, x, y, t))
    return EventStream(width, height, window[0], window[1],
                       x[order].astype(np.int32), y[order].astype(np.int32),
                       t[order].astype(float), p[order].astype(np.int8)).validate()


class TestSimulate:
    def test_static_frames_emit_nothing(self):
        frame = np.full((6, 7), 0.4)
        stream = simulate_events([(0.0, frame), (0.5, frame), (1.0, frame)])
        assert len(stream) == 0
        assert stream.t_start == 0.0 and stream.t_end == 1.0

    def test_exact_double_threshold_step_gives_two_events(self):
        # oracle: crossing count is floor(delta_log / C)
        i0 = np.full((4, 4), 0.3)
        i1 = i0.copy()
        i1[2, 1] = 0.3 * np.exp(2 * C)
        expected = int(np.floor(np.log(i1[2, 1] / i0[2, 1]) / C))
        assert expected == 2
        stream = simulate_events([(0.0, i0), (1.0, i1)], contrast_threshold=C)
        assert len(stream) == 2
        assert np.all(stream.x == 1) and np.all(stream.y == 2)
        assert np.all(stream.p == 1)
        assert stream.t[-1] == pytest.approx(1.0)

    def test_butterfly1d_encoding(self):
        scene = make_preset("butterfly1d")
        stream = simulate_scene_events(scene, substeps=128)
        assert len(stream) > 0
        # all events happen in the move period (tau, 1]
        assert stream.t.min() > 0.5
        # single active column
        assert set(stream.x.tolist()) == {6}
        maps = count_map(stream, 0.5, 1.0)
        net = maps.pos.astype(int) - maps.neg.astype(int)
        departure, transit, arrival = net[5, 6], net[6, 6], net[7, 6]
        assert np.sign([departure, transit, arrival]).tolist() == [-1, 0, 1]
        assert maps.pos[6, 6] > 0 and maps.neg[6, 6] > 0   # passed through

    def test_monotone_brightening_emits_no_negative_events(self):
        rng = np.random.default_rng(7)
        base = rng.uniform(0.05, 0.3, (9, 9))
        rate = rng.uniform(0.0, 1.5, base.shape)
        frames = [(t, np.clip(base * np.exp(t * rate), 0.0, 1.0))
                  for t in np.linspace(0.0, 1.0, 9)]
        stream = simulate_events(frames)
        assert len(stream) > 0
        assert np.all(stream.p == 1)

    def test_simulation_is_deterministic(self):
        scene = make_preset("uniform")
        a = simulate_scene_events(scene, substeps=16)
        b = simulate_scene_events(scene, substeps=16)
        for field in ("x", "y", "t", "p"):
            assert np.array_equal(getattr(a, field), getattr(b, field))

    def test_canonical_ordering(self):
        stream = simulate_scene_events(make_preset("butterfly2d"), substeps=32)
        stream.validate()
        assert np.all(np.diff(stream.t) >= 0)

    def test_threshold_jitter_is_seeded_and_off_by_default(self):
        scene = make_preset("uniform")
        times = np.linspace(0.0, 1.0, 17)
        frames = [(float(t), render_frame(scene, float(t))) for t in times]
        plain_a = simulate_events(frames)
        plain_b = simulate_events(frames, threshold_jitter=0.0)
        assert np.array_equal(plain_a.t, plain_b.t)
        jit_a = simulate_events(frames, threshold_jitter=0.1, jitter_seed=3)
        jit_b = simulate_events(frames, threshold_jitter=0.1, jitter_seed=3)
        assert np.array_equal(jit_a.t, jit_b.t)
        assert len(jit_a) != len(plain_a) or not np.array_equal(jit_a.t, plain_a.t)

    def test_matches_per_pixel_reference_simulator(self):
        # independent oracle: a slow per-pixel walk over the linear log
        # segments, emitting one event per threshold crossing
        rng = np.random.default_rng(21)
        times = np.sort(rng.uniform(0.05, 0.95, 6))
        times = np.concatenate([[0.0], times, [1.0]])
        frames = [(float(t), rng.uniform(0.05, 1.0, (5, 6))) for t in times]
        stream = simulate_events(frames, contrast_threshold=C)

        ref_events = []
        logs = [np.log(np.maximum(f, LOG_FLOOR)) for _, f in frames]
        for y in range(5):
            for x in range(6):
                ref = logs[0][y, x]
                for k in range(len(frames) - 1):
                    ta, tb = frames[k][0], frames[k + 1][0]
                    la, lb = logs[k][y, x], logs[k + 1][y, x]
                    while lb - ref >= C * (1 - 1e-9):
                        ref += C
                        tt = ta + (ref - la) / (lb - la) * (tb - ta)
                        ref_events.append((x, y, tt, 1))
                    while ref - lb >= C * (1 - 1e-9):
                        ref -= C
                        tt = ta + (ref - la) / (lb - la) * (tb - ta)
                        ref_events.append((x, y, tt, -1))
        assert len(stream) == len(ref_events) > 0
        got = sorted(zip(stream.x, stream.y, stream.t, stream.p))
        want = sorted(ref_events)
        for (gx, gy, gt, gp), (wx, wy, wt, wp) in zip(got, want):
            assert (gx, gy, gp) == (wx, wy, wp)
            assert gt == pytest.approx(wt, abs=1e-9)

    def test_argument_errors(self):
        frame = np.full((4, 4), 0.5)
        with pytest.raises(ValidationError):
            simulate_events([(0.0, frame)])
        with pytest.raises(ValidationError):
            simulate_events([(0.0, frame), (0.0, frame)])
        with pytest.raises(ValidationError):
            simulate_events([(0.5, frame), (0.2, frame)])
        with pytest.raises(ValidationError):
            simulate_events([(0.0, frame), (1.0, np.full((4, 5), 0.5))])
        with pytest.raises(ValidationError):
            simulate_events([(0.0, frame), (1.0, frame)], contrast_threshold=0.0)


class TestCountMap:
    def test_empty_stream_gives_zero_maps(self):
        stream = manual_stream()
        maps = count_map(stream, 0.0, 1.0)
        assert not maps.pos.any() and not maps.neg.any()

    def test_half_open_window_additivity(self):
        stream = simulate_scene_events(make_preset("uniform"), substeps=32)
        whole = count_map(stream, 0.0, 1.0)
        for split in (0.25, 0.5, 0.625):
            early = count_map(stream, 0.0, split)
            late = count_map(stream, split, 1.0)
            assert np.array_equal(early.pos + late.pos, whole.pos)
            assert np.array_equal(early.neg + late.neg, whole.neg)
        # total equals the raw event count
        assert whole.pos.sum() + whole.neg.sum() == len(stream)

    def test_uniform_half_window_holds_half_the_events(self):
        # brute force from the raw simulator output, not via count_map
        stream = simulate_scene_events(make_preset("uniform"), substeps=64)
        half_brute = int(np.count_nonzero(stream.t <= 0.5))
        maps_half = count_map(stream, 0.0, 0.5)
        assert int(maps_half.pos.sum() + maps_half.neg.sum()) == half_brute
        ratio = half_brute / len(stream)
        assert ratio == pytest.approx(0.5, abs=0.05)

    def test_inverted_or_outside_window_rejected(self):
        stream = manual_stream()
        with pytest.raises(ValidationError):
            count_map(stream, 0.7, 0.3)
        with pytest.raises(ValidationError):
            count_map(stream, 0.0, 1.5)


class TestEventTensor:
    def test_empty_stream_gives_sentinels(self):
        et = to_event_tensor(manual_stream(), 0.0, 1.0)
        assert not et.pos_count.any() and not et.neg_count.any()
        assert np.all(et.last_pos_t == -1.0) and np.all(et.last_neg_t == -1.0)

    def test_single_positive_event(self):
        stream = manual_stream(events=[(3, 2, 0.3, 1)])
        et = to_event_tensor(stream, 0.0, 1.0)
        assert et.pos_count[2, 3] == 1 and et.pos_count.sum() == 1
        assert et.last_pos_t[2, 3] == pytest.approx(0.3)
        assert et.last_neg_t[2, 3] == -1.0

    def test_latest_timestamp_wins(self):
        stream = manual_stream(events=[(3, 2, 0.2, 1), (3, 2, 0.7, 1)])
        et = to_event_tensor(stream, 0.0, 1.0)
        assert et.pos_count[2, 3] == 2
        assert et.last_pos_t[2, 3] == pytest.approx(0.7)

    def test_timestamps_normalized_to_window(self):
        stream = manual_stream(events=[(1, 1, 0.5, -1)])
        et = to_event_tensor(stream, 0.25, 0.75)
        assert et.neg_count[1, 1] == 1
        assert et.last_neg_t[1, 1] == pytest.approx(0.5)  # (0.5-0.25)/0.5


class TestIntegrate:
    def test_empty_stream_changes_nothing_above_floor(self):
        rng = np.random.default_rng(0)
        i0 = rng.uniform(LOG_FLOOR, 1.0, (6, 6))
        out = integrate_events(i0, manual_stream(width=6, height=6))
        assert np.allclose(out, i0, atol=1e-12)

    def test_floor_clamps_dark_pixels(self):
        i0 = np.zeros((8, 8))
        out = integrate_events(i0, manual_stream())
        assert np.allclose(out, LOG_FLOOR)

    def test_single_positive_event_multiplies_by_exp_threshold(self):
        i0 = np.full((8, 8), 0.5)
        stream = manual_stream(events=[(4, 4, 0.5, 1)])
        out = integrate_events(i0, stream, contrast_threshold=0.15)
        assert out[4, 4] == pytest.approx(0.5 * np.exp(0.15))
        assert out[0, 0] == pytest.approx(0.5)

    @pytest.mark.parametrize("preset", ["butterfly1d", "butterfly2d", "uniform", "accelerated"])
    def test_round_trip_log_error_below_threshold(self, preset):
        scene = make_preset(preset)
        i0 = render_frame(scene, 0.0)
        i1 = render_frame(scene, 1.0)
        stream = simulate_scene_events(scene, substeps=64)
        maps = count_map(stream, 0.0, 1.0)
        log_pre_clamp = (np.log(np.maximum(i0, LOG_FLOOR))
                         + C * (maps.pos.astype(int) - maps.neg.astype(int)))
        err = np.abs(np.log(np.maximum(i1, LOG_FLOOR)) - log_pre_clamp).max()
        assert err <= C

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            integrate_events(np.zeros((4, 4)), manual_stream(width=8, height=8))
