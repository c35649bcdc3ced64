import numpy as np
import pytest

from evinterp import (
    EventStream,
    SceneSpec,
    Sprite,
    Trajectory,
    ValidationError,
    count_map,
    directional_mask,
    disk_mask,
    event_count_ratio_mask,
    gradient_axis_weights,
    linear_mask,
    linear_segment,
    make_preset,
    render_frame,
    simulate_events,
    simulate_scene_events,
)


def empty_stream(width=16, height=16):
    return EventStream(width, height, 0.0, 1.0)


def active_pixels(stream):
    maps = count_map(stream, stream.t_start, stream.t_end)
    return (maps.pos + maps.neg) > 0


class TestLinearMask:
    def test_half_time_gives_half_weights(self):
        mask = linear_mask(0.5, 6, 4)
        for plane in (mask.omega_0t_u, mask.omega_0t_v):
            assert np.all(plane == 0.5)
        for plane in (mask.omega_1t_u, mask.omega_1t_v):
            assert np.all(plane == 0.5)

    def test_quarter_time_weights(self):
        mask = linear_mask(0.25, 5, 5)
        assert np.all(mask.omega_0t_u == 0.25)
        assert np.all(mask.omega_1t_u == 0.75)

    def test_complement_identity(self):
        for tau in (0.1, 0.37, 0.5, 0.9):
            mask = linear_mask(tau, 4, 4)
            assert np.allclose(mask.omega_0t_u + mask.omega_1t_u, 1.0, atol=1e-12)

    def test_tau_bounds(self):
        with pytest.raises(ValidationError):
            linear_mask(0.0, 4, 4)
        with pytest.raises(ValidationError):
            linear_mask(1.0, 4, 4)


class TestScalarMask:
    def test_butterfly1d_rest_period_weight_is_zero(self):
        scene = make_preset("butterfly1d")
        stream = simulate_scene_events(scene, substeps=128)
        mask = event_count_ratio_mask(stream, 0.5)
        active = active_pixels(stream)
        assert active.any()
        assert np.all(mask.omega_0t_u[active] == 0.0)
        assert np.all(mask.omega_1t_u[active] == 1.0)

    def test_empty_stream_falls_back_to_linear(self):
        for tau in (0.25, 0.5, 0.8):
            mask = event_count_ratio_mask(empty_stream(), tau)
            assert np.all(mask.omega_0t_u == tau)
            assert np.all(mask.omega_1t_u == 1.0 - tau)
            assert np.all(mask.omega_0t_v == tau)

    def test_uniform_mean_weight_tracks_tau(self):
        # brute force oracle: fraction of a pixel's events at or before tau,
        # computed straight from the raw event arrays
        stream = simulate_scene_events(make_preset("uniform"), substeps=64)
        active = active_pixels(stream)
        for tau in (0.25, 0.5, 0.75):
            mask = event_count_ratio_mask(stream, tau)
            assert abs(mask.omega_0t_u[active].mean() - tau) <= 0.05
            brute = np.zeros(active.shape)
            np.add.at(brute, (stream.y, stream.x), (stream.t <= tau).astype(float))
            totals = np.zeros(active.shape)
            np.add.at(totals, (stream.y, stream.x), 1.0)
            brute_ratio = brute[active] / totals[active]
            assert abs(brute_ratio.mean() - tau) <= 0.05

    def test_scalar_mask_is_isotropic(self):
        stream = simulate_scene_events(make_preset("uniform"), substeps=32)
        mask = event_count_ratio_mask(stream, 0.3)
        assert np.array_equal(mask.omega_0t_u, mask.omega_0t_v)
        assert np.array_equal(mask.omega_1t_u, mask.omega_1t_v)

    def test_bounds_and_complement_properties(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            n = 200
            events = list(zip(rng.integers(0, 16, n), rng.integers(0, 16, n),
                              rng.uniform(1e-6, 1.0, n), rng.choice([-1, 1], n)))
            x, y, t, p = (np.asarray(c) for c in zip(*events))
            order = np.lexsort((p, x, y, t))
            stream = EventStream(16, 16, 0.0, 1.0, x[order].astype(np.int32),
                                 y[order].astype(np.int32), t[order].astype(float),
                                 p[order].astype(np.int8))
            tau = float(rng.uniform(0.1, 0.9))
            mask = event_count_ratio_mask(stream, tau)
            for plane in (mask.omega_0t_u, mask.omega_1t_u):
                assert plane.min() >= 0.0 and plane.max() <= 1.0
            assert np.abs(mask.omega_0t_u + mask.omega_1t_u - 1.0).max() <= 1e-9

    def test_duplicating_events_leaves_ratio_unchanged(self):
        # time-distribution semantics: the ratio measures when, not how much
        stream = simulate_scene_events(make_preset("uniform"), substeps=32)
        doubled_idx = np.repeat(np.arange(len(stream)), 2)
        x, y = stream.x[doubled_idx], stream.y[doubled_idx]
        t, p = stream.t[doubled_idx], stream.p[doubled_idx]
        order = np.lexsort((p, x, y, t))
        doubled = EventStream(stream.width, stream.height, 0.0, 1.0,
                              x[order], y[order], t[order], p[order])
        a = event_count_ratio_mask(stream, 0.4)
        b = event_count_ratio_mask(doubled, 0.4)
        assert np.allclose(a.omega_0t_u, b.omega_0t_u, atol=1e-12)

    def test_weight_is_monotone_in_tau(self):
        stream = simulate_scene_events(make_preset("accelerated"), substeps=64)
        taus = np.linspace(0.1, 0.9, 9)
        previous = None
        for tau in taus:
            mask = event_count_ratio_mask(stream, float(tau))
            if previous is not None:
                assert np.all(mask.omega_0t_u >= previous - 1e-12)
            previous = mask.omega_0t_u

    def test_tau_outside_window_rejected(self):
        with pytest.raises(ValidationError):
            event_count_ratio_mask(empty_stream(), 0.0)
        with pytest.raises(ValidationError):
            event_count_ratio_mask(empty_stream(), 1.0)
        with pytest.raises(ValidationError):
            event_count_ratio_mask(empty_stream(), -0.3)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValidationError):
            event_count_ratio_mask(empty_stream(), 0.5, smoothing_radius=-1)


class TestDirectionalMask:
    def test_butterfly2d_rest_period_weights_are_zero_on_both_axes(self):
        from evinterp import sprite_footprint

        scene = make_preset("butterfly2d")
        stream = simulate_scene_events(scene, substeps=64)
        i0 = render_frame(scene, 0.0)
        i1 = render_frame(scene, 1.0)
        mask = directional_mask(stream, i0, i1, 0.5)
        footprint = sprite_footprint(scene, 0, 0.5)
        assert footprint.any()
        assert np.all(mask.omega_0t_u[footprint] == 0.0)
        assert np.all(mask.omega_0t_v[footprint] == 0.0)
        assert np.all(mask.omega_1t_u[footprint] == 1.0)
        assert np.all(mask.omega_1t_v[footprint] == 1.0)

    def test_translating_vertical_edge_attributes_to_horizontal(self):
        # gradient of a vertical edge is horizontal
        h, w = 24, 32

        def edge_frame(position):
            x = np.arange(w, dtype=float)
            coverage = np.clip(position - x + 1.0, 0.0, 1.0)
            return (0.2 + 0.6 * coverage) * np.ones((h, 1))

        frames = [(float(t), edge_frame(14.0 + 1.5 * t)) for t in np.linspace(0, 1, 65)]
        stream = simulate_events(frames)
        assert len(stream) > 0
        w_u, w_v = gradient_axis_weights(frames[0][1], frames[-1][1])
        at_events = w_u[stream.y, stream.x]
        assert at_events.min() >= 0.9
        assert np.allclose(w_u + w_v, 1.0)

    def test_diagonal_blob_attributes_symmetrically(self):
        scene = SceneSpec(48, 48, 0.15, [Sprite(disk_mask(5), 0.9, Trajectory(
            (linear_segment(0.0, 1.0, 14, 14, 16, 16),)))], (0.0, 0.5, 1.0))
        stream = simulate_scene_events(scene, substeps=64)
        i0, i1 = render_frame(scene, 0.0), render_frame(scene, 1.0)
        w_u, _ = gradient_axis_weights(i0, i1)
        counts = np.zeros((48, 48))
        np.add.at(counts, (stream.y, stream.x), 1.0)
        mean_u = float((w_u * counts).sum() / counts.sum())
        mean_v = float(((1.0 - w_u) * counts).sum() / counts.sum())
        assert abs(mean_u - mean_v) <= 0.1

    def test_axis_counts_fall_back_independently(self):
        # on a flat image the u share is exactly zero, so one event feeds
        # only the v axis; the u axis keeps the linear fallback
        i0 = np.full((16, 16), 0.4)
        stream = EventStream(16, 16, 0.0, 1.0,
                             np.array([8], np.int32), np.array([8], np.int32),
                             np.array([0.2]), np.array([1], np.int8))
        mask = directional_mask(stream, i0, i0, 0.5, smoothing_radius=0)
        assert mask.omega_0t_v[8, 8] == 1.0                 # event before tau
        assert mask.omega_0t_u[8, 8] == pytest.approx(0.5)  # fallback tau

    def test_dimension_mismatch_rejected(self):
        stream = empty_stream(16, 16)
        with pytest.raises(ValidationError):
            directional_mask(stream, np.zeros((8, 8)), np.zeros((8, 8)), 0.5)


class TestAcceleratedTrend:
    def test_cumulative_events_track_displacement(self):
        scene = make_preset("accelerated")
        stream = simulate_scene_events(scene, substeps=128)
        times = np.linspace(0.0, 1.0, 65)
        traj = scene.sprites[0].trajectory
        x0 = traj.position(0.0)[0]
        disp = np.array([abs(traj.position(float(t))[0] - x0) for t in times])
        disp /= disp[-1]
        cum = np.searchsorted(stream.t, times, side="right") / len(stream)
        corr = np.corrcoef(disp, cum)[0, 1]
        assert corr >= 0.99
