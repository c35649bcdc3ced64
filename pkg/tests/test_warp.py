import numpy as np
import pytest

from evinterp import (
    FlowField,
    ValidationError,
    backward_warp,
    fuse,
    time_weighted_visibility,
    zero_flow,
)


def constant_flow(u, v, width=16, height=12):
    return FlowField(np.full((height, width), float(u)),
                     np.full((height, width), float(v)))


class TestBackwardWarp:
    def test_zero_flow_is_bit_exact_identity(self):
        rng = np.random.default_rng(0)
        src = rng.uniform(0.0, 1.0, (12, 16))
        out, hole = backward_warp(src, zero_flow(16, 12))
        assert np.array_equal(out, src)
        assert not hole.any()

    def test_ramp_image_unit_shift_closed_form(self):
        # closed form: bilinear sampling of a linear ramp is the ramp value
        w, h = 16, 12
        src = np.tile((np.arange(w) / (w - 1))[None, :], (h, 1))
        out, hole = backward_warp(src, constant_flow(1.0, 0.0, w, h))
        xs = np.arange(w - 1)
        expected = (xs + 1) / (w - 1)
        assert np.allclose(out[:, :-1], np.tile(expected[None, :], (h, 1)), atol=1e-12)
        assert np.all(hole[:, -1]) and not hole[:, :-1].any()

    def test_flow_larger_than_image_flags_everything(self):
        src = np.full((12, 16), 0.5)
        _, hole = backward_warp(src, constant_flow(17.0, 0.0))
        assert hole.all()

    def test_integer_shifts_are_exact_at_interior(self):
        rng = np.random.default_rng(1)
        src = rng.uniform(0.0, 1.0, (12, 16))
        out, hole = backward_warp(src, constant_flow(3.0, 2.0))
        assert np.array_equal(out[:-2, :-3], src[2:, 3:])
        assert not hole[:-2, :-3].any()

    def test_warp_is_linear_in_the_image(self):
        rng = np.random.default_rng(2)
        a = rng.uniform(0.0, 1.0, (12, 16))
        b = rng.uniform(0.0, 1.0, (12, 16))
        flow = FlowField(rng.normal(0, 2, (12, 16)), rng.normal(0, 2, (12, 16)))
        combined, _ = backward_warp(0.3 * a + 0.6 * b, flow)
        wa, _ = backward_warp(a, flow)
        wb, _ = backward_warp(b, flow)
        assert np.abs(combined - (0.3 * wa + 0.6 * wb)).max() <= 1e-9

    def test_non_finite_flow_rejected(self):
        src = np.zeros((12, 16))
        flow = constant_flow(0.0, 0.0)
        flow.u[3, 3] = np.inf
        with pytest.raises(ValidationError):
            backward_warp(src, flow)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            backward_warp(np.zeros((5, 5)), constant_flow(0, 0, 4, 4))


class TestVisibility:
    def test_no_holes_gives_time_weight(self):
        empty = np.zeros((4, 4), bool)
        vis = time_weighted_visibility(0.5, empty, empty)
        assert np.all(vis.v0 == 0.5)
        assert np.all(vis.v0 + vis.v1 == 1.0)

    def test_single_sided_holes_switch_weights(self):
        hole0 = np.zeros((4, 4), bool)
        hole1 = np.zeros((4, 4), bool)
        hole0[1, 2] = True
        hole1[3, 0] = True
        vis = time_weighted_visibility(0.5, hole0, hole1)
        assert vis.v0[1, 2] == 0.0
        assert vis.v0[3, 0] == 1.0
        assert vis.v0[0, 0] == 0.5

    def test_double_hole_keeps_baseline(self):
        both = np.ones((3, 3), bool)
        vis = time_weighted_visibility(0.25, both, both)
        assert np.all(vis.v0 == 0.75)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            time_weighted_visibility(0.5, np.zeros((3, 3), bool), np.zeros((4, 4), bool))


class TestFuse:
    def test_full_weight_returns_first_estimate(self):
        rng = np.random.default_rng(3)
        a = rng.uniform(0.0, 1.0, (6, 7))
        b = rng.uniform(0.0, 1.0, (6, 7))
        vis = time_weighted_visibility(0.5, np.zeros((6, 7), bool), np.ones((6, 7), bool))
        assert np.all(vis.v0 == 1.0)
        assert np.array_equal(fuse(a, b, vis), a)

    def test_even_blend_of_constants(self):
        a = np.full((5, 5), 0.2)
        b = np.full((5, 5), 0.6)
        vis = time_weighted_visibility(0.5, np.zeros((5, 5), bool), np.zeros((5, 5), bool))
        assert np.allclose(fuse(a, b, vis), 0.4)

    def test_equal_inputs_are_a_fixed_point(self):
        rng = np.random.default_rng(4)
        a = rng.uniform(0.0, 1.0, (6, 6))
        from evinterp.warp import VisibilityMap

        vis = VisibilityMap(rng.uniform(0.0, 1.0, (6, 6)))
        assert np.allclose(fuse(a, a, vis), a, atol=1e-12)

    def test_fusion_is_convex(self):
        rng = np.random.default_rng(5)
        from evinterp.warp import VisibilityMap

        a = rng.uniform(0.0, 1.0, (8, 8))
        b = rng.uniform(0.0, 1.0, (8, 8))
        vis = VisibilityMap(rng.uniform(0.0, 1.0, (8, 8)))
        out = fuse(a, b, vis)
        assert np.all(out >= np.minimum(a, b) - 1e-12)
        assert np.all(out <= np.maximum(a, b) + 1e-12)

    def test_shape_mismatch_rejected(self):
        from evinterp.warp import VisibilityMap

        with pytest.raises(ValidationError):
            fuse(np.zeros((3, 3)), np.zeros((3, 3)), VisibilityMap(np.zeros((4, 4))))
