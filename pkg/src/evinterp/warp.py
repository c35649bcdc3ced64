"""Backward warping and visibility-weighted fusion.

``backward_warp`` resamples a source frame at positions offset by a flow
field using bilinear interpolation.  Sample positions outside the valid
bilinear domain ``[0, W-1] x [0, H-1]`` are clamped to the border and
flagged in a hole mask; the hole logic drives the analytic visibility maps
that replace a learned occlusion estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass
class VisibilityMap:
    """Convex fusion weights; ``v0`` weighs the I0-warped estimate."""

    v0: np.ndarray

    @property
    def v1(self):
        return 1.0 - self.v0


def backward_warp(src, flow):
    """Bilinearly sample ``src`` at ``(x + u, y + v)`` per pixel.

    Returns the warped frame and a boolean hole mask marking pixels whose
    sample position fell outside the image and was clamped to the border.
    Zero flow reproduces the source bit-exactly.
    """
    src = np.asarray(src, float)
    if src.shape != flow.u.shape:
        raise ValidationError(f"frame shape {src.shape} does not match flow {flow.u.shape}")
    if not (np.isfinite(flow.u).all() and np.isfinite(flow.v).all()):
        raise ValidationError("flow field contains non-finite values")
    h, w = src.shape
    xs = np.arange(w)[None, :] + flow.u
    ys = np.arange(h)[:, None] + flow.v
    hole = (xs < 0) | (xs > w - 1) | (ys < 0) | (ys > h - 1)
    cx = np.clip(xs, 0, w - 1)
    cy = np.clip(ys, 0, h - 1)
    x0 = np.floor(cx).astype(np.intp)
    y0 = np.floor(cy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    wx = cx - x0
    wy = cy - y0
    top = (1.0 - wx) * src[y0, x0] + wx * src[y0, x1]
    bottom = (1.0 - wx) * src[y1, x0] + wx * src[y1, x1]
    return (1.0 - wy) * top + wy * bottom, hole


def time_weighted_visibility(tau, hole0, hole1):
    """Analytic visibility from the time weight plus hole evidence.

    Baseline weight ``v0 = 1 - tau``; where only the I0-warped estimate has
    a hole the I1 estimate takes over (``v0 = 0``) and vice versa; where
    both have holes the baseline stands.
    """
    hole0 = np.asarray(hole0, bool)
    hole1 = np.asarray(hole1, bool)
    if hole0.shape != hole1.shape:
        raise ValidationError(f"hole masks disagree: {hole0.shape} vs {hole1.shape}")
    v0 = np.full(hole0.shape, 1.0 - float(tau))
    v0[hole0 & ~hole1] = 0.0
    v0[hole1 & ~hole0] = 1.0
    return VisibilityMap(v0)


def fuse(i_from0, i_from1, vis):
    """Convex per-pixel combination ``v0 * i_from0 + (1 - v0) * i_from1``."""
    a = np.asarray(i_from0, float)
    b = np.asarray(i_from1, float)
    if a.shape != b.shape or a.shape != vis.v0.shape:
        raise ValidationError(
            f"fuse shapes disagree: {a.shape}, {b.shape}, {vis.v0.shape}"
        )
    return np.clip(vis.v0 * a + (1.0 - vis.v0) * b, 0.0, 1.0)
