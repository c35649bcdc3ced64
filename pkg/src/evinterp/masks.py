"""Per-period, per-axis optical-flow weights derived from event counts.

The weight of each bi-directional flow in the synthesized intermediate flow
is the fraction of a pixel's events that fall in the corresponding
sub-period: ``w0 = c(0, tau] / c(0, 1]`` and ``w1 = c(tau, 1] / c(0, 1]``.
The ratio describes how motion distributes over time, not how large it is;
duplicating every event leaves it unchanged.

Two analytic variants are provided: a scalar mask that applies the same
ratio to both flow axes, and a directional mask that first attributes each
event to the horizontal or vertical axis by the local image-gradient
orientation.  Pixels with no events in the whole window fall back to the
plain temporal weights (``tau``, ``1 - tau``), which reduces the pipeline
to the linear baseline in static regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ValidationError
from .events import count_map

GRADIENT_EPS = 1e-6


@dataclass
class FlowMask:
    """Per-pixel weights in [0, 1] for both sub-periods and both axes."""

    omega_0t_u: np.ndarray
    omega_0t_v: np.ndarray
    omega_1t_u: np.ndarray
    omega_1t_v: np.ndarray
    tau: float

    @property
    def shape(self):
        return self.omega_0t_u.shape


def linear_mask(tau, width, height):
    """The isotropic linear-baseline mask: ``tau`` / ``1 - tau`` everywhere."""
    _check_tau(tau)
    if width <= 0 or height <= 0:
        raise ValidationError("mask dimensions must be positive")
    w0 = np.full((height, width), float(tau))
    w1 = np.full((height, width), 1.0 - float(tau))
    return FlowMask(w0, w0.copy(), w1, w1.copy(), float(tau))


def event_count_ratio_mask(stream, tau, smoothing_radius=2):
    """Scalar event-count ratio mask over the stream window.

    Polarity-summed counts over ``(t_start, tau]`` and ``(tau, t_end]`` are
    box-smoothed with the given radius, then ratioed against their sum.
    Where the smoothed total is zero the linear fallback applies.  Both flow
    axes receive the same scalar ratio.
    """
    _check_inner_tau(stream, tau)
    rel = _relative_tau(stream, tau)
    n0, n1 = _scalar_counts(stream, tau)
    s0 = _box_smooth(n0, smoothing_radius)
    s1 = _box_smooth(n1, smoothing_radius)
    w0, w1 = _ratio_or_fallback(s0, s1, rel)
    return FlowMask(w0, w0.copy(), w1, w1.copy(), float(tau))


def directional_mask(stream, i0, i1, tau, smoothing_radius=2):
    """Axis-separated event-count ratio mask.

    Each event is attributed to the horizontal axis with weight
    ``|dI/dx| / (|dI/dx| + |dI/dy| + eps)`` evaluated on the average of the
    two frames at the event pixel, and to the vertical axis with the
    complement.  The per-axis counts then follow the same smoothed ratio and
    fallback as the scalar mask.
    """
    i0 = np.asarray(i0, float)
    i1 = np.asarray(i1, float)
    shape = (stream.height, stream.width)
    if i0.shape != shape or i1.shape != shape:
        raise ValidationError(
            f"frame shapes {i0.shape}, {i1.shape} do not match stream {shape}"
        )
    _check_inner_tau(stream, tau)
    rel = _relative_tau(stream, tau)
    w_u, _ = gradient_axis_weights(i0, i1)

    sel0 = (stream.t > stream.t_start) & (stream.t <= tau)
    sel1 = (stream.t > tau) & (stream.t <= stream.t_end)
    c0u, c0v = _attributed_counts(stream, sel0, w_u)
    c1u, c1v = _attributed_counts(stream, sel1, w_u)

    s0u = _box_smooth(c0u, smoothing_radius)
    s1u = _box_smooth(c1u, smoothing_radius)
    s0v = _box_smooth(c0v, smoothing_radius)
    s1v = _box_smooth(c1v, smoothing_radius)
    w0u, w1u = _ratio_or_fallback(s0u, s1u, rel)
    w0v, w1v = _ratio_or_fallback(s0v, s1v, rel)
    return FlowMask(w0u, w0v, w1u, w1v, float(tau))


def gradient_axis_weights(i0, i1, eps=GRADIENT_EPS):
    """Horizontal/vertical attribution weights from the average image.

    Central differences (one-sided at borders) of ``(i0 + i1) / 2`` give the
    local gradient; the horizontal share is ``|gx| / (|gx| + |gy| + eps)``
    and the vertical share its complement.
    """
    avg = 0.5 * (np.asarray(i0, float) + np.asarray(i1, float))
    gy, gx = np.gradient(avg)
    w_u = np.abs(gx) / (np.abs(gx) + np.abs(gy) + eps)
    return w_u, 1.0 - w_u


def _scalar_counts(stream, tau):
    c0 = count_map(stream, stream.t_start, tau)
    c1 = count_map(stream, tau, stream.t_end)
    n0 = (c0.pos + c0.neg).astype(float)
    n1 = (c1.pos + c1.neg).astype(float)
    return n0, n1


def _attributed_counts(stream, sel, w_u):
    shape = w_u.shape
    cu = np.zeros(shape)
    cv = np.zeros(shape)
    yy, xx = stream.y[sel], stream.x[sel]
    np.add.at(cu, (yy, xx), w_u[yy, xx])
    np.add.at(cv, (yy, xx), 1.0 - w_u[yy, xx])
    return cu, cv


def _box_smooth(counts, radius):
    # explicit kernel correlation keeps zero regions exactly zero and the
    # output nonnegative, so the downstream ratio is exactly inside [0, 1]
    if radius < 0:
        raise ValidationError("smoothing_radius must be >= 0")
    radius = int(radius)
    if radius == 0:
        return counts
    size = 2 * radius + 1
    kernel = np.full((size, size), 1.0 / (size * size))
    return ndimage.correlate(counts, kernel, mode="nearest")


def _ratio_or_fallback(s0, s1, rel_tau):
    total = s0 + s1
    active = total > 0.0
    ratio0 = np.divide(s0, total, out=np.zeros_like(s0), where=active)
    ratio1 = np.divide(s1, total, out=np.zeros_like(s1), where=active)
    w0 = np.where(active, ratio0, rel_tau)
    w1 = np.where(active, ratio1, 1.0 - rel_tau)
    return w0, w1


def _relative_tau(stream, tau):
    return (float(tau) - stream.t_start) / (stream.t_end - stream.t_start)


def _check_tau(tau):
    if not 0.0 < tau < 1.0:
        raise ValidationError(f"tau={tau} must lie strictly inside (0, 1)")


def _check_inner_tau(stream, tau):
    if not stream.t_start < tau < stream.t_end:
        raise ValidationError(
            f"tau={tau} must lie strictly inside ({stream.t_start}, {stream.t_end})"
        )
