"""Dense flow fields and intermediate-flow synthesis.

A flow field stores one horizontal (u) and one vertical (v) displacement per
pixel, in pixels.  ``flow(a -> b)`` lives on the pixel grid of time ``a``
and points toward positions at time ``b`` (forward convention), so warping
frame ``b`` backward along ``flow(tau -> b)`` resamples it onto the grid of
time ``tau``.

``intermediate_flows`` combines the two bi-directional flows per pixel and
per axis with the period weights of a :class:`~evinterp.masks.FlowMask`:

    F_t0 = -(1 - tau) * w0 * F01 + tau * w0 * F10
    F_t1 =  (1 - tau) * w1 * F01 - tau * w1 * F10

With the constant linear mask ``w0 = tau`` this reduces exactly to the
classic linear synthesis; with anti-symmetric inputs ``F10 = -F01`` it
reduces to ``-w0 * F01`` and ``w1 * F01``, so the mask alone decides how
much of the total displacement each side contributes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .masks import FlowMask


@dataclass
class FlowField:
    """Per-pixel displacement field; ``u`` horizontal, ``v`` vertical, in pixels."""

    u: np.ndarray
    v: np.ndarray

    @property
    def height(self):
        return self.u.shape[0]

    @property
    def width(self):
        return self.u.shape[1]

    def validate(self):
        if self.u.shape != self.v.shape or self.u.ndim != 2:
            raise ValidationError("flow components must share one 2-D shape")
        if not (np.isfinite(self.u).all() and np.isfinite(self.v).all()):
            raise ValidationError("flow field contains non-finite values")
        if np.abs(self.u).max(initial=0.0) >= self.width or \
                np.abs(self.v).max(initial=0.0) >= self.height:
            raise ValidationError("flow displacement exceeds image extent")
        return self


def zero_flow(width, height):
    return FlowField(np.zeros((height, width)), np.zeros((height, width)))


def _check_shapes(f01, f10, mask):
    if f01.u.shape != f10.u.shape or f01.u.shape != mask.shape:
        raise ValidationError(
            f"flow/mask shapes disagree: {f01.u.shape}, {f10.u.shape}, {mask.shape}"
        )
    if not 0.0 < mask.tau < 1.0:
        raise ValidationError(f"mask.tau={mask.tau} must lie inside (0, 1)")


def intermediate_flows(f01, f10, mask, mask_only=False):
    """Synthesize ``(F_tau->0, F_tau->1)`` from bi-directional flows and a mask.

    ``mask_only=True`` switches to an experimental variant that blends the
    two one-sided estimates with equal weight instead of the extra
    ``(1 - tau)`` / ``tau`` temporal factors.  Off by default; the default
    form is the reference behavior.
    """
    _check_shapes(f01, f10, mask)
    t = float(mask.tau)
    if mask_only:
        ft0_u = 0.5 * (mask.omega_0t_u * f10.u - mask.omega_0t_u * f01.u)
        ft0_v = 0.5 * (mask.omega_0t_v * f10.v - mask.omega_0t_v * f01.v)
        ft1_u = 0.5 * (mask.omega_1t_u * f01.u - mask.omega_1t_u * f10.u)
        ft1_v = 0.5 * (mask.omega_1t_v * f01.v - mask.omega_1t_v * f10.v)
    else:
        ft0_u = -(1.0 - t) * mask.omega_0t_u * f01.u + t * mask.omega_0t_u * f10.u
        ft0_v = -(1.0 - t) * mask.omega_0t_v * f01.v + t * mask.omega_0t_v * f10.v
        ft1_u = (1.0 - t) * mask.omega_1t_u * f01.u - t * mask.omega_1t_u * f10.u
        ft1_v = (1.0 - t) * mask.omega_1t_v * f01.v - t * mask.omega_1t_v * f10.v
    return FlowField(ft0_u, ft0_v), FlowField(ft1_u, ft1_v)


def single_source_intermediate(f, mask, source, target_period):
    """One-sided intermediate-flow estimate, without temporal blending.

    ``target_period`` selects which sub-period mask applies ("0-tau" for
    ``F_tau->0``, "tau-1" for ``F_tau->1``); ``source`` names the flow that
    was passed in (0 for ``F_0->1``, 1 for ``F_1->0``) and fixes the sign:

        F_t0 = w0 * F10   or   -w0 * F01
        F_t1 = w1 * F01   or   -w1 * F10
    """
    if source not in (0, 1):
        raise ValidationError(f"source must be 0 or 1, got {source!r}")
    if target_period not in ("0-tau", "tau-1"):
        raise ValidationError(f"target_period must be '0-tau' or 'tau-1', got {target_period!r}")
    if f.u.shape != mask.shape:
        raise ValidationError(f"flow/mask shapes disagree: {f.u.shape}, {mask.shape}")
    if target_period == "0-tau":
        wu, wv = mask.omega_0t_u, mask.omega_0t_v
        sign = 1.0 if source == 1 else -1.0
    else:
        wu, wv = mask.omega_1t_u, mask.omega_1t_v
        sign = 1.0 if source == 0 else -1.0
    return FlowField(sign * wu * f.u, sign * wv * f.v)
