"""Image-quality metrics and the training-style loss stack.

PSNR, SSIM and interpolation error follow their standard definitions for
unit-range frames (IE is reported on the 0-255 scale, RMS convention).  The
motion-consistency loss compares binarized "where did intensity change"
maps derived from a predicted frame against binarized event-count maps from
the recorded stream, after a small Gaussian blur; the remaining terms are
the usual reconstruction / warping / smoothness L1 losses, combined by a
weighted total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ValidationError
from .events import LOG_FLOOR

PSNR_CAP = 99.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

BLUR_KERNEL_SIZE = 5


@dataclass(frozen=True)
class LossWeights:
    """Weights of the total loss; defaults follow the reference recipe."""

    lambda_mc: float = 1.0
    lambda_rec: float = 1.0
    lambda_per: float = 0.2
    lambda_warp: float = 0.8
    lambda_smooth: float = 0.8

    def as_tuple(self):
        return (self.lambda_mc, self.lambda_rec, self.lambda_per,
                self.lambda_warp, self.lambda_smooth)


@dataclass
class BinarizedEventMap:
    """Per-pixel {0, 1} occurrence maps for each polarity."""

    pos: np.ndarray
    neg: np.ndarray


def _check_pair(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.shape != b.shape:
        raise ValidationError(f"frame shapes disagree: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b, peak=1.0):
    """Peak signal-to-noise ratio in dB, capped at 99.0 for identical frames."""
    a, b = _check_pair(a, b)
    if peak <= 0:
        raise ValidationError("peak must be positive")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(10.0 * np.log10(peak * peak / mse), PSNR_CAP)


def _gaussian_kernel(size, sigma):
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords ** 2) / (2.0 * sigma * sigma))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def _windowed(img, kernel):
    windows = np.lib.stride_tricks.sliding_window_view(img, kernel.shape)
    return np.tensordot(windows, kernel, axes=([2, 3], [0, 1]))


def ssim(a, b):
    """Mean local SSIM with an 11x11 Gaussian window (sigma 1.5).

    Local statistics are taken over fully valid windows only, with the
    standard stabilizers k1=0.01, k2=0.03 at dynamic range 1.
    """
    a, b = _check_pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ValidationError(
            f"frames must be at least {SSIM_WINDOW} px on each side, got {a.shape}"
        )
    kernel = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    mu_a = _windowed(a, kernel)
    mu_b = _windowed(b, kernel)
    var_a = _windowed(a * a, kernel) - mu_a ** 2
    var_b = _windowed(b * b, kernel) - mu_b ** 2
    cov = _windowed(a * b, kernel) - mu_a * mu_b
    c1 = SSIM_K1 ** 2
    c2 = SSIM_K2 ** 2
    ssim_map = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / \
               ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2))
    return float(np.mean(ssim_map))


def interpolation_error(a, b):
    """Root-mean-square pixel difference on the 0-255 scale."""
    a, b = _check_pair(a, b)
    return float(255.0 * np.sqrt(np.mean((a - b) ** 2)))


def binarize_event_count(et):
    """Sign of the count channels: 1 where at least one event occurred."""
    return BinarizedEventMap((et.pos_count > 0).astype(float),
                             (et.neg_count > 0).astype(float))


def binarize_prediction(i_pred, i_ref, et, floor=LOG_FLOOR):
    """Binarize the predicted log-intensity change via order statistics.

    ``I_diff = log(max(i_pred, floor) / max(i_ref, floor))`` is thresholded
    so that (modulo ties) exactly as many pixels are marked positive as
    carry at least one positive event, and likewise for negative; pixels
    equal to the threshold are included.  A zero event count leaves that
    channel all-zero.
    """
    i_pred, i_ref = _check_pair(i_pred, i_ref)
    if i_pred.shape != et.pos_count.shape:
        raise ValidationError(
            f"frame shape {i_pred.shape} does not match tensor {et.pos_count.shape}"
        )
    diff = np.log(np.maximum(i_pred, floor) / np.maximum(i_ref, floor))
    flat = diff.ravel()
    t_pos = int(np.count_nonzero(et.pos_count > 0))
    t_neg = int(np.count_nonzero(et.neg_count > 0))
    pos = np.zeros(diff.shape)
    neg = np.zeros(diff.shape)
    if t_pos > 0:
        thr = np.partition(flat, flat.size - t_pos)[flat.size - t_pos]
        pos = (diff >= thr).astype(float)
    if t_neg > 0:
        thr = np.partition(flat, t_neg - 1)[t_neg - 1]
        neg = (diff <= thr).astype(float)
    return BinarizedEventMap(pos, neg)


def gaussian_blur(img, sigma):
    """5x5 Gaussian blur with reflective borders; ``sigma=0`` is identity."""
    if sigma < 0:
        raise ValidationError("blur sigma must be >= 0")
    img = np.asarray(img, float)
    if sigma == 0:
        return img.copy()
    kernel = _gaussian_kernel(BLUR_KERNEL_SIZE, sigma)
    return ndimage.correlate(img, kernel, mode="reflect")


def _mc_term(e_hat, e_true, sigma):
    a = np.stack([gaussian_blur(e_hat.pos, sigma), gaussian_blur(e_hat.neg, sigma)])
    b = np.stack([gaussian_blur(e_true.pos, sigma), gaussian_blur(e_true.neg, sigma)])
    return float(np.mean(np.abs(a - b)))


def motion_consistency_loss(pred0, i0, pred1, i1, et0t, ett1, blur_sigma=1.0,
                            floor=LOG_FLOOR):
    """Gap between predicted and recorded binarized event maps.

    The first term compares ``binarize_prediction(pred0, i0)`` against the
    binarized counts over (0, tau]; the second pairs the later period
    symmetrically as ``binarize_prediction(i1, pred1)`` against the counts
    over (tau, 1].  Both terms are mean L1 over the blurred two-channel
    maps, so each term is at most 1 and the loss is 0 exactly when the
    blurred maps coincide.
    """
    term0 = _mc_term(binarize_prediction(pred0, i0, et0t, floor),
                     binarize_event_count(et0t), blur_sigma)
    term1 = _mc_term(binarize_prediction(i1, pred1, ett1, floor),
                     binarize_event_count(ett1), blur_sigma)
    return term0 + term1


def _total_variation(field):
    s = float(np.abs(np.diff(field.u, axis=1)).sum() + np.abs(np.diff(field.u, axis=0)).sum()
              + np.abs(np.diff(field.v, axis=1)).sum() + np.abs(np.diff(field.v, axis=0)).sum())
    return s / field.u.size


def baseline_losses(pred, gt, warped0, warped1, f01, f10):
    """Reconstruction, warping and smoothness terms of the linear baseline.

    rec = mean L1(pred, gt); warp = mean L1(warped0, gt) + mean L1(warped1, gt);
    smooth = mean total variation (L1 of forward differences) of both flows.
    """
    pred, gt = _check_pair(pred, gt)
    warped0, _ = _check_pair(warped0, gt)
    warped1, _ = _check_pair(warped1, gt)
    rec = float(np.mean(np.abs(pred - gt)))
    warp_loss = float(np.mean(np.abs(warped0 - gt)) + np.mean(np.abs(warped1 - gt)))
    smooth = _total_variation(f01) + _total_variation(f10)
    return rec, warp_loss, smooth


def total_loss(parts, weights=LossWeights()):
    """Weighted sum of ``(mc, rec, per, warp, smooth)`` parts."""
    parts = tuple(float(p) for p in parts)
    if len(parts) != 5:
        raise ValidationError("expected 5 loss parts (mc, rec, per, warp, smooth)")
    if any(p < 0 for p in parts):
        raise ValidationError("loss parts must be nonnegative")
    w = weights.as_tuple()
    if any(x < 0 for x in w):
        raise ValidationError("loss weights must be nonnegative")
    return float(sum(p * x for p, x in zip(parts, w)))
