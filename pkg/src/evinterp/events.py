"""Contrast-threshold event simulation and event aggregation.

The simulator follows the classic DVS model: per pixel, the log intensity
signal is tracked against a reference level, and every time it moves by one
contrast threshold away from the level of the last emitted event, an event
fires at the exact crossing time.  Between the supplied frame samples the
log signal is linearly interpolated, so crossing times are solved in closed
form instead of being snapped to sample instants.

Aggregation helpers turn a stream into per-pixel count maps over half-open
time windows ``(t_a, t_b]`` and into the four-channel tensor (positive
count, negative count, latest positive timestamp, latest negative
timestamp) consumed by the loss stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

DEFAULT_CONTRAST = 0.15
LOG_FLOOR = 1.0 / 255.0

# Crossings within this relative distance of a threshold count as crossed,
# so a log step of exactly k*C yields exactly k events despite rounding.
_CROSS_TOL = 1e-9


@dataclass
class EventStream:
    """Time-ordered event records over a window ``[t_start, t_end]``.

    ``x``, ``y``, ``t``, ``p`` are parallel arrays; polarity is +1 or -1.
    Events are sorted by ``t`` with ties broken by ``(y, x, polarity)``.
    """

    width: int
    height: int
    t_start: float
    t_end: float
    x: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))
    y: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))
    t: np.ndarray = field(default_factory=lambda: np.empty(0, np.float64))
    p: np.ndarray = field(default_factory=lambda: np.empty(0, np.int8))

    def __len__(self):
        return int(self.t.size)

    def validate(self):
        n = len(self)
        if not (self.x.size == self.y.size == self.t.size == self.p.size):
            raise ValidationError("event arrays have mismatched lengths")
        if self.width <= 0 or self.height <= 0:
            raise ValidationError("stream dimensions must be positive")
        if not self.t_start < self.t_end:
            raise ValidationError("stream window is empty or inverted")
        if n == 0:
            return self
        for name, arr, hi in (("x", self.x, self.width), ("y", self.y, self.height)):
            bad = (arr < 0) | (arr >= hi)
            if bad.any():
                i = int(np.argmax(bad))
                raise ValidationError(
                    f"event {i}: {name}={int(arr[i])} outside [0, {hi})"
                )
        bad = ~np.isin(self.p, (-1, 1))
        if bad.any():
            i = int(np.argmax(bad))
            raise ValidationError(f"event {i}: polarity {int(self.p[i])} not in {{-1, +1}}")
        bad = (self.t < self.t_start) | (self.t > self.t_end)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValidationError(
                f"event {i}: t={self.t[i]} outside [{self.t_start}, {self.t_end}]"
            )
        order = np.lexsort((self.p, self.x, self.y, self.t))
        if not np.array_equal(order, np.arange(n)):
            raise ValidationError("events are not in canonical (t, y, x, p) order")
        return self


@dataclass
class EventTensor:
    """Four-channel per-pixel aggregation of a stream window.

    Counts are nonnegative integers; ``last_pos_t``/``last_neg_t`` hold the
    latest matching timestamp normalized to [0, 1] within the window, or the
    sentinel -1 where the count is zero.
    """

    pos_count: np.ndarray
    neg_count: np.ndarray
    last_pos_t: np.ndarray
    last_neg_t: np.ndarray


@dataclass
class CountMaps:
    """Per-pixel, per-polarity event counts over a half-open window."""

    pos: np.ndarray
    neg: np.ndarray
    window: tuple[float, float]


def _canonical_order(x, y, t, p):
    return np.lexsort((p, x, y, t))


def simulate_events(frames, contrast_threshold=DEFAULT_CONTRAST, floor=LOG_FLOOR,
                    threshold_jitter=0.0, jitter_seed=0):
    """Generate an event stream from a sequence of ``(time, frame)`` samples.

    Per pixel, ``L(t) = log(max(I(t), floor))`` is linearly interpolated
    between consecutive samples.  An event of polarity p fires at the exact
    crossing time each time L moves by one threshold in direction p from the
    level of the last emitted event; the reference level starts at L of the
    first frame.

    Args:
        frames: sequence of ``(time, frame)`` with strictly increasing times
            and identical frame shapes; intensities in [0, 1].
        contrast_threshold: log-intensity step per event, > 0.
        floor: positive lower clamp applied before taking logs.
        threshold_jitter: optional per-pixel threshold mismatch fraction in
            [0, 1); thresholds become ``C * (1 + jitter * U(-1, 1))``.  Off
            (0.0) by default; intended only for robustness experiments.
        jitter_seed: seed for the jitter draw, making runs reproducible.

    Returns:
        EventStream sorted in canonical order, windowed to the sample times.
    """
    frames = list(frames)
    if len(frames) < 2:
        raise ValidationError("simulate_events needs at least two frames")
    if contrast_threshold <= 0:
        raise ValidationError("contrast_threshold must be positive")
    if floor <= 0:
        raise ValidationError("floor must be positive")
    if not 0.0 <= threshold_jitter < 1.0:
        raise ValidationError("threshold_jitter must be in [0, 1)")
    times = np.asarray([t for t, _ in frames], float)
    if np.any(np.diff(times) <= 0):
        raise ValidationError("frame times must be strictly increasing")
    shape = np.asarray(frames[0][1]).shape
    for t, f in frames:
        if np.asarray(f).shape != shape:
            raise ValidationError(f"frame at t={t} has shape {np.asarray(f).shape}, expected {shape}")
    height, width = shape

    if threshold_jitter > 0.0:
        rng = np.random.default_rng(jitter_seed)
        thresh = contrast_threshold * (1.0 + threshold_jitter * rng.uniform(-1.0, 1.0, shape))
    else:
        thresh = np.full(shape, float(contrast_threshold))

    log_of = lambda f: np.log(np.maximum(np.asarray(f, float), floor))
    ref = log_of(frames[0][1])
    level_a = ref.copy()
    t_a = float(times[0])

    xs, ys, ts, ps = [], [], [], []
    for t_b, frame_b in frames[1:]:
        t_b = float(t_b)
        level_b = log_of(frame_b)
        k_pos = np.floor((level_b - ref) / thresh + _CROSS_TOL).astype(np.int64)
        k_neg = np.floor((ref - level_b) / thresh + _CROSS_TOL).astype(np.int64)
        np.clip(k_pos, 0, None, out=k_pos)
        np.clip(k_neg, 0, None, out=k_neg)
        for k, pol in ((k_pos, 1), (k_neg, -1)):
            _emit_segment(xs, ys, ts, ps, k, pol, ref, thresh,
                          level_a, level_b, t_a, t_b, width)
        ref += (k_pos - k_neg) * thresh
        level_a, t_a = level_b, t_b

    if not ts:
        return EventStream(width, height, float(times[0]), float(times[-1]))
    x = np.concatenate(xs).astype(np.int32)
    y = np.concatenate(ys).astype(np.int32)
    t = np.concatenate(ts)
    p = np.concatenate(ps).astype(np.int8)
    order = _canonical_order(x, y, t, p)
    return EventStream(width, height, float(times[0]), float(times[-1]),
                       x[order], y[order], t[order], p[order])


def _emit_segment(xs, ys, ts, ps, k, polarity, ref, thresh, level_a, level_b, t_a, t_b, width):
    """Expand per-pixel crossing counts into timestamped events for one segment."""
    flat = k.ravel()
    idx = np.nonzero(flat > 0)[0]
    if idx.size == 0:
        return
    reps = flat[idx]
    total = int(reps.sum())
    pix = np.repeat(idx, reps)
    starts = np.cumsum(reps) - reps
    step = np.arange(total, dtype=np.int64) - np.repeat(starts, reps) + 1
    levels = ref.ravel()[pix] + polarity * step * thresh.ravel()[pix]
    delta = (level_b - level_a).ravel()[pix]
    frac = (levels - level_a.ravel()[pix]) / delta
    # crossings lie strictly inside (t_a, t_b] up to rounding; keep them there
    tt = t_a + np.clip(frac, 1e-12, 1.0) * (t_b - t_a)
    ys.append(pix // width)
    xs.append(pix % width)
    ts.append(tt)
    ps.append(np.full(total, polarity, np.int8))


def _check_window(stream, t_a, t_b):
    if not (stream.t_start <= t_a < t_b <= stream.t_end):
        raise ValidationError(
            f"window ({t_a}, {t_b}] is inverted or outside "
            f"[{stream.t_start}, {stream.t_end}]"
        )


def _bincount(stream, sel):
    flat = stream.y[sel].astype(np.int64) * stream.width + stream.x[sel]
    counts = np.bincount(flat, minlength=stream.width * stream.height)
    return counts.reshape(stream.height, stream.width)


def count_map(stream, t_a, t_b):
    """Count events with ``t in (t_a, t_b]`` per pixel and polarity.

    The half-open convention makes counts additive over window partitions:
    the counts over (a, m] and (m, b] sum exactly to the counts over (a, b].
    """
    _check_window(stream, t_a, t_b)
    sel = (stream.t > t_a) & (stream.t <= t_b)
    pos = _bincount(stream, sel & (stream.p > 0))
    neg = _bincount(stream, sel & (stream.p < 0))
    return CountMaps(pos, neg, (float(t_a), float(t_b)))


def to_event_tensor(stream, t_a, t_b):
    """Aggregate a stream window into the four-channel event tensor.

    Timestamps are normalized to [0, 1] within the window; pixels without a
    matching event carry the sentinel -1.
    """
    _check_window(stream, t_a, t_b)
    shape = (stream.height, stream.width)
    maps = count_map(stream, t_a, t_b)
    last_pos = np.full(shape, -1.0)
    last_neg = np.full(shape, -1.0)
    sel = (stream.t > t_a) & (stream.t <= t_b)
    norm_t = (stream.t[sel] - t_a) / (t_b - t_a)
    yy, xx, pp = stream.y[sel], stream.x[sel], stream.p[sel]
    np.maximum.at(last_pos, (yy[pp > 0], xx[pp > 0]), norm_t[pp > 0])
    np.maximum.at(last_neg, (yy[pp < 0], xx[pp < 0]), norm_t[pp < 0])
    return EventTensor(maps.pos, maps.neg, last_pos, last_neg)


def integrate_events(i0, stream, contrast_threshold=DEFAULT_CONTRAST, floor=LOG_FLOOR):
    """Reconstruct the final frame implied by ``i0`` plus the stream.

    Computes ``exp(log(max(i0, floor)) + C * (pos_count - neg_count))``
    clamped to [0, 1].  Serves as the round-trip oracle for the simulator:
    before clamping, the log residual against the true final frame is below
    one contrast threshold at every pixel.
    """
    i0 = np.asarray(i0, float)
    if i0.shape != (stream.height, stream.width):
        raise ValidationError(
            f"frame shape {i0.shape} does not match stream "
            f"({stream.height}, {stream.width})"
        )
    if contrast_threshold <= 0:
        raise ValidationError("contrast_threshold must be positive")
    maps = count_map(stream, stream.t_start, stream.t_end)
    net = maps.pos.astype(np.int64) - maps.neg.astype(np.int64)
    log_end = np.log(np.maximum(i0, floor)) + contrast_threshold * net
    return np.clip(np.exp(log_end), 0.0, 1.0)
