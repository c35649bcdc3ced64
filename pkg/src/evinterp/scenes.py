"""Synthetic scenes with piecewise-polynomial sprite motion.

A scene is a uniform background plus a list of sprites, each a small
intensity mask translating along its own trajectory over the unit time
interval.  Because the motion is known in closed form, a scene can answer
the two questions every downstream stage is tested against: what the frame
looks like at any time, and how far each sprite pixel moved between two
instants.  Sprites are composited with bilinear coverage splatting, so
sub-pixel motion produces the smooth intensity changes the event simulator
needs at fine time steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ValidationError
from .flow import FlowField

PRESET_NAMES = ("butterfly1d", "butterfly2d", "uniform", "accelerated")

# A pixel counts as belonging to a sprite footprint once at least half
# covered; at integer positions this is exactly the mask support.
COVERAGE_THRESHOLD = 0.5


@dataclass(frozen=True)
class Segment:
    """One polynomial piece of a trajectory.

    Position inside ``[t_start, t_end]`` is the polynomial evaluated at the
    local offset ``t - t_start``, coefficients in ascending order and in
    pixels.  ``(p,)`` is rest, ``(p, v)`` constant velocity, ``(p, v, a/2)``
    constant acceleration.
    """

    t_start: float
    t_end: float
    coeffs_x: tuple
    coeffs_y: tuple

    def position(self, t):
        dt = t - self.t_start
        return (float(npoly.polyval(dt, self.coeffs_x)),
                float(npoly.polyval(dt, self.coeffs_y)))


@dataclass(frozen=True)
class Trajectory:
    """Contiguous segments covering [0, 1] with a continuous position."""

    segments: tuple

    def position(self, t):
        for seg in self.segments:
            if t <= seg.t_end:
                return seg.position(t)
        return self.segments[-1].position(t)

    def validate(self):
        if not self.segments:
            raise ValidationError("trajectory has no segments")
        if abs(self.segments[0].t_start) > 1e-12 or abs(self.segments[-1].t_end - 1.0) > 1e-12:
            raise ValidationError("trajectory segments must cover [0, 1]")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.t_end - b.t_start) > 1e-12:
                raise ValidationError("trajectory segments must be contiguous")
            pa, pb = a.position(a.t_end), b.position(b.t_start)
            if abs(pa[0] - pb[0]) > 1e-9 or abs(pa[1] - pb[1]) > 1e-9:
                raise ValidationError("trajectory position jumps across a segment boundary")
        for seg in self.segments:
            if not seg.t_start < seg.t_end:
                raise ValidationError("segment has empty or inverted time span")
        return self


def constant_segment(t0, t1, x, y):
    return Segment(t0, t1, (float(x),), (float(y),))


def linear_segment(t0, t1, x0, y0, x1, y1):
    """Constant-velocity segment from (x0, y0) at t0 to (x1, y1) at t1."""
    span = t1 - t0
    return Segment(t0, t1, (float(x0), (x1 - x0) / span), (float(y0), (y1 - y0) / span))


@dataclass
class Sprite:
    """A translating intensity patch.

    ``mask`` holds per-pixel coverage in [0, 1]; composited pixels blend the
    background toward ``intensity`` by that coverage.  ``shape`` optionally
    records the textual constructor (e.g. ``"rect 3 16"``) so scene files
    can round-trip without serializing the raw mask.
    """

    mask: np.ndarray
    intensity: float
    trajectory: Trajectory
    shape: str | None = None


@dataclass
class SceneSpec:
    width: int
    height: int
    background: float
    sprites: list = field(default_factory=list)
    frame_times: tuple = (0.0, 1.0)


def rect_mask(width, height, value=1.0):
    return np.full((height, width), float(value))


def disk_mask(radius):
    """Anti-aliased disk of the given radius on a (2r+1) square grid."""
    size = 2 * int(radius) + 1
    yy, xx = np.mgrid[0:size, 0:size]
    dist = np.hypot(yy - radius, xx - radius)
    return np.clip(radius + 0.5 - dist, 0.0, 1.0)


def ramp_mask(width, height, lo=0.4, hi=1.0):
    """Diagonal coverage ramp with strictly positive gradients on both axes."""
    yy, xx = np.mgrid[0:height, 0:width]
    span = max(width + height - 2, 1)
    return lo + (hi - lo) * (xx + yy) / span


def validate_scene(scene):
    """Check the documented scene invariants (dimensions, margins, bounds)."""
    if scene.width < 8 or scene.height < 8:
        raise ValidationError("scene dimensions must be at least 8x8")
    if not 0.0 <= scene.background <= 1.0:
        raise ValidationError("background intensity must be in [0, 1]")
    times = tuple(scene.frame_times)
    if any(not 0.0 <= t <= 1.0 for t in times) or list(times) != sorted(times):
        raise ValidationError("frame_times must be sorted and inside [0, 1]")
    for i, sprite in enumerate(scene.sprites):
        if not 0.0 <= sprite.intensity <= 1.0:
            raise ValidationError(f"sprite {i}: intensity must be in [0, 1]")
        m = np.asarray(sprite.mask)
        if m.ndim != 2 or m.size == 0 or m.min() < 0.0 or m.max() > 1.0:
            raise ValidationError(f"sprite {i}: mask must be 2-D with values in [0, 1]")
        sprite.trajectory.validate()
        mh, mw = m.shape
        for t in times:
            x, y = sprite.trajectory.position(t)
            if x < 1.0 or y < 1.0 or x + mw > scene.width - 1 or y + mh > scene.height - 1:
                raise ValidationError(
                    f"sprite {i} leaves the 1 px border margin at t={t}"
                )
    return scene


def _accumulate(canvas, tile, top, left):
    h, w = tile.shape
    ch, cw = canvas.shape
    y0, y1 = max(top, 0), min(top + h, ch)
    x0, x1 = max(left, 0), min(left + w, cw)
    if y0 >= y1 or x0 >= x1:
        return
    canvas[y0:y1, x0:x1] += tile[y0 - top:y1 - top, x0 - left:x1 - left]


def _splat(mask, x, y, height, width):
    """Deposit a mask at a continuous position with bilinear weights."""
    cov = np.zeros((height, width))
    ix, iy = int(np.floor(x)), int(np.floor(y))
    fx, fy = x - ix, y - iy
    for dy, dx, w in ((0, 0, (1 - fy) * (1 - fx)),
                      (0, 1, (1 - fy) * fx),
                      (1, 0, fy * (1 - fx)),
                      (1, 1, fy * fx)):
        if w > 0.0:
            _accumulate(cov, mask * w, iy + dy, ix + dx)
    return np.clip(cov, 0.0, 1.0)


def render_frame(scene, t):
    """Render the scene at time ``t`` in [0, 1].

    The background is filled first; each sprite then blends the canvas
    toward its intensity by its splatted coverage, so later sprites occlude
    earlier ones.  Rendering is deterministic and pure.
    """
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"render time t={t} outside [0, 1]")
    frame = np.full((scene.height, scene.width), float(scene.background))
    for sprite in scene.sprites:
        x, y = sprite.trajectory.position(t)
        cov = _splat(np.asarray(sprite.mask, float), x, y, scene.height, scene.width)
        frame = frame * (1.0 - cov) + sprite.intensity * cov
    return frame


def ground_truth_flow(scene, t_a, t_b):
    """Exact forward flow from time ``t_a`` to ``t_b``.

    Pixels at least half covered by a sprite at ``t_a`` carry that sprite's
    displacement (later sprites overwrite earlier ones where footprints
    overlap); the static background carries zero.
    """
    for t in (t_a, t_b):
        if not 0.0 <= t <= 1.0:
            raise ValidationError(f"flow time t={t} outside [0, 1]")
    u = np.zeros((scene.height, scene.width))
    v = np.zeros((scene.height, scene.width))
    for sprite in scene.sprites:
        xa, ya = sprite.trajectory.position(t_a)
        xb, yb = sprite.trajectory.position(t_b)
        cov = _splat(np.asarray(sprite.mask, float), xa, ya, scene.height, scene.width)
        covered = cov >= COVERAGE_THRESHOLD
        u[covered] = xb - xa
        v[covered] = yb - ya
    return FlowField(u, v)


def sprite_footprint(scene, index, t):
    """Boolean footprint (coverage >= 0.5) of one sprite at time ``t``."""
    sprite = scene.sprites[index]
    x, y = sprite.trajectory.position(t)
    cov = _splat(np.asarray(sprite.mask, float), x, y, scene.height, scene.width)
    return cov >= COVERAGE_THRESHOLD


def _rest_then_move_1d():
    # Single pixel resting two cells above its final position: the frame
    # difference over the move period encodes [-1, 0, +1] down the column.
    traj = Trajectory((
        constant_segment(0.0, 0.5, 6, 5),
        linear_segment(0.5, 1.0, 6, 5, 6, 7),
    ))
    sprite = Sprite(rect_mask(1, 1), 0.9, traj, shape="rect 1 1")
    return SceneSpec(12, 16, 0.1, [sprite], (0.0, 0.5, 1.0))


def _rest_then_legs_2d():
    # Rest for the first half, then a horizontal leg followed by a vertical
    # leg; at tau = 0.5 the true position is still the rest position.
    traj = Trajectory((
        constant_segment(0.0, 0.5, 10, 30),
        linear_segment(0.5, 0.75, 10, 30, 30, 30),
        linear_segment(0.75, 1.0, 30, 30, 30, 10),
    ))
    sprite = Sprite(ramp_mask(7, 7), 0.9, traj, shape="ramp 7 7 0.4 1.0")
    return SceneSpec(48, 48, 0.1, [sprite], (0.0, 0.5, 1.0))


def _uniform_sweep():
    # Sweep shorter than the bar width, so no pixel is crossed and fully
    # left within one half-period: event pixels keep a net intensity change.
    traj = Trajectory((linear_segment(0.0, 1.0, 3, 8, 47, 8),))
    sprite = Sprite(rect_mask(42, 16), 0.85, traj, shape="rect 42 16")
    return SceneSpec(96, 32, 0.2, [sprite], (0.0, 0.5, 1.0))


def _accelerated_sweep():
    # x(t) = 3 + 44 t^2: rest-start, constant-acceleration sweep.
    traj = Trajectory((Segment(0.0, 1.0, (3.0, 0.0, 44.0), (8.0,)),))
    sprite = Sprite(rect_mask(42, 16), 0.85, traj, shape="rect 42 16")
    return SceneSpec(96, 32, 0.2, [sprite], (0.0, 0.5, 1.0))


_PRESET_BUILDERS = {
    "butterfly1d": _rest_then_move_1d,
    "butterfly2d": _rest_then_legs_2d,
    "uniform": _uniform_sweep,
    "accelerated": _accelerated_sweep,
}


def make_preset(name):
    """Build one of the named oracle scenes.

    ``butterfly1d``/``butterfly2d`` rest first and move late; ``uniform``
    sweeps at constant velocity; ``accelerated`` sweeps from rest at
    constant acceleration.
    """
    try:
        builder = _PRESET_BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}"
        ) from None
    return validate_scene(builder())


def motion_suite():
    """Five piecewise-motion scenes used by the mode-comparison evaluation.

    Each scene concentrates its motion in part of the interval, so event
    timing is informative at tau = 0.5 while the linear baseline is not.
    """
    def ramp_sprite(traj):
        return Sprite(ramp_mask(8, 8), 0.9, traj, shape="ramp 8 8 0.4 1.0")

    scenes = {}
    scenes["rest_move_h"] = SceneSpec(48, 48, 0.15, [ramp_sprite(Trajectory((
        constant_segment(0.0, 0.5, 8, 20),
        linear_segment(0.5, 1.0, 8, 20, 30, 20),
    )))], (0.0, 0.5, 1.0))
    scenes["rest_move_l"] = SceneSpec(48, 48, 0.15, [ramp_sprite(Trajectory((
        constant_segment(0.0, 0.5, 8, 30),
        linear_segment(0.5, 0.75, 8, 30, 28, 30),
        linear_segment(0.75, 1.0, 28, 30, 28, 12),
    )))], (0.0, 0.5, 1.0))
    scenes["move_rest_h"] = SceneSpec(48, 48, 0.15, [ramp_sprite(Trajectory((
        linear_segment(0.0, 0.5, 8, 20, 30, 20),
        constant_segment(0.5, 1.0, 30, 20),
    )))], (0.0, 0.5, 1.0))
    scenes["rest_move_late"] = SceneSpec(48, 48, 0.15, [ramp_sprite(Trajectory((
        constant_segment(0.0, 0.7, 8, 26),
        linear_segment(0.7, 1.0, 8, 26, 30, 12),
    )))], (0.0, 0.5, 1.0))
    scenes["two_phase_pair"] = SceneSpec(48, 48, 0.15, [
        ramp_sprite(Trajectory((
            constant_segment(0.0, 0.5, 6, 6),
            linear_segment(0.5, 1.0, 6, 6, 28, 6),
        ))),
        ramp_sprite(Trajectory((
            linear_segment(0.0, 0.5, 6, 30, 28, 30),
            constant_segment(0.5, 1.0, 28, 30),
        ))),
    ], (0.0, 0.5, 1.0))
    for scene in scenes.values():
        validate_scene(scene)
    return scenes
