"""File codecs: frames (PGM/PNG), Middlebury .flo flows, event streams
(binary EVS1 and CSV), mask planes (MSK1) and plain-text scene files.

Binary layouts (all little-endian):

* EVS1 events: magic ``EVS1``, u32 width, u32 height, f64 t_start,
  f64 t_end, u64 count; then per event u16 x, u16 y, f64 t, i8 polarity.
* ``.flo`` flows: f32 magic 202021.25, i32 width, i32 height, then
  interleaved f32 (u, v) per pixel, row-major.
* MSK1 masks: magic ``MSK1``, u32 width, u32 height, f64 tau, then four
  f32 planes in order omega_0t_u, omega_0t_v, omega_1t_u, omega_1t_v.

Scene files are line-oriented ``key value...`` text (see ``write_scene``).
Every writer rejects non-finite values, so no output file can carry
NaN/Inf.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError, ValidationError
from .events import EventStream
from .flow import FlowField
from .masks import FlowMask
from .scenes import (SceneSpec, Segment, Sprite, Trajectory, disk_mask,
                     ramp_mask, rect_mask, validate_scene)

FLO_MAGIC = 202021.25
EVS_MAGIC = b"EVS1"
MSK_MAGIC = b"MSK1"

_EVS_HEADER = struct.Struct("<4sIIddQ")
_MSK_HEADER = struct.Struct("<4sIId")
_EVENT_DTYPE = np.dtype([("x", "<u2"), ("y", "<u2"), ("t", "<f8"), ("p", "<i1")])


def _ensure_finite(arr, what):
    if not np.isfinite(arr).all():
        raise ValidationError(f"{what} contains NaN or Inf; refusing to write")


# ---------------------------------------------------------------------------
# frames


def read_frame(path):
    """Read an 8-bit grayscale frame from PGM (P5) or PNG.

    RGB PNG input is reduced by the 0.299/0.587/0.114 luma weights; 16-bit
    input of either format is rejected as unsupported depth.
    """
    path = str(path)
    if path.lower().endswith(".pgm"):
        with open(path, "rb") as fh:
            return _parse_pgm(fh.read())
    if path.lower().endswith(".png"):
        return _read_png(path)
    raise FormatError(f"unsupported frame format for {path!r} (use .pgm or .png)")


def write_frame(frame, path):
    """Write a unit-range frame as an 8-bit PGM or PNG file."""
    frame = np.asarray(frame, float)
    _ensure_finite(frame, "frame")
    if frame.ndim != 2:
        raise ValidationError("frame must be a 2-D array")
    if frame.min() < 0.0 or frame.max() > 1.0:
        raise ValidationError("frame values must lie in [0, 1]")
    data = np.round(frame * 255.0).astype(np.uint8)
    path = str(path)
    if path.lower().endswith(".pgm"):
        h, w = data.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(data.tobytes())
        return
    if path.lower().endswith(".png"):
        from PIL import Image

        Image.fromarray(data, mode="L").save(path)
        return
    raise FormatError(f"unsupported frame format for {path!r} (use .pgm or .png)")


def _parse_pgm(data):
    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            ch = data[pos:pos + 1]
            if ch.isspace():
                pos += 1
            elif ch == b"#":
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("unexpected end of PGM header", offset=start)
        return data[start:pos], start

    magic, off = next_token()
    if magic != b"P5":
        raise FormatError(f"bad PGM magic {magic!r}, expected b'P5'", offset=off)
    dims = []
    for name in ("width", "height", "maxval"):
        tok, off = next_token()
        try:
            dims.append(int(tok))
        except ValueError:
            raise FormatError(f"malformed PGM {name} field {tok!r}", offset=off) from None
    width, height, maxval = dims
    if width <= 0 or height <= 0:
        raise FormatError(f"invalid PGM dimensions {width}x{height}", offset=off)
    if maxval != 255:
        raise FormatError(f"unsupported PGM bit depth (maxval {maxval})", offset=off)
    pos += 1  # exactly one whitespace byte separates header and pixels
    payload = data[pos:pos + width * height]
    if len(payload) < width * height:
        raise FormatError(
            f"truncated PGM payload: expected {width * height} bytes, got {len(payload)}",
            offset=pos,
        )
    arr = np.frombuffer(payload, np.uint8).reshape(height, width)
    return arr.astype(float) / 255.0


_LUMA = np.array([0.299, 0.587, 0.114])


def _read_png(path):
    from PIL import Image

    with Image.open(path) as img:
        mode = img.mode
        if mode in ("I", "I;16", "I;16B", "I;16L"):
            raise FormatError(f"unsupported PNG bit depth (mode {mode})")
        if mode == "L":
            return np.asarray(img, np.uint8).astype(float) / 255.0
        if mode in ("P", "RGBA"):
            img = img.convert("RGB")
            mode = "RGB"
        if mode == "RGB":
            rgb = np.asarray(img, np.uint8).astype(float) / 255.0
            return rgb @ _LUMA
        raise FormatError(f"unsupported PNG mode {mode!r}")


# ---------------------------------------------------------------------------
# optical flow


def read_flo(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise FormatError("truncated .flo header", offset=len(data))
    magic = struct.unpack("<f", data[:4])[0]
    if magic != FLO_MAGIC:
        raise FormatError(f"bad .flo magic {magic!r}, expected {FLO_MAGIC}", offset=0)
    width, height = struct.unpack("<ii", data[4:12])
    if width <= 0 or height <= 0:
        raise FormatError(f"invalid .flo dimensions {width}x{height}", offset=4)
    need = 12 + 8 * width * height
    if len(data) < need:
        raise FormatError(
            f"truncated .flo payload: expected {need} bytes, got {len(data)}",
            offset=len(data),
        )
    arr = np.frombuffer(data, "<f4", count=2 * width * height, offset=12)
    arr = arr.reshape(height, width, 2)
    return FlowField(arr[..., 0].astype(float), arr[..., 1].astype(float))


def write_flo(field, path):
    """Write a flow field as Middlebury .flo (float32 payload)."""
    _ensure_finite(field.u, "flow u")
    _ensure_finite(field.v, "flow v")
    h, w = field.u.shape
    inter = np.empty((h, w, 2), "<f4")
    inter[..., 0] = field.u
    inter[..., 1] = field.v
    with open(path, "wb") as fh:
        fh.write(struct.pack("<fii", FLO_MAGIC, w, h))
        fh.write(inter.tobytes())


# ---------------------------------------------------------------------------
# event streams


def write_events(path, stream, format=None):
    """Write an event stream as binary EVS1 (.evs) or CSV ``x,y,t,p`` text."""
    fmt = format or _event_format(path)
    _ensure_finite(stream.t, "event timestamps")
    if fmt == "binary":
        rec = np.empty(len(stream), _EVENT_DTYPE)
        rec["x"] = stream.x
        rec["y"] = stream.y
        rec["t"] = stream.t
        rec["p"] = stream.p
        with open(path, "wb") as fh:
            fh.write(_EVS_HEADER.pack(EVS_MAGIC, stream.width, stream.height,
                                      stream.t_start, stream.t_end, len(stream)))
            fh.write(rec.tobytes())
    elif fmt == "csv":
        lines = ["x,y,t,p"]
        for x, y, t, p in zip(stream.x, stream.y, stream.t, stream.p):
            lines.append(f"{int(x)},{int(y)},{float(t)!r},{int(p)}")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        raise ValidationError(f"unknown event format {fmt!r} (use 'binary' or 'csv')")


def read_events(path, format=None, width=None, height=None, t_start=0.0, t_end=1.0):
    """Read an event stream; CSV carries no header, so dimensions/window may
    be supplied (width/height default to the maxima found in the data)."""
    fmt = format or _event_format(path)
    if fmt == "binary":
        stream = _read_evs(path)
    elif fmt == "csv":
        stream = _read_events_csv(path, width, height, t_start, t_end)
    else:
        raise ValidationError(f"unknown event format {fmt!r} (use 'binary' or 'csv')")
    return stream.validate()


def _event_format(path):
    path = str(path).lower()
    if path.endswith(".csv"):
        return "csv"
    return "binary"


def _read_evs(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _EVS_HEADER.size:
        raise FormatError("truncated EVS1 header", offset=len(data))
    magic, width, height, t_start, t_end, count = _EVS_HEADER.unpack_from(data)
    if magic != EVS_MAGIC:
        raise FormatError(f"bad event-stream magic {magic!r}, expected {EVS_MAGIC!r}", offset=0)
    need = _EVS_HEADER.size + count * _EVENT_DTYPE.itemsize
    if len(data) < need:
        raise FormatError(
            f"truncated EVS1 payload: expected {need} bytes, got {len(data)}",
            offset=len(data),
        )
    rec = np.frombuffer(data, _EVENT_DTYPE, count=count, offset=_EVS_HEADER.size)
    return EventStream(int(width), int(height), float(t_start), float(t_end),
                       rec["x"].astype(np.int32), rec["y"].astype(np.int32),
                       rec["t"].astype(np.float64), rec["p"].astype(np.int8))


def _read_events_csv(path, width, height, t_start, t_end):
    xs, ys, ts, ps = [], [], [], []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or (lineno == 1 and line.lower().replace(" ", "") == "x,y,t,p"):
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise FormatError(f"line {lineno}: expected 4 fields, got {len(parts)}")
            try:
                xs.append(int(parts[0]))
                ys.append(int(parts[1]))
                ts.append(float(parts[2]))
                ps.append(int(parts[3]))
            except ValueError:
                raise FormatError(f"line {lineno}: malformed event record {line!r}") from None
    x = np.asarray(xs, np.int32)
    y = np.asarray(ys, np.int32)
    if width is None:
        width = int(x.max()) + 1 if x.size else 1
    if height is None:
        height = int(y.max()) + 1 if y.size else 1
    return EventStream(width, height, float(t_start), float(t_end),
                       x, y, np.asarray(ts, np.float64), np.asarray(ps, np.int8))


# ---------------------------------------------------------------------------
# flow masks


def write_mask(mask, path):
    planes = (mask.omega_0t_u, mask.omega_0t_v, mask.omega_1t_u, mask.omega_1t_v)
    for plane in planes:
        _ensure_finite(plane, "mask plane")
    h, w = mask.shape
    with open(path, "wb") as fh:
        fh.write(_MSK_HEADER.pack(MSK_MAGIC, w, h, mask.tau))
        for plane in planes:
            fh.write(plane.astype("<f4").tobytes())


def read_mask(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _MSK_HEADER.size:
        raise FormatError("truncated MSK1 header", offset=len(data))
    magic, width, height, tau = _MSK_HEADER.unpack_from(data)
    if magic != MSK_MAGIC:
        raise FormatError(f"bad mask magic {magic!r}, expected {MSK_MAGIC!r}", offset=0)
    plane_bytes = 4 * width * height
    need = _MSK_HEADER.size + 4 * plane_bytes
    if len(data) < need:
        raise FormatError(
            f"truncated MSK1 payload: expected {need} bytes, got {len(data)}",
            offset=len(data),
        )
    planes = []
    for i in range(4):
        off = _MSK_HEADER.size + i * plane_bytes
        planes.append(np.frombuffer(data, "<f4", count=width * height, offset=off)
                      .reshape(height, width).astype(float))
    return FlowMask(planes[0], planes[1], planes[2], planes[3], float(tau))


# ---------------------------------------------------------------------------
# scenes


def write_scene(scene, path):
    """Serialize a scene as line-oriented text.

    Grammar (one statement per line, ``#`` starts a comment)::

        width <int>
        height <int>
        background <float>
        frame_times <float>...
        sprite <shape...>            # rect W H [VALUE] | disk R |
                                     # ramp W H [LO HI] | mask H W <values...>
        intensity <float>            # applies to the last sprite
        segment <t0> <t1> x <coeffs...> y <coeffs...>
    """
    lines = ["# evinterp scene v1",
             f"width {scene.width}",
             f"height {scene.height}",
             f"background {float(scene.background)!r}",
             "frame_times " + " ".join(repr(float(t)) for t in scene.frame_times)]
    for sprite in scene.sprites:
        if sprite.shape:
            lines.append(f"sprite {sprite.shape}")
        else:
            mask = np.asarray(sprite.mask, float)
            values = " ".join(repr(float(v)) for v in mask.ravel())
            lines.append(f"sprite mask {mask.shape[0]} {mask.shape[1]} {values}")
        lines.append(f"intensity {float(sprite.intensity)!r}")
        for seg in sprite.trajectory.segments:
            cx = " ".join(repr(float(c)) for c in seg.coeffs_x)
            cy = " ".join(repr(float(c)) for c in seg.coeffs_y)
            lines.append(f"segment {float(seg.t_start)!r} {float(seg.t_end)!r} x {cx} y {cy}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _build_shape(args, lineno):
    kind = args[0]
    try:
        if kind == "rect":
            value = float(args[3]) if len(args) > 3 else 1.0
            return rect_mask(int(args[1]), int(args[2]), value)
        if kind == "disk":
            return disk_mask(int(args[1]))
        if kind == "ramp":
            lo = float(args[3]) if len(args) > 3 else 0.4
            hi = float(args[4]) if len(args) > 4 else 1.0
            return ramp_mask(int(args[1]), int(args[2]), lo, hi)
        if kind == "mask":
            h, w = int(args[1]), int(args[2])
            values = [float(v) for v in args[3:]]
            if len(values) != h * w:
                raise FormatError(f"line {lineno}: mask expects {h * w} values, got {len(values)}")
            return np.asarray(values).reshape(h, w)
    except (ValueError, IndexError):
        raise FormatError(f"line {lineno}: malformed sprite shape {' '.join(args)!r}") from None
    raise FormatError(f"line {lineno}: unknown sprite shape {kind!r}")


def _parse_segment(args, lineno):
    try:
        t0, t1 = float(args[0]), float(args[1])
        ix = args.index("x")
        iy = args.index("y")
        coeffs_x = tuple(float(c) for c in args[ix + 1:iy])
        coeffs_y = tuple(float(c) for c in args[iy + 1:])
    except (ValueError, IndexError):
        raise FormatError(f"line {lineno}: malformed segment {' '.join(args)!r}") from None
    if not coeffs_x or not coeffs_y:
        raise FormatError(f"line {lineno}: segment needs x and y coefficients")
    return Segment(t0, t1, coeffs_x, coeffs_y)


def read_scene(path):
    width = height = None
    background = 0.0
    frame_times = (0.0, 1.0)
    sprites = []
    pending = None  # (mask, shape_text, intensity, [segments])

    def flush():
        nonlocal pending
        if pending is None:
            return
        mask, shape_text, intensity, segments = pending
        if not segments:
            raise FormatError("sprite declared without any segment")
        sprites.append(Sprite(mask, intensity, Trajectory(tuple(segments)), shape=shape_text))
        pending = None

    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, *args = line.split()
            try:
                if key == "width":
                    width = int(args[0])
                elif key == "height":
                    height = int(args[0])
                elif key == "background":
                    background = float(args[0])
                elif key == "frame_times":
                    frame_times = tuple(float(a) for a in args)
                elif key == "sprite":
                    flush()
                    mask = _build_shape(args, lineno)
                    shape_text = " ".join(args) if args[0] != "mask" else None
                    pending = [mask, shape_text, 1.0, []]
                elif key == "intensity":
                    if pending is None:
                        raise FormatError(f"line {lineno}: intensity before any sprite")
                    pending[2] = float(args[0])
                elif key == "segment":
                    if pending is None:
                        raise FormatError(f"line {lineno}: segment before any sprite")
                    pending[3].append(_parse_segment(args, lineno))
                else:
                    raise FormatError(f"line {lineno}: unknown scene key {key!r}")
            except (ValueError, IndexError):
                raise FormatError(f"line {lineno}: malformed statement {line!r}") from None
    flush()
    if width is None or height is None:
        raise FormatError("scene file is missing width/height")
    scene = SceneSpec(width, height, background, sprites, frame_times)
    return validate_scene(scene)
