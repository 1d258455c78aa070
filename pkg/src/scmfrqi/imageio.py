"""Binary PGM (P5) / PPM (P6) reading and writing, plus channel split/merge.

Samples are held as a read-only ``uint8`` array of shape ``(channels, height, width)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, UnsupportedDepthError

DEPTH = 8
_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class Image:
    samples: np.ndarray  # (channels, height, width), uint8
    depth: int = DEPTH

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[0] not in (1, 3):
            raise ValueError(f"expected (1|3, h, w) samples, got shape {arr.shape}")
        if self.depth != DEPTH:
            raise UnsupportedDepthError(f"only {DEPTH}-bit samples are supported")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("samples out of range [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def height(self) -> int:
        return self.samples.shape[1]

    @property
    def width(self) -> int:
        return self.samples.shape[2]

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.samples.shape == other.samples.shape and bool(
            np.array_equal(self.samples, other.samples)
        )

    def __repr__(self):
        return f"Image(w={self.width}, h={self.height}, ch={self.channels})"


def _skip_whitespace_and_comments(data: bytes, pos: int) -> int:
    while pos < len(data):
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _read_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    pos = _skip_whitespace_and_comments(data, pos)
    start = pos
    while pos < len(data) and data[pos:pos + 1].isdigit():
        pos += 1
    if pos == start:
        raise ParseError(f"expected {what}", start)
    return int(data[start:pos]), pos


def parse_netpbm(data: bytes) -> Image:
    if len(data) < 2:
        raise ParseError("file too short for a magic number", 0)
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise ParseError(f"unsupported magic {magic!r}, expected P5 or P6", 0)

    width, pos = _read_int(data, 2, "width")
    height, pos = _read_int(data, pos, "height")
    maxval, pos = _read_int(data, pos, "maxval")
    if width <= 0 or height <= 0:
        raise ParseError(f"non-positive dimensions {width}x{height}", pos)
    if maxval != 255:
        raise UnsupportedDepthError(f"maxval {maxval} not supported (only 255)")
    if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
        raise ParseError("expected single whitespace after maxval", pos)
    pos += 1

    expected = width * height * channels
    payload = data[pos:pos + expected]
    if len(payload) < expected:
        raise ParseError(
            f"truncated pixel payload: need {expected} bytes, got {len(payload)}",
            pos + len(payload),
        )
    arr = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return Image(np.moveaxis(arr, 2, 0))


def load_image(path) -> Image:
    return parse_netpbm(Path(path).read_bytes())


def encode_netpbm(img: Image) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
    return header + np.moveaxis(img.samples, 0, 2).tobytes()


def save_image(img: Image, path) -> None:
    Path(path).write_bytes(encode_netpbm(img))


def split_channel(img: Image, index: int) -> Image:
    if not 0 <= index < img.channels:
        raise ValueError(f"channel index {index} out of range for {img.channels}-channel image")
    if img.channels == 1:
        return img
    return Image(img.samples[index:index + 1])


def merge_channels(*channels: Image) -> Image:
    if len(channels) not in (1, 3):
        raise ValueError("merge needs 1 or 3 single-channel images")
    if any(c.channels != 1 for c in channels):
        raise ValueError("merge inputs must be single-channel")
    shapes = {c.samples.shape for c in channels}
    if len(shapes) != 1:
        raise ValueError(f"channel dimensions differ: {sorted(shapes)}")
    return Image(np.concatenate([c.samples for c in channels], axis=0))


def channel_labels(img: Image) -> list[str]:
    return ["gray"] if img.channels == 1 else ["R", "G", "B"]
