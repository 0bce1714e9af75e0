"""Minimal PGM (P5) and PNG codecs for 8-bit images.

Only what the segmenter needs: binary 8-bit grayscale PGM, and
non-interlaced 8-bit PNG in grayscale, RGB or RGBA layout. Anything else
is rejected with a descriptive error instead of being half-decoded.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# PNG color types we accept (bit depth 8, no interlace).
_COLOR_CHANNELS = {0: 1, 2: 3, 6: 4}


class ImageFormatError(ValueError):
    """Raised for unreadable or unsupported image data."""


# ---------------------------------------------------------------------------
# PGM


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) 8-bit PGM into a (height, width) uint8 array."""
    if not data.startswith(b"P5"):
        raise ImageFormatError("not a binary PGM (P5) file")
    fields = []
    pos = 2
    while len(fields) < 3:
        if pos >= len(data):
            raise ImageFormatError("unexpected end of image data")
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            pos = data.find(b"\n", pos)
            if pos < 0:
                raise ImageFormatError("unexpected end of image data")
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            fields.append(data[pos:end])
            pos = end
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise ImageFormatError(f"malformed PGM header: {exc}") from exc
    if width <= 0 or height <= 0:
        raise ImageFormatError("non-positive PGM dimensions")
    if maxval != 255:
        raise ImageFormatError(f"unsupported bit depth (maxval {maxval}, want 255)")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise ImageFormatError("unexpected end of image data")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(pixels: np.ndarray) -> bytes:
    """Encode a (height, width) uint8 array as binary PGM."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    height, width = pixels.shape
    return b"P5\n%d %d\n255\n" % (width, height) + pixels.tobytes()


# ---------------------------------------------------------------------------
# PNG


def read_png(data: bytes) -> np.ndarray:
    """Decode an 8-bit PNG into (h, w) uint8 or (h, w, channels) uint8.

    Grayscale gives a 2-D array; RGB/RGBA give 3-D. Palette images,
    16-bit depths and interlacing are rejected.
    """
    if not data.startswith(PNG_SIGNATURE):
        raise ImageFormatError("not a PNG file")
    pos = len(PNG_SIGNATURE)
    width = height = channels = None
    idat = bytearray()
    while pos < len(data):
        if pos + 8 > len(data):
            raise ImageFormatError("unexpected end of image data")
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        ctype = data[pos + 4 : pos + 8]
        body = data[pos + 8 : pos + 8 + length]
        if len(body) < length:
            raise ImageFormatError("unexpected end of image data")
        pos += 12 + length  # length + type + body + crc
        if ctype == b"IHDR":
            width, height, depth, color, _, _, interlace = struct.unpack(
                ">IIBBBBB", body
            )
            if depth != 8:
                raise ImageFormatError(f"unsupported bit depth ({depth}, want 8)")
            if color not in _COLOR_CHANNELS:
                raise ImageFormatError(f"unsupported PNG color type {color}")
            if interlace:
                raise ImageFormatError("interlaced PNG not supported")
            channels = _COLOR_CHANNELS[color]
        elif ctype == b"IDAT":
            idat.extend(body)
        elif ctype == b"IEND":
            break
    if width is None or not idat:
        raise ImageFormatError("unexpected end of image data")
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise ImageFormatError(f"corrupt PNG data: {exc}") from exc
    stride = width * channels
    if len(raw) < height * (stride + 1):
        raise ImageFormatError("unexpected end of image data")
    out = _unfilter(raw, height, stride, channels)
    if channels == 1:
        return out.reshape(height, width)
    return out.reshape(height, width, channels)


def _unfilter(raw: bytes, height: int, stride: int, channels: int) -> np.ndarray:
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.int32)
    for row in range(height):
        offset = row * (stride + 1)
        ftype = raw[offset]
        line = np.frombuffer(raw, np.uint8, stride, offset + 1).astype(np.int32)
        if ftype == 0:
            cur = line
        elif ftype == 1:  # Sub
            cur = line.copy()
            for i in range(channels, stride):
                cur[i] = (cur[i] + cur[i - channels]) & 0xFF
        elif ftype == 2:  # Up
            cur = (line + prev) & 0xFF
        elif ftype == 3:  # Average
            cur = line.copy()
            for i in range(stride):
                left = cur[i - channels] if i >= channels else 0
                cur[i] = (cur[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            cur = line.copy()
            for i in range(stride):
                a = cur[i - channels] if i >= channels else 0
                b = prev[i]
                c = prev[i - channels] if i >= channels else 0
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                if pa <= pb and pa <= pc:
                    pred = a
                elif pb <= pc:
                    pred = b
                else:
                    pred = c
                cur[i] = (cur[i] + pred) & 0xFF
        else:
            raise ImageFormatError(f"invalid PNG filter type {ftype}")
        out[row] = cur.astype(np.uint8)
        prev = cur
    return out


def write_png(pixels: np.ndarray) -> bytes:
    """Encode a (h, w) uint8 grayscale array as an 8-bit PNG."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    height, width = pixels.shape
    header = struct.pack(">IIBBBBB", width, height, 8, 0, 0, 0, 0)
    scanlines = bytearray()
    for row in range(height):
        scanlines.append(0)  # filter: None
        scanlines.extend(pixels[row].tobytes())
    return (
        PNG_SIGNATURE
        + _chunk(b"IHDR", header)
        + _chunk(b"IDAT", zlib.compress(bytes(scanlines)))
        + _chunk(b"IEND", b"")
    )


def _chunk(ctype: bytes, body: bytes) -> bytes:
    crc = zlib.crc32(body, zlib.crc32(ctype))
    return struct.pack(">I", len(body)) + ctype + body + struct.pack(">I", crc)
