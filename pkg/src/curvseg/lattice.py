"""Pixel-lattice geometry plus image and seed ingestion.

Pixels live on an 8-connected grid; a pixel (row, col) maps to the node
index ``row * width + col``. Intensities are normalized to [0, 1] at load
time so the contrast parameter has an image-independent scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from ._imagecodec import (
    PNG_SIGNATURE,
    ImageFormatError,
    read_pgm,
    read_png,
    write_pgm,
    write_png,
)

# 8-neighborhood offsets, ordered so that for any center the neighbor node
# indices come out ascending (row-major order of the offsets).
NEIGHBOR_OFFSETS = (
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
)

SQRT2 = math.sqrt(2.0)

# Rec. 601 luminance weights for color PNG conversion.
_LUMA = np.array([0.299, 0.587, 0.114])

# PGM seed sentinels.
_SEED_FG_BYTE = 255
_SEED_BG_BYTE = 0
_SEED_NONE_BYTE = 128


class SeedLabel(IntEnum):
    NONE = 0
    FG = 1
    BG = 2


@dataclass(frozen=True)
class GrayImage:
    """Normalized grayscale image; ``data`` is (height, width) float64 in [0,1]."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if self.data.shape != (self.height, self.width):
            raise ValueError("image data shape does not match dimensions")
        if self.data.size and (self.data.min() < 0.0 or self.data.max() > 1.0):
            raise ValueError("intensities must lie in [0, 1]")
        self.data.flags.writeable = False

    @classmethod
    def from_array(cls, data) -> "GrayImage":
        arr = np.asarray(data, dtype=np.float64)
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr)

    @property
    def values(self) -> np.ndarray:
        """Row-major flat view of the intensities."""
        return self.data.reshape(-1)

    @property
    def num_pixels(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class SeedMask:
    """Per-pixel seed state; ``labels`` is (height, width) int8 of SeedLabel."""

    width: int
    height: int
    labels: np.ndarray

    def __post_init__(self):
        if self.labels.shape != (self.height, self.width):
            raise ValueError("seed mask shape does not match dimensions")
        self.labels.flags.writeable = False

    @classmethod
    def from_points(cls, width, height, fg_points, bg_points, radius=0.0) -> "SeedMask":
        """Rasterize point scribbles into a mask.

        Each point covers the disk of the given brush radius; a pixel is
        covered when its center lies within the radius (radius 0 marks the
        single pixel). Raises on pixels claimed by both classes.
        """
        fg = _rasterize_points(width, height, fg_points, radius)
        bg = _rasterize_points(width, height, bg_points, radius)
        if np.any(fg & bg):
            raise ValueError("conflicting seed")
        labels = np.zeros((height, width), dtype=np.int8)
        labels[fg] = SeedLabel.FG
        labels[bg] = SeedLabel.BG
        return cls(width=width, height=height, labels=labels)

    def fg_indices(self) -> np.ndarray:
        return np.flatnonzero(self.labels.reshape(-1) == SeedLabel.FG)

    def bg_indices(self) -> np.ndarray:
        return np.flatnonzero(self.labels.reshape(-1) == SeedLabel.BG)


def _rasterize_points(width, height, points, radius) -> np.ndarray:
    covered = np.zeros((height, width), dtype=bool)
    r = max(float(radius), 0.0)
    span = int(math.floor(r))
    for x, y in points:
        x, y = float(x), float(y)
        for row in range(max(0, int(math.ceil(y - r))), min(height, int(y) + span + 2)):
            for col in range(max(0, int(math.ceil(x - r))), min(width, int(x) + span + 2)):
                if (col - x) ** 2 + (row - y) ** 2 <= r * r:
                    covered[row, col] = True
    return covered


def seeds_from_scribbles(width, height, strokes) -> SeedMask:
    """Build a SeedMask from strokes of the form (cls, radius, points).

    ``cls`` is "fg" or "bg"; points are (x, y) pairs. This is the single
    rasterization rule shared by the CLI, the service and the UI preview.
    """
    fg_points, bg_points = [], []
    fg_mask = np.zeros((height, width), dtype=bool)
    bg_mask = np.zeros((height, width), dtype=bool)
    for cls, radius, points in strokes:
        if cls not in ("fg", "bg"):
            raise ValueError(f"unknown scribble class {cls!r}")
        target = fg_mask if cls == "fg" else bg_mask
        target |= _rasterize_points(width, height, points, radius)
        (fg_points if cls == "fg" else bg_points).append(points)
    if np.any(fg_mask & bg_mask):
        raise ValueError("conflicting seed")
    labels = np.zeros((height, width), dtype=np.int8)
    labels[fg_mask] = SeedLabel.FG
    labels[bg_mask] = SeedLabel.BG
    return SeedMask(width=width, height=height, labels=labels)


# ---------------------------------------------------------------------------
# Grid geometry


def neighbors(node: int, width: int, height: int):
    """In-bounds 8-neighbors of a node as (neighbor, edge length) pairs.

    Lengths are 1 for axial and sqrt(2) for diagonal steps; the list is
    ordered by neighbor index ascending.
    """
    if not 0 <= node < width * height:
        raise IndexError(f"node {node} outside {width}x{height} grid")
    row, col = divmod(node, width)
    out = []
    for dr, dc in NEIGHBOR_OFFSETS:
        r, c = row + dr, col + dc
        if 0 <= r < height and 0 <= c < width:
            out.append((r * width + c, SQRT2 if dr and dc else 1.0))
    return out


def num_lattice_edges(width: int, height: int) -> int:
    """Edge count of the 8-connected w x h grid: 4wh - 3w - 3h + 2."""
    return 4 * width * height - 3 * width - 3 * height + 2


# ---------------------------------------------------------------------------
# File I/O


def load_image(path) -> GrayImage:
    """Load an 8-bit grayscale PGM or PNG (color converted by luminance)."""
    data = Path(path).read_bytes()
    if data.startswith(PNG_SIGNATURE):
        pixels = read_png(data)
        if pixels.ndim == 3:
            pixels = np.round(pixels[:, :, :3].astype(np.float64) @ _LUMA)
    elif data.startswith(b"P5"):
        pixels = read_pgm(data)
    else:
        raise ImageFormatError(f"unsupported image format in {path}")
    return GrayImage.from_array(np.asarray(pixels, dtype=np.float64) / 255.0)


def save_image(image: GrayImage, path) -> None:
    """Write an image as 8-bit PGM or PNG depending on the file suffix."""
    pixels = np.round(image.data * 255.0).astype(np.uint8)
    path = Path(path)
    if path.suffix.lower() == ".png":
        path.write_bytes(write_png(pixels))
    else:
        path.write_bytes(write_pgm(pixels))


def load_seeds(path) -> SeedMask:
    """Load seeds from PGM (255=FG, 0=BG, 128=none) or PNG (red=FG, blue=BG)."""
    data = Path(path).read_bytes()
    if data.startswith(PNG_SIGNATURE):
        pixels = read_png(data)
        labels = np.zeros(pixels.shape[:2], dtype=np.int8)
        if pixels.ndim == 3:
            rgb = pixels[:, :, :3]
            labels[(rgb == (255, 0, 0)).all(axis=2)] = SeedLabel.FG
            labels[(rgb == (0, 0, 255)).all(axis=2)] = SeedLabel.BG
    elif data.startswith(b"P5"):
        pixels = read_pgm(data)
        known = np.isin(pixels, (_SEED_FG_BYTE, _SEED_BG_BYTE, _SEED_NONE_BYTE))
        if not known.all():
            bad = int(pixels[~known][0])
            raise ImageFormatError(f"ambiguous seed value {bad} in {path}")
        labels = np.zeros(pixels.shape, dtype=np.int8)
        labels[pixels == _SEED_FG_BYTE] = SeedLabel.FG
        labels[pixels == _SEED_BG_BYTE] = SeedLabel.BG
    else:
        raise ImageFormatError(f"unsupported seed format in {path}")
    return SeedMask(width=labels.shape[1], height=labels.shape[0], labels=labels)


def save_seeds(seeds: SeedMask, path) -> None:
    """Write seeds with the PGM sentinel encoding."""
    pixels = np.full((seeds.height, seeds.width), _SEED_NONE_BYTE, dtype=np.uint8)
    pixels[seeds.labels == SeedLabel.FG] = _SEED_FG_BYTE
    pixels[seeds.labels == SeedLabel.BG] = _SEED_BG_BYTE
    Path(path).write_bytes(write_pgm(pixels))


def save_mask_png(mask: np.ndarray, path) -> None:
    """Write a binary mask (nonzero = object) as a 0/255 grayscale PNG."""
    Path(path).write_bytes(write_png(np.where(mask != 0, 255, 0).astype(np.uint8)))


def load_mask_png(path) -> np.ndarray:
    pixels = read_png(Path(path).read_bytes())
    if pixels.ndim == 3:
        raise ImageFormatError("mask PNG must be grayscale")
    return (pixels >= 128).astype(np.uint8)
