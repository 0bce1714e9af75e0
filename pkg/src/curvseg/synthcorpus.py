"""Procedural control images with ground truth, plus the exhaustive oracle.

The control cases reproduce the qualitative desk-scale behaviors the
method is built for: extending a bar past a distant seed, bridging gaps
in dotted outlines with zero foreground/background contrast, separating
same-intensity structures, and keeping contrast-supported corners sharp.
Images are generated (never shipped) so ground truth is pixel-exact, and
all intensities are multiples of 1/255 so PGM export round-trips exactly.

Rasterization rule: a pixel belongs to a disk iff its center lies within
the radius.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energy import QPBEnergy
from .lattice import (
    GrayImage,
    SeedLabel,
    SeedMask,
    load_image,
    load_seeds,
    save_image,
    save_seeds,
)
from ._imagecodec import write_pgm

_WHITE = 255 / 255.0
_BLACK = 0.0
_MID = 128 / 255.0

BRUTE_FORCE_MAX_VARS = 24


@dataclass(frozen=True)
class ControlCase:
    name: str
    image: GrayImage
    ground_truth: np.ndarray  # (h, w) uint8, 1 = object
    seeds: SeedMask
    description: str
    meta: dict = field(default_factory=dict)


def _make_seeds(shape, fg_pixels, bg_pixels) -> SeedMask:
    labels = np.zeros(shape, dtype=np.int8)
    for r, c in fg_pixels:
        labels[r, c] = SeedLabel.FG
    for r, c in bg_pixels:
        labels[r, c] = SeedLabel.BG
    return SeedMask(width=shape[1], height=shape[0], labels=labels)


def _disk_pixels(cy, cx, radius, shape):
    """Scribble-sized seed blob: pixel centers within radius."""
    out = []
    r = int(math.ceil(radius))
    for dr in range(-r, r + 1):
        for dc in range(-r, r + 1):
            if dr * dr + dc * dc <= radius * radius:
                rr, cc = cy + dr, cx + dc
                if 0 <= rr < shape[0] and 0 <= cc < shape[1]:
                    out.append((rr, cc))
    return out


def _border_bg(width, height):
    """Background scribble along the full image border; cheap to honor,
    expensive to carve out, like a real user stroke around the object."""
    out = [(0, c) for c in range(width)] + [(height - 1, c) for c in range(width)]
    out += [(r, 0) for r in range(1, height - 1)] + [(r, width - 1) for r in range(1, height - 1)]
    return out


def gen_bar(width=40, height=20, bar_len=30, bar_thickness=4) -> ControlCase:
    """White horizontal bar on black; FG seed near the bar start only."""
    x0 = 2
    if x0 + bar_len > width:
        raise ValueError("bar does not fit in canvas")
    if bar_thickness > height - 2:
        raise ValueError("bar too thick for canvas")
    r0 = (height - bar_thickness) // 2
    img = np.full((height, width), _BLACK)
    truth = np.zeros((height, width), dtype=np.uint8)
    img[r0 : r0 + bar_thickness, x0 : x0 + bar_len] = _WHITE
    truth[r0 : r0 + bar_thickness, x0 : x0 + bar_len] = 1
    # FG patch inside the first 20% of the bar length
    mid = r0 + bar_thickness // 2
    fg = [(mid - 1, x0 + 1), (mid - 1, x0 + 2), (mid, x0 + 1), (mid, x0 + 2)]
    bg = _border_bg(width, height)
    return ControlCase(
        name="bar",
        image=GrayImage.from_array(img),
        ground_truth=truth,
        seeds=_make_seeds((height, width), fg, bg),
        description="bar extension: seed far from the end, zero interior contrast",
    )


def gen_dotted_outline(
    shape="circle", gap_len=3, dot_len=4, radius=12, size=40
) -> ControlCase:
    """Dotted outline with identical interior and exterior intensity.

    The outline is stamped on the inner rim of the shape so the dots are
    part of the object; gaps leave stretches of zero-contrast boundary
    that only curvature can bridge.
    """
    if gap_len < 0 or dot_len < 1:
        raise ValueError("need gap_len >= 0 and dot_len >= 1")
    img = np.full((size, size), _MID)
    cy = cx = size // 2
    rows, cols = np.mgrid[0:size, 0:size]
    period = dot_len + gap_len
    if shape == "circle":
        if radius + 3 > size // 2:
            raise ValueError("circle does not fit in canvas")
        d = np.hypot(rows - cy, cols - cx)
        truth = (d <= radius).astype(np.uint8)
        band = (d > radius) & (d <= radius + 1.4)  # dots hug the outside rim
        arc = (np.arctan2(rows - cy, cols - cx) % (2 * math.pi)) * radius
        dots = band & ((arc % period) < dot_len)
        name = "dotted_circle"
    elif shape == "polygon":
        half = radius
        if half + 3 > size // 2:
            raise ValueError("polygon does not fit in canvas")
        dy = np.abs(rows - cy)
        dx = np.abs(cols - cx)
        inside = (dx <= half) & (dy <= half)
        truth = inside.astype(np.uint8)
        band = ~inside & (dx <= half + 1.4) & (dy <= half + 1.4)
        # perimeter position, walking the square edge by edge
        arc = np.where(
            dx >= dy,
            np.where(cols >= cx, (rows - cy) + 0.0, 2 * half * 2 + (cy - rows)),
            np.where(rows >= cy, 2 * half + (cx - cols), 2 * half * 3 + (cols - cx)),
        ) % (8 * half)
        dots = band & ((arc % period) < dot_len)
        name = "dotted_square"
    else:
        raise ValueError(f"unknown outline shape {shape!r}")
    img[dots] = _WHITE
    fg = _disk_pixels(cy, cx, radius / 2.0, (size, size))
    bg = _border_bg(size, size)
    return ControlCase(
        name=name,
        image=GrayImage.from_array(img),
        ground_truth=truth,
        seeds=_make_seeds((size, size), fg, bg),
        description="gap bridging: dotted outline, zero fg/bg contrast",
    )


def gen_circle_bump(R=15, r=5, size=48) -> ControlCase:
    """Disk of radius R with a same-intensity bump of radius r attached.

    Ground truth is the large disk only; a background seed sits inside the
    bump so the separating cut must be placed by curvature (the neck is the
    cheapest zero-contrast cut).
    """
    if r >= R:
        raise ValueError("bump radius must be smaller than disk radius")
    cy = size // 2
    cx1 = size // 2 - r + 1
    cx2 = cx1 + R + r - 1  # shallow overlap forms a narrow neck
    if cx1 - R < 0 or cx2 + r >= size:
        raise ValueError("disk and bump do not fit in canvas")
    rows, cols = np.mgrid[0:size, 0:size]
    big = np.hypot(rows - cy, cols - cx1) <= R
    bump = np.hypot(rows - cy, cols - cx2) <= r
    img = np.where(big | bump, _WHITE, _BLACK)
    truth = big.astype(np.uint8)
    fg = _disk_pixels(cy, cx1, R / 3.0, (size, size))
    # background stroke deep in the bump, clear of the large disk
    bump_bg = [
        (rr, cc)
        for rr, cc in _disk_pixels(cy, cx2 + 1, 2.2, (size, size))
        if bump[rr, cc] and not big[rr, cc]
    ]
    bg = _border_bg(size, size) + bump_bg
    case = ControlCase(
        name="circle_bump",
        image=GrayImage.from_array(img),
        ground_truth=truth,
        seeds=_make_seeds((size, size), fg, bg),
        description="same-intensity separation: disk vs attached bump",
        meta={"bump_mask": (bump & ~big).astype(np.uint8)},
    )
    return case


def gen_corner_shape(angle_deg, size=48) -> ControlCase:
    """High-contrast wedge with a sharp apex of the given opening angle."""
    if not 15 <= angle_deg <= 165:
        raise ValueError("corner angle must be within [15, 165] degrees")
    ay, ax = size // 2, 10
    span = min(size - 12 - ax, ay - 2)  # keep the wedge off the border strokes
    half = math.radians(angle_deg) / 2.0
    rows, cols = np.mgrid[0:size, 0:size]
    vx = cols - ax
    vy = rows - ay
    ang = np.abs(np.arctan2(vy, np.maximum(vx, 1e-9)))
    inside = (vx >= 0) & (vx <= span) & (ang <= half + 1e-12)
    inside[ay, ax] = True
    img = np.where(inside, _WHITE, _BLACK)
    truth = inside.astype(np.uint8)
    # apex plus the outermost white pixels of a column near the apex
    probe_col = ax + 3
    col_rows = np.flatnonzero(truth[:, probe_col])
    corner_pixels = [(ay, ax), (int(col_rows[0]), probe_col), (int(col_rows[-1]), probe_col)]
    fg = [(ay + dr, ax + span // 2 + dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)]
    bg = _border_bg(size, size) + [(ay, ax - 3), (ay - 1, ax - 3), (ay + 1, ax - 3)]
    return ControlCase(
        name=f"corner_{int(angle_deg)}",
        image=GrayImage.from_array(img),
        ground_truth=truth,
        seeds=_make_seeds((size, size), fg, bg),
        description=f"corner preservation: {angle_deg} degree apex, full contrast",
        meta={"corner_pixels": corner_pixels},
    )


def default_cases() -> dict:
    """The bundled control corpus, keyed by case name."""
    cases = [
        gen_bar(),
        gen_dotted_outline("circle", gap_len=3, dot_len=4, radius=12, size=40),
        gen_dotted_outline("polygon", gap_len=3, dot_len=4, radius=12, size=40),
        gen_circle_bump(),
        gen_corner_shape(90),
        gen_corner_shape(45),
    ]
    return {c.name: c for c in cases}


# ---------------------------------------------------------------------------
# Exhaustive oracle


def enumerate_energies(e: QPBEnergy) -> np.ndarray:
    """Energy of every labeling; index bits encode x_0 as the MSB so that
    numeric index order equals lexicographic labeling order."""
    if e.n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VARS} variables")
    n = e.n
    codes = np.arange(1 << n, dtype=np.int64)
    dtype = np.int64 if e.is_integer() else np.float64
    energies = np.full(1 << n, e.constant, dtype=dtype)
    for i in range(n):
        bit = (codes >> (n - 1 - i)) & 1
        energies += np.where(bit == 1, e.unary[i, 1], e.unary[i, 0])
    for idx in range(e.num_edges):
        u, v = e.edges[idx]
        sel = 2 * ((codes >> (n - 1 - u)) & 1) + ((codes >> (n - 1 - v)) & 1)
        energies += e.tables[idx][sel]
    return energies


def _decode(code: int, n: int) -> np.ndarray:
    return np.array([(code >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int8)


def brute_force_optimum(e: QPBEnergy):
    """Exhaustive minimum; ties broken by lexicographically smallest labeling."""
    energies = enumerate_energies(e)
    best = int(np.argmin(energies))  # first minimum == lexicographic winner
    value = energies[best]
    return _decode(best, e.n), (int(value) if e.is_integer() else float(value))


# ---------------------------------------------------------------------------
# Metrics and export


def dice(a: np.ndarray, b: np.ndarray) -> float:
    """Dice overlap 2|A∩B| / (|A| + |B|); 1.0 when both masks are empty."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    denom = a.sum() + b.sum()
    if denom == 0:
        return 1.0
    return 2.0 * np.logical_and(a, b).sum() / denom


def count_components(mask: np.ndarray) -> int:
    """Number of 8-connected components of the nonzero pixels."""
    mask = np.asarray(mask) != 0
    seen = np.zeros_like(mask, dtype=bool)
    h, w = mask.shape
    comps = 0
    for r in range(h):
        for c in range(w):
            if mask[r, c] and not seen[r, c]:
                comps += 1
                q = deque([(r, c)])
                seen[r, c] = True
                while q:
                    rr, cc = q.popleft()
                    for dr in (-1, 0, 1):
                        for dc in (-1, 0, 1):
                            r2, c2 = rr + dr, cc + dc
                            if 0 <= r2 < h and 0 <= c2 < w and mask[r2, c2] and not seen[r2, c2]:
                                seen[r2, c2] = True
                                q.append((r2, c2))
    return comps


def export_corpus(directory) -> list:
    """Write each bundled case as image.pgm, seeds.pgm, truth.pgm."""
    directory = Path(directory)
    written = []
    for name, case in sorted(default_cases().items()):
        case_dir = directory / name
        case_dir.mkdir(parents=True, exist_ok=True)
        save_image(case.image, case_dir / "image.pgm")
        save_seeds(case.seeds, case_dir / "seeds.pgm")
        (case_dir / "truth.pgm").write_bytes(
            write_pgm((case.ground_truth * 255).astype(np.uint8))
        )
        written.append(name)
    return written


def load_exported_case(case_dir):
    """Read back an exported case as (image, seeds, truth)."""
    case_dir = Path(case_dir)
    image = load_image(case_dir / "image.pgm")
    seeds = load_seeds(case_dir / "seeds.pgm")
    truth = (load_image(case_dir / "truth.pgm").data >= 0.5).astype(np.uint8)
    return image, seeds, truth
