"""Curvature cliques on the 8-connected lattice and their edge decomposition.

A clique is a pixel together with two of its neighbors. Cutting both arms
of the clique costs alpha^p / min(arm lengths), where alpha is the angle
between the arm vectors; contrast weighting multiplies in
exp(-beta * (g(i)-g(j))^2) per arm. Each clique decomposes exactly into
three signed pairwise edges, giving an effective edge set that includes
negative-weight pairs between the two arms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .lattice import NEIGHBOR_OFFSETS, GrayImage

CONNECTIVITY = 8


@dataclass(frozen=True)
class CurvatureParams:
    p: float = 2.0
    beta: float = 20.0

    def __post_init__(self):
        if self.p < 1.0:
            raise ValueError("curvature exponent p must be >= 1")
        if self.beta < 0.0:
            raise ValueError("contrast strength beta must be >= 0")


class Clique(NamedTuple):
    i: int
    j: int
    k: int
    alpha: float
    base_weight: float
    contrast_weight: float


@dataclass(frozen=True)
class CliqueSet:
    """Struct-of-arrays clique collection for one lattice."""

    width: int
    height: int
    i: np.ndarray  # center node, (C,)
    j: np.ndarray  # first arm, j < k
    k: np.ndarray  # second arm
    alpha: np.ndarray
    base_weight: np.ndarray
    contrast_weight: np.ndarray | None = None

    def __len__(self):
        return self.i.shape[0]

    def clique(self, idx: int) -> Clique:
        cw = math.nan if self.contrast_weight is None else float(self.contrast_weight[idx])
        return Clique(
            int(self.i[idx]),
            int(self.j[idx]),
            int(self.k[idx]),
            float(self.alpha[idx]),
            float(self.base_weight[idx]),
            cw,
        )


@dataclass(frozen=True)
class EdgeSet:
    """Effective edges: unordered pairs u < v with signed weights."""

    u: np.ndarray
    v: np.ndarray
    weight: np.ndarray

    def __len__(self):
        return self.u.shape[0]


def _arm_geometry():
    """Per offset-pair (a, b): angle between arms and min arm length."""
    out = []
    for (dr1, dc1), (dr2, dc2) in combinations(NEIGHBOR_OFFSETS, 2):
        l1 = math.hypot(dr1, dc1)
        l2 = math.hypot(dr2, dc2)
        cosang = (dr1 * dr2 + dc1 * dc2) / (l1 * l2)
        alpha = math.acos(max(-1.0, min(1.0, cosang)))
        out.append(((dr1, dc1), (dr2, dc2), alpha, min(l1, l2)))
    return out


_ARM_PAIRS = _arm_geometry()


def enumerate_cliques(width: int, height: int, params: CurvatureParams) -> CliqueSet:
    """All (center, arm pair) cliques with base weights alpha^p / min length.

    Every unordered pair of distinct in-bounds neighbors of every node
    forms exactly one clique; arms satisfy j < k by node index.
    """
    if width < 2 or height < 2:
        raise ValueError("lattice must be at least 2x2")
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    node = rows * width + cols
    ii, jj, kk, aa, ww = [], [], [], [], []
    for (dr1, dc1), (dr2, dc2), alpha, min_len in _ARM_PAIRS:
        rmask = (rows + dr1 >= 0) & (rows + dr1 < height) & (rows + dr2 >= 0) & (rows + dr2 < height)
        cmask = (cols + dc1 >= 0) & (cols + dc1 < width) & (cols + dc2 >= 0) & (cols + dc2 < width)
        valid = rmask & cmask
        centers = node[valid]
        if centers.size == 0:
            continue
        ii.append(centers)
        jj.append(centers + dr1 * width + dc1)
        kk.append(centers + dr2 * width + dc2)
        aa.append(np.full(centers.shape, alpha))
        ww.append(np.full(centers.shape, alpha**params.p / min_len))
    i = np.concatenate(ii)
    order = np.argsort(i, kind="stable")  # group by center, NEIGHBOR_OFFSETS order within
    return CliqueSet(
        width=width,
        height=height,
        i=i[order].astype(np.int64),
        j=np.concatenate(jj)[order].astype(np.int64),
        k=np.concatenate(kk)[order].astype(np.int64),
        alpha=np.concatenate(aa)[order],
        base_weight=np.concatenate(ww)[order],
    )


def apply_contrast(cliques: CliqueSet, image: GrayImage, beta: float) -> CliqueSet:
    """Weight every clique by exp(-beta dg_ij^2) * exp(-beta dg_ik^2)."""
    if (image.width, image.height) != (cliques.width, cliques.height):
        raise ValueError("image dimensions do not match clique lattice")
    g = image.values
    dij = g[cliques.i] - g[cliques.j]
    dik = g[cliques.i] - g[cliques.k]
    wc = cliques.base_weight * np.exp(-beta * dij**2) * np.exp(-beta * dik**2)
    return replace(cliques, contrast_weight=wc)


def decompose_cliques(cliques: CliqueSet) -> EdgeSet:
    """Split each clique into edges (i,j,+wc/2), (i,k,+wc/2), (j,k,-wc/2).

    The three-edge sum w_ij|xi-xj| + w_ik|xi-xk| - w_jk|xj-xk| equals
    wc exactly when both arms are cut and 0 otherwise. Output pairs are
    normalized to u < v and not yet accumulated.
    """
    if cliques.contrast_weight is None:
        raise ValueError("contrast_weight unset; run apply_contrast first")
    half = cliques.contrast_weight / 2.0
    u = np.concatenate([cliques.i, cliques.i, cliques.j])
    v = np.concatenate([cliques.j, cliques.k, cliques.k])
    w = np.concatenate([half, half, -half])
    return EdgeSet(u=np.minimum(u, v), v=np.maximum(u, v), weight=w)


def accumulate_edges(edges: EdgeSet, num_nodes: int | None = None) -> EdgeSet:
    """Sum weights per unordered pair; drop exact zeros; sort by (u, v).

    The fixed (u, v) output order makes accumulation deterministic up to
    floating-point associativity of np.add.at.
    """
    if len(edges) == 0:
        empty = np.empty(0, dtype=np.int64)
        return EdgeSet(u=empty, v=empty.copy(), weight=np.empty(0))
    n = num_nodes if num_nodes is not None else int(edges.v.max()) + 1
    key = edges.u * n + edges.v
    uniq, inverse = np.unique(key, return_inverse=True)
    total = np.zeros(uniq.shape[0])
    np.add.at(total, inverse, edges.weight)
    keep = total != 0.0
    uniq = uniq[keep]
    return EdgeSet(u=uniq // n, v=uniq % n, weight=total[keep])


def effective_edges(image: GrayImage, params: CurvatureParams) -> EdgeSet:
    """Full curvature pass: enumerate, contrast-weight, decompose, accumulate."""
    cliques = enumerate_cliques(image.width, image.height, params)
    cliques = apply_contrast(cliques, image, params.beta)
    return accumulate_edges(decompose_cliques(cliques), image.num_pixels)


def dump_effective_edges(edges: EdgeSet, path) -> None:
    """Debug dump, one `u v weight` line per edge with 12 significant digits."""
    lines = [
        f"{int(u)} {int(v)} {w:.12g}"
        for u, v, w in zip(edges.u, edges.v, edges.weight)
    ]
    Path(path).write_text("\n".join(lines) + "\n")
