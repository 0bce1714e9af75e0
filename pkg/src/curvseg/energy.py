"""Quadratic pseudo-Boolean energy assembly and exact evaluation.

The objective is curvature minus lambda times an attraction reward: each
effective edge contributes its weight w to the disagreement entries of a
2x2 pairwise table, and -lambda*a/2 (a = |w| or w depending on the
attraction mode) to the agreement entries. Seeds enter as large-but-finite
unary penalties that provably dominate any pairwise savings.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .curvature import EdgeSet
from .lattice import SeedMask

UNLABELED = -1

# Default attraction strength. At lambda = 2 the attraction exactly repairs
# the sign of every decomposed negative edge (the submodularity gap of a
# negative edge is |w|*(lambda - 2)), which is what lets the solver label
# every pixel in one pass; below 2 the relaxation stays fractional across
# uniform regions.
DEFAULT_LAMBDA = 2.0


class AttractionMode(Enum):
    MAGNITUDE = "magnitude"
    SIGNED = "signed"


@dataclass(frozen=True)
class QPBEnergy:
    """n variables, per-variable unary pair, per-edge 2x2 table, constant.

    ``unary`` is (n, 2) as (theta(0), theta(1)); ``tables`` is (m, 4) as
    (t00, t01, t10, t11) indexed by (x_u, x_v); ``edges`` is (m, 2) with
    u < v, each unordered pair stored at most once. Arrays are float64
    during assembly and int64 after quantization.
    """

    n: int
    unary: np.ndarray
    edges: np.ndarray
    tables: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        if self.unary.shape != (self.n, 2):
            raise ValueError("unary shape must be (n, 2)")
        if self.edges.shape[0] != self.tables.shape[0]:
            raise ValueError("edges and tables must align")

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    def is_integer(self) -> bool:
        return np.issubdtype(self.unary.dtype, np.integer)


def zero_energy(n: int) -> QPBEnergy:
    return QPBEnergy(
        n=n,
        unary=np.zeros((n, 2)),
        edges=np.empty((0, 2), dtype=np.int64),
        tables=np.empty((0, 4)),
    )


def build_energy(
    edges: EdgeSet,
    n: int,
    lam: float = DEFAULT_LAMBDA,
    mode: AttractionMode = AttractionMode.MAGNITUDE,
) -> QPBEnergy:
    """Assemble curvature-plus-attraction pairwise tables from effective edges.

    Edge weight w gives t01 = t10 = w; the negated attraction puts
    -lam*a/2 on t00 and t11 with a = |w| (magnitude mode) or a = w
    (signed mode). Unaries and constant start at zero.
    """
    if lam <= 0.0:
        raise ValueError("attraction strength lambda must be > 0")
    m = len(edges)
    a = np.abs(edges.weight) if mode is AttractionMode.MAGNITUDE else edges.weight
    tables = np.empty((m, 4))
    tables[:, 0] = tables[:, 3] = -lam * a / 2.0
    tables[:, 1] = tables[:, 2] = edges.weight
    pairs = np.stack([edges.u, edges.v], axis=1).astype(np.int64)
    return QPBEnergy(n=n, unary=np.zeros((n, 2)), edges=pairs, tables=tables)


def seed_penalty(e: QPBEnergy) -> float:
    """K = 1 + sum over tables of (max - min); dominates any pairwise savings."""
    if e.num_edges == 0:
        return 1.0
    spread = e.tables.max(axis=1) - e.tables.min(axis=1)
    return 1.0 + float(spread.sum())


def add_seeds(e: QPBEnergy, seeds, K: float | None = None) -> QPBEnergy:
    """Pin seeds: FG seed i gets theta_i(0) += K, BG seed theta_i(1) += K.

    ``seeds`` is a SeedMask or an (fg_indices, bg_indices) pair. Requires
    at least one seed of each class; overlapping classes are rejected.
    """
    if isinstance(seeds, SeedMask):
        fg, bg = seeds.fg_indices(), seeds.bg_indices()
    else:
        fg, bg = (np.asarray(s, dtype=np.int64) for s in seeds)
    if fg.size == 0 or bg.size == 0:
        raise ValueError("both seed classes required")
    if np.intersect1d(fg, bg).size:
        raise ValueError("conflicting seed")
    if K is None:
        K = seed_penalty(e)
    if K <= 0.0:
        raise ValueError("seed penalty K must be > 0")
    unary = e.unary.copy()
    unary[fg, 0] += K
    unary[bg, 1] += K
    return replace(e, unary=unary)


def evaluate(e: QPBEnergy, x) -> float:
    """Exact energy of a full labeling: constant + unaries + table lookups."""
    x = np.asarray(x)
    if x.shape != (e.n,):
        raise ValueError(f"labeling must have length {e.n}")
    if np.any((x != 0) & (x != 1)):
        raise ValueError("labeling contains unlabeled variables")
    total = e.constant + e.unary[np.arange(e.n), x].sum()
    if e.num_edges:
        idx = 2 * x[e.edges[:, 0]] + x[e.edges[:, 1]]
        total += e.tables[np.arange(e.num_edges), idx].sum()
    return total


def to_normal_form(e: QPBEnergy) -> QPBEnergy:
    """Reparameterize so tables have a zero per row and column, unary minima 0.

    Row and column minima of each pairwise table move into the incident
    unaries, then unary minima move into the constant. evaluate() is
    preserved exactly for every labeling (only additions/subtractions, so
    this is exact for integer energies too).
    """
    unary = e.unary.copy()
    tables = e.tables.copy()
    constant = e.constant
    if e.num_edges:
        u, v = e.edges[:, 0], e.edges[:, 1]
        row0 = np.minimum(tables[:, 0], tables[:, 1])
        row1 = np.minimum(tables[:, 2], tables[:, 3])
        tables[:, 0] -= row0
        tables[:, 1] -= row0
        tables[:, 2] -= row1
        tables[:, 3] -= row1
        np.add.at(unary[:, 0], u, row0)
        np.add.at(unary[:, 1], u, row1)
        col0 = np.minimum(tables[:, 0], tables[:, 2])
        col1 = np.minimum(tables[:, 1], tables[:, 3])
        tables[:, 0] -= col0
        tables[:, 2] -= col0
        tables[:, 1] -= col1
        tables[:, 3] -= col1
        np.add.at(unary[:, 0], v, col0)
        np.add.at(unary[:, 1], v, col1)
    shift = unary.min(axis=1)
    unary[:, 0] -= shift
    unary[:, 1] -= shift
    constant = constant + shift.sum()
    return replace(e, unary=unary, tables=tables, constant=constant)


def is_normal_form(e: QPBEnergy) -> bool:
    if e.unary.size and np.any(e.unary.min(axis=1) != 0):
        return False
    if e.num_edges:
        t = e.tables
        rows = (np.minimum(t[:, 0], t[:, 1]) != 0) | (np.minimum(t[:, 2], t[:, 3]) != 0)
        cols = (np.minimum(t[:, 0], t[:, 2]) != 0) | (np.minimum(t[:, 1], t[:, 3]) != 0)
        if np.any(rows | cols):
            return False
    return True


# ---------------------------------------------------------------------------
# Text interchange (for oracle cross-checks against other solvers)


def dump_energy(e: QPBEnergy, path) -> None:
    """DIMACS-like dump: `p qpbe n m`, unary lines `u t0 t1`, edge lines
    `e u v t00 t01 t10 t11`. Node ids are 0-based."""
    lines = [f"p qpbe {e.n} {e.num_edges}", f"c constant {float(e.constant)!r}"]
    for i in range(e.n):
        lines.append(f"u {i} {float(e.unary[i, 0])!r} {float(e.unary[i, 1])!r}")
    for idx in range(e.num_edges):
        u, v = (int(x) for x in e.edges[idx])
        t = [float(x) for x in e.tables[idx]]
        lines.append(f"e {u} {v} {t[0]!r} {t[1]!r} {t[2]!r} {t[3]!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_energy(path) -> QPBEnergy:
    n = m = None
    constant = 0.0
    unary = None
    pairs, tabs = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "p":
            n, m = int(parts[2]), int(parts[3])
            unary = np.zeros((n, 2))
        elif parts[0] == "c" and parts[1] == "constant":
            constant = float(parts[2])
        elif parts[0] == "u":
            unary[int(parts[1])] = (float(parts[2]), float(parts[3]))
        elif parts[0] == "e":
            pairs.append((int(parts[1]), int(parts[2])))
            tabs.append([float(t) for t in parts[3:7]])
    edges = np.asarray(pairs, dtype=np.int64).reshape(len(pairs), 2)
    tables = np.asarray(tabs).reshape(len(tabs), 4)
    return QPBEnergy(n=n, unary=unary, edges=edges, tables=tables, constant=constant)
