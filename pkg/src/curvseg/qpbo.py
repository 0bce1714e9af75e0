"""Roof-duality (QPBO) solver with probing, backed by integer max-flow.

A normal-form integer energy maps onto a symmetric network over literal
nodes: variable i owns node i (literal x_i) and node n+i (literal not-x_i),
with source 2n and sink 2n+1. Arc capacities equal the normal-form
coefficients, so a labeling-consistent cut costs twice the energy above
the constant. After a max flow, variables whose literal nodes are split
by residual source-reachability receive persistent labels; the rest stay
unlabeled. Probing conditions unlabeled variables on both values and
turns agreements into fixations and disagreements into contractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import core
from .energy import UNLABELED, QPBEnergy, to_normal_form

DEFAULT_SCALE = 10**6
_QUANT_LIMIT = 2.0**62


@dataclass(frozen=True)
class FlowNetwork:
    """Capacitated arcs over 2n+2 nodes (literal pairs plus source/sink)."""

    num_nodes: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray

    @property
    def source(self) -> int:
        return self.num_nodes - 2

    @property
    def sink(self) -> int:
        return self.num_nodes - 1


@dataclass
class SolveReport:
    labeling: np.ndarray
    unlabeled_count: int
    lower_bound: float
    energy_of_completion: float
    probes_run: int
    runtime_ms: float


def quantize(e: QPBEnergy, scale: int = DEFAULT_SCALE) -> QPBEnergy:
    """Round scale*coefficient to int64 for exact flow arithmetic.

    Rejects coefficients whose scaled magnitude exceeds 2^62 (headroom is
    needed because the network doubles the energy).
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    limit = _QUANT_LIMIT / scale
    for arr in (e.unary, e.tables, np.asarray([e.constant])):
        if arr.size and np.abs(arr).max() > limit:
            raise ValueError("energy scale too large")
    return QPBEnergy(
        n=e.n,
        unary=np.round(e.unary * scale).astype(np.int64),
        edges=e.edges,
        tables=np.round(e.tables * scale).astype(np.int64),
        constant=int(round(e.constant * scale)),
    )


def build_network(e: QPBEnergy) -> FlowNetwork:
    """Symmetric literal network of a normal-form integer energy.

    Every posiform term of the doubled energy yields two arcs that are
    invariant under the involution swapping x_i with not-x_i and source
    with sink. Capacities equal the original coefficients because the
    doubling cancels the conventional halving.
    """
    n = e.n
    s, t = 2 * n, 2 * n + 1
    if (e.unary.size and e.unary.min() < 0) or (e.tables.size and e.tables.min() < 0):
        raise ValueError("network construction requires a normal-form energy")
    tails, heads, caps = [], [], []

    def _add(ts, hs, cs):
        keep = cs > 0
        if keep.any():
            tails.append(ts[keep])
            heads.append(hs[keep])
            caps.append(cs[keep])

    idx = np.arange(n, dtype=np.int64)
    th0, th1 = e.unary[:, 0], e.unary[:, 1]
    _add(np.full(n, s, dtype=np.int64), idx, th1)          # s -> P_i
    _add(n + idx, np.full(n, t, dtype=np.int64), th1)      # N_i -> t
    _add(np.full(n, s, dtype=np.int64), n + idx, th0)      # s -> N_i
    _add(idx, np.full(n, t, dtype=np.int64), th0)          # P_i -> t
    if e.num_edges:
        u, v = e.edges[:, 0], e.edges[:, 1]
        a, b, c, d = (e.tables[:, k] for k in range(4))
        _add(v, n + u, a)      # penalize (0,0): P_v -> N_u
        _add(u, n + v, a)      #               P_u -> N_v
        _add(u, v, b)          # penalize (0,1): P_u -> P_v
        _add(n + v, n + u, b)  #               N_v -> N_u
        _add(v, u, c)          # penalize (1,0): P_v -> P_u
        _add(n + u, n + v, c)  #               N_u -> N_v
        _add(n + v, u, d)      # penalize (1,1): N_v -> P_u
        _add(n + u, v, d)      #               N_u -> P_v
    if tails:
        tails = np.concatenate(tails)
        heads = np.concatenate(heads)
        caps = np.concatenate(caps)
    else:
        tails = np.empty(0, dtype=np.int64)
        heads = np.empty(0, dtype=np.int64)
        caps = np.empty(0, dtype=np.int64)
    return FlowNetwork(num_nodes=2 * n + 2, tails=tails, heads=heads, caps=caps)


def maxflow(net: FlowNetwork):
    """Max flow value and min-cut side assignment (source-reachable set)."""
    if net.caps.size and net.caps.min() < 0:
        raise ValueError("arc capacities must be nonnegative")
    return core.maxflow(
        net.num_nodes, net.tails, net.heads, net.caps, net.source, net.sink
    )


def solve_qpbo(e: QPBEnergy):
    """Weakly persistent partial labeling and roof-dual lower bound.

    Accepts any integer energy (normalizes internally, which is exact).
    Labeled variables can be fused into any labeling without increasing
    the energy; a fully labeled result is a global optimum.
    """
    if not e.is_integer():
        raise TypeError("solve_qpbo requires an integer energy; quantize() first")
    en = to_normal_form(e)
    net = build_network(en)
    flow, reach = maxflow(net)
    n = e.n
    p_side = reach[:n].astype(bool)
    n_side = reach[n : 2 * n].astype(bool)
    labeling = np.full(n, UNLABELED, dtype=np.int8)
    labeling[p_side & ~n_side] = 0
    labeling[n_side & ~p_side] = 1
    lower_bound = float(en.constant) + flow / 2.0
    return labeling, lower_bound


def fuse(partial: np.ndarray, base: np.ndarray) -> np.ndarray:
    """Overwrite ``base`` with the labeled entries of ``partial``."""
    return np.where(partial != UNLABELED, partial, base).astype(base.dtype)


def complete_labeling(labeling: np.ndarray, policy: str = "bg") -> np.ndarray:
    """Fill unlabeled entries: BG-fill with 0, FG-fill with 1."""
    if policy not in ("bg", "fg"):
        raise ValueError(f"unknown fallback policy {policy!r}")
    fill = 0 if policy == "bg" else 1
    return np.where(labeling == UNLABELED, fill, labeling).astype(np.int8)


# ---------------------------------------------------------------------------
# Probing (QPBOP)


@dataclass
class ProbeResult:
    labeling: np.ndarray
    probes_run: int
    events: list = field(default_factory=list)


class _Reduction:
    """Union-find with parity plus fixed values, for fix/contract bookkeeping."""

    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.parity = np.zeros(n, dtype=np.int8)  # x_i = x_parent ^ parity
        self.value = np.full(n, UNLABELED, dtype=np.int8)  # on roots only

    def find(self, i: int):
        p = 0
        while self.parent[i] != i:
            p ^= self.parity[i]
            i = self.parent[i]
        return int(i), p

    def fix(self, i: int, val: int):
        root, p = self.find(i)
        want = val ^ p
        if self.value[root] == UNLABELED:
            self.value[root] = want
        elif self.value[root] != want:
            raise ValueError("contradictory fixation during probing")

    def contract(self, u: int, v: int, parity: int):
        """Record x_u = x_v ^ parity by merging the roots."""
        ru, pu = self.find(u)
        rv, pv = self.find(v)
        if ru == rv:
            return
        rel = pu ^ pv ^ parity  # x_ru = x_rv ^ rel
        self.parent[ru] = rv
        self.parity[ru] = rel
        if self.value[ru] != UNLABELED:
            val = self.value[ru] ^ rel
            self.value[ru] = UNLABELED
            if self.value[rv] == UNLABELED:
                self.value[rv] = val
            elif self.value[rv] != val:
                raise ValueError("contradictory contraction during probing")

    def resolve_all(self):
        """(root, parity-to-root) arrays for every variable."""
        cur = self.parent.copy()
        par = self.parity.copy()
        while True:
            nxt = self.parent[cur]
            moving = nxt != cur
            if not moving.any():
                break
            par[moving] ^= self.parity[cur[moving]]
            cur[moving] = nxt[moving]
        return cur, par

    def labels(self) -> np.ndarray:
        root, par = self.resolve_all()
        rv = self.value[root]
        return np.where(rv != UNLABELED, rv ^ par, UNLABELED).astype(np.int8)

    def reduce(self, e: QPBEnergy):
        """Energy over active (unfixed) representatives, plus their ids.

        Pairwise tables are reindexed and parity-permuted, duplicate pairs
        re-accumulated, diagonal pairs folded into unaries, and fixed
        variables folded into unaries/constant.
        """
        root, par = self.resolve_all()
        rval = self.value[root]
        val = np.where(rval != UNLABELED, rval ^ par, UNLABELED).astype(np.int8)
        active_roots = np.unique(root[val == UNLABELED])
        k = active_roots.shape[0]
        new_id = np.full(e.n, -1, dtype=np.int64)
        new_id[active_roots] = np.arange(k)
        dtype = e.unary.dtype
        unary = np.zeros((k, 2), dtype=dtype)
        constant = e.constant

        fixed = val != UNLABELED
        if fixed.any():
            constant = constant + e.unary[fixed, val[fixed]].sum()
        act = ~fixed
        if act.any():
            rows = new_id[root[act]]
            flip = par[act].astype(np.int64)
            src = e.unary[act]
            np.add.at(unary[:, 0], rows, src[np.arange(src.shape[0]), flip])
            np.add.at(unary[:, 1], rows, src[np.arange(src.shape[0]), 1 - flip])

        pair_keys = {}
        pair_u, pair_v, pair_t = [], [], []
        if e.num_edges:
            u, v = e.edges[:, 0], e.edges[:, 1]
            tu, tv = val[u], val[v]
            pu, pv = par[u].astype(np.int64), par[v].astype(np.int64)
            ru, rv_ = new_id[root[u]], new_id[root[v]]
            t = e.tables

            both_fixed = (tu != UNLABELED) & (tv != UNLABELED)
            if both_fixed.any():
                sel = 2 * tu[both_fixed].astype(np.int64) + tv[both_fixed]
                constant = constant + t[both_fixed, sel].sum()

            ufix = (tu != UNLABELED) & (tv == UNLABELED)
            if ufix.any():
                a = tu[ufix].astype(np.int64)
                rows = rv_[ufix]
                p = pv[ufix]
                np.add.at(unary[:, 0], rows, t[ufix, 2 * a + p])
                np.add.at(unary[:, 1], rows, t[ufix, 2 * a + 1 - p])

            vfix = (tv != UNLABELED) & (tu == UNLABELED)
            if vfix.any():
                b = tv[vfix].astype(np.int64)
                rows = ru[vfix]
                p = pu[vfix]
                np.add.at(unary[:, 0], rows, t[vfix, 2 * p + b])
                np.add.at(unary[:, 1], rows, t[vfix, 2 * (1 - p) + b])

            live = (tu == UNLABELED) & (tv == UNLABELED)
            same = live & (ru == rv_)
            if same.any():
                rows = ru[same]
                p, q = pu[same], pv[same]
                np.add.at(unary[:, 0], rows, t[same, 2 * p + q])
                np.add.at(unary[:, 1], rows, t[same, 2 * (1 - p) + 1 - q])

            diff = live & (ru != rv_)
            if diff.any():
                rows = np.flatnonzero(diff)
                a_states = np.array([0, 0, 1, 1])
                b_states = np.array([0, 1, 0, 1])
                src = 2 * (a_states[None, :] ^ pu[rows, None]) + (
                    b_states[None, :] ^ pv[rows, None]
                )
                perm = t[rows[:, None], src]
                eu, ev = ru[rows], rv_[rows]
                swap = eu > ev
                if swap.any():
                    perm[swap] = perm[swap][:, [0, 2, 1, 3]]
                    eu[swap], ev[swap] = ev[swap], eu[swap].copy()
                order = np.lexsort((ev, eu))
                eu, ev, perm = eu[order], ev[order], perm[order]
                key = eu * k + ev
                uniq, inverse = np.unique(key, return_inverse=True)
                acc = np.zeros((uniq.shape[0], 4), dtype=dtype)
                np.add.at(acc, inverse, perm)
                pair_u = uniq // k
                pair_v = uniq % k
                pair_t = acc

        if len(pair_u):
            edges = np.stack([pair_u, pair_v], axis=1).astype(np.int64)
            tables = pair_t
        else:
            edges = np.empty((0, 2), dtype=np.int64)
            tables = np.empty((0, 4), dtype=dtype)
        reduced = QPBEnergy(n=k, unary=unary, edges=edges, tables=tables, constant=constant)
        return reduced, active_roots


def _condition(e: QPBEnergy, idx: int, val: int) -> QPBEnergy:
    """Fold variable ``idx`` at value ``val`` and renumber the rest."""
    n = e.n
    keep = np.ones(n, dtype=bool)
    keep[idx] = False
    remap = np.cumsum(keep) - 1
    unary = e.unary[keep].copy()
    constant = e.constant + e.unary[idx, val]
    edges, tables = e.edges, e.tables
    if e.num_edges:
        u, v = edges[:, 0], edges[:, 1]
        hit_u = u == idx
        hit_v = v == idx
        if hit_u.any():
            rows = remap[v[hit_u]]
            np.add.at(unary[:, 0], rows, tables[hit_u, 2 * val + 0])
            np.add.at(unary[:, 1], rows, tables[hit_u, 2 * val + 1])
        if hit_v.any():
            rows = remap[u[hit_v]]
            np.add.at(unary[:, 0], rows, tables[hit_v, 0 + val])
            np.add.at(unary[:, 1], rows, tables[hit_v, 2 + val])
        rest = ~(hit_u | hit_v)
        edges = remap[edges[rest]]
        tables = tables[rest]
    return QPBEnergy(n=n - 1, unary=unary, edges=edges, tables=tables, constant=constant)


def probe(e: QPBEnergy, current: np.ndarray, max_rounds: int = 10) -> ProbeResult:
    """Extend a QPBO labeling by conditioning unlabeled variables.

    Each still-unlabeled variable is tentatively fixed to 0 and 1 and the
    conditioned energies re-solved. A variable forced to one value by both
    conditionings is fixed; opposite values contract the pair; a branch
    whose roof dual cannot beat the other branch's certified optimum is
    pruned. Every deduction keeps at least one global optimum reachable.
    Variables are visited in ascending index order until a fixpoint or
    ``max_rounds``.
    """
    if not e.is_integer():
        raise TypeError("probe requires an integer energy; quantize() first")
    red = _Reduction(e.n)
    for i in np.flatnonzero(current != UNLABELED):
        red.fix(int(i), int(current[i]))
    probes = 0
    events = []
    for _ in range(max_rounds):
        reduced, roots = red.reduce(e)
        if reduced.n == 0:
            break
        lab_r, _ = solve_qpbo(reduced)
        labeled = np.flatnonzero(lab_r != UNLABELED)
        for q in labeled:
            red.fix(int(roots[q]), int(lab_r[q]))
        if labeled.size == reduced.n:
            break
        pending = [int(roots[q]) for q in range(reduced.n) if lab_r[q] == UNLABELED]
        changed = False
        solved = False
        for orig_v in pending:
            rv, _ = red.find(orig_v)
            if red.value[rv] != UNLABELED:
                continue
            reduced, roots = red.reduce(e)
            if reduced.n == 0:
                solved = True
                break
            idx = int(np.searchsorted(roots, rv))
            if idx >= roots.shape[0] or roots[idx] != rv:
                continue  # merged away by an earlier contraction
            lab0, lb0 = solve_qpbo(_condition(reduced, idx, 0))
            lab1, lb1 = solve_qpbo(_condition(reduced, idx, 1))
            probes += 2
            full0 = np.insert(lab0, idx, 0)
            full1 = np.insert(lab1, idx, 1)
            complete0 = not np.any(full0 == UNLABELED)
            complete1 = not np.any(full1 == UNLABELED)
            if (complete0 and complete1) or (complete0 and lb1 >= lb0) or (
                complete1 and lb0 >= lb1
            ):
                if complete0 and (not complete1 or lb0 <= lb1):
                    winner = full0
                else:
                    winner = full1
                for q in range(reduced.n):
                    red.fix(int(roots[q]), int(winner[q]))
                events.append(("solve", orig_v))
                solved = True
                break
            for q in range(reduced.n):
                if q == idx:
                    continue
                a0, a1 = int(full0[q]), int(full1[q])
                if a0 == UNLABELED or a1 == UNLABELED:
                    continue
                if a0 == a1:
                    red.fix(int(roots[q]), a0)
                    events.append(("fix", int(roots[q]), a0))
                else:
                    red.contract(int(roots[q]), orig_v, a0)
                    events.append(("contract", int(roots[q]), orig_v, a0))
                changed = True
        if solved or not changed:
            break
    return ProbeResult(labeling=red.labels(), probes_run=probes, events=events)
