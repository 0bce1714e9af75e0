#!/usr/bin/env python3
"""Benchmark the compiled max-flow kernel against the pure-Python fallback.

Builds the solver networks of real segmentation energies at several image
sizes and times maxflow on each backend. Run from the repository root:

    python3 benchmarks/bench_core.py [--sizes 16,24,32,48] [--repeats 3]
"""

import argparse
import time

import numpy as np

from curvseg import core
from curvseg.curvature import CurvatureParams, effective_edges
from curvseg.energy import add_seeds, build_energy, to_normal_form
from curvseg.lattice import GrayImage
from curvseg.qpbo import build_network, quantize


def solver_network(side, seed=0):
    rng = np.random.default_rng(seed)
    img = GrayImage.from_array(rng.integers(0, 256, size=(side, side)) / 255.0)
    edges = effective_edges(img, CurvatureParams())
    e = build_energy(edges, img.num_pixels)
    n = img.num_pixels
    fg = np.array([n // 2 + side // 2])
    bg = np.concatenate([np.arange(side), np.arange(n - side, n)])
    e = add_seeds(e, (fg, bg))
    return build_network(to_normal_form(quantize(e)))


def time_backend(backend, net, repeats):
    args = (net.num_nodes, net.tails, net.heads, net.caps, net.source, net.sink)
    best = float("inf")
    flow = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        flow, _ = backend.maxflow(*args)
        best = min(best, time.perf_counter() - t0)
    return best, flow


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="16,24,32,48")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = {name: core.get_backend(name) for name in core.available_backends()}
    if "cython" not in backends:
        print("note: compiled extension not built; benchmarking python only")

    header = f"{'image':>8} {'nodes':>8} {'arcs':>9}"
    for name in backends:
        header += f" {name + ' (ms)':>14}"
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)

    for side in sizes:
        net = solver_network(side)
        row = f"{side}x{side:<5} {net.num_nodes:>7} {len(net.caps):>9}"
        times = {}
        flows = set()
        for name, backend in backends.items():
            elapsed, flow = time_backend(backend, net, args.repeats)
            times[name] = elapsed
            flows.add(flow)
            row += f" {elapsed * 1000:>14.2f}"
        assert len(flows) == 1, "backends disagree on max-flow value"
        if len(times) == 2:
            row += f" {times['python'] / times['cython']:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
