"""Max-flow kernel with backend selection at import time.

Prefers the compiled Cython extension and falls back to the pure-Python
implementation when the extension is unavailable. Set CURVSEG_BACKEND to
``python`` or ``cython`` to force a backend (the latter raises if the
extension is not built). Both backends return identical results.
"""

import os

from . import _maxflow_py

_FORCED = os.environ.get("CURVSEG_BACKEND", "").strip().lower()

if _FORCED == "python":
    _impl = _maxflow_py
else:
    try:
        from . import _maxflow as _impl
    except ImportError:
        if _FORCED == "cython":
            raise ImportError(
                "CURVSEG_BACKEND=cython but the compiled extension is not built; "
                "run `pip install -e . --no-build-isolation`"
            )
        _impl = _maxflow_py

BACKEND = _impl.BACKEND


def maxflow(num_nodes, tails, heads, caps, source, sink):
    """Max s-t flow and the residual source-reachable set.

    Arcs are (tail, head, capacity) with nonnegative integer capacities;
    reverse arcs are implicit. Returns (flow, uint8 array) where the array
    marks nodes reachable from the source in the final residual graph
    (the canonical minimal source side of a min cut).
    """
    return _impl.maxflow(num_nodes, tails, heads, caps, source, sink)


def get_backend(name: str):
    """Return a specific backend module ("python" or "cython") for tests/benchmarks."""
    if name == "python":
        return _maxflow_py
    if name == "cython":
        from . import _maxflow

        return _maxflow
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    names = ["python"]
    try:
        from . import _maxflow  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names
